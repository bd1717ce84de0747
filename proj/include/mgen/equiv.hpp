#pragma once

#include "mgen/corpus.hpp"
#include "mgen/llm.hpp"
#include "mgen/mutagen.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mgen {

/// Source text with comments removed (string literals intact) and whitespace
/// collapsed: single spaces inside a line, no blank lines, no indentation.
struct NormalizedForm {
    std::string token_text;
    bool unterminated_comment = false;

    friend bool operator==(const NormalizedForm& a, const NormalizedForm& b) { return a.token_text == b.token_text; }
};

NormalizedForm strip_comments(std::string_view source, const CommentGrammar& grammar);

/// Comment removal only; line structure and whitespace are kept.
std::string remove_comments(std::string_view source, const CommentGrammar& grammar);

enum class Decision { Equivalent, NonEquivalent, NoAnswer };
enum class Stage { ByteIdentity, StrippedIdentity, Judge };

std::string_view to_string(Decision d) noexcept;
std::string_view to_string(Stage s) noexcept;
Decision parse_decision(std::string_view s);
Stage parse_stage(std::string_view s);

struct EquivalenceVerdict {
    Decision decision = Decision::NoAnswer;
    Stage stage = Stage::Judge;
    std::optional<std::string> judge_explanation;
    std::optional<std::string> cause;  // gateway failure that produced NoAnswer
};

/// Staged detector on raw texts: byte identity, stripped identity, then the judge.
EquivalenceVerdict screen_sources(const std::string& original, const std::string& mutant_source,
                                  const CommentGrammar& grammar, Gateway& gateway);

EquivalenceVerdict screen(const std::string& original, const MutantCandidate& mutant,
                          const CommentGrammar& grammar, Gateway& gateway);

struct ConfusionMatrix {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;

    [[nodiscard]] std::optional<double> precision() const;
    [[nodiscard]] std::optional<double> recall() const;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

enum class EvalMode { UnsureExcluded, UnsureAsEquivalent, IdenticalIncluded, StripThenJudge };

inline constexpr EvalMode kAllEvalModes[] = {EvalMode::UnsureExcluded, EvalMode::UnsureAsEquivalent,
                                             EvalMode::IdenticalIncluded, EvalMode::StripThenJudge};

std::string_view to_string(EvalMode m) noexcept;

struct LabeledVerdict {
    EquivalenceVerdict verdict;
    bool truly_equivalent = false;
};

struct Score {
    ConfusionMatrix matrix;
    std::optional<double> precision;
    std::optional<double> recall;
};

/// Positive class is "equivalent". Throws EmptyAfterExclusion when no item counts.
Score score(const std::vector<LabeledVerdict>& items, EvalMode mode);

/// Half-up rounding to `places` decimals.
double round_half_up(double value, int places);

}  // namespace mgen
