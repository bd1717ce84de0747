#pragma once

#include "mgen/corpus.hpp"
#include "mgen/llm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mgen {

struct IssueSpec {
    std::string label;
    std::string concern_context;
    std::vector<std::string> example_diffs;

    void validate() const;
    static IssueSpec load(const std::filesystem::path& path);
};

inline constexpr std::string_view kMutantStart = "// MUTANT <START>";
inline constexpr std::string_view kMutantEnd = "// MUTANT <END>";

/// Inclusive 1-based line range of mutated content, marker lines excluded.
/// An empty region (pure deletion) has last == first - 1.
struct Region {
    int first = 0;
    int last = 0;

    friend bool operator==(const Region&, const Region&) = default;
};

enum class MutantStatus { Generated, MarkerInvalid, BuildFailed, KilledByExistingTests, BuildsAndPasses };

std::string_view to_string(MutantStatus s) noexcept;
MutantStatus parse_mutant_status(std::string_view s);

struct MutantCandidate {
    std::string mutant_id;
    std::string class_id;
    std::string mutated_source;
    std::vector<Region> regions;
    MutantStatus status = MutantStatus::Generated;
    std::string invalid_reason;
    std::string provenance;  // request digest of the generating exchange
    std::string original_digest;

    /// mutated_source with the marker lines removed.
    [[nodiscard]] std::string unmarked_source() const;
};

std::string build_fault_prompt(const IssueSpec& issue, const ClassUnderTest& cut, const std::string& diff);

/// Throws NoCodeBlock when the response has no fenced block.
MutantCandidate parse_mutant(std::string_view response, const ClassUnderTest& original);

struct MutantGateOutcome {
    MutantCandidate candidate;
    std::optional<TestRunResult> build_result;
    std::optional<TestRunResult> existing_test_result;
    std::string cause;
};

MutantGateOutcome gate_candidate(MutantCandidate candidate, const Corpus& corpus, const ClassUnderTest& cut,
                                 const TargetAdapter& adapter);

struct HarvestOptions {
    int budget = 3;
    bool stop_on_first_survivor = true;
};

struct HarvestResult {
    std::vector<MutantGateOutcome> outcomes;
    bool budget_exhausted = false;  // the gateway request cap was hit
    std::vector<std::string> errors;

    [[nodiscard]] const MutantGateOutcome* survivor() const;
};

HarvestResult harvest_class(const IssueSpec& issue, const Corpus& corpus, const ClassUnderTest& cut,
                            const TargetAdapter& adapter, Gateway& gateway, const HarvestOptions& options = {});

}  // namespace mgen
