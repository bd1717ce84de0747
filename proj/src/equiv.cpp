#include "mgen/equiv.hpp"

#include "mgen/error.hpp"

#include <cmath>

namespace mgen {

std::string_view to_string(Decision d) noexcept {
    switch (d) {
        case Decision::Equivalent: return "Equivalent";
        case Decision::NonEquivalent: return "NonEquivalent";
        case Decision::NoAnswer: return "NoAnswer";
    }
    return "?";
}

std::string_view to_string(Stage s) noexcept {
    switch (s) {
        case Stage::ByteIdentity: return "ByteIdentity";
        case Stage::StrippedIdentity: return "StrippedIdentity";
        case Stage::Judge: return "Judge";
    }
    return "?";
}

Decision parse_decision(std::string_view s) {
    for (auto d : {Decision::Equivalent, Decision::NonEquivalent, Decision::NoAnswer}) {
        if (to_string(d) == s) return d;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown decision '" + std::string(s) + "'");
}

Stage parse_stage(std::string_view s) {
    for (auto st : {Stage::ByteIdentity, Stage::StrippedIdentity, Stage::Judge}) {
        if (to_string(st) == s) return st;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown stage '" + std::string(s) + "'");
}

std::string_view to_string(EvalMode m) noexcept {
    switch (m) {
        case EvalMode::UnsureExcluded: return "UnsureExcluded";
        case EvalMode::UnsureAsEquivalent: return "UnsureAsEquivalent";
        case EvalMode::IdenticalIncluded: return "IdenticalIncluded";
        case EvalMode::StripThenJudge: return "StripThenJudge";
    }
    return "?";
}

EquivalenceVerdict screen_sources(const std::string& original, const std::string& mutant_source,
                                  const CommentGrammar& grammar, Gateway& gateway) {
    EquivalenceVerdict v;
    if (original == mutant_source) {
        v.decision = Decision::Equivalent;
        v.stage = Stage::ByteIdentity;
        return v;
    }
    if (strip_comments(original, grammar) == strip_comments(mutant_source, grammar)) {
        v.decision = Decision::Equivalent;
        v.stage = Stage::StrippedIdentity;
        return v;
    }
    v.stage = Stage::Judge;
    try {
        const auto prompt = render(shipped_template(TemplateName::EquivalenceDetector),
                                   {{"class_version1", original}, {"class_version2", mutant_source}});
        const auto answer = extract_braced_token(gateway.complete(prompt));
        switch (answer.token) {
            case BracedToken::Yes: v.decision = Decision::Equivalent; break;
            case BracedToken::No:
                v.decision = Decision::NonEquivalent;
                v.judge_explanation = answer.explanation;
                break;
            case BracedToken::NoAnswer: v.decision = Decision::NoAnswer; break;
        }
    } catch (const Error& e) {
        v.decision = Decision::NoAnswer;
        v.cause = e.what();
    }
    return v;
}

EquivalenceVerdict screen(const std::string& original, const MutantCandidate& mutant, const CommentGrammar& grammar,
                          Gateway& gateway) {
    if (mutant.status != MutantStatus::BuildsAndPasses) {
        throw Error(ErrorCode::InvalidArgument, "only build-and-pass mutants are screened");
    }
    return screen_sources(original, mutant.unmarked_source(), grammar, gateway);
}

std::optional<double> ConfusionMatrix::precision() const {
    if (tp + fp == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::optional<double> ConfusionMatrix::recall() const {
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

Score score(const std::vector<LabeledVerdict>& items, EvalMode mode) {
    ConfusionMatrix m;
    long long counted = 0;
    for (const auto& item : items) {
        bool predicted_equivalent = false;
        switch (item.verdict.stage) {
            case Stage::ByteIdentity:
                if (mode != EvalMode::IdenticalIncluded && mode != EvalMode::StripThenJudge) continue;
                predicted_equivalent = true;
                break;
            case Stage::StrippedIdentity:
                if (mode != EvalMode::StripThenJudge) continue;
                predicted_equivalent = true;
                break;
            case Stage::Judge:
                if (item.verdict.decision == Decision::NoAnswer) {
                    if (mode == EvalMode::UnsureExcluded) continue;
                    predicted_equivalent = true;
                } else {
                    predicted_equivalent = item.verdict.decision == Decision::Equivalent;
                }
                break;
        }
        ++counted;
        if (predicted_equivalent) {
            ++(item.truly_equivalent ? m.tp : m.fp);
        } else {
            ++(item.truly_equivalent ? m.fn : m.tn);
        }
    }
    if (counted == 0) {
        throw Error(ErrorCode::EmptyAfterExclusion, "no verdicts counted under " + std::string(to_string(mode)));
    }
    return {m, m.precision(), m.recall()};
}

double round_half_up(double value, int places) {
    const double scale = std::pow(10.0, places);
    // The epsilon absorbs representation error such as 0.125 stored as 0.12499999.
    return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

}  // namespace mgen
