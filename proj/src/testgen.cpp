#include "mgen/testgen.hpp"

#include "mgen/equiv.hpp"
#include "mgen/error.hpp"

#include <algorithm>
#include <regex>

namespace mgen {

std::string_view to_string(RejectReason r) noexcept {
    switch (r) {
        case RejectReason::BuildFailed: return "BuildFailed";
        case RejectReason::FlakyOrFailing: return "FlakyOrFailing";
        case RejectReason::DoesNotKill: return "DoesNotKill";
        case RejectReason::MutantBuildFailed: return "MutantBuildFailed";
        case RejectReason::StaleMutant: return "StaleMutant";
        case RejectReason::Timeout: return "Timeout";
    }
    return "?";
}

std::vector<std::string> find_test_names(std::string_view test_class, const TargetAdapter& adapter) {
    const std::string code = remove_comments(test_class, adapter.comment_grammar);
    const std::regex pattern(adapter.test_method_pattern, std::regex::ECMAScript);
    std::vector<std::string> names;
    for (std::sregex_iterator it(code.begin(), code.end(), pattern), end; it != end; ++it) {
        std::string name = (*it)[1].str();
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
    }
    return names;
}

std::string build_test_prompt(const std::string& original, const MutantCandidate& mutant,
                              const std::string& existing_tests) {
    return render(shipped_template(TemplateName::MakeTest), {{"original_class", original},
                                                            {"mutated_class", mutant.mutated_source},
                                                            {"existing_test_class", existing_tests}});
}

TestCandidate parse_tests(std::string_view response, const std::string& existing_tests,
                          const TargetAdapter& adapter) {
    const auto blocks = extract_fenced_code(response);
    if (blocks.empty()) throw Error(ErrorCode::NoCodeBlock, "test response has no fenced code");
    TestCandidate c;
    c.extended_test_class = blocks.front().text;
    if (!existing_tests.empty() && existing_tests.back() == '\n') c.extended_test_class.push_back('\n');

    const auto before = find_test_names(existing_tests, adapter);
    const auto after = find_test_names(c.extended_test_class, adapter);
    std::vector<std::string> dropped;
    for (const auto& name : before) {
        if (std::find(after.begin(), after.end(), name) == after.end()) dropped.push_back(name);
    }
    if (!dropped.empty()) {
        std::string msg = "extension drops existing tests:";
        for (const auto& d : dropped) msg += " " + d;
        throw Error(ErrorCode::NotAnExtension, msg);
    }
    for (const auto& name : after) {
        if (std::find(before.begin(), before.end(), name) == before.end()) c.new_test_names.push_back(name);
    }
    if (c.new_test_names.empty()) throw Error(ErrorCode::NoNewTests, "extension adds no test methods");
    return c;
}

AssuranceReport assure(const TestCandidate& candidate, const MutantCandidate& mutant, const Corpus& corpus,
                       const ClassUnderTest& cut, const TargetAdapter& adapter, const AssureOptions& options) {
    if (options.repeats < 1) throw Error(ErrorCode::InvalidArgument, "repeats must be at least 1");
    AssuranceReport report;
    auto reject = [&](RejectReason why, std::string detail) {
        report.rejection = why;
        report.detail = std::move(detail);
        return report;
    };

    {
        auto original = materialize_workspace(corpus, cut, {{cut.test_class_path, candidate.extended_test_class}});
        const auto build = run_build(original, adapter);
        if (build.outcome == Outcome::Timeout) return reject(RejectReason::Timeout, "build timed out on original");
        if (build.outcome != Outcome::AllPassed) return reject(RejectReason::BuildFailed, "extended tests do not build");
        report.buildable = true;

        for (int run = 1; run <= options.repeats; ++run) {
            const auto result = run_tests(original, adapter);
            report.run_count = run;
            if (result.outcome == Outcome::Timeout) {
                return reject(RejectReason::Timeout, "run " + std::to_string(run) + " timed out on original");
            }
            if (result.outcome != Outcome::AllPassed) {
                std::string names;
                for (const auto& n : result.failing_test_names) names += " " + n;
                return reject(RejectReason::FlakyOrFailing, "run " + std::to_string(run) + " of " +
                                                                std::to_string(options.repeats) +
                                                                " failed on original:" + names);
            }
        }
        report.passes_on_original = true;
    }

    {
        auto mutated = materialize_workspace(
            corpus, cut, {{cut.source_path, mutant.mutated_source}, {cut.test_class_path, candidate.extended_test_class}},
            MutatedVariant{mutant.mutant_id});
        const auto build = run_build(mutated, adapter);
        if (build.outcome != Outcome::AllPassed) {
            return reject(RejectReason::MutantBuildFailed, "extended tests do not build against the mutant");
        }
        const auto result = run_tests(mutated, adapter);
        if (result.outcome == Outcome::Timeout) return reject(RejectReason::Timeout, "mutant run timed out");
        std::vector<std::string> old_failures;
        for (const auto& name : result.failing_test_names) {
            const bool is_new = std::find(candidate.new_test_names.begin(), candidate.new_test_names.end(), name) !=
                                candidate.new_test_names.end();
            (is_new ? report.failing_new_tests : old_failures).push_back(name);
        }
        if (!old_failures.empty()) {
            std::string names;
            for (const auto& n : old_failures) names += " " + n;
            return reject(RejectReason::StaleMutant, "existing tests fail on the mutant:" + names);
        }
        report.kills_mutant = !report.failing_new_tests.empty();
        if (!report.kills_mutant) return reject(RejectReason::DoesNotKill, "no new test fails on the mutant");
    }

    if (options.measure_coverage && adapter.coverage_command) {
        auto baseline = materialize_workspace(corpus, cut);
        auto extended = materialize_workspace(corpus, cut, {{cut.test_class_path, candidate.extended_test_class}});
        report.coverage_delta =
            coverage_added(measure_line_coverage(baseline, adapter), measure_line_coverage(extended, adapter));
    }
    return report;
}

const HardenAttempt* HardenResult::certified() const {
    for (const auto& a : attempts) {
        if (a.report && a.report->certified()) return &a;
    }
    return nullptr;
}

HardenResult harden(const MutantCandidate& mutant, const Corpus& corpus, const ClassUnderTest& cut,
                    const TargetAdapter& adapter, Gateway& gateway, const HardenOptions& options) {
    HardenResult result;
    const std::string prompt = build_test_prompt(cut.source_text, mutant, cut.test_class_text);
    for (int cycle = 1; cycle <= options.retries; ++cycle) {
        HardenAttempt attempt;
        std::string response;
        try {
            response = gateway.complete(prompt);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::BudgetExceeded) {
                result.budget_exhausted = true;
                break;
            }
            if (e.code() != ErrorCode::BackendUnavailable) throw;
            attempt.rejection = e.what();
            result.attempts.push_back(std::move(attempt));
            break;
        }
        try {
            attempt.candidate = parse_tests(response, cut.test_class_text, adapter);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoCodeBlock && e.code() != ErrorCode::NoNewTests &&
                e.code() != ErrorCode::NotAnExtension) {
                throw;
            }
            attempt.rejection = e.what();
            result.attempts.push_back(std::move(attempt));
            continue;
        }
        attempt.candidate->mutant_id = mutant.mutant_id;
        attempt.candidate->candidate_id = mutant.mutant_id + "-t" + std::to_string(cycle);
        attempt.candidate->provenance = request_digest({gateway.config().model, prompt, gateway.config().params});
        try {
            attempt.report = assure(*attempt.candidate, mutant, corpus, cut, adapter, options.assure);
        } catch (const Error& e) {
            attempt.rejection = e.what();
            result.attempts.push_back(std::move(attempt));
            continue;
        }
        const bool done = attempt.report->certified();
        if (!done) {
            attempt.rejection = std::string(to_string(*attempt.report->rejection)) + ": " + attempt.report->detail;
        }
        result.attempts.push_back(std::move(attempt));
        if (done) break;
    }
    return result;
}

}  // namespace mgen
