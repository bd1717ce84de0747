#pragma once

#include "mgen/equiv.hpp"
#include "mgen/mutagen.hpp"
#include "mgen/testgen.hpp"

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mgen {

struct ClassRecord {
    std::string class_id;
    std::string group = "default";
};

struct MutantRecord {
    std::string mutant_id;
    std::string class_id;
    std::string group = "default";
    MutantStatus status = MutantStatus::Generated;
};

struct VerdictRecord {
    std::string mutant_id;
    Decision decision = Decision::NoAnswer;
    Stage stage = Stage::Judge;
};

struct TestRecord {
    std::string candidate_id;
    std::string mutant_id;
    std::string class_id;
    std::string group = "default";
    bool certified = false;
    bool coverage_measured = false;
    std::size_t added_lines = 0;
};

/// Everything summarize() needs; loaded from a run's output directory or built synthetically.
struct RunRecords {
    std::vector<ClassRecord> classes;
    std::vector<MutantRecord> mutants;
    std::vector<VerdictRecord> verdicts;
    std::vector<TestRecord> tests;
};

/// Whole-number percentage of num/den, rounded half-up; 0 when den is 0.
long long percent_half_up(long long num, long long den) noexcept;

struct GroupSummary {
    long long classes_under_test = 0;
    long long mutants_generated = 0;
    long long marker_invalid = 0;
    long long build_failed = 0;
    long long killed_by_existing = 0;
    long long build_and_pass = 0;
    long long syntactically_identical = 0;
    long long believed_equivalent = 0;
    long long no_answer = 0;
    long long believed_non_equivalent = 0;
    long long certified_tests = 0;
    long long classes_with_killing_test = 0;
    long long tests_with_coverage_measured = 0;
    long long tests_without_coverage_delta = 0;

    [[nodiscard]] long long build_and_pass_pct() const noexcept { return percent_half_up(build_and_pass, mutants_generated); }
    [[nodiscard]] long long identical_pct() const noexcept { return percent_half_up(syntactically_identical, build_and_pass); }
    [[nodiscard]] long long equivalent_pct() const noexcept { return percent_half_up(believed_equivalent, build_and_pass); }
    [[nodiscard]] long long no_answer_pct() const noexcept { return percent_half_up(no_answer, build_and_pass); }
    [[nodiscard]] long long non_equivalent_pct() const noexcept { return percent_half_up(believed_non_equivalent, build_and_pass); }
    [[nodiscard]] long long killing_class_pct() const noexcept { return percent_half_up(classes_with_killing_test, classes_under_test); }
    [[nodiscard]] long long no_coverage_pct() const noexcept { return percent_half_up(tests_without_coverage_delta, certified_tests); }
};

struct CorpusSummary {
    std::map<std::string, GroupSummary> groups;
    GroupSummary totals;
};

CorpusSummary summarize(const RunRecords& records);

std::string render_summary_table(const CorpusSummary& summary);
nlohmann::json summary_to_json(const CorpusSummary& summary);

/// Reviewer-facing text for a certified test. Throws NotCertified otherwise.
std::string render_diff_summary(const TestCandidate& candidate, const AssuranceReport& report,
                                const MutantCandidate& mutant, const ClassUnderTest& cut);

}  // namespace mgen
