#pragma once

#include "mgen/corpus.hpp"
#include "mgen/llm.hpp"
#include "mgen/mutagen.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mgen {

struct TestCandidate {
    std::string candidate_id;
    std::string mutant_id;
    std::string extended_test_class;
    std::vector<std::string> new_test_names;
    std::string provenance;
};

enum class RejectReason { BuildFailed, FlakyOrFailing, DoesNotKill, MutantBuildFailed, StaleMutant, Timeout };

std::string_view to_string(RejectReason r) noexcept;

struct AssuranceReport {
    bool buildable = false;
    bool passes_on_original = false;
    int run_count = 0;
    bool kills_mutant = false;
    std::vector<std::string> failing_new_tests;
    std::optional<CoverageMap> coverage_delta;
    std::optional<RejectReason> rejection;  // empty means Certified
    std::string detail;

    [[nodiscard]] bool certified() const noexcept { return !rejection.has_value(); }
};

/// Test method names in declaration order, comments ignored.
std::vector<std::string> find_test_names(std::string_view test_class, const TargetAdapter& adapter);

std::string build_test_prompt(const std::string& original, const MutantCandidate& mutant,
                              const std::string& existing_tests);

/// Throws NoCodeBlock, NoNewTests, or NotAnExtension.
TestCandidate parse_tests(std::string_view response, const std::string& existing_tests,
                          const TargetAdapter& adapter);

struct AssureOptions {
    int repeats = 5;
    bool measure_coverage = true;
};

AssuranceReport assure(const TestCandidate& candidate, const MutantCandidate& mutant, const Corpus& corpus,
                       const ClassUnderTest& cut, const TargetAdapter& adapter, const AssureOptions& options = {});

struct HardenAttempt {
    std::optional<TestCandidate> candidate;
    std::optional<AssuranceReport> report;
    std::string rejection;  // empty for the certified attempt
};

struct HardenResult {
    std::vector<HardenAttempt> attempts;
    bool budget_exhausted = false;

    [[nodiscard]] const HardenAttempt* certified() const;
};

struct HardenOptions {
    int retries = 3;
    AssureOptions assure;
};

HardenResult harden(const MutantCandidate& mutant, const Corpus& corpus, const ClassUnderTest& cut,
                    const TargetAdapter& adapter, Gateway& gateway, const HardenOptions& options = {});

}  // namespace mgen
