#include "mgen/report.hpp"

#include "mgen/error.hpp"
#include "mgen/text.hpp"

#include <nlohmann/json.hpp>

#include <iomanip>
#include <set>
#include <sstream>

using nlohmann::json;

namespace mgen {

long long percent_half_up(long long num, long long den) noexcept {
    if (den <= 0) return 0;
    return (200 * num + den) / (2 * den);
}

CorpusSummary summarize(const RunRecords& records) {
    CorpusSummary s;
    std::map<std::string, std::string> group_of;
    for (const auto& c : records.classes) {
        group_of[c.class_id] = c.group;
        ++s.groups[c.group].classes_under_test;
    }
    std::map<std::string, const VerdictRecord*> verdict_of;
    for (const auto& v : records.verdicts) verdict_of[v.mutant_id] = &v;

    for (const auto& m : records.mutants) {
        auto& g = s.groups[m.group];
        ++g.mutants_generated;
        switch (m.status) {
            case MutantStatus::Generated:
            case MutantStatus::MarkerInvalid: ++g.marker_invalid; break;
            case MutantStatus::BuildFailed: ++g.build_failed; break;
            case MutantStatus::KilledByExistingTests: ++g.killed_by_existing; break;
            case MutantStatus::BuildsAndPasses: {
                ++g.build_and_pass;
                const auto it = verdict_of.find(m.mutant_id);
                if (it == verdict_of.end()) {
                    ++g.no_answer;
                    break;
                }
                const auto& v = *it->second;
                if (v.stage != Stage::Judge) ++g.syntactically_identical;
                else if (v.decision == Decision::Equivalent) ++g.believed_equivalent;
                else if (v.decision == Decision::NonEquivalent) ++g.believed_non_equivalent;
                else ++g.no_answer;
                break;
            }
        }
    }

    std::map<std::string, std::set<std::string>> killing_classes;
    for (const auto& t : records.tests) {
        if (!t.certified) continue;
        auto& g = s.groups[t.group];
        ++g.certified_tests;
        killing_classes[t.group].insert(t.class_id);
        if (t.coverage_measured) {
            ++g.tests_with_coverage_measured;
            if (t.added_lines == 0) ++g.tests_without_coverage_delta;
        }
    }
    for (const auto& [group, classes] : killing_classes) {
        s.groups[group].classes_with_killing_test = static_cast<long long>(classes.size());
    }

    for (const auto& [_, g] : s.groups) {
        auto& t = s.totals;
        t.classes_under_test += g.classes_under_test;
        t.mutants_generated += g.mutants_generated;
        t.marker_invalid += g.marker_invalid;
        t.build_failed += g.build_failed;
        t.killed_by_existing += g.killed_by_existing;
        t.build_and_pass += g.build_and_pass;
        t.syntactically_identical += g.syntactically_identical;
        t.believed_equivalent += g.believed_equivalent;
        t.no_answer += g.no_answer;
        t.believed_non_equivalent += g.believed_non_equivalent;
        t.certified_tests += g.certified_tests;
        t.classes_with_killing_test += g.classes_with_killing_test;
        t.tests_with_coverage_measured += g.tests_with_coverage_measured;
        t.tests_without_coverage_delta += g.tests_without_coverage_delta;
    }
    return s;
}

namespace {

std::string count_pct(long long n, long long pct) { return std::to_string(n) + " (" + std::to_string(pct) + "%)"; }

void table(std::ostringstream& os, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& r : rows) {
        if (width.size() < r.size()) width.resize(r.size(), 0);
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i == 0) {
                line += r[i] + std::string(width[i] - r[i].size(), ' ');
            } else {
                line += "  " + std::string(width[i] - r[i].size(), ' ') + r[i];
            }
        }
        os << line << '\n';
    }
}

json group_json(const GroupSummary& g) {
    return json{
        {"classes_under_test", g.classes_under_test},
        {"mutants_generated", g.mutants_generated},
        {"marker_invalid", g.marker_invalid},
        {"build_failed", g.build_failed},
        {"killed_by_existing_tests", g.killed_by_existing},
        {"build_and_pass", {{"count", g.build_and_pass}, {"pct_of_generated", g.build_and_pass_pct()}}},
        {"syntactically_identical", {{"count", g.syntactically_identical}, {"pct_of_build_and_pass", g.identical_pct()}}},
        {"believed_equivalent", {{"count", g.believed_equivalent}, {"pct_of_build_and_pass", g.equivalent_pct()}}},
        {"no_answer", {{"count", g.no_answer}, {"pct_of_build_and_pass", g.no_answer_pct()}}},
        {"believed_non_equivalent",
         {{"count", g.believed_non_equivalent}, {"pct_of_build_and_pass", g.non_equivalent_pct()}}},
        {"certified_tests", g.certified_tests},
        {"classes_with_killing_test", {{"count", g.classes_with_killing_test}, {"pct_of_classes", g.killing_class_pct()}}},
        {"tests_without_coverage_delta",
         {{"count", g.tests_without_coverage_delta},
          {"measured", g.tests_with_coverage_measured},
          {"pct_of_certified", g.no_coverage_pct()}}},
    };
}

}  // namespace

std::string render_summary_table(const CorpusSummary& summary) {
    std::ostringstream os;
    std::vector<std::vector<std::string>> funnel{{"group", "classes", "generated", "build+pass", "identical",
                                                  "equivalent", "no answer", "non-equivalent"}};
    std::vector<std::vector<std::string>> tests{{"group", "certified", "classes w/ kill", "no coverage delta"}};
    auto add = [&](const std::string& name, const GroupSummary& g) {
        funnel.push_back({name, std::to_string(g.classes_under_test), std::to_string(g.mutants_generated),
                          count_pct(g.build_and_pass, g.build_and_pass_pct()),
                          count_pct(g.syntactically_identical, g.identical_pct()),
                          count_pct(g.believed_equivalent, g.equivalent_pct()),
                          count_pct(g.no_answer, g.no_answer_pct()),
                          count_pct(g.believed_non_equivalent, g.non_equivalent_pct())});
        tests.push_back({name, std::to_string(g.certified_tests),
                         count_pct(g.classes_with_killing_test, g.killing_class_pct()),
                         count_pct(g.tests_without_coverage_delta, g.no_coverage_pct())});
    };
    for (const auto& [name, g] : summary.groups) add(name, g);
    add("Totals", summary.totals);
    os << "Mutant funnel\n";
    table(os, funnel);
    os << "\nCertified tests\n";
    table(os, tests);
    return os.str();
}

json summary_to_json(const CorpusSummary& summary) {
    json groups = json::object();
    for (const auto& [name, g] : summary.groups) groups[name] = group_json(g);
    return json{{"groups", groups}, {"totals", group_json(summary.totals)}};
}

std::string render_diff_summary(const TestCandidate& candidate, const AssuranceReport& report,
                                const MutantCandidate& mutant, const ClassUnderTest& cut) {
    if (!report.certified()) throw Error(ErrorCode::NotCertified, candidate.candidate_id + " is not certified");
    std::ostringstream os;
    os << "New tests for " << cut.id << " (" << cut.test_class_path << ")\n";
    for (const auto& name : candidate.new_test_names) os << "  - " << name << '\n';
    os << "\nThese tests catch a simulated fault in " << cut.source_path
       << " that no existing test catches. Example fault (" << mutant.mutant_id << "):\n";
    const auto lines = text::split_lines(mutant.mutated_source);
    for (const auto& r : mutant.regions) {
        os << "  @@ lines " << r.first << "-" << r.last << " @@\n";
        for (int n = r.first; n <= r.last; ++n) {
            os << "  " << std::setw(4) << n << " | " << lines[static_cast<std::size_t>(n - 1)] << '\n';
        }
    }
    os << "\nAssurances\n";
    os << "  builds: yes\n";
    os << "  passes on the original: " << report.run_count << "/" << report.run_count << " runs\n";
    os << "  fails on the fault:";
    for (const auto& n : report.failing_new_tests) os << ' ' << n;
    os << '\n';
    if (report.coverage_delta && !report.coverage_delta->empty()) {
        os << "\nAdds coverage\n";
        for (const auto& [file, added] : *report.coverage_delta) {
            os << "  " << file << ":";
            bool first = true;
            for (int n : added) {
                os << (first ? " " : ",") << n;
                first = false;
            }
            os << '\n';
        }
    }
    return os.str();
}

}  // namespace mgen
