#include "mgen/digest.hpp"
#include "mgen/error.hpp"
#include "mgen/mutagen.hpp"
#include "mgen/text.hpp"
#include "support/helpers.hpp"

#include <doctest.h>

#include <random>

using namespace mgen;
using namespace mgen::testing;
using nlohmann::json;

namespace {

const std::string kSource =
    "class A {\n"
    "    fun one(): Int {\n"
    "        return 1\n"
    "    }\n"
    "\n"
    "    fun two(): Int {\n"
    "        return 2\n"
    "    }\n"
    "}\n";

ClassUnderTest cut_a() { return {"A", "g", "src/A.kt", kSource, "src/ATest.kt", "class ATest\n"}; }

std::string marked(const std::string& before, const std::string& region, const std::string& after) {
    return before + "    // MUTANT <START>\n" + region + "    // MUTANT <END>\n" + after;
}

// one() mutated: untested by the fake suite, so it survives.
const std::string kSurvivor = marked("class A {\n    fun one(): Int {\n", "        return 0\n",
                                     "    }\n\n    fun two(): Int {\n        return 2\n    }\n}\n");
// two() mutated: the fake suite checks it.
const std::string kKilled = marked("class A {\n    fun one(): Int {\n        return 1\n    }\n\n    fun two(): Int {\n",
                                   "        return 3\n", "    }\n}\n");
const std::string kBroken = marked("class A {\n    fun one(): Int {\n", "        return BROKEN\n",
                                   "    }\n\n    fun two(): Int {\n        return 2\n    }\n}\n");

struct Fixture {
    TempDir dir;
    Corpus corpus;
    TargetAdapter adapter = shell_adapter(
        "if grep -q BROKEN src/A.kt; then exit 1; fi",
        "if grep -q 'return 2' src/A.kt; then echo PASS > test-results.txt; "
        "else printf 'FAIL\\ntestTwo\\n' > test-results.txt; fi");
    IssueSpec issue{"privacy", "Users must be able to hide their data.", {"diff-one", "diff-two"}};

    Fixture() {
        corpus = discover_targets(write_corpus(dir.path(), {{"src/A.kt", kSource}, {"src/ATest.kt", "class ATest\n"}},
                                               json::array({{{"id", "A"}, {"source", "src/A.kt"}, {"group", "g"}}})));
    }
};

}  // namespace

TEST_SUITE("mutagen") {

TEST_CASE("fault prompts embed class and tests in fences") {
    const IssueSpec issue{"l", "CTX", {"D1"}};
    const auto p = build_fault_prompt(issue, cut_a(), "D1");
    CHECK(p.find("```" + kSource + "```") != std::string::npos);
    CHECK(p.find("```class ATest\n```") != std::string::npos);
    CHECK(p.find("similar to D1.") != std::string::npos);
    auto no_tests = cut_a();
    no_tests.test_class_text.clear();
    CHECK(build_fault_prompt(issue, no_tests, "D1").find("``````") != std::string::npos);
}

TEST_CASE("two diffs give prompts that differ only in the diff slot") {
    const IssueSpec issue{"l", "CTX", {"DIFF-ALPHA", "DIFF-BETA"}};
    auto a = build_fault_prompt(issue, cut_a(), issue.example_diffs[0]);
    const auto b = build_fault_prompt(issue, cut_a(), issue.example_diffs[1]);
    CHECK(a != b);
    a.replace(a.find("DIFF-ALPHA"), 10, "DIFF-BETA");
    CHECK(a == b);
}

TEST_CASE("a balanced marker pair around a changed line") {
    const auto m = parse_mutant(fenced(kSurvivor), cut_a());
    CHECK(m.status == MutantStatus::Generated);
    REQUIRE(m.regions.size() == 1);
    CHECK(m.regions[0] == Region{4, 4});
    CHECK(text::split_lines(m.mutated_source)[3] == "        return 0");
    CHECK(m.original_digest == sha256_hex(kSource));
    CHECK(m.unmarked_source() == "class A {\n    fun one(): Int {\n        return 0\n    }\n\n    fun two(): Int {\n"
                                 "        return 2\n    }\n}\n");
}

TEST_CASE("one region per method") {
    const std::string src =
        "class A {\n    fun one(): Int {\n    // MUTANT <START>\n        return 0\n    // MUTANT <END>\n    }\n\n"
        "    fun two(): Int {\n    // MUTANT <START>\n        return -2\n        // extra\n    // MUTANT <END>\n    }\n}\n";
    const auto m = parse_mutant(fenced(src), cut_a());
    CHECK(m.status == MutantStatus::Generated);
    CHECK(m.regions == std::vector<Region>{{4, 4}, {10, 11}});
}

TEST_CASE("a deletion gives an empty region") {
    const std::string src =
        "class A {\n    fun one(): Int {\n        return 1\n    }\n\n    fun two(): Int {\n"
        "    // MUTANT <START>\n    // MUTANT <END>\n        return 2\n    }\n}\n";
    const auto m = parse_mutant(fenced(src), cut_a());
    CHECK(m.status == MutantStatus::Generated);
    REQUIRE(m.regions.size() == 1);
    CHECK(m.regions[0].last == m.regions[0].first - 1);
}

TEST_CASE("marker problems make the candidate invalid") {
    const std::map<std::string, std::string> cases{
        {"start without end", "class A {\n    // MUTANT <START>\n    fun one(): Int = 0\n}\n"},
        {"end without start", "class A {\n    fun one(): Int = 0\n    // MUTANT <END>\n}\n"},
        {"nested", "// MUTANT <START>\n// MUTANT <START>\nx\n// MUTANT <END>\n// MUTANT <END>\n"},
        {"inline", "class A { // MUTANT <START>\n}\n// MUTANT <END>\n"},
        {"no markers", kSource},
    };
    for (const auto& [name, src] : cases) {
        CAPTURE(name);
        const auto m = parse_mutant(fenced(src), cut_a());
        CHECK(m.status == MutantStatus::MarkerInvalid);
        CHECK_FALSE(m.invalid_reason.empty());
        CHECK(m.regions.empty());
    }
}

TEST_CASE("drift outside the regions") {
    SUBCASE("whitespace-only drift is tolerated") {
        std::string src = kSurvivor;
        src.replace(src.find("fun two(): Int {"), 16, "fun  two():  Int   {");
        src.insert(0, "\n");
        CHECK(parse_mutant(fenced(src), cut_a()).status == MutantStatus::Generated);
    }
    SUBCASE("a changed token outside the markers is not") {
        std::string src = kSurvivor;
        src.replace(src.find("return 2"), 8, "return 9");
        CHECK(parse_mutant(fenced(src), cut_a()).status == MutantStatus::MarkerInvalid);
    }
    SUBCASE("an inserted line outside the markers is not") {
        std::string src = kSurvivor;
        src.insert(src.find("    fun two()"), "    val leaked = secret\n");
        CHECK(parse_mutant(fenced(src), cut_a()).status == MutantStatus::MarkerInvalid);
    }
}

TEST_CASE("a reply without code has no block") {
    try {
        parse_mutant("I cannot help with that.", cut_a());
        FAIL("expected NoCodeBlock");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoCodeBlock);
    }
}

TEST_CASE("regions reproduce the original outside the marked spans") {
    // Oracle: splice random replacement spans into a random source by hand and
    // compare the parser's regions and outside text with the splice bookkeeping.
    std::mt19937 rng(20240117);
    for (int trial = 0; trial < 300; ++trial) {
        CAPTURE(trial);
        const int n = 3 + static_cast<int>(rng() % 20);
        std::vector<std::string> orig;
        for (int i = 0; i < n; ++i) orig.push_back("    val v" + std::to_string(i) + " = " + std::to_string(rng() % 97));
        std::string original;
        for (const auto& l : orig) original += l + "\n";

        std::vector<std::string> out;
        std::vector<Region> expected;
        std::vector<std::string> kept;
        int i = 0;
        while (i < n) {
            if (rng() % 4 == 0) {
                const int span = static_cast<int>(rng() % 3);  // original lines replaced
                const int added = static_cast<int>(rng() % 3);
                out.push_back("    // MUTANT <START>");
                const int first = static_cast<int>(out.size()) + 1;
                for (int k = 0; k < added; ++k) out.push_back("    mutated(" + std::to_string(trial) + ", " + std::to_string(k) + ")");
                expected.push_back({first, first + added - 1});
                out.push_back("    // MUTANT <END>");
                i += span;
                if (span == 0 && i < n) {
                    out.push_back(orig[static_cast<std::size_t>(i)]);
                    kept.push_back(orig[static_cast<std::size_t>(i)]);
                    ++i;
                }
            } else {
                out.push_back(orig[static_cast<std::size_t>(i)]);
                kept.push_back(orig[static_cast<std::size_t>(i)]);
                ++i;
            }
        }
        if (expected.empty()) continue;
        std::string mutated;
        for (const auto& l : out) mutated += l + "\n";

        ClassUnderTest cut{"R", "g", "R.kt", original, "", ""};
        const auto m = parse_mutant(fenced(mutated), cut);
        REQUIRE(m.status == MutantStatus::Generated);
        CHECK(m.regions == expected);

        const auto lines = text::split_lines(m.mutated_source);
        std::vector<std::string> outside;
        std::size_t r = 0;
        for (int ln = 1; ln <= static_cast<int>(lines.size()); ++ln) {
            const auto& l = lines[static_cast<std::size_t>(ln - 1)];
            if (text::trim(l) == kMutantStart || text::trim(l) == kMutantEnd) continue;
            while (r < m.regions.size() && m.regions[r].last < ln) ++r;
            if (r < m.regions.size() && ln >= m.regions[r].first) continue;
            outside.push_back(l);
        }
        CHECK(outside == kept);
    }
}

TEST_CASE("gating sorts candidates by build and existing tests") {
    Fixture f;
    const auto& cut = f.corpus.classes[0];
    auto gate = [&](const std::string& src) {
        auto m = parse_mutant(fenced(src), cut);
        m.mutant_id = "A-mx";
        return gate_candidate(m, f.corpus, cut, f.adapter);
    };
    const auto broken = gate(kBroken);
    CHECK(broken.candidate.status == MutantStatus::BuildFailed);
    CHECK(broken.build_result->outcome == Outcome::BuildFailed);
    CHECK_FALSE(broken.existing_test_result.has_value());
    const auto killed = gate(kKilled);
    CHECK(killed.candidate.status == MutantStatus::KilledByExistingTests);
    CHECK(killed.existing_test_result->failing_test_names == std::vector<std::string>{"testTwo"});
    CHECK(gate(kSurvivor).candidate.status == MutantStatus::BuildsAndPasses);
    CHECK(read_file(f.corpus.root / "src/A.kt") == kSource);
}

TEST_CASE("adapter failures during gating count as build failures with a cause") {
    Fixture f;
    f.adapter.test_command = {"sh", "-c", "exit 0", "{workspace}"};
    auto m = parse_mutant(fenced(kSurvivor), f.corpus.classes[0]);
    const auto out = gate_candidate(m, f.corpus, f.corpus.classes[0], f.adapter);
    CHECK(out.candidate.status == MutantStatus::BuildFailed);
    CHECK(out.cause.find("ResultFileMissing") != std::string::npos);
}

TEST_CASE("harvest stops at the first survivor") {
    Fixture f;
    int calls = 0;
    auto g = live_gateway(queued({fenced(kSurvivor), fenced(kKilled)}), &calls);
    const auto r = harvest_class(f.issue, f.corpus, f.corpus.classes[0], f.adapter, *g);
    REQUIRE(r.outcomes.size() == 1);
    CHECK(r.outcomes[0].candidate.status == MutantStatus::BuildsAndPasses);
    CHECK(r.outcomes[0].candidate.mutant_id == "A-m1");
    CHECK(r.survivor() == &r.outcomes[0]);
    CHECK(calls == 1);
}

TEST_CASE("harvest spends the whole budget when nothing survives") {
    Fixture f;
    auto g = live_gateway(queued({fenced(kBroken), fenced(kBroken), fenced(kBroken)}));
    const auto r = harvest_class(f.issue, f.corpus, f.corpus.classes[0], f.adapter, *g, {3, true});
    REQUIRE(r.outcomes.size() == 3);
    for (const auto& o : r.outcomes) CHECK(o.candidate.status == MutantStatus::BuildFailed);
    CHECK(r.survivor() == nullptr);
    CHECK(r.outcomes[2].candidate.mutant_id == "A-m3");
}

TEST_CASE("without stop-on-survivor every attempt is made") {
    Fixture f;
    auto g = live_gateway(queued({fenced(kSurvivor), fenced(kSurvivor), "no code here"}));
    const auto r = harvest_class(f.issue, f.corpus, f.corpus.classes[0], f.adapter, *g, {3, false});
    REQUIRE(r.outcomes.size() == 3);
    CHECK(r.outcomes[2].candidate.status == MutantStatus::MarkerInvalid);
    std::size_t generated = 0;
    std::size_t survived = 0;
    for (const auto& o : r.outcomes) {
        generated += o.candidate.status != MutantStatus::MarkerInvalid;
        survived += o.candidate.status == MutantStatus::BuildsAndPasses;
    }
    CHECK(survived <= generated);
    CHECK(generated <= r.outcomes.size());
}

TEST_CASE("example diffs rotate across attempts") {
    Fixture f;
    std::vector<std::string> prompts;
    auto g = live_gateway([&](const std::string& p) {
        prompts.push_back(p);
        return fenced(kBroken);
    });
    harvest_class(f.issue, f.corpus, f.corpus.classes[0], f.adapter, *g, {3, true});
    REQUIRE(prompts.size() == 3);
    CHECK(prompts[0].find("similar to diff-one") != std::string::npos);
    CHECK(prompts[1].find("similar to diff-two") != std::string::npos);
    CHECK(prompts[2].find("similar to diff-one") != std::string::npos);
}

TEST_CASE("an exhausted request cap leaves a partial harvest") {
    Fixture f;
    auto g = live_gateway(queued({fenced(kBroken), fenced(kBroken)}), nullptr, 1);
    const auto r = harvest_class(f.issue, f.corpus, f.corpus.classes[0], f.adapter, *g, {3, true});
    CHECK(r.budget_exhausted);
    CHECK(r.outcomes.size() == 1);
}

TEST_CASE("issue specs load inline and file diffs") {
    TempDir dir;
    write_file(dir.path() / "d.diff", "- check()\n");
    write_file(dir.path() / "issue.json",
               json{{"label", "privacy"}, {"concern_context", "ctx"},
                    {"example_diffs", {"inline", {{"file", "d.diff"}}}}}.dump());
    const auto issue = IssueSpec::load(dir.path() / "issue.json");
    CHECK(issue.example_diffs == std::vector<std::string>{"inline", "- check()\n"});
    write_file(dir.path() / "empty.json", json{{"concern_context", "ctx"}, {"example_diffs", json::array()}}.dump());
    CHECK_THROWS_AS(IssueSpec::load(dir.path() / "empty.json"), Error);
}

TEST_CASE("status names round-trip") {
    for (auto s : {MutantStatus::Generated, MutantStatus::MarkerInvalid, MutantStatus::BuildFailed,
                   MutantStatus::KilledByExistingTests, MutantStatus::BuildsAndPasses}) {
        CHECK(parse_mutant_status(to_string(s)) == s);
    }
}

}  // TEST_SUITE
