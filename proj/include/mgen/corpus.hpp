#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mgen {

struct BlockComment {
    std::string open;
    std::string close;
};

struct StringLiteral {
    std::string open;
    std::string close;
    bool backslash_escapes = true;
    bool multiline = false;
};

/// Lexical rules needed to tell comments from code and literals.
struct CommentGrammar {
    std::vector<std::string> line_prefixes{"//"};
    std::vector<BlockComment> blocks{{"/*", "*/"}};
    std::vector<StringLiteral> literals{
        {"\"\"\"", "\"\"\"", false, true},
        {"\"", "\"", true, false},
        {"'", "'", true, false},
    };

    /// Throws AdapterInvalid when the grammar is empty or a block pair is degenerate.
    void validate() const;
};

/// Maps `src/Foo.kt` to `src/FooTest.kt` (suffix before the extension),
/// optionally rewriting a leading directory prefix.
struct TestFileConvention {
    std::string suffix = "Test";
    std::string source_prefix;
    std::string test_prefix;

    [[nodiscard]] std::string test_path_for(const std::string& source_path) const;
};

/// Command contract for a system under test. Every command token may contain
/// `{workspace}`, which expands to the workspace root.
struct TargetAdapter {
    std::vector<std::string> build_command;
    std::vector<std::string> test_command;
    std::optional<std::vector<std::string>> coverage_command;
    CommentGrammar comment_grammar;
    TestFileConvention test_file_convention;
    /// ECMAScript regex; capture group 1 is a test method name.
    std::string test_method_pattern = R"(@Test\s+fun\s+`?([A-Za-z_][A-Za-z0-9_ ]*)`?\s*\()";
    std::chrono::milliseconds timeout{120000};

    void validate() const;
    static TargetAdapter from_json(const nlohmann::json& j);
};

struct ClassUnderTest {
    std::string id;
    std::string group = "default";
    std::string source_path;
    std::string source_text;
    std::string test_class_path;
    std::string test_class_text;
};

struct DiscoveryWarning {
    std::string class_id;
    std::string message;
};

struct Corpus {
    std::filesystem::path root;
    std::vector<ClassUnderTest> classes;
    std::vector<DiscoveryWarning> warnings;

    [[nodiscard]] const ClassUnderTest* find(const std::string& id) const;
};

/// Reads a JSON manifest `{"root": ".", "classes": [{"id", "source", "test"}]}`.
/// `root` defaults to the manifest's directory. A missing `test` key falls back
/// to `convention`.
Corpus discover_targets(const std::filesystem::path& manifest_path,
                        const TestFileConvention& convention = {});

using Overlay = std::map<std::string, std::string>;  // corpus-relative path -> bytes

struct OriginalVariant {};
struct MutatedVariant {
    std::string mutant_id;
};
using WorkspaceVariant = std::variant<OriginalVariant, MutatedVariant>;

/// An isolated copy of the corpus tree, removed on destruction.
class Workspace {
public:
    Workspace(const std::filesystem::path& corpus_root, std::string class_id,
              WorkspaceVariant variant, Overlay overlay);
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;
    Workspace(Workspace&& other) noexcept;
    Workspace& operator=(Workspace&& other) noexcept;
    ~Workspace();

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
    [[nodiscard]] const std::string& class_id() const noexcept { return class_id_; }
    [[nodiscard]] const WorkspaceVariant& variant() const noexcept { return variant_; }
    [[nodiscard]] const Overlay& overlay() const noexcept { return overlay_; }

    /// Keeps the directory on disk after destruction.
    void persist() noexcept { persist_ = true; }

private:
    void release() noexcept;

    std::filesystem::path root_;
    std::string class_id_;
    WorkspaceVariant variant_;
    Overlay overlay_;
    bool persist_ = false;
};

Workspace materialize_workspace(const Corpus& corpus, const ClassUnderTest& cut,
                                const Overlay& overlay = {}, WorkspaceVariant variant = OriginalVariant{});

enum class Outcome { AllPassed, SomeFailed, BuildFailed, Timeout };

std::string_view to_string(Outcome o) noexcept;

struct TestRunResult {
    Outcome outcome = Outcome::AllPassed;
    std::vector<std::string> failing_test_names;
    std::chrono::milliseconds duration{0};
    std::string raw_log_digest;
};

/// Covered line numbers per corpus-relative file.
using CoverageMap = std::map<std::string, std::set<int>>;

/// Lines covered in `after` but not in `before`; files without additions are omitted.
CoverageMap coverage_added(const CoverageMap& before, const CoverageMap& after);

std::vector<std::string> expand_command(const std::vector<std::string>& tmpl,
                                        const std::filesystem::path& workspace);

TestRunResult run_build(const Workspace& ws, const TargetAdapter& adapter);
TestRunResult run_tests(const Workspace& ws, const TargetAdapter& adapter);
CoverageMap measure_line_coverage(const Workspace& ws, const TargetAdapter& adapter);

/// Parses the `PASS` / `FAIL` + names result format.
TestRunResult parse_test_results(std::string_view text);

/// Parses `path:n1,n2,...` lines. `root`, when given, bounds line numbers by file length.
CoverageMap parse_coverage_report(std::string_view text,
                                  const std::optional<std::filesystem::path>& root = std::nullopt);

std::string format_coverage_report(const CoverageMap& map);

inline constexpr const char* kTestResultsFile = "test-results.txt";
inline constexpr const char* kCoverageFile = "coverage.txt";

}  // namespace mgen
