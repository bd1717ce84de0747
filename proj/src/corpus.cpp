#include "mgen/corpus.hpp"

#include "mgen/digest.hpp"
#include "mgen/error.hpp"
#include "mgen/process.hpp"
#include "mgen/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <unordered_set>

namespace fs = std::filesystem;
using nlohmann::json;

namespace mgen {

namespace {

constexpr std::string_view kWorkspaceToken = "{workspace}";

bool mentions_workspace(const std::vector<std::string>& cmd) {
    return std::any_of(cmd.begin(), cmd.end(),
                       [](const std::string& t) { return t.find(kWorkspaceToken) != std::string::npos; });
}

void check_relative(const std::string& path) {
    const fs::path p(path);
    if (p.empty() || p.is_absolute()) {
        throw Error(ErrorCode::InvalidArgument, "overlay path must be corpus-relative: " + path);
    }
    for (const auto& part : p) {
        if (part == "..") throw Error(ErrorCode::InvalidArgument, "overlay path escapes the corpus: " + path);
    }
}

std::vector<std::string> string_list(const json& j, const char* what) {
    if (!j.is_array()) throw Error(ErrorCode::AdapterInvalid, std::string(what) + " must be a list of strings");
    std::vector<std::string> out;
    for (const auto& t : j) {
        if (!t.is_string()) throw Error(ErrorCode::AdapterInvalid, std::string(what) + " must be a list of strings");
        out.push_back(t.get<std::string>());
    }
    return out;
}

}  // namespace

void CommentGrammar::validate() const {
    if (line_prefixes.empty() && blocks.empty()) {
        throw Error(ErrorCode::AdapterInvalid, "comment grammar is empty");
    }
    for (const auto& p : line_prefixes) {
        if (p.empty()) throw Error(ErrorCode::AdapterInvalid, "empty line-comment prefix");
    }
    for (const auto& b : blocks) {
        if (b.open.empty() || b.close.empty() || b.open == b.close) {
            throw Error(ErrorCode::AdapterInvalid, "block comment delimiters must be non-empty and distinct");
        }
    }
    for (const auto& l : literals) {
        if (l.open.empty() || l.close.empty()) {
            throw Error(ErrorCode::AdapterInvalid, "string literal delimiters must be non-empty");
        }
    }
}

std::string TestFileConvention::test_path_for(const std::string& source_path) const {
    std::string path = source_path;
    if (!source_prefix.empty() && path.rfind(source_prefix, 0) == 0) {
        path = test_prefix + path.substr(source_prefix.size());
    }
    fs::path p(path);
    const std::string stem = p.stem().string() + suffix;
    return (p.parent_path() / (stem + p.extension().string())).generic_string();
}

void TargetAdapter::validate() const {
    if (build_command.empty() || !mentions_workspace(build_command)) {
        throw Error(ErrorCode::AdapterInvalid, "build command must reference {workspace}");
    }
    if (test_command.empty() || !mentions_workspace(test_command)) {
        throw Error(ErrorCode::AdapterInvalid, "test command must reference {workspace}");
    }
    if (coverage_command && (coverage_command->empty() || !mentions_workspace(*coverage_command))) {
        throw Error(ErrorCode::AdapterInvalid, "coverage command must reference {workspace}");
    }
    if (timeout.count() <= 0) throw Error(ErrorCode::AdapterInvalid, "timeout must be positive");
    comment_grammar.validate();
}

TargetAdapter TargetAdapter::from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::AdapterInvalid, "adapter must be an object");
    TargetAdapter a;
    try {
        a.build_command = string_list(j.at("build"), "build");
        a.test_command = string_list(j.at("test"), "test");
    } catch (const json::out_of_range& e) {
        throw Error(ErrorCode::AdapterInvalid, e.what());
    }
    if (j.contains("coverage") && !j["coverage"].is_null()) {
        a.coverage_command = string_list(j["coverage"], "coverage");
    }
    if (j.contains("comment_grammar")) {
        const auto& g = j["comment_grammar"];
        CommentGrammar grammar;
        grammar.line_prefixes = g.contains("line") ? string_list(g["line"], "line") : std::vector<std::string>{};
        grammar.blocks.clear();
        for (const auto& b : g.value("block", json::array())) {
            const auto pair = string_list(b, "block");
            if (pair.size() != 2) throw Error(ErrorCode::AdapterInvalid, "block comment needs [open, close]");
            grammar.blocks.push_back({pair[0], pair[1]});
        }
        if (g.contains("literals")) {
            grammar.literals.clear();
            for (const auto& l : g["literals"]) {
                grammar.literals.push_back({l.at("open").get<std::string>(), l.at("close").get<std::string>(),
                                            l.value("escapes", true), l.value("multiline", false)});
            }
        }
        a.comment_grammar = std::move(grammar);
    }
    if (j.contains("test_file_convention")) {
        const auto& c = j["test_file_convention"];
        a.test_file_convention.suffix = c.value("suffix", std::string("Test"));
        a.test_file_convention.source_prefix = c.value("source_prefix", std::string());
        a.test_file_convention.test_prefix = c.value("test_prefix", std::string());
    }
    a.test_method_pattern = j.value("test_method_pattern", a.test_method_pattern);
    a.timeout = std::chrono::milliseconds(j.value("timeout_ms", 120000));
    a.validate();
    return a;
}

const ClassUnderTest* Corpus::find(const std::string& id) const {
    for (const auto& c : classes) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

Corpus discover_targets(const fs::path& manifest_path, const TestFileConvention& convention) {
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ManifestMalformed, manifest_path.string() + ": " + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::ManifestMalformed, e.what());
    }
    if (!manifest.is_object() || !manifest.contains("classes") || !manifest["classes"].is_array()) {
        throw Error(ErrorCode::ManifestMalformed, "manifest needs a 'classes' list");
    }

    Corpus corpus;
    const fs::path base = manifest_path.parent_path();
    corpus.root = fs::weakly_canonical(base / manifest.value("root", std::string(".")));

    std::unordered_set<std::string> seen;
    std::vector<std::string> missing;
    for (const auto& entry : manifest["classes"]) {
        if (!entry.is_object() || !entry.contains("id") || !entry.contains("source") ||
            !entry["id"].is_string() || !entry["source"].is_string()) {
            throw Error(ErrorCode::ManifestMalformed, "every class needs string keys 'id' and 'source'");
        }
        ClassUnderTest cut;
        cut.id = entry["id"].get<std::string>();
        if (cut.id.empty() || !seen.insert(cut.id).second) {
            throw Error(ErrorCode::ManifestMalformed, "duplicate or empty class id '" + cut.id + "'");
        }
        cut.group = entry.value("group", std::string("default"));
        cut.source_path = entry["source"].get<std::string>();
        cut.test_class_path = entry.contains("test") ? entry["test"].get<std::string>()
                                                     : convention.test_path_for(cut.source_path);
        const fs::path src = corpus.root / cut.source_path;
        if (!fs::is_regular_file(src)) {
            missing.push_back(cut.source_path);
            continue;
        }
        cut.source_text = read_file(src);
        if (cut.source_text.empty()) {
            throw Error(ErrorCode::ManifestMalformed, "class source is empty: " + cut.source_path);
        }
        const fs::path test = corpus.root / cut.test_class_path;
        if (fs::is_regular_file(test)) {
            cut.test_class_text = read_file(test);
        } else {
            corpus.warnings.push_back({cut.id, "test class not found: " + cut.test_class_path});
        }
        corpus.classes.push_back(std::move(cut));
    }
    if (!missing.empty()) {
        std::string msg = "missing sources:";
        for (const auto& m : missing) msg += " " + m;
        throw Error(ErrorCode::SourceMissing, msg);
    }
    return corpus;
}

Workspace::Workspace(const fs::path& corpus_root, std::string class_id, WorkspaceVariant variant,
                     Overlay overlay)
    : class_id_(std::move(class_id)), variant_(std::move(variant)), overlay_(std::move(overlay)) {
    for (const auto& [path, _] : overlay_) check_relative(path);
    std::string tmpl = (fs::temp_directory_path() / "mgen-ws-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) {
        throw Error(ErrorCode::IoFailure, "cannot create workspace directory");
    }
    root_ = tmpl;
    try {
        fs::copy(corpus_root, root_, fs::copy_options::recursive | fs::copy_options::copy_symlinks);
        for (const auto& [path, bytes] : overlay_) write_file(root_ / path, bytes);
    } catch (const fs::filesystem_error& e) {
        std::error_code ec;
        fs::remove_all(root_, ec);
        throw Error(ErrorCode::IoFailure, e.what());
    }
}

Workspace::Workspace(Workspace&& other) noexcept
    : root_(std::move(other.root_)),
      class_id_(std::move(other.class_id_)),
      variant_(std::move(other.variant_)),
      overlay_(std::move(other.overlay_)),
      persist_(other.persist_) {
    other.root_.clear();
}

Workspace& Workspace::operator=(Workspace&& other) noexcept {
    if (this != &other) {
        release();
        root_ = std::move(other.root_);
        class_id_ = std::move(other.class_id_);
        variant_ = std::move(other.variant_);
        overlay_ = std::move(other.overlay_);
        persist_ = other.persist_;
        other.root_.clear();
    }
    return *this;
}

Workspace::~Workspace() { release(); }

void Workspace::release() noexcept {
    if (!root_.empty() && !persist_) {
        std::error_code ec;
        fs::remove_all(root_, ec);
    }
    root_.clear();
}

Workspace materialize_workspace(const Corpus& corpus, const ClassUnderTest& cut, const Overlay& overlay,
                                WorkspaceVariant variant) {
    return Workspace(corpus.root, cut.id, std::move(variant), overlay);
}

std::string_view to_string(Outcome o) noexcept {
    switch (o) {
        case Outcome::AllPassed: return "AllPassed";
        case Outcome::SomeFailed: return "SomeFailed";
        case Outcome::BuildFailed: return "BuildFailed";
        case Outcome::Timeout: return "Timeout";
    }
    return "?";
}

CoverageMap coverage_added(const CoverageMap& before, const CoverageMap& after) {
    CoverageMap added;
    for (const auto& [file, lines] : after) {
        const auto it = before.find(file);
        std::set<int> extra;
        for (int line : lines) {
            if (it == before.end() || !it->second.count(line)) extra.insert(line);
        }
        if (!extra.empty()) added.emplace(file, std::move(extra));
    }
    return added;
}

std::vector<std::string> expand_command(const std::vector<std::string>& tmpl, const fs::path& workspace) {
    std::vector<std::string> out;
    out.reserve(tmpl.size());
    const std::string root = workspace.string();
    for (std::string token : tmpl) {
        for (auto pos = token.find(kWorkspaceToken); pos != std::string::npos;
             pos = token.find(kWorkspaceToken, pos + root.size())) {
            token.replace(pos, kWorkspaceToken.size(), root);
        }
        out.push_back(std::move(token));
    }
    return out;
}

TestRunResult run_build(const Workspace& ws, const TargetAdapter& adapter) {
    const auto proc = run_process(expand_command(adapter.build_command, ws.root()), ws.root(), adapter.timeout);
    TestRunResult r;
    r.duration = proc.duration;
    r.raw_log_digest = sha256_hex(proc.output);
    if (proc.timed_out) {
        r.outcome = Outcome::Timeout;
    } else {
        r.outcome = proc.exit_code == 0 ? Outcome::AllPassed : Outcome::BuildFailed;
    }
    return r;
}

TestRunResult parse_test_results(std::string_view text) {
    auto lines = text::split_lines(text);
    while (!lines.empty() && text::trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw Error(ErrorCode::ResultFileMalformed, "empty result file");
    const auto head = text::trim(lines.front());
    TestRunResult r;
    if (head == "PASS") {
        if (lines.size() > 1) throw Error(ErrorCode::ResultFileMalformed, "PASS followed by test names");
        r.outcome = Outcome::AllPassed;
        return r;
    }
    if (head != "FAIL") throw Error(ErrorCode::ResultFileMalformed, "first line must be PASS or FAIL");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto name = text::trim(lines[i]);
        if (name.empty()) throw Error(ErrorCode::ResultFileMalformed, "blank failing test name");
        r.failing_test_names.emplace_back(name);
    }
    if (r.failing_test_names.empty()) throw Error(ErrorCode::ResultFileMalformed, "FAIL without test names");
    r.outcome = Outcome::SomeFailed;
    return r;
}

TestRunResult run_tests(const Workspace& ws, const TargetAdapter& adapter) {
    const fs::path result_file = ws.root() / kTestResultsFile;
    std::error_code ec;
    fs::remove(result_file, ec);
    const auto proc = run_process(expand_command(adapter.test_command, ws.root()), ws.root(), adapter.timeout);
    TestRunResult r;
    if (proc.timed_out) {
        r.outcome = Outcome::Timeout;
    } else {
        if (!fs::is_regular_file(result_file)) {
            throw Error(ErrorCode::ResultFileMissing,
                        "test command exited " + std::to_string(proc.exit_code) + " without " + kTestResultsFile);
        }
        r = parse_test_results(read_file(result_file));
    }
    r.duration = proc.duration;
    r.raw_log_digest = sha256_hex(proc.output);
    return r;
}

CoverageMap parse_coverage_report(std::string_view report, const std::optional<fs::path>& root) {
    CoverageMap map;
    for (const auto& raw : text::split_lines(report)) {
        const auto line = text::trim(raw);
        if (line.empty()) continue;
        const auto colon = line.rfind(':');
        if (colon == std::string_view::npos || colon == 0) {
            throw Error(ErrorCode::ReportMalformed, "expected path:lines in '" + std::string(line) + "'");
        }
        const std::string path(line.substr(0, colon));
        if (map.count(path)) throw Error(ErrorCode::ReportMalformed, "duplicate file " + path);
        std::size_t limit = 0;
        if (root && fs::is_regular_file(*root / path)) limit = text::count_lines(read_file(*root / path));
        auto& lines = map[path];
        std::string_view rest = line.substr(colon + 1);
        int prev = 0;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto tok = text::trim(rest.substr(0, comma));
            int n = 0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
            if (ec != std::errc() || ptr != tok.data() + tok.size()) {
                throw Error(ErrorCode::ReportMalformed, "bad line number '" + std::string(tok) + "' for " + path);
            }
            if (n < 1) throw Error(ErrorCode::ReportMalformed, "line numbers start at 1 (" + path + ")");
            if (n <= prev) throw Error(ErrorCode::ReportMalformed, "line numbers must ascend (" + path + ")");
            if (limit && static_cast<std::size_t>(n) > limit) {
                throw Error(ErrorCode::ReportMalformed, "line " + std::to_string(n) + " beyond end of " + path);
            }
            lines.insert(n);
            prev = n;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }
    return map;
}

std::string format_coverage_report(const CoverageMap& map) {
    std::string out;
    for (const auto& [file, lines] : map) {
        out += file + ":";
        bool first = true;
        for (int n : lines) {
            if (!first) out.push_back(',');
            out += std::to_string(n);
            first = false;
        }
        out.push_back('\n');
    }
    return out;
}

CoverageMap measure_line_coverage(const Workspace& ws, const TargetAdapter& adapter) {
    if (!adapter.coverage_command) throw Error(ErrorCode::CoverageUnsupported, "adapter has no coverage command");
    const fs::path report = ws.root() / kCoverageFile;
    std::error_code ec;
    fs::remove(report, ec);
    const auto proc = run_process(expand_command(*adapter.coverage_command, ws.root()), ws.root(), adapter.timeout);
    if (proc.timed_out) throw Error(ErrorCode::ReportMalformed, "coverage command timed out");
    if (!fs::is_regular_file(report)) {
        throw Error(ErrorCode::ReportMalformed,
                    "coverage command exited " + std::to_string(proc.exit_code) + " without " + kCoverageFile);
    }
    return parse_coverage_report(read_file(report), ws.root());
}

}  // namespace mgen
