#pragma once

#include "mgen/corpus.hpp"
#include "mgen/digest.hpp"
#include "mgen/error.hpp"
#include "mgen/llm.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mgen::testing {

namespace fs = std::filesystem;

inline fs::path toy_dir() { return fs::path(MGEN_TOY_DIR); }

class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "mgen-test-XXXXXX").string();
        path_ = ::mkdtemp(tmpl.data());
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    [[nodiscard]] const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

inline TargetAdapter toy_adapter() {
    return TargetAdapter::from_json(nlohmann::json::parse(read_file(toy_dir() / "adapter.json")));
}

inline Corpus toy_corpus() {
    return discover_targets(toy_dir() / "corpus" / "manifest.json", toy_adapter().test_file_convention);
}

/// Adapter whose commands are shell snippets run with the workspace as cwd.
inline TargetAdapter shell_adapter(const std::string& build, const std::string& test,
                                   const std::string& coverage = "", int timeout_ms = 10000) {
    TargetAdapter a;
    auto cmd = [](const std::string& script) {
        return std::vector<std::string>{"sh", "-c", script, "{workspace}"};
    };
    a.build_command = cmd(build);
    a.test_command = cmd(test);
    if (!coverage.empty()) a.coverage_command = cmd(coverage);
    a.timeout = std::chrono::milliseconds(timeout_ms);
    return a;
}

/// Writes `files` below `dir` and a manifest listing `classes` as {id, source, test}.
inline fs::path write_corpus(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files,
                             const nlohmann::json& classes) {
    for (const auto& [rel, text] : files) write_file(dir / "project" / rel, text);
    const auto manifest = dir / "manifest.json";
    write_file(manifest, nlohmann::json{{"root", "project"}, {"classes", classes}}.dump(2));
    return manifest;
}

/// Backend driven by a callback; counts calls.
class FakeBackend final : public CompletionBackend {
public:
    using Fn = std::function<std::string(const std::string& prompt)>;
    explicit FakeBackend(Fn fn, int* calls = nullptr) : fn_(std::move(fn)), calls_(calls) {}
    [[nodiscard]] std::string id() const override { return "fake"; }
    std::string complete(const ChatRequest& request) override {
        if (calls_) ++*calls_;
        return fn_(request.prompt);
    }

private:
    Fn fn_;
    int* calls_;
};

/// Replies in order, ignoring the prompt.
inline FakeBackend::Fn queued(std::vector<std::string> replies) {
    auto q = std::make_shared<std::deque<std::string>>(replies.begin(), replies.end());
    return [q](const std::string&) {
        if (q->empty()) throw Error(ErrorCode::BackendUnavailable, "fake backend ran out of replies");
        auto r = q->front();
        q->pop_front();
        return r;
    };
}

inline std::unique_ptr<Gateway> live_gateway(FakeBackend::Fn fn, int* calls = nullptr,
                                             std::uint64_t cap = 10000) {
    GatewayConfig gc;
    gc.mode = GatewayMode::Live;
    gc.request_cap = cap;
    return std::make_unique<Gateway>(gc, std::make_unique<FakeBackend>(std::move(fn), calls), TranscriptStore{});
}

inline std::string fenced(const std::string& code, const std::string& lang = "kotlin") {
    return "Sure.\n\n```" + lang + "\n" + code + (code.empty() || code.back() == '\n' ? "" : "\n") + "```\n";
}

}  // namespace mgen::testing
