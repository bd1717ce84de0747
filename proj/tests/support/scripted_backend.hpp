#pragma once

// Backend that answers from canned reply files, for recording fixtures and tests.
// Replies live in <dir>/<ClassId>/<kind>-<n>.md with kind fault|judge|tests; the
// n-th prompt of a kind for a class gets reply n.

#include "mgen/digest.hpp"
#include "mgen/error.hpp"
#include "mgen/llm.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace mgen::testing {

class ScriptedBackend final : public CompletionBackend {
public:
    ScriptedBackend(std::filesystem::path dir, std::vector<std::string> class_ids)
        : dir_(std::move(dir)), class_ids_(std::move(class_ids)) {}

    [[nodiscard]] std::string id() const override { return "scripted"; }

    std::string complete(const ChatRequest& request) override {
        const std::string kind = kind_of(request.prompt);
        const std::string cls = class_of(request.prompt);
        std::lock_guard lock(mu_);
        const int n = ++counters_[{cls, kind}];
        const auto file = dir_ / cls / (kind + "-" + std::to_string(n) + ".md");
        if (!std::filesystem::exists(file)) {
            throw Error(ErrorCode::BackendUnavailable, "no scripted reply " + file.string());
        }
        ++calls_;
        return read_file(file);
    }

    [[nodiscard]] int calls() const { return calls_; }

private:
    static std::string kind_of(const std::string& prompt) {
        if (prompt.rfind("CONTEXT:", 0) == 0) return "fault";
        if (prompt.rfind("I'm going", 0) == 0) return "judge";
        if (prompt.rfind("What follows", 0) == 0) return "tests";
        throw Error(ErrorCode::BackendUnavailable, "unrecognised prompt");
    }

    std::string class_of(const std::string& prompt) const {
        for (const auto& id : class_ids_) {
            if (prompt.find("class " + id + " {") != std::string::npos) return id;
        }
        throw Error(ErrorCode::BackendUnavailable, "prompt names no known class");
    }

    std::filesystem::path dir_;
    std::vector<std::string> class_ids_;
    std::mutex mu_;
    std::map<std::pair<std::string, std::string>, int> counters_;
    int calls_ = 0;
};

}  // namespace mgen::testing
