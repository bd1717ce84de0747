#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mgen {

// ---- prompt templates --------------------------------------------------------

enum class TemplateName { MakeFault, EquivalenceDetector, MakeTest };

std::string_view to_string(TemplateName name) noexcept;

/// `{name}` marks a slot; `{{` and `}}` render as literal braces.
struct PromptTemplate {
    TemplateName name;
    std::string body;

    [[nodiscard]] std::set<std::string> placeholders() const;
};

const PromptTemplate& shipped_template(TemplateName name);

using Bindings = std::map<std::string, std::string>;

/// Bindings must cover exactly the template's placeholders.
std::string render(const PromptTemplate& tmpl, const Bindings& bindings);

// ---- response parsing --------------------------------------------------------

struct CodeBlock {
    std::string language;
    std::string text;
    bool unterminated = false;
};

std::vector<CodeBlock> extract_fenced_code(std::string_view response);

enum class BracedToken { Yes, No, NoAnswer };

std::string_view to_string(BracedToken t) noexcept;

struct BracedAnswer {
    BracedToken token = BracedToken::NoAnswer;
    std::string explanation;  // text after `{no}`, trimmed
};

BracedAnswer extract_braced_token(std::string_view response);

// ---- completion gateway ------------------------------------------------------

struct DecodingParams {
    double temperature = 0.2;
    int max_tokens = 4096;
};

struct ChatRequest {
    std::string model;
    std::string prompt;
    DecodingParams params;
};

class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;
    [[nodiscard]] virtual std::string id() const = 0;
    /// Throws BackendUnavailable on transport failure.
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// OpenAI-style `/chat/completions` client.
class HttpChatBackend final : public CompletionBackend {
public:
    HttpChatBackend(std::string endpoint, std::string token, std::chrono::seconds timeout = std::chrono::seconds(300));

    [[nodiscard]] std::string id() const override { return "http:" + endpoint_; }
    std::string complete(const ChatRequest& request) override;

private:
    std::string endpoint_;
    std::string token_;
    std::chrono::seconds timeout_;
};

struct Exchange {
    std::string digest;
    std::uint64_t seq = 0;  // occurrence index of this digest within a run
    std::string backend_id;
    std::string model;
    DecodingParams params;
    std::string prompt;
    std::string response;
    std::string timestamp;
};

enum class GatewayMode { Live, Record, Replay };

std::string_view to_string(GatewayMode m) noexcept;
GatewayMode parse_gateway_mode(std::string_view s);

/// Line-delimited JSON transcript keyed by (request digest, occurrence).
class TranscriptStore {
public:
    TranscriptStore() = default;

    static TranscriptStore load(const std::filesystem::path& path);

    [[nodiscard]] const Exchange* find(const std::string& digest, std::uint64_t seq) const;
    [[nodiscard]] const std::vector<Exchange>& records() const noexcept { return records_; }

    /// Appends to memory and, when a sink file is open, to disk (flushed).
    void append(Exchange ex);
    void open_sink(const std::filesystem::path& path, bool truncate);

private:
    std::vector<Exchange> records_;
    std::map<std::pair<std::string, std::uint64_t>, std::size_t> index_;
    std::unique_ptr<std::ofstream> sink_;
};

std::string request_digest(const ChatRequest& request);

struct GatewayConfig {
    GatewayMode mode = GatewayMode::Replay;
    std::string model = "llama-3.1-70b-instruct";
    DecodingParams params;
    std::uint64_t request_cap = 10000;
    unsigned in_flight = 4;
    int retries = 1;
};

class Gateway {
public:
    Gateway(GatewayConfig config, std::unique_ptr<CompletionBackend> backend, TranscriptStore store);

    /// Throws ReplayMiss, BackendUnavailable, or BudgetExceeded.
    std::string complete(const std::string& prompt);
    std::string complete(const std::string& prompt, const DecodingParams& params);

    [[nodiscard]] std::uint64_t requests() const noexcept { return requests_.load(); }
    [[nodiscard]] std::uint64_t backend_calls() const noexcept { return backend_calls_.load(); }
    [[nodiscard]] bool budget_exhausted() const noexcept { return exhausted_.load(); }
    [[nodiscard]] const GatewayConfig& config() const noexcept { return config_; }
    [[nodiscard]] const TranscriptStore& transcript() const noexcept { return store_; }

private:
    std::string call_backend(const ChatRequest& request);

    GatewayConfig config_;
    std::unique_ptr<CompletionBackend> backend_;
    TranscriptStore store_;
    std::mutex mu_;
    std::map<std::string, std::uint64_t> seen_;
    std::atomic<std::uint64_t> requests_{0};
    std::atomic<std::uint64_t> backend_calls_{0};
    std::atomic<bool> exhausted_{false};
    std::mutex slot_mu_;
    std::condition_variable slot_cv_;
    unsigned active_ = 0;
};

}  // namespace mgen
