#include "mgen/digest.hpp"
#include "mgen/error.hpp"
#include "mgen/llm.hpp"
#include "mgen/text.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace mgen {

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    ::gmtime_r(&t, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

json to_json(const Exchange& ex) {
    return json{{"digest", ex.digest},     {"seq", ex.seq},
                {"backend", ex.backend_id}, {"model", ex.model},
                {"temperature", ex.params.temperature}, {"max_tokens", ex.params.max_tokens},
                {"prompt", ex.prompt},     {"response", ex.response},
                {"timestamp", ex.timestamp}};
}

Exchange exchange_from_json(const json& j) {
    Exchange ex;
    ex.digest = j.at("digest").get<std::string>();
    ex.seq = j.value("seq", std::uint64_t{0});
    ex.backend_id = j.value("backend", std::string());
    ex.model = j.value("model", std::string());
    ex.params.temperature = j.value("temperature", 0.2);
    ex.params.max_tokens = j.value("max_tokens", 4096);
    ex.prompt = j.value("prompt", std::string());
    ex.response = j.at("response").get<std::string>();
    ex.timestamp = j.value("timestamp", std::string());
    return ex;
}

}  // namespace

std::string_view to_string(GatewayMode m) noexcept {
    switch (m) {
        case GatewayMode::Live: return "live";
        case GatewayMode::Record: return "record";
        case GatewayMode::Replay: return "replay";
    }
    return "?";
}

GatewayMode parse_gateway_mode(std::string_view s) {
    if (s == "live") return GatewayMode::Live;
    if (s == "record") return GatewayMode::Record;
    if (s == "replay") return GatewayMode::Replay;
    throw Error(ErrorCode::InvalidArgument, "mode must be live, record or replay (got '" + std::string(s) + "')");
}

std::string request_digest(const ChatRequest& request) {
    const json key{{"model", request.model},
                   {"temperature", request.params.temperature},
                   {"max_tokens", request.params.max_tokens},
                   {"prompt", request.prompt}};
    return sha256_hex(key.dump());
}

// ---- transcript --------------------------------------------------------------

TranscriptStore TranscriptStore::load(const fs::path& path) {
    TranscriptStore store;
    if (!fs::exists(path)) return store;
    const auto lines = text::split_lines(read_file(path));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (text::trim(lines[i]).empty()) continue;
        try {
            store.append(exchange_from_json(json::parse(lines[i])));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::TranscriptMalformed,
                        path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return store;
}

const Exchange* TranscriptStore::find(const std::string& digest, std::uint64_t seq) const {
    const auto it = index_.find({digest, seq});
    return it == index_.end() ? nullptr : &records_[it->second];
}

void TranscriptStore::append(Exchange ex) {
    if (sink_) {
        *sink_ << to_json(ex).dump() << '\n';
        sink_->flush();
        if (!*sink_) throw Error(ErrorCode::IoFailure, "transcript write failed");
    }
    index_[{ex.digest, ex.seq}] = records_.size();
    records_.push_back(std::move(ex));
}

void TranscriptStore::open_sink(const fs::path& path, bool truncate) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    auto mode = std::ios::binary | (truncate ? std::ios::trunc : std::ios::app);
    sink_ = std::make_unique<std::ofstream>(path, mode);
    if (!*sink_) throw Error(ErrorCode::IoFailure, "cannot open transcript " + path.string());
}

// ---- HTTP backend ------------------------------------------------------------

HttpChatBackend::HttpChatBackend(std::string endpoint, std::string token, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), token_(std::move(token)), timeout_(timeout) {
    if (endpoint_.rfind("http://", 0) != 0 && endpoint_.rfind("https://", 0) != 0) {
        throw Error(ErrorCode::ConfigInvalid, "llm.endpoint must be an http(s) URL: " + endpoint_);
    }
}

std::string HttpChatBackend::complete(const ChatRequest& request) {
    const auto scheme_end = endpoint_.find("://") + 3;
    const auto path_start = endpoint_.find('/', scheme_end);
    const std::string origin = endpoint_.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : endpoint_.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(timeout_);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

    const json body{{"model", request.model},
                    {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
                    {"temperature", request.params.temperature},
                    {"max_tokens", request.params.max_tokens},
                    {"n", 1}};
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        throw Error(ErrorCode::BackendUnavailable, endpoint_ + ": " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw Error(ErrorCode::BackendUnavailable, endpoint_ + ": HTTP " + std::to_string(res->status));
    }
    try {
        const auto reply = json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BackendUnavailable, "unexpected completion payload: " + std::string(e.what()));
    }
}

// ---- gateway -----------------------------------------------------------------

Gateway::Gateway(GatewayConfig config, std::unique_ptr<CompletionBackend> backend, TranscriptStore store)
    : config_(std::move(config)), backend_(std::move(backend)), store_(std::move(store)) {
    if (config_.mode != GatewayMode::Replay && !backend_) {
        throw Error(ErrorCode::ConfigInvalid, "live and record modes need a completion backend");
    }
    if (config_.in_flight == 0) config_.in_flight = 1;
}

std::string Gateway::complete(const std::string& prompt) { return complete(prompt, config_.params); }

std::string Gateway::complete(const std::string& prompt, const DecodingParams& params) {
    const ChatRequest request{config_.model, prompt, params};
    const std::string digest = request_digest(request);
    std::uint64_t seq = 0;
    {
        std::lock_guard lock(mu_);
        if (std::max(requests_.load(), backend_calls_.load()) >= config_.request_cap) {
            exhausted_ = true;
            throw Error(ErrorCode::BudgetExceeded,
                        "request cap of " + std::to_string(config_.request_cap) + " reached");
        }
        ++requests_;
        seq = seen_[digest]++;
        if (config_.mode == GatewayMode::Replay) {
            if (const auto* ex = store_.find(digest, seq)) return ex->response;
            throw Error(ErrorCode::ReplayMiss, "no transcript entry for " + digest + "#" + std::to_string(seq));
        }
    }

    std::string response = call_backend(request);
    if (config_.mode == GatewayMode::Record) {
        std::lock_guard lock(mu_);
        store_.append(Exchange{digest, seq, backend_->id(), config_.model, params, prompt, response,
                               utc_timestamp()});
    }
    return response;
}

std::string Gateway::call_backend(const ChatRequest& request) {
    {
        std::unique_lock lock(slot_mu_);
        slot_cv_.wait(lock, [&] { return active_ < config_.in_flight; });
        ++active_;
    }
    struct SlotRelease {
        Gateway* g;
        ~SlotRelease() {
            {
                std::lock_guard lock(g->slot_mu_);
                --g->active_;
            }
            g->slot_cv_.notify_one();
        }
    } release{this};

    for (int attempt = 0;; ++attempt) {
        try {
            ++backend_calls_;
            return backend_->complete(request);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::BackendUnavailable || attempt >= config_.retries) throw;
            // A retry is still a backend call and must fit under the cap.
            if (backend_calls_.load() >= config_.request_cap) throw;
        }
    }
}

}  // namespace mgen
