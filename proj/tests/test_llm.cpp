#include "mgen/digest.hpp"
#include "mgen/error.hpp"
#include "mgen/llm.hpp"
#include "support/helpers.hpp"

#include <doctest.h>
#include <httplib.h>

#include <thread>

using namespace mgen;
using namespace mgen::testing;
using nlohmann::json;

namespace {

Bindings fault_bindings() {
    return {{"context_about_concern", "Users may hide their profile."},
            {"class_under_test", "class Profile(val name: String)"},
            {"existing_test_class", "class ProfileTest"},
            {"diff", "- if (hidden) return null"}};
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("llm") {

TEST_CASE("shipped templates expose their slots") {
    CHECK(shipped_template(TemplateName::MakeFault).placeholders() ==
          std::set<std::string>{"context_about_concern", "class_under_test", "existing_test_class", "diff"});
    CHECK(shipped_template(TemplateName::EquivalenceDetector).placeholders() ==
          std::set<std::string>{"class_version1", "class_version2"});
    CHECK(shipped_template(TemplateName::MakeTest).placeholders() ==
          std::set<std::string>{"original_class", "mutated_class", "existing_test_class"});
}

TEST_CASE("rendering MakeFault embeds the class verbatim") {
    const auto text = render(shipped_template(TemplateName::MakeFault), fault_bindings());
    CHECK(text.find("Here is a Kotlin class and a test class") != std::string::npos);
    CHECK(text.find("```class Profile(val name: String)```") != std::string::npos);
    CHECK(text.rfind("CONTEXT: Users may hide their profile. INSTRUCTION:", 0) == 0);
    CHECK(text.find("`// MUTANT <START>` and `// MUTANT <END>`") != std::string::npos);
    CHECK(text.find('{') == std::string::npos);
}

TEST_CASE("the judge template keeps its braced answer tokens literal") {
    const auto text = render(shipped_template(TemplateName::EquivalenceDetector),
                             {{"class_version1", "A"}, {"class_version2", "B"}});
    CHECK(text.find("just respond with `{yes}`") != std::string::npos);
    CHECK(text.find("respond with `{no}`") != std::string::npos);
    CHECK(text.find("first version of the Kotlin class:```A```") != std::string::npos);
}

TEST_CASE("missing and unknown bindings") {
    auto b = fault_bindings();
    b.erase("diff");
    try {
        render(shipped_template(TemplateName::MakeFault), b);
        FAIL("expected UnboundPlaceholder");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnboundPlaceholder);
        CHECK(std::string(e.what()).find("diff") != std::string::npos);
    }
    auto extra = fault_bindings();
    extra["colour"] = "red";
    CHECK(code_of([&] { render(shipped_template(TemplateName::MakeFault), extra); }) ==
          ErrorCode::UnknownPlaceholder);
}

TEST_CASE("a template without slots renders unchanged") {
    const PromptTemplate t{TemplateName::MakeTest, "plain text with {{braces}} and { spaces }"};
    CHECK(t.placeholders().empty());
    CHECK(render(t, {}) == "plain text with {braces} and { spaces }");
}

TEST_CASE("bound values are not re-expanded") {
    const PromptTemplate t{TemplateName::MakeTest, "<{a}>"};
    CHECK(render(t, {{"a", "{a} {{x}}"}}) == "<{a} {{x}}>");
}

TEST_CASE("fenced code extraction") {
    SUBCASE("one block") {
        const auto blocks = extract_fenced_code("text\n```\na\nb\n```\nmore");
        REQUIRE(blocks.size() == 1);
        CHECK(blocks[0].text == "a\nb");
        CHECK_FALSE(blocks[0].unterminated);
    }
    SUBCASE("two blocks in order") {
        const auto blocks = extract_fenced_code("```kotlin\none\n```\nmid\n```java\ntwo\n```\n");
        REQUIRE(blocks.size() == 2);
        CHECK(blocks[0].text == "one");
        CHECK(blocks[0].language == "kotlin");
        CHECK(blocks[1].text == "two");
        CHECK(blocks[1].language == "java");
    }
    SUBCASE("no block") { CHECK(extract_fenced_code("just prose").empty()); }
}

TEST_CASE("an unterminated fence runs to the end of the reply") {
    const auto reply = read_file(fs::path(MGEN_TEST_DIR) / "golden" / "unterminated_reply.md");
    const auto expected = read_file(fs::path(MGEN_TEST_DIR) / "golden" / "unterminated_reply.block");
    const auto blocks = extract_fenced_code(reply);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].unterminated);
    CHECK(blocks[0].language == "kotlin");
    // Trailing blank lines inside the open fence are kept.
    CHECK(blocks[0].text == expected);
}

TEST_CASE("braced answer tokens") {
    CHECK(extract_braced_token("{yes}").token == BracedToken::Yes);
    const auto no = extract_braced_token("{no}, because the return value differs");
    CHECK(no.token == BracedToken::No);
    CHECK(no.explanation == "because the return value differs");
    CHECK(extract_braced_token("they look the same to me").token == BracedToken::NoAnswer);
    CHECK(extract_braced_token("Answer: {YES}").token == BracedToken::Yes);
    CHECK(extract_braced_token("{no} first, then {yes}").token == BracedToken::No);
    CHECK(extract_braced_token("{yes} though maybe {no}").token == BracedToken::Yes);
    CHECK(extract_braced_token("yes and no").token == BracedToken::NoAnswer);
}

TEST_CASE("request digests depend on model, prompt and decoding") {
    const ChatRequest a{"m", "p", {}};
    ChatRequest b = a;
    CHECK(request_digest(a) == request_digest(b));
    b.params.temperature = 0.7;
    CHECK(request_digest(a) != request_digest(b));
    b = a;
    b.prompt = "q";
    CHECK(request_digest(a) != request_digest(b));
    CHECK(request_digest(a).size() == 64);
}

TEST_CASE("replay serves stored responses without a backend") {
    TranscriptStore store;
    GatewayConfig gc;
    const ChatRequest req{gc.model, "hello", gc.params};
    store.append(Exchange{request_digest(req), 0, "x", gc.model, gc.params, "hello", "first", ""});
    store.append(Exchange{request_digest(req), 1, "x", gc.model, gc.params, "hello", "second", ""});
    Gateway g(gc, nullptr, std::move(store));
    CHECK(g.complete("hello") == "first");
    CHECK(g.complete("hello") == "second");
    CHECK(code_of([&] { g.complete("hello"); }) == ErrorCode::ReplayMiss);
    CHECK(code_of([&] { g.complete("other"); }) == ErrorCode::ReplayMiss);
    CHECK(g.backend_calls() == 0);
}

TEST_CASE("recording persists exchanges that replay byte-identically") {
    TempDir dir;
    const auto path = dir.path() / "t.jsonl";
    int calls = 0;
    std::vector<std::string> live;
    {
        GatewayConfig gc;
        gc.mode = GatewayMode::Record;
        TranscriptStore store;
        store.open_sink(path, true);
        Gateway g(gc, std::make_unique<FakeBackend>([](const std::string& p) { return "re: " + p + "\n```\nx\n```"; }, &calls),
                  std::move(store));
        for (const char* p : {"a", "b", "a"}) live.push_back(g.complete(p));
    }
    CHECK(calls == 3);
    Gateway replay(GatewayConfig{}, nullptr, TranscriptStore::load(path));
    for (std::size_t i = 0; const char* p : {"a", "b", "a"}) CHECK(replay.complete(p) == live[i++]);
    CHECK(replay.backend_calls() == 0);
    const auto lines = read_file(path);
    CHECK(std::count(lines.begin(), lines.end(), '\n') == 3);
    const auto first = json::parse(lines.substr(0, lines.find('\n')));
    CHECK(first.at("prompt") == "a");
    CHECK(first.contains("digest"));
    CHECK(first.contains("response"));
}

TEST_CASE("malformed transcripts are rejected") {
    TempDir dir;
    write_file(dir.path() / "t.jsonl", "{\"digest\":\"d\"}\nnot json\n");
    CHECK(code_of([&] { TranscriptStore::load(dir.path() / "t.jsonl"); }) == ErrorCode::TranscriptMalformed);
}

TEST_CASE("the request cap stops calls and marks the budget exhausted") {
    int calls = 0;
    auto g = live_gateway([](const std::string&) { return "ok"; }, &calls, 2);
    g->complete("1");
    g->complete("2");
    CHECK_FALSE(g->budget_exhausted());
    CHECK(code_of([&] { g->complete("3"); }) == ErrorCode::BudgetExceeded);
    CHECK(g->budget_exhausted());
    CHECK(calls == 2);
}

TEST_CASE("transport errors are retried once and never past the cap") {
    int calls = 0;
    auto failing = [](const std::string&) -> std::string { throw Error(ErrorCode::BackendUnavailable, "down"); };
    auto g = live_gateway(failing, &calls, 3);
    CHECK(code_of([&] { g->complete("a"); }) == ErrorCode::BackendUnavailable);
    CHECK(calls == 2);
    CHECK(code_of([&] { g->complete("b"); }) == ErrorCode::BackendUnavailable);
    CHECK(calls == 3);
    CHECK(code_of([&] { g->complete("c"); }) == ErrorCode::BudgetExceeded);
    CHECK(calls == 3);
}

TEST_CASE("concurrent callers respect the in-flight limit") {
    std::atomic<int> active{0};
    std::atomic<int> peak{0};
    GatewayConfig gc;
    gc.mode = GatewayMode::Live;
    gc.in_flight = 2;
    Gateway g(gc,
              std::make_unique<FakeBackend>([&](const std::string& p) {
                  const int now = ++active;
                  int prev = peak.load();
                  while (now > prev && !peak.compare_exchange_weak(prev, now)) {
                  }
                  std::this_thread::sleep_for(std::chrono::milliseconds(20));
                  --active;
                  return p;
              }),
              TranscriptStore{});
    std::vector<std::jthread> threads;
    for (int i = 0; i < 8; ++i) threads.emplace_back([&, i] { g.complete(std::to_string(i)); });
    threads.clear();
    CHECK(peak.load() <= 2);
    CHECK(g.requests() == 8);
}

TEST_CASE("the HTTP backend speaks the chat-completion wire format") {
    httplib::Server server;
    json seen;
    std::string auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "{yes}"}}}}}}}.dump(),
                        "application/json");
    });
    server.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    const std::string base = "http://127.0.0.1:" + std::to_string(port);
    HttpChatBackend backend(base + "/v1/chat/completions", "secret");
    const auto reply = backend.complete(ChatRequest{"llama-3.1-70b-instruct", "hi", {}});
    HttpChatBackend broken(base + "/broken", "");
    const auto broken_code = code_of([&] { broken.complete(ChatRequest{"m", "hi", {}}); });
    server.stop();
    t.join();

    CHECK(reply == "{yes}");
    CHECK(auth == "Bearer secret");
    CHECK(seen.at("model") == "llama-3.1-70b-instruct");
    CHECK(seen.at("messages").at(0).at("role") == "user");
    CHECK(seen.at("messages").at(0).at("content") == "hi");
    CHECK(seen.at("temperature").get<double>() == doctest::Approx(0.2));
    CHECK(seen.at("max_tokens") == 4096);
    CHECK(broken_code == ErrorCode::BackendUnavailable);
    HttpChatBackend nowhere("http://127.0.0.1:1/v1/chat/completions", "");
    CHECK(code_of([&] { nowhere.complete(ChatRequest{"m", "hi", {}}); }) == ErrorCode::BackendUnavailable);
}

TEST_CASE("gateway modes parse") {
    CHECK(parse_gateway_mode("replay") == GatewayMode::Replay);
    CHECK(parse_gateway_mode("record") == GatewayMode::Record);
    CHECK(parse_gateway_mode("live") == GatewayMode::Live);
    CHECK_THROWS_AS(parse_gateway_mode("offline"), Error);
}

}  // TEST_SUITE
