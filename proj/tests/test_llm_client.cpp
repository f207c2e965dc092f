#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>

#include "sftkit/llm_client.hpp"

using namespace sftkit;
using nlohmann::json;

namespace {

HttpResponse ok_reply(const std::string& content) {
    json envelope;
    envelope["choices"] = json::array(
        {json{{"message", json{{"role", "assistant"}, {"content", content}}}}});
    HttpResponse resp;
    resp.status = 200;
    resp.body = envelope.dump();
    return resp;
}

HttpResponse status_reply(int status, const std::string& body = "{}") {
    HttpResponse resp;
    resp.status = status;
    resp.body = body;
    return resp;
}

HttpResponse transport_failure(bool timed_out = false) {
    HttpResponse resp;
    resp.transport_ok = false;
    resp.timed_out = timed_out;
    resp.transport_error = timed_out ? "timeout" : "connection reset";
    return resp;
}

LlmClient::Config quiet_config(int max_retries = 3) {
    LlmClient::Config config;
    config.policy.max_retries = max_retries;
    config.policy.backoff_base = std::chrono::milliseconds(10);
    return config;
}

// No real sleeping in tests; delays are recorded by the client itself.
const LlmClient::Sleeper null_sleeper = [](std::chrono::milliseconds) {};
const LlmClient::Clock real_clock = [] { return std::chrono::steady_clock::now(); };

}  // namespace

TEST_SUITE("llm_client") {

TEST_CASE("mock client returns the canned reply verbatim") {
    const std::string canned = "[{\"Instruction\": \"x\", \"Output\": \"y\"}]";
    auto transport = std::make_shared<MockTransport>(std::vector<HttpResponse>{ok_reply(canned)});
    LlmClient client(quiet_config(), transport, null_sleeper, real_clock);
    const auto outcome = client.complete("prompt", CompletionParams{});
    REQUIRE(outcome.ok());
    CHECK(outcome.text == canned);
    CHECK(outcome.attempts == 1);
}

TEST_CASE("two transient failures then success: three attempts total") {
    auto transport = std::make_shared<MockTransport>(std::vector<HttpResponse>{
        transport_failure(), status_reply(503), ok_reply("fine")});
    LlmClient client(quiet_config(3), transport, null_sleeper, real_clock);
    const auto outcome = client.complete("prompt", CompletionParams{});
    REQUIRE(outcome.ok());
    CHECK(outcome.attempts == 3);
    CHECK(transport->calls() == 3);

    // Backoff delays are nondecreasing and bounded by the policy.
    const auto delays = client.recorded_backoffs();
    REQUIRE(delays.size() == 2);
    CHECK(delays[0] <= delays[1]);
    CHECK(delays[0] == std::chrono::milliseconds(10));
    CHECK(delays[1] == std::chrono::milliseconds(20));
}

TEST_CASE("retry budget exhausts and the last transient status is reported") {
    auto transport = std::make_shared<MockTransport>(std::vector<HttpResponse>{
        status_reply(429), status_reply(429), status_reply(429)});
    LlmClient client(quiet_config(2), transport, null_sleeper, real_clock);
    const auto outcome = client.complete("prompt", CompletionParams{});
    CHECK(outcome.status == CompletionStatus::RateLimited);
    CHECK(outcome.attempts == 3);  // 1 + 2 retries
    CHECK(client.recorded_backoffs().size() == 2);
}

TEST_CASE("auth failures are not retried") {
    auto transport = std::make_shared<MockTransport>(std::vector<HttpResponse>{
        status_reply(401), ok_reply("never seen")});
    LlmClient client(quiet_config(5), transport, null_sleeper, real_clock);
    const auto outcome = client.complete("prompt", CompletionParams{});
    CHECK(outcome.status == CompletionStatus::AuthError);
    CHECK(outcome.attempts == 1);
}

TEST_CASE("missing credential: immediate auth error, zero transport calls") {
    ::unsetenv("SFTKIT_TEST_KEY");
    auto transport = std::make_shared<MockTransport>(
        std::vector<HttpResponse>{ok_reply("x")}, /*needs_credentials=*/true);
    LlmClient::Config config = quiet_config();
    config.api_key_env = "SFTKIT_TEST_KEY";
    LlmClient client(config, transport, null_sleeper, real_clock);
    const auto outcome = client.complete("prompt", CompletionParams{});
    CHECK(outcome.status == CompletionStatus::AuthError);
    CHECK(outcome.attempts == 0);
    CHECK(transport->calls() == 0);
}

TEST_CASE("credential present: bearer header sent, body carries the prompt") {
    ::setenv("SFTKIT_TEST_KEY", "sk-test-123", 1);
    auto transport = std::make_shared<MockTransport>(
        std::vector<HttpResponse>{ok_reply("x")}, /*needs_credentials=*/true);
    LlmClient::Config config = quiet_config();
    config.api_key_env = "SFTKIT_TEST_KEY";
    LlmClient client(config, transport, null_sleeper, real_clock);
    CompletionParams params;
    params.model_name = "strong-model";
    params.temperature = 0.7;
    const auto outcome = client.complete("the prompt body", params);
    ::unsetenv("SFTKIT_TEST_KEY");
    REQUIRE(outcome.ok());
    REQUIRE(transport->bodies().size() == 1);
    const json body = json::parse(transport->bodies()[0]);
    CHECK(body["model"] == "strong-model");
    CHECK(body["messages"][0]["content"] == "the prompt body");
    CHECK(body["temperature"] == 0.7);
}

TEST_CASE("malformed envelope is an error, not a retry") {
    auto transport = std::make_shared<MockTransport>(std::vector<HttpResponse>{
        status_reply(200, "{\"unexpected\": true}"), ok_reply("never")});
    LlmClient client(quiet_config(3), transport, null_sleeper, real_clock);
    const auto outcome = client.complete("prompt", CompletionParams{});
    CHECK(outcome.status == CompletionStatus::MalformedResponse);
    CHECK(outcome.attempts == 1);
}

TEST_CASE("empty prompt is rejected before any transport call") {
    auto transport = std::make_shared<MockTransport>(std::vector<HttpResponse>{ok_reply("x")});
    LlmClient client(quiet_config(), transport, null_sleeper, real_clock);
    const auto outcome = client.complete("", CompletionParams{});
    CHECK(outcome.status == CompletionStatus::EmptyPrompt);
    CHECK(transport->calls() == 0);
}

TEST_CASE("inflight limit bounds observed concurrency") {
    auto transport = std::make_shared<MockTransport>(std::vector<HttpResponse>{ok_reply("x")});
    transport->hold_time = std::chrono::milliseconds(15);
    LlmClient::Config config = quiet_config(0);
    config.policy.max_inflight = 2;
    LlmClient client(config, transport, null_sleeper, real_clock);

    std::vector<std::thread> workers;
    std::atomic<int> ok_count{0};
    for (int i = 0; i < 8; ++i) {
        workers.emplace_back([&] {
            if (client.complete("p", CompletionParams{}).ok()) ++ok_count;
        });
    }
    for (auto& w : workers) w.join();
    CHECK(ok_count == 8);
    CHECK(transport->calls() == 8);
    CHECK(transport->max_concurrent() <= 2);
}

TEST_CASE("requests-per-minute cap spaces out request starts") {
    auto transport = std::make_shared<MockTransport>(std::vector<HttpResponse>{ok_reply("x")});
    LlmClient::Config config = quiet_config(0);
    config.policy.requests_per_minute = 60.0;  // 1 per second

    auto fake_now = std::make_shared<std::chrono::steady_clock::time_point>(
        std::chrono::steady_clock::time_point{});
    std::vector<std::chrono::milliseconds> waits;
    LlmClient client(
        config, transport,
        [&waits, fake_now](std::chrono::milliseconds d) {
            waits.push_back(d);
            *fake_now += d;  // sleeping advances the fake clock
        },
        [fake_now] { return *fake_now; });

    CHECK(client.complete("a", CompletionParams{}).ok());
    CHECK(waits.empty());  // first request goes straight through
    CHECK(client.complete("b", CompletionParams{}).ok());
    REQUIRE(waits.size() == 1);
    CHECK(waits[0] == std::chrono::milliseconds(1000));
}

}  // TEST_SUITE
