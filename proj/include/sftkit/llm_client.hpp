#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sftkit {

struct CompletionParams {
    std::string model_name = "gpt-4";
    double temperature = 0.7;  // diversity default for instruction generation
    int max_output_tokens = 2048;
    std::chrono::milliseconds timeout{60000};
};

struct ClientPolicy {
    int max_retries = 3;  // retries after the first attempt, transient failures only
    std::chrono::milliseconds backoff_base{500};
    int max_inflight = 4;
    std::optional<double> requests_per_minute;
};

enum class CompletionStatus {
    Ok,
    AuthError,          // missing/rejected credentials, never retried
    Timeout,            // still failing after retries
    RateLimited,        // 429 after retries
    TransportError,     // connection-level failure after retries
    ServerError,        // 5xx after retries
    MalformedResponse,  // 2xx with an unusable envelope
    BadRequest,         // other 4xx, never retried
    EmptyPrompt,
};

const char* to_string(CompletionStatus s);

struct CompletionOutcome {
    CompletionStatus status = CompletionStatus::Ok;
    std::string text;     // model text on Ok
    std::string message;  // diagnostic on failure
    int attempts = 0;     // transport calls actually made

    bool ok() const { return status == CompletionStatus::Ok; }
};

struct HttpResponse {
    bool transport_ok = true;   // false: connection failure / timeout
    bool timed_out = false;
    int status = 200;
    std::string body;
    std::string transport_error;
};

struct HttpHeader {
    std::string name;
    std::string value;
};

// Transport seam: the real HTTPS transport and the scripted test mock
// implement this.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(const std::string& path, const std::string& body,
                              const std::vector<HttpHeader>& headers,
                              std::chrono::milliseconds timeout) = 0;
    virtual bool requires_credentials() const { return false; }
};

// Replays a scripted sequence of responses; records call order and the
// high-water mark of concurrent calls so inflight limits are assertable.
class MockTransport : public Transport {
public:
    explicit MockTransport(std::vector<HttpResponse> script, bool needs_credentials = false)
        : script_(std::move(script)), needs_credentials_(needs_credentials) {}

    HttpResponse post(const std::string& path, const std::string& body,
                      const std::vector<HttpHeader>& headers,
                      std::chrono::milliseconds timeout) override;
    bool requires_credentials() const override { return needs_credentials_; }

    int calls() const { return calls_; }
    int max_concurrent() const { return max_concurrent_; }
    const std::vector<std::string>& bodies() const { return bodies_; }

    // Test hook: artificial latency inside post() to widen overlap windows.
    std::chrono::milliseconds hold_time{0};

private:
    std::mutex mu_;
    std::vector<HttpResponse> script_;
    bool needs_credentials_ = false;
    int calls_ = 0;
    int inflight_ = 0;
    int max_concurrent_ = 0;
    std::vector<std::string> bodies_;
};

// HTTPS transport over cpp-httplib. Credentials come from the
// environment, never from flags.
std::shared_ptr<Transport> make_http_transport(const std::string& base_url,
                                               const std::string& api_key_env);

// Minimal interface the generation pipeline depends on; implemented by
// the real client and the offline deterministic mock.
class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    virtual CompletionOutcome complete(const std::string& prompt,
                                       const CompletionParams& params) = 0;
};

// Chat-completions-style client with bounded concurrency, exponential
// backoff on transient failures, and an optional request-rate cap.
class LlmClient : public CompletionClient {
public:
    struct Config {
        std::string completions_path = "/v1/chat/completions";
        std::string api_key_env = "SFTKIT_API_KEY";
        ClientPolicy policy;
    };

    using Sleeper = std::function<void(std::chrono::milliseconds)>;
    using Clock = std::function<std::chrono::steady_clock::time_point()>;

    LlmClient(Config config, std::shared_ptr<Transport> transport);
    LlmClient(Config config, std::shared_ptr<Transport> transport, Sleeper sleeper, Clock clock);

    CompletionOutcome complete(const std::string& prompt, const CompletionParams& params) override;

    // Backoff delays handed to the sleeper, in order (diagnostic).
    std::vector<std::chrono::milliseconds> recorded_backoffs() const;

private:
    void rate_limit_wait();

    Config config_;
    std::shared_ptr<Transport> transport_;
    Sleeper sleeper_;
    Clock clock_;

    std::mutex inflight_mu_;
    std::condition_variable inflight_cv_;
    int inflight_ = 0;

    std::mutex rate_mu_;
    std::optional<std::chrono::steady_clock::time_point> next_allowed_;

    mutable std::mutex backoff_mu_;
    std::vector<std::chrono::milliseconds> backoffs_;
};

}  // namespace sftkit
