#include "sftkit/llm_client.hpp"

#include <cstdlib>
#include <thread>

#if defined(SFTKIT_HAVE_OPENSSL)
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace sftkit {

using nlohmann::json;

const char* to_string(CompletionStatus s) {
    switch (s) {
        case CompletionStatus::Ok: return "ok";
        case CompletionStatus::AuthError: return "auth_error";
        case CompletionStatus::Timeout: return "timeout";
        case CompletionStatus::RateLimited: return "rate_limited";
        case CompletionStatus::TransportError: return "transport_error";
        case CompletionStatus::ServerError: return "server_error";
        case CompletionStatus::MalformedResponse: return "malformed_response";
        case CompletionStatus::BadRequest: return "bad_request";
        case CompletionStatus::EmptyPrompt: return "empty_prompt";
    }
    return "unknown";
}

HttpResponse MockTransport::post(const std::string&, const std::string& body,
                                 const std::vector<HttpHeader>&, std::chrono::milliseconds) {
    HttpResponse resp;
    {
        std::lock_guard lock(mu_);
        bodies_.push_back(body);
        if (static_cast<std::size_t>(calls_) < script_.size()) {
            resp = script_[static_cast<std::size_t>(calls_)];
        } else if (!script_.empty()) {
            resp = script_.back();
        } else {
            resp.transport_ok = false;
            resp.transport_error = "empty script";
        }
        ++calls_;
        ++inflight_;
        max_concurrent_ = std::max(max_concurrent_, inflight_);
    }
    if (hold_time.count() > 0) std::this_thread::sleep_for(hold_time);
    {
        std::lock_guard lock(mu_);
        --inflight_;
    }
    return resp;
}

namespace {

class HttpTransport : public Transport {
public:
    HttpTransport(std::string base_url, std::string api_key_env)
        : base_url_(std::move(base_url)), api_key_env_(std::move(api_key_env)) {}

    HttpResponse post(const std::string& path, const std::string& body,
                      const std::vector<HttpHeader>& headers,
                      std::chrono::milliseconds timeout) override {
        httplib::Client client(base_url_);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
        httplib::Headers hdrs;
        for (const auto& h : headers) hdrs.emplace(h.name, h.value);
        auto result = client.Post(path, hdrs, body, "application/json");
        HttpResponse resp;
        if (!result) {
            resp.transport_ok = false;
            resp.timed_out = result.error() == httplib::Error::ConnectionTimeout ||
                             result.error() == httplib::Error::Read;
            resp.transport_error = httplib::to_string(result.error());
            return resp;
        }
        resp.status = result->status;
        resp.body = result->body;
        return resp;
    }

    bool requires_credentials() const override { return true; }

private:
    std::string base_url_;
    std::string api_key_env_;
};

}  // namespace

std::shared_ptr<Transport> make_http_transport(const std::string& base_url,
                                               const std::string& api_key_env) {
    return std::make_shared<HttpTransport>(base_url, api_key_env);
}

LlmClient::LlmClient(Config config, std::shared_ptr<Transport> transport)
    : LlmClient(std::move(config), std::move(transport),
                [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); },
                [] { return std::chrono::steady_clock::now(); }) {}

LlmClient::LlmClient(Config config, std::shared_ptr<Transport> transport, Sleeper sleeper,
                     Clock clock)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      sleeper_(std::move(sleeper)),
      clock_(std::move(clock)) {}

std::vector<std::chrono::milliseconds> LlmClient::recorded_backoffs() const {
    std::lock_guard lock(backoff_mu_);
    return backoffs_;
}

void LlmClient::rate_limit_wait() {
    if (!config_.policy.requests_per_minute || *config_.policy.requests_per_minute <= 0) return;
    const auto interval = std::chrono::milliseconds(
        static_cast<long long>(60000.0 / *config_.policy.requests_per_minute));
    std::chrono::milliseconds wait{0};
    {
        std::lock_guard lock(rate_mu_);
        const auto now = clock_();
        if (next_allowed_ && *next_allowed_ > now) {
            wait = std::chrono::duration_cast<std::chrono::milliseconds>(*next_allowed_ - now);
            next_allowed_ = *next_allowed_ + interval;
        } else {
            next_allowed_ = now + interval;
        }
    }
    if (wait.count() > 0) sleeper_(wait);
}

CompletionOutcome LlmClient::complete(const std::string& prompt, const CompletionParams& params) {
    CompletionOutcome outcome;
    if (prompt.empty()) {
        outcome.status = CompletionStatus::EmptyPrompt;
        outcome.message = "prompt must be non-empty";
        return outcome;
    }

    std::string api_key;
    if (transport_->requires_credentials()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            outcome.status = CompletionStatus::AuthError;
            outcome.message = "credential environment variable " + config_.api_key_env + " not set";
            return outcome;  // zero network attempts
        }
        api_key = key;
    }

    json body;
    body["model"] = params.model_name;
    body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_output_tokens;
    const std::string payload = body.dump();

    std::vector<HttpHeader> headers;
    if (!api_key.empty()) headers.push_back({"Authorization", "Bearer " + api_key});

    const int max_attempts = 1 + std::max(0, config_.policy.max_retries);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        if (attempt > 0) {
            // Exponential backoff: base * 2^(attempt-1); nondecreasing.
            const auto delay = config_.policy.backoff_base * (1LL << (attempt - 1));
            {
                std::lock_guard lock(backoff_mu_);
                backoffs_.push_back(delay);
            }
            sleeper_(delay);
        }
        rate_limit_wait();

        HttpResponse resp;
        {
            // Inflight gate: at most max_inflight concurrent transport calls.
            std::unique_lock lock(inflight_mu_);
            inflight_cv_.wait(lock, [&] { return inflight_ < config_.policy.max_inflight; });
            ++inflight_;
            lock.unlock();
            resp = transport_->post(config_.completions_path, payload, headers, params.timeout);
            lock.lock();
            --inflight_;
            inflight_cv_.notify_one();
        }
        ++outcome.attempts;

        // Debug logging is opt-in and never includes credentials (the
        // Authorization header is not part of the bodies).
        if (std::getenv("SFTKIT_DEBUG") != nullptr) {
            std::fprintf(stderr, "[llm] attempt %d -> %s status=%d request=%zuB response=%zuB\n",
                         outcome.attempts, config_.completions_path.c_str(), resp.status,
                         payload.size(), resp.body.size());
        }

        if (!resp.transport_ok) {
            outcome.status = resp.timed_out ? CompletionStatus::Timeout
                                            : CompletionStatus::TransportError;
            outcome.message = resp.transport_error;
            continue;  // transient
        }
        if (resp.status == 401 || resp.status == 403) {
            outcome.status = CompletionStatus::AuthError;
            outcome.message = "authentication rejected (HTTP " + std::to_string(resp.status) + ")";
            return outcome;  // non-retryable
        }
        if (resp.status == 429) {
            outcome.status = CompletionStatus::RateLimited;
            outcome.message = "rate limited (HTTP 429)";
            continue;
        }
        if (resp.status >= 500) {
            outcome.status = CompletionStatus::ServerError;
            outcome.message = "server error (HTTP " + std::to_string(resp.status) + ")";
            continue;
        }
        if (resp.status >= 400) {
            outcome.status = CompletionStatus::BadRequest;
            outcome.message = "HTTP " + std::to_string(resp.status) + ": " + resp.body;
            return outcome;  // non-retryable
        }

        const json envelope = json::parse(resp.body, nullptr, false);
        if (envelope.is_discarded() || !envelope.contains("choices") ||
            !envelope["choices"].is_array() || envelope["choices"].empty() ||
            !envelope["choices"][0].contains("message") ||
            !envelope["choices"][0]["message"].contains("content") ||
            !envelope["choices"][0]["message"]["content"].is_string()) {
            outcome.status = CompletionStatus::MalformedResponse;
            outcome.message = "response envelope missing choices[0].message.content";
            return outcome;  // not transient: the server spoke, just not our dialect
        }

        outcome.status = CompletionStatus::Ok;
        outcome.text = envelope["choices"][0]["message"]["content"].get<std::string>();
        outcome.message.clear();
        return outcome;
    }
    return outcome;  // last transient failure wins
}

}  // namespace sftkit
