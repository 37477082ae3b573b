#pragma once

#include "orderbench/prompts.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orderbench {

struct ModelSpec {
    std::string provider_id;
    std::string model_name;
    double temperature = 0.0;
    int max_tokens = 1024;
    std::string endpoint_url;
    double request_timeout_s = 60.0;

    bool operator==(const ModelSpec&) const = default;
};

enum class FinishReason { Stop, Length, Filtered, Other };

std::string to_string(FinishReason reason);
FinishReason parse_finish_reason(std::string_view wire);

struct ModelResponse {
    std::string text;
    FinishReason finish_reason = FinishReason::Stop;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::int64_t latency_ms = 0;
    bool from_cache = false;
    std::string request_fingerprint;
    int attempt_count = 1;
    // One line per upstream attempt, e.g. "attempt 1: RateLimited (HTTP 429)".
    std::vector<std::string> attempt_log;
};

enum class ProviderErrorKind { Auth, RateLimited, Timeout, Malformed, Upstream5xx, Exhausted };

std::string to_string(ProviderErrorKind kind);

class ProviderError : public std::runtime_error {
public:
    ProviderError(ProviderErrorKind kind, const std::string& detail);

    ProviderErrorKind kind() const noexcept { return kind_; }
    // RateLimited, Timeout and Upstream5xx are worth another attempt.
    bool retryable() const noexcept;
    const std::string& detail() const noexcept { return detail_; }

private:
    ProviderErrorKind kind_;
    std::string detail_;
};

// Digest over (provider_id, model_name, temperature, max_tokens, prompt text,
// template_version); the cache key for a completion.
std::string request_fingerprint(const ModelSpec& spec, const RenderedPrompt& prompt);

class Provider {
public:
    virtual ~Provider() = default;

    // Safe for concurrent callers.
    virtual ModelResponse complete(const ModelSpec& spec, const RenderedPrompt& prompt) = 0;
};

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base_delay{1000};
    double factor = 2.0;
    // Each delay gets uniform extra jitter in [0, jitter_fraction * delay).
    double jitter_fraction = 0.5;

    // Nominal delay before attempt `attempt + 1`, excluding jitter (attempt >= 1).
    std::chrono::milliseconds delay_after(int attempt) const;
    // Upper bound on total sleep across all retries, jitter included.
    std::chrono::milliseconds max_total_sleep() const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Runs `attempt` until it succeeds, a non-retryable error surfaces, or the
// policy runs out of attempts (then ProviderError Exhausted). The returned
// response carries attempt_count and the per-attempt log.
ModelResponse with_retries(const RetryPolicy& policy, const std::function<ModelResponse()>& attempt,
                           const Sleeper& sleep, std::uint64_t jitter_seed = 0);

// Client-side token bucket; acquire() blocks until a token is available.
class TokenBucket {
public:
    using Clock = std::chrono::steady_clock;

    TokenBucket(double rate_per_s, double burst);

    void acquire();
    // Non-blocking: takes a token if one is available at `now`, otherwise
    // returns the wait until one will be.
    std::optional<Clock::duration> try_acquire(Clock::time_point now);

private:
    std::mutex mu_;
    double rate_;
    double burst_;
    double tokens_;
    Clock::time_point last_;
};

} // namespace orderbench
