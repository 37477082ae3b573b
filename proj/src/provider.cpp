#include "orderbench/provider.hpp"

#include "orderbench/digest.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace orderbench {

std::string to_string(FinishReason reason)
{
    switch (reason) {
    case FinishReason::Stop:
        return "stop";
    case FinishReason::Length:
        return "length";
    case FinishReason::Filtered:
        return "filtered";
    case FinishReason::Other:
        return "other";
    }
    return "other";
}

FinishReason parse_finish_reason(std::string_view wire)
{
    if (wire == "stop" || wire == "end_turn" || wire == "stop_sequence") {
        return FinishReason::Stop;
    }
    if (wire == "length" || wire == "max_tokens") {
        return FinishReason::Length;
    }
    if (wire == "content_filter" || wire == "filtered" || wire == "safety") {
        return FinishReason::Filtered;
    }
    return FinishReason::Other;
}

std::string to_string(ProviderErrorKind kind)
{
    switch (kind) {
    case ProviderErrorKind::Auth:
        return "Auth";
    case ProviderErrorKind::RateLimited:
        return "RateLimited";
    case ProviderErrorKind::Timeout:
        return "Timeout";
    case ProviderErrorKind::Malformed:
        return "Malformed";
    case ProviderErrorKind::Upstream5xx:
        return "Upstream5xx";
    case ProviderErrorKind::Exhausted:
        return "Exhausted";
    }
    return "Unknown";
}

ProviderError::ProviderError(ProviderErrorKind kind, const std::string& detail)
    : std::runtime_error(to_string(kind) + ": " + detail), kind_(kind), detail_(detail)
{
}

bool ProviderError::retryable() const noexcept
{
    return kind_ == ProviderErrorKind::RateLimited || kind_ == ProviderErrorKind::Timeout ||
           kind_ == ProviderErrorKind::Upstream5xx;
}

std::string request_fingerprint(const ModelSpec& spec, const RenderedPrompt& prompt)
{
    // A JSON array gives an unambiguous encoding of the tuple.
    const nlohmann::json key = {spec.provider_id, spec.model_name,  spec.temperature,
                                spec.max_tokens,  prompt.text,      prompt.template_version};
    return sha256_hex(key.dump());
}

std::chrono::milliseconds RetryPolicy::delay_after(int attempt) const
{
    const double ms = static_cast<double>(base_delay.count()) * std::pow(factor, attempt - 1);
    return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

std::chrono::milliseconds RetryPolicy::max_total_sleep() const
{
    std::chrono::milliseconds total{0};
    for (int a = 1; a < max_attempts; ++a) {
        const auto d = delay_after(a);
        total += d + std::chrono::milliseconds(static_cast<std::int64_t>(std::ceil(d.count() * jitter_fraction)));
    }
    return total;
}

ModelResponse with_retries(const RetryPolicy& policy, const std::function<ModelResponse()>& attempt,
                           const Sleeper& sleep, std::uint64_t jitter_seed)
{
    std::mt19937_64 rng(jitter_seed);
    std::vector<std::string> log;
    for (int n = 1;; ++n) {
        try {
            auto r = attempt();
            log.push_back("attempt " + std::to_string(n) + ": ok");
            r.attempt_count = n;
            r.attempt_log = std::move(log);
            return r;
        } catch (const ProviderError& e) {
            log.push_back("attempt " + std::to_string(n) + ": " + e.what());
            if (!e.retryable()) {
                throw;
            }
            if (n >= policy.max_attempts) {
                std::string detail = "gave up after " + std::to_string(n) + " attempts";
                for (const auto& l : log) {
                    detail += "; " + l;
                }
                throw ProviderError(ProviderErrorKind::Exhausted, detail);
            }
            const auto d = policy.delay_after(n);
            const auto jitter_cap = static_cast<std::int64_t>(d.count() * policy.jitter_fraction);
            std::int64_t jitter = 0;
            if (jitter_cap > 0) {
                jitter = std::uniform_int_distribution<std::int64_t>(0, jitter_cap - 1)(rng);
            }
            sleep(d + std::chrono::milliseconds(jitter));
        }
    }
}

TokenBucket::TokenBucket(double rate_per_s, double burst)
    : rate_(rate_per_s), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)), last_(Clock::now())
{
}

std::optional<TokenBucket::Clock::duration> TokenBucket::try_acquire(Clock::time_point now)
{
    std::lock_guard lock(mu_);
    if (rate_ <= 0) {
        return std::nullopt;
    }
    if (now > last_) {
        const double elapsed = std::chrono::duration<double>(now - last_).count();
        tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
        last_ = now;
    }
    if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return std::nullopt;
    }
    const double wait_s = (1.0 - tokens_) / rate_;
    return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(wait_s));
}

void TokenBucket::acquire()
{
    while (auto wait = try_acquire(Clock::now())) {
        std::this_thread::sleep_for(*wait);
    }
}

} // namespace orderbench
