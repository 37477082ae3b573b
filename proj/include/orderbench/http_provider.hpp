#pragma once

#include "orderbench/provider.hpp"

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace orderbench {

struct HttpReply {
    int status = 0;          // 0 when the transport failed before a reply
    std::string body;
    bool timed_out = false;  // transport-level failure (connect, read, timeout)
    std::string transport_error;
};

using Headers = std::vector<std::pair<std::string, std::string>>;
using Transport = std::function<HttpReply(const std::string& url, const std::string& body, const Headers& headers,
                                          double timeout_s)>;

// POSTs through cpp-httplib; supports http:// and https:// URLs.
Transport make_httplib_transport();

// "<PROVIDER_ID>_API_KEY" with the id uppercased and non-alphanumerics
// replaced by '_'.
std::string api_key_env_name(const std::string& provider_id);

struct HttpProviderOptions {
    RetryPolicy retry;
    double requests_per_second = 2.0; // <= 0 disables pacing
    std::string api_key;              // empty: no Authorization header
    std::uint64_t jitter_seed = 0;
};

// Chat-completions client: one user message per request, fresh context each
// time. Maps HTTP failures onto the ProviderError taxonomy and retries the
// retryable ones.
class ChatCompletionsProvider : public Provider {
public:
    ChatCompletionsProvider(HttpProviderOptions options, Transport transport, Sleeper sleeper = {});

    ModelResponse complete(const ModelSpec& spec, const RenderedPrompt& prompt) override;

    // Upstream requests sent so far, retries included.
    std::size_t attempts_sent() const noexcept { return attempts_.load(); }

    static std::string request_body(const ModelSpec& spec, const std::string& prompt_text);
    // Parses a 2xx body; throws ProviderError Malformed on shape errors.
    static ModelResponse parse_reply(const std::string& body);

private:
    ModelResponse attempt_once(const ModelSpec& spec, const RenderedPrompt& prompt);

    HttpProviderOptions options_;
    Transport transport_;
    Sleeper sleeper_;
    TokenBucket bucket_;
    std::atomic<std::size_t> attempts_{0};
};

// Reachability probe for `validate`: true when any HTTP reply comes back.
bool endpoint_reachable(const std::string& url, double timeout_s, std::string* error);

} // namespace orderbench
