#include "orderbench/http_provider.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cctype>
#include <thread>

namespace orderbench {

namespace {

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url)
{
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

void configure(httplib::Client& cli, double timeout_s)
{
    const auto secs = static_cast<time_t>(timeout_s);
    const auto usecs = static_cast<time_t>((timeout_s - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
}

} // namespace

Transport make_httplib_transport()
{
    return [](const std::string& url, const std::string& body, const Headers& headers, double timeout_s) {
        const auto parts = split_url(url);
        httplib::Client cli(parts.origin);
        configure(cli, timeout_s);
        httplib::Headers h;
        for (const auto& [k, v] : headers) {
            h.emplace(k, v);
        }
        HttpReply reply;
        auto res = cli.Post(parts.path, h, body, "application/json");
        if (!res) {
            reply.timed_out = true;
            reply.transport_error = httplib::to_string(res.error());
            return reply;
        }
        reply.status = res->status;
        reply.body = res->body;
        return reply;
    };
}

std::string api_key_env_name(const std::string& provider_id)
{
    std::string name;
    for (char c : provider_id) {
        name.push_back(std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                                                                   : '_');
    }
    return name + "_API_KEY";
}

ChatCompletionsProvider::ChatCompletionsProvider(HttpProviderOptions options, Transport transport, Sleeper sleeper)
    : options_(std::move(options)), transport_(std::move(transport)), sleeper_(std::move(sleeper)),
      bucket_(options_.requests_per_second, 1.0)
{
    if (!sleeper_) {
        sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    }
}

std::string ChatCompletionsProvider::request_body(const ModelSpec& spec, const std::string& prompt_text)
{
    nlohmann::ordered_json body;
    body["model"] = spec.model_name;
    body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", prompt_text}}});
    body["temperature"] = spec.temperature;
    body["max_tokens"] = spec.max_tokens;
    return body.dump();
}

ModelResponse ChatCompletionsProvider::parse_reply(const std::string& body)
{
    const auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ProviderError(ProviderErrorKind::Malformed, "reply is not a JSON object");
    }
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
        throw ProviderError(ProviderErrorKind::Malformed, "reply has no choices");
    }
    const auto& choice = j["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content") ||
        !choice["message"]["content"].is_string()) {
        throw ProviderError(ProviderErrorKind::Malformed, "choices[0].message.content missing or not a string");
    }
    ModelResponse r;
    r.text = choice["message"]["content"].get<std::string>();
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
        r.finish_reason = parse_finish_reason(choice["finish_reason"].get<std::string>());
    } else {
        r.finish_reason = FinishReason::Other;
    }
    if (j.contains("usage") && j["usage"].is_object()) {
        const auto& u = j["usage"];
        if (u.contains("prompt_tokens") && u["prompt_tokens"].is_number_integer()) {
            r.prompt_tokens = u["prompt_tokens"].get<std::int64_t>();
        }
        if (u.contains("completion_tokens") && u["completion_tokens"].is_number_integer()) {
            r.completion_tokens = u["completion_tokens"].get<std::int64_t>();
        }
    }
    return r;
}

ModelResponse ChatCompletionsProvider::attempt_once(const ModelSpec& spec, const RenderedPrompt& prompt)
{
    bucket_.acquire();
    ++attempts_;
    Headers headers = {{"Accept", "application/json"}};
    if (!options_.api_key.empty()) {
        headers.emplace_back("Authorization", "Bearer " + options_.api_key);
    }
    const auto started = std::chrono::steady_clock::now();
    const auto reply = transport_(spec.endpoint_url, request_body(spec, prompt.text), headers, spec.request_timeout_s);
    const auto latency =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();

    if (reply.status == 0) {
        throw ProviderError(ProviderErrorKind::Timeout, "transport: " + reply.transport_error);
    }
    const std::string status = "HTTP " + std::to_string(reply.status);
    if (reply.status == 401 || reply.status == 403) {
        throw ProviderError(ProviderErrorKind::Auth, status);
    }
    if (reply.status == 429) {
        throw ProviderError(ProviderErrorKind::RateLimited, status);
    }
    if (reply.status == 408 || reply.status == 504) {
        throw ProviderError(ProviderErrorKind::Timeout, status);
    }
    if (reply.status >= 500) {
        throw ProviderError(ProviderErrorKind::Upstream5xx, status);
    }
    if (reply.status < 200 || reply.status >= 300) {
        throw ProviderError(ProviderErrorKind::Malformed, status + ": " + reply.body.substr(0, 200));
    }
    auto r = parse_reply(reply.body);
    r.latency_ms = latency;
    return r;
}

ModelResponse ChatCompletionsProvider::complete(const ModelSpec& spec, const RenderedPrompt& prompt)
{
    if (prompt.text.empty()) {
        throw ProviderError(ProviderErrorKind::Malformed, "empty prompt");
    }
    auto r = with_retries(
        options_.retry, [&] { return attempt_once(spec, prompt); }, sleeper_, options_.jitter_seed);
    r.request_fingerprint = request_fingerprint(spec, prompt);
    r.from_cache = false;
    return r;
}

bool endpoint_reachable(const std::string& url, double timeout_s, std::string* error)
{
    const auto parts = split_url(url);
    httplib::Client cli(parts.origin);
    configure(cli, timeout_s);
    auto res = cli.Get(parts.path);
    if (!res) {
        if (error) {
            *error = httplib::to_string(res.error());
        }
        return false;
    }
    return true;
}

} // namespace orderbench
