#include "orderbench/cache.hpp"

#include "orderbench/digest.hpp"

#include <json.hpp>

#include <iostream>

namespace orderbench {

namespace {

nlohmann::ordered_json payload_json(const ModelResponse& r)
{
    nlohmann::ordered_json j;
    j["text"] = r.text;
    j["finish_reason"] = to_string(r.finish_reason);
    j["prompt_tokens"] = r.prompt_tokens;
    j["completion_tokens"] = r.completion_tokens;
    j["latency_ms"] = r.latency_ms;
    j["request_fingerprint"] = r.request_fingerprint;
    j["attempt_count"] = r.attempt_count;
    j["attempt_log"] = r.attempt_log;
    return j;
}

bool is_hex_fingerprint(const std::string& fp)
{
    return !fp.empty() && fp.size() <= 128 &&
           fp.find_first_not_of("0123456789abcdef") == std::string::npos;
}

} // namespace

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir))
{
    std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::path_for(const std::string& fingerprint) const
{
    if (!is_hex_fingerprint(fingerprint)) {
        throw std::invalid_argument("cache key must be a lowercase hex digest");
    }
    return dir_ / (fingerprint + ".json");
}

std::optional<ModelResponse> ResponseCache::get(const std::string& fingerprint) const
{
    const auto path = path_for(fingerprint);
    if (!std::filesystem::is_regular_file(path)) {
        return std::nullopt;
    }
    auto corrupt = [&](const std::string& why) -> std::optional<ModelResponse> {
        ++corrupt_;
        std::cerr << "orderbench: CacheCorrupt " << path.string() << ": " << why << " (treated as miss)\n";
        return std::nullopt;
    };
    std::string raw;
    try {
        raw = read_file(path);
    } catch (const std::exception& e) {
        return corrupt(e.what());
    }
    const auto j = nlohmann::json::parse(raw, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("digest") || !j.contains("payload") ||
        !j["payload"].is_string()) {
        return corrupt("unreadable entry");
    }
    const auto payload = j["payload"].get<std::string>();
    if (sha256_hex(payload) != j["digest"]) {
        return corrupt("digest mismatch");
    }
    const auto p = nlohmann::json::parse(payload, nullptr, false);
    try {
        ModelResponse r;
        r.text = p.at("text").get<std::string>();
        r.finish_reason = parse_finish_reason(p.at("finish_reason").get<std::string>());
        r.prompt_tokens = p.at("prompt_tokens").get<std::int64_t>();
        r.completion_tokens = p.at("completion_tokens").get<std::int64_t>();
        r.latency_ms = p.at("latency_ms").get<std::int64_t>();
        r.request_fingerprint = p.at("request_fingerprint").get<std::string>();
        r.attempt_count = p.at("attempt_count").get<int>();
        r.attempt_log = p.at("attempt_log").get<std::vector<std::string>>();
        if (r.request_fingerprint != fingerprint) {
            return corrupt("entry stored under the wrong fingerprint");
        }
        r.from_cache = true;
        return r;
    } catch (const nlohmann::json::exception& e) {
        return corrupt(e.what());
    }
}

void ResponseCache::put(const std::string& fingerprint, const ModelResponse& response)
{
    const auto path = path_for(fingerprint);
    auto stored = response;
    stored.request_fingerprint = fingerprint;
    const auto payload = payload_json(stored).dump();
    nlohmann::ordered_json entry;
    entry["digest"] = sha256_hex(payload);
    entry["payload"] = payload;
    write_file_atomic(path, entry.dump() + "\n");
}

} // namespace orderbench
