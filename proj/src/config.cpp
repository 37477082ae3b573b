#include "orderbench/config.hpp"

#include "orderbench/digest.hpp"
#include "orderbench/runner.hpp"

#include <json.hpp>

#include <set>

namespace orderbench {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    if (p.empty()) {
        return {};
    }
    std::filesystem::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

template <typename T>
T get_or(const json& j, const char* key, T fallback)
{
    if (!j.contains(key) || j.at(key).is_null()) {
        return fallback;
    }
    return j.at(key).get<T>();
}

} // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    RunConfig c;
    try {
        for (const auto& m : j.value("models", json::array())) {
            ModelEntry e;
            e.spec.provider_id = m.at("provider_id").get<std::string>();
            e.spec.model_name = m.at("model_name").get<std::string>();
            e.spec.temperature = get_or(m, "temperature", 0.0);
            e.spec.max_tokens = get_or(m, "max_tokens", 1024);
            e.spec.endpoint_url = get_or<std::string>(m, "endpoint_url", "");
            e.spec.request_timeout_s = get_or(m, "request_timeout_s", 60.0);
            e.requests_per_second = get_or(m, "requests_per_second", 2.0);
            e.mock_fixture = resolve(base_dir, get_or<std::string>(m, "mock_fixture", ""));
            if (m.contains("api_key")) {
                throw ConfigError("model " + e.spec.model_name +
                                  ": api_key must not be in the config; set " +
                                  e.spec.provider_id + " key via the environment");
            }
            c.models.push_back(std::move(e));
        }
        for (const auto& d : j.value("datasets", json::array())) {
            DatasetDescriptor desc;
            desc.name = d.at("name").get<std::string>();
            const auto fmt_name = d.at("format").get<std::string>();
            const auto fmt = parse_dataset_format(fmt_name);
            if (!fmt) {
                throw ConfigError("dataset " + desc.name + ": unknown format '" + fmt_name + "'");
            }
            desc.format = *fmt;
            desc.source_path = resolve(base_dir, d.at("path").get<std::string>()).string();
            desc.limit = get_or<std::size_t>(d, "limit", 0);
            c.datasets.push_back(std::move(desc));
        }
        for (const auto& s : j.value("strategies", json::array())) {
            const auto name = s.get<std::string>();
            const auto order = parse_prompt_order(name);
            if (!order) {
                throw ConfigError("unknown strategy '" + name + "'");
            }
            c.strategies.push_back(*order);
        }
        c.parallelism = get_or<std::size_t>(j, "parallelism", 4);
        const auto policy = get_or<std::string>(j, "unparsed_policy", "strict");
        const auto parsed_policy = parse_unparsed_policy(policy);
        if (!parsed_policy) {
            throw ConfigError("unparsed_policy must be strict or lenient, got '" + policy + "'");
        }
        c.unparsed_policy = *parsed_policy;
        c.output_dir = resolve(base_dir, get_or<std::string>(j, "output_dir", "runs"));
        c.template_dir = resolve(base_dir, get_or<std::string>(j, "template_dir", ""));
        c.cache_dir = resolve(base_dir, get_or<std::string>(j, "cache_dir", ""));
        c.marker_file = resolve(base_dir, get_or<std::string>(j, "marker_file", ""));
        c.run_id = get_or<std::string>(j, "run_id", "");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    if (!std::filesystem::is_regular_file(path)) {
        throw ConfigError("config file not found: " + path.string());
    }
    return parse_config(read_file(path), path.parent_path());
}

void check_config(const RunConfig& config)
{
    if (config.models.empty()) {
        throw ConfigError("config lists no models");
    }
    if (config.datasets.empty()) {
        throw ConfigError("config lists no datasets");
    }
    if (config.parallelism == 0) {
        throw ConfigError("parallelism must be at least 1");
    }
    try {
        check_strategy_set(config.strategies);
    } catch (const InvalidStrategySet& e) {
        throw ConfigError(std::string("InvalidStrategySet: ") + e.what());
    }
    std::set<std::string> models;
    for (const auto& m : config.models) {
        if (m.spec.model_name.empty() || m.spec.provider_id.empty()) {
            throw ConfigError("every model needs provider_id and model_name");
        }
        if (!models.insert(m.spec.model_name).second) {
            throw ConfigError("duplicate model_name " + m.spec.model_name);
        }
        if (m.spec.provider_id == "mock" && m.mock_fixture.empty()) {
            throw ConfigError("mock model " + m.spec.model_name + " needs mock_fixture");
        }
        if (m.spec.provider_id != "mock" && m.spec.endpoint_url.empty()) {
            throw ConfigError("model " + m.spec.model_name + " needs endpoint_url");
        }
    }
    std::set<std::string> datasets;
    for (const auto& d : config.datasets) {
        if (!datasets.insert(d.name).second) {
            throw ConfigError("duplicate dataset name " + d.name);
        }
    }
}

} // namespace orderbench
