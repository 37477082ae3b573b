#include "orderbench/serialize.hpp"

#include "orderbench/digest.hpp"

#include <sstream>

namespace orderbench {

namespace {

PromptOrder order_from(const nlohmann::json& j)
{
    const auto o = parse_prompt_order(j.get<std::string>());
    if (!o) {
        throw std::invalid_argument("unknown prompt order " + j.dump());
    }
    return *o;
}

} // namespace

ordered_json to_json(const ExtractedAnswer& a)
{
    ordered_json j;
    j["status"] = a.parsed() ? "Parsed" : "Unparsed";
    j["label"] = a.label ? ordered_json(*a.label) : ordered_json(nullptr);
    j["rule_fired"] = a.rule_fired;
    j["match_span"] = {a.span_begin, a.span_end};
    return j;
}

ExtractedAnswer extracted_from_json(const nlohmann::json& j)
{
    ExtractedAnswer a;
    a.status = j.at("status") == "Parsed" ? ExtractedAnswer::Status::Parsed : ExtractedAnswer::Status::Unparsed;
    if (!j.at("label").is_null()) {
        a.label = j.at("label").get<std::string>();
    }
    a.rule_fired = j.at("rule_fired").get<std::string>();
    a.span_begin = j.at("match_span").at(0).get<std::size_t>();
    a.span_end = j.at("match_span").at(1).get<std::size_t>();
    return a;
}

ordered_json to_json(const TrialRecord& r)
{
    ordered_json j;
    j["question_id"] = r.question_id;
    j["dataset_name"] = r.dataset_name;
    j["model_name"] = r.model_name;
    j["order"] = to_string(r.order);
    j["prompt_fingerprint"] = r.prompt_fingerprint;
    j["template_version"] = r.template_version;
    j["response_text"] = r.response_text;
    j["finish_reason"] = to_string(r.finish_reason);
    j["extracted"] = to_json(r.extracted);
    j["gold_label"] = r.gold_label;
    j["correct"] = r.correct;
    j["attempt_count"] = r.attempt_count;
    return j;
}

TrialRecord record_from_json(const nlohmann::json& j)
{
    TrialRecord r;
    r.question_id = j.at("question_id").get<std::string>();
    r.dataset_name = j.at("dataset_name").get<std::string>();
    r.model_name = j.at("model_name").get<std::string>();
    r.order = order_from(j.at("order"));
    r.prompt_fingerprint = j.at("prompt_fingerprint").get<std::string>();
    r.template_version = j.at("template_version").get<std::string>();
    r.response_text = j.at("response_text").get<std::string>();
    r.finish_reason = parse_finish_reason(j.at("finish_reason").get<std::string>());
    r.extracted = extracted_from_json(j.at("extracted"));
    r.gold_label = j.at("gold_label").get<std::string>();
    r.correct = j.at("correct").get<bool>();
    r.attempt_count = j.at("attempt_count").get<int>();
    return r;
}

ordered_json to_json(const ConsistencyPair& p)
{
    ordered_json j;
    j["question_id"] = p.question_id;
    j["dataset_name"] = p.record_answer_first.dataset_name;
    j["model_name"] = p.record_answer_first.model_name;
    j["consistent"] = p.consistent;
    j["record_answer_first"] = to_json(p.record_answer_first);
    j["record_logic_first"] = to_json(p.record_logic_first);
    return j;
}

ConsistencyPair pair_from_json(const nlohmann::json& j)
{
    return {j.at("question_id").get<std::string>(), record_from_json(j.at("record_answer_first")),
            record_from_json(j.at("record_logic_first")), j.at("consistent").get<bool>()};
}

ordered_json to_json(const RunSummary& s)
{
    ordered_json j;
    j["run_id"] = s.run_id;
    j["model_name"] = s.model_name;
    j["dataset_name"] = s.dataset_name;
    j["template_version"] = s.template_version;
    j["accuracy_by_strategy"] = ordered_json::object();
    j["correct_by_strategy"] = ordered_json::object();
    for (auto o : kAllOrders) {
        if (auto it = s.accuracy_by_strategy.find(o); it != s.accuracy_by_strategy.end()) {
            j["accuracy_by_strategy"][to_string(o)] = it->second;
        }
        if (auto it = s.correct_by_strategy.find(o); it != s.correct_by_strategy.end()) {
            j["correct_by_strategy"][to_string(o)] = it->second;
        }
    }
    j["consistency"] = s.consistency ? ordered_json(*s.consistency) : ordered_json(nullptr);
    j["consistent_pairs"] = s.consistent_pairs;
    j["counted"] = s.counted;
    j["excluded"] = s.excluded;
    return j;
}

RunSummary summary_from_json(const nlohmann::json& j)
{
    RunSummary s;
    s.run_id = j.at("run_id").get<std::string>();
    s.model_name = j.at("model_name").get<std::string>();
    s.dataset_name = j.at("dataset_name").get<std::string>();
    s.template_version = j.at("template_version").get<std::string>();
    for (const auto& [k, v] : j.at("accuracy_by_strategy").items()) {
        s.accuracy_by_strategy[order_from(k)] = v.get<double>();
    }
    for (const auto& [k, v] : j.at("correct_by_strategy").items()) {
        s.correct_by_strategy[order_from(k)] = v.get<std::size_t>();
    }
    if (!j.at("consistency").is_null()) {
        s.consistency = j.at("consistency").get<double>();
    }
    s.consistent_pairs = j.at("consistent_pairs").get<std::size_t>();
    s.counted = j.at("counted").get<std::size_t>();
    s.excluded = j.at("excluded").get<std::size_t>();
    return s;
}

ordered_json to_json(const ModelSpec& m)
{
    ordered_json j;
    j["provider_id"] = m.provider_id;
    j["model_name"] = m.model_name;
    j["temperature"] = m.temperature;
    j["max_tokens"] = m.max_tokens;
    j["endpoint_url"] = m.endpoint_url;
    j["request_timeout_s"] = m.request_timeout_s;
    return j;
}

ModelSpec model_spec_from_json(const nlohmann::json& j)
{
    ModelSpec m;
    m.provider_id = j.at("provider_id").get<std::string>();
    m.model_name = j.at("model_name").get<std::string>();
    m.temperature = j.value("temperature", 0.0);
    m.max_tokens = j.value("max_tokens", 1024);
    m.endpoint_url = j.value("endpoint_url", std::string());
    m.request_timeout_s = j.value("request_timeout_s", 60.0);
    return m;
}

ordered_json to_json(const DatasetDescriptor& d)
{
    ordered_json j;
    j["name"] = d.name;
    j["format"] = to_string(d.format);
    j["source_path"] = d.source_path;
    j["limit"] = d.limit;
    j["content_hash"] = d.content_hash;
    return j;
}

DatasetDescriptor descriptor_from_json(const nlohmann::json& j)
{
    DatasetDescriptor d;
    d.name = j.at("name").get<std::string>();
    const auto f = parse_dataset_format(j.at("format").get<std::string>());
    if (!f) {
        throw std::invalid_argument("unknown dataset format " + j.at("format").dump());
    }
    d.format = *f;
    d.source_path = j.at("source_path").get<std::string>();
    d.limit = j.value("limit", std::size_t{0});
    d.content_hash = j.value("content_hash", std::string());
    return d;
}

ordered_json to_json(const TrialFailure& f)
{
    ordered_json j;
    j["model_name"] = f.model_name;
    j["dataset_name"] = f.dataset_name;
    j["question_id"] = f.question_id;
    j["order"] = to_string(f.order);
    j["kind"] = f.kind;
    j["detail"] = f.detail;
    return j;
}

TrialFailure failure_from_json(const nlohmann::json& j)
{
    return {j.at("model_name").get<std::string>(), j.at("dataset_name").get<std::string>(),
            j.at("question_id").get<std::string>(), order_from(j.at("order")), j.at("kind").get<std::string>(),
            j.at("detail").get<std::string>()};
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path)
{
    std::vector<nlohmann::json> out;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        out.push_back(nlohmann::json::parse(line));
    }
    return out;
}

} // namespace orderbench
