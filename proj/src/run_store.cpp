#include "orderbench/run_store.hpp"

#include "orderbench/digest.hpp"
#include "orderbench/report.hpp"

#include <algorithm>
#include <tuple>

namespace orderbench {

namespace {

std::string timestamp_key(const TrialRecord& r)
{
    return r.model_name + "|" + r.dataset_name + "|" + r.question_id + "|" + to_string(r.order);
}

void write_jsonl(const std::filesystem::path& path, const std::vector<ordered_json>& lines)
{
    std::string out;
    for (const auto& l : lines) {
        out += l.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_manifest(const std::filesystem::path& run_dir, const RunManifest& m)
{
    write_file_atomic(run_dir / "manifest.json", to_json(m).dump(2) + "\n");
}

} // namespace

ordered_json to_json(const RunManifest& m)
{
    ordered_json j;
    j["run_id"] = m.run_id;
    j["status"] = m.status;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    j["sessions"] = m.sessions;
    j["template_version"] = m.template_version;
    j["unparsed_policy"] = to_string(m.unparsed_policy);
    j["parallelism"] = m.parallelism;
    j["models"] = ordered_json::array();
    for (const auto& s : m.models) {
        j["models"].push_back(to_json(s));
    }
    j["datasets"] = ordered_json::array();
    for (const auto& d : m.datasets) {
        j["datasets"].push_back(to_json(d));
    }
    j["strategies"] = ordered_json::array();
    for (auto o : m.strategies) {
        j["strategies"].push_back(to_string(o));
    }
    j["choices"] = m.choices;
    j["totals"] = {{"queries_issued", m.totals.queries_issued},
                   {"cache_hits", m.totals.cache_hits},
                   {"errors", m.totals.errors}};
    j["abort_detail"] = m.abort_detail;
    j["errors"] = ordered_json::array();
    for (const auto& f : m.failures) {
        j["errors"].push_back(to_json(f));
    }
    j["summaries"] = ordered_json::array();
    for (const auto& s : m.summaries) {
        j["summaries"].push_back(to_json(s));
    }
    j["trial_timestamps"] = ordered_json::object();
    for (const auto& [k, v] : m.trial_timestamps) {
        j["trial_timestamps"][k] = {v.first, v.second};
    }
    return j;
}

RunManifest manifest_from_json(const nlohmann::json& j)
{
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.status = j.at("status").get<std::string>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    m.sessions = j.at("sessions").get<std::size_t>();
    m.template_version = j.at("template_version").get<std::string>();
    m.unparsed_policy = parse_unparsed_policy(j.at("unparsed_policy").get<std::string>()).value_or(UnparsedPolicy::Strict);
    m.parallelism = j.at("parallelism").get<std::size_t>();
    for (const auto& s : j.at("models")) {
        m.models.push_back(model_spec_from_json(s));
    }
    for (const auto& d : j.at("datasets")) {
        m.datasets.push_back(descriptor_from_json(d));
    }
    for (const auto& o : j.at("strategies")) {
        m.strategies.push_back(parse_prompt_order(o.get<std::string>()).value());
    }
    m.choices = j.at("choices").get<std::map<std::string, std::string>>();
    const auto& t = j.at("totals");
    m.totals = {t.at("queries_issued").get<std::size_t>(), t.at("cache_hits").get<std::size_t>(),
                t.at("errors").get<std::size_t>()};
    m.abort_detail = j.at("abort_detail").get<std::string>();
    for (const auto& f : j.at("errors")) {
        m.failures.push_back(failure_from_json(f));
    }
    for (const auto& s : j.at("summaries")) {
        m.summaries.push_back(summary_from_json(s));
    }
    for (const auto& [k, v] : j.at("trial_timestamps").items()) {
        m.trial_timestamps[k] = {v.at(0).get<std::string>(), v.at(1).get<std::string>()};
    }
    return m;
}

RunManifest read_manifest(const std::filesystem::path& run_dir)
{
    const auto path = run_dir / "manifest.json";
    if (!std::filesystem::is_regular_file(path)) {
        throw ManifestMissing("no manifest.json in " + run_dir.string());
    }
    try {
        return manifest_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const std::exception& e) {
        throw ManifestMissing("unreadable manifest in " + run_dir.string() + ": " + e.what());
    }
}

std::string derive_run_id(const RunPlan& plan)
{
    ordered_json key;
    key["models"] = ordered_json::array();
    for (const auto& m : plan.models) {
        key["models"].push_back({m.provider_id, m.model_name, m.temperature, m.max_tokens});
    }
    key["datasets"] = ordered_json::array();
    for (const auto& d : plan.datasets) {
        key["datasets"].push_back({d.name, to_string(d.format), d.limit, d.content_hash});
    }
    key["strategies"] = ordered_json::array();
    for (auto o : plan.strategies) {
        key["strategies"].push_back(to_string(o));
    }
    key["template_version"] = plan.templates.version();
    key["unparsed_policy"] = to_string(plan.runner.unparsed_policy);
    return "run-" + sha256_hex(key.dump()).substr(0, 12);
}

RunOutcome execute_run(RunPlan plan, const ProviderFactory& providers)
{
    check_strategy_set(plan.strategies);
    if (plan.models.empty() || plan.datasets.empty()) {
        throw std::invalid_argument("a run needs at least one model and one dataset");
    }
    std::sort(plan.strategies.begin(), plan.strategies.end());
    plan.strategies.erase(std::unique(plan.strategies.begin(), plan.strategies.end()), plan.strategies.end());

    std::vector<std::vector<Question>> questions;
    for (auto& d : plan.datasets) {
        if (d.content_hash.empty()) {
            d = describe_dataset(d.name, d.format, d.source_path, d.limit);
        }
        questions.push_back(load_dataset(d));
    }
    if (plan.run_id.empty()) {
        plan.run_id = derive_run_id(plan);
    }

    const auto run_dir = plan.output_dir / plan.run_id;
    std::filesystem::create_directories(run_dir);
    ResponseCache cache(plan.cache_dir.empty() ? run_dir / "cache" : plan.cache_dir);

    RunManifest m;
    RunTotals previous;
    std::size_t previous_sessions = 0;
    std::string started_at = utc_timestamp();
    if (std::filesystem::exists(run_dir / "manifest.json")) {
        try {
            const auto old = read_manifest(run_dir);
            previous = old.totals;
            previous_sessions = old.sessions;
            started_at = old.started_at;
        } catch (const ManifestMissing&) {
        }
    }
    m.run_id = plan.run_id;
    m.models = plan.models;
    m.datasets = plan.datasets;
    m.strategies = plan.strategies;
    m.template_version = plan.templates.version();
    m.unparsed_policy = plan.runner.unparsed_policy;
    m.parallelism = plan.runner.parallelism;
    m.status = "running";
    m.started_at = started_at;
    m.sessions = previous_sessions + 1;
    m.totals = previous;
    m.choices = {{"prompt_framing", "zero-shot"},
                 {"truthfulqa_task", "mc1"},
                 {"option_order", "source order, no shuffling"},
                 {"reflexive_inputs", "same-run answer_first/logic_first responses"},
                 {"unparsed_policy", to_string(plan.runner.unparsed_policy)}};
    if (const auto mismatched = template_mismatches(plan.templates); !mismatched.empty()) {
        std::string names;
        for (const auto& n : mismatched) {
            names += (names.empty() ? "" : ",") + n;
        }
        m.choices["templates"] = "modified: " + names;
    } else {
        m.choices["templates"] = "canonical";
    }
    write_manifest(run_dir, m);

    std::vector<TrialRecord> all_records;
    std::vector<ConsistencyPair> all_pairs;
    auto persist = [&] {
        std::sort(all_records.begin(), all_records.end(), [](const TrialRecord& a, const TrialRecord& b) {
            return std::tie(a.dataset_name, a.question_id, a.order, a.model_name) <
                   std::tie(b.dataset_name, b.question_id, b.order, b.model_name);
        });
        std::sort(all_pairs.begin(), all_pairs.end(), [](const ConsistencyPair& a, const ConsistencyPair& b) {
            return std::tie(a.record_answer_first.dataset_name, a.question_id, a.record_answer_first.model_name) <
                   std::tie(b.record_answer_first.dataset_name, b.question_id, b.record_answer_first.model_name);
        });
        std::vector<ordered_json> rl;
        rl.reserve(all_records.size());
        for (const auto& r : all_records) {
            rl.push_back(to_json(r));
        }
        std::vector<ordered_json> pl;
        pl.reserve(all_pairs.size());
        for (const auto& p : all_pairs) {
            pl.push_back(to_json(p));
        }
        write_jsonl(run_dir / "records.jsonl", rl);
        write_jsonl(run_dir / "pairs.jsonl", pl);
    };

    const PromptRenderer renderer(plan.templates);
    for (const auto& model : plan.models) {
        auto provider = providers(model);
        Runner runner(*provider, cache, renderer, plan.runner);
        for (std::size_t d = 0; d < plan.datasets.size(); ++d) {
            try {
                auto suite = runner.run_suite(model, questions[d], plan.strategies);
                suite.summary.run_id = plan.run_id;
                for (const auto& r : suite.records) {
                    m.trial_timestamps[timestamp_key(r)] = {r.started_at, r.finished_at};
                }
                all_records.insert(all_records.end(), suite.records.begin(), suite.records.end());
                all_pairs.insert(all_pairs.end(), suite.pairs.begin(), suite.pairs.end());
                m.failures.insert(m.failures.end(), suite.failures.begin(), suite.failures.end());
                m.summaries.push_back(suite.summary);
            } catch (const AbortedRun& e) {
                const auto c = runner.counters();
                m.totals.queries_issued += c.queries_issued;
                m.totals.cache_hits += c.cache_hits;
                m.totals.errors += c.errors;
                m.status = "aborted";
                m.abort_detail = e.what();
                m.finished_at = utc_timestamp();
                persist();
                write_manifest(run_dir, m);
                throw;
            }
            persist();
            write_manifest(run_dir, m);
        }
        const auto c = runner.counters();
        m.totals.queries_issued += c.queries_issued;
        m.totals.cache_hits += c.cache_hits;
        m.totals.errors += c.errors;
    }

    std::vector<std::string> order;
    for (const auto& d : plan.datasets) {
        order.push_back(d.name);
    }
    emit_all(build_report_from_summaries(m.summaries, {order, {}}), run_dir / "report");

    m.status = "complete";
    m.finished_at = utc_timestamp();
    write_manifest(run_dir, m);
    return {run_dir, m};
}

} // namespace orderbench
