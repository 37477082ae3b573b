#include "orderbench/cli.hpp"

#include "orderbench/http_provider.hpp"
#include "orderbench/mock_provider.hpp"
#include "orderbench/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <ostream>
#include <set>

namespace orderbench {

namespace {

class OfflineProvider : public Provider {
public:
    ModelResponse complete(const ModelSpec& spec, const RenderedPrompt& prompt) override
    {
        throw ProviderError(ProviderErrorKind::Auth, "offline: no cached response for " + spec.model_name + " on " +
                                                         prompt.question_id + "/" + to_string(prompt.order));
    }
};

std::string join(const std::vector<std::string>& parts, const char* sep)
{
    std::string out;
    for (const auto& p : parts) {
        out += (out.empty() ? "" : sep) + p;
    }
    return out;
}

RunConfig configured(const GlobalFlags& flags)
{
    if (flags.config_path.empty()) {
        throw ConfigError("--config is required");
    }
    auto config = load_config(flags.config_path);
    apply_flags(config, flags);
    check_config(config);
    return config;
}

// Maps library exceptions onto exit codes; returns -1 for unknown types.
int classify(std::exception_ptr ep, std::ostream& err)
{
    try {
        std::rethrow_exception(ep);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidStrategySet& e) {
        err << "config error: InvalidStrategySet: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ManifestMissing& e) {
        err << "ManifestMissing: " << e.what() << "\n";
        return kExitConfig;
    } catch (const PromptError& e) {
        err << "template error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DatasetError& e) {
        err << "dataset error: " << e.what() << "\n";
        return kExitDataset;
    } catch (const AbortedRun& e) {
        err << e.what() << "\n";
        return kExitAborted;
    } catch (const MockFixtureError& e) {
        err << "provider error: " << e.what() << "\n";
        return kExitProvider;
    } catch (const ProviderError& e) {
        err << "provider error: " << e.what() << "\n";
        return kExitProvider;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace

void apply_flags(RunConfig& config, const GlobalFlags& flags)
{
    if (flags.limit) {
        for (auto& d : config.datasets) {
            d.limit = *flags.limit;
        }
    }
    if (flags.parallelism) {
        config.parallelism = *flags.parallelism;
    }
    if (flags.unparsed_policy) {
        config.unparsed_policy = *flags.unparsed_policy;
    }
    if (!flags.output_dir.empty()) {
        config.output_dir = flags.output_dir;
    }
    if (!flags.resume.empty()) {
        config.run_id = flags.resume;
    }
}

RunPlan plan_from_config(const RunConfig& config)
{
    RunPlan plan;
    plan.run_id = config.run_id;
    for (const auto& m : config.models) {
        plan.models.push_back(m.spec);
    }
    plan.datasets = config.datasets;
    plan.strategies = config.strategies;
    plan.runner.parallelism = config.parallelism;
    plan.runner.unparsed_policy = config.unparsed_policy;
    if (!config.marker_file.empty()) {
        plan.runner.markers = MarkerList::load(config.marker_file);
    }
    if (!config.template_dir.empty()) {
        plan.templates = TemplateSet::load(config.template_dir);
    }
    plan.output_dir = config.output_dir;
    plan.cache_dir = config.cache_dir;
    return plan;
}

ProviderFactory default_provider_factory(const RunConfig& config, bool offline)
{
    std::map<std::string, ModelEntry> entries;
    for (const auto& m : config.models) {
        entries[m.spec.model_name] = m;
    }
    return [entries, offline](const ModelSpec& spec) -> std::shared_ptr<Provider> {
        const auto& entry = entries.at(spec.model_name);
        if (spec.provider_id == "mock") {
            return mock_provider_from_fixture(entry.mock_fixture);
        }
        if (offline) {
            return std::make_shared<OfflineProvider>();
        }
        HttpProviderOptions options;
        options.requests_per_second = entry.requests_per_second;
        if (const char* key = std::getenv(api_key_env_name(spec.provider_id).c_str())) {
            options.api_key = key;
        }
        return std::make_shared<ChatCompletionsProvider>(options, make_httplib_transport());
    };
}

int cmd_validate(const GlobalFlags& flags, std::ostream& out, std::ostream& err)
{
    RunConfig config;
    try {
        config = configured(flags);
        auto templates = config.template_dir.empty() ? TemplateSet::canonical() : TemplateSet::load(config.template_dir);
        if (const auto bad = template_mismatches(templates); !bad.empty()) {
            err << "config error: template mismatch in " << join(bad, ", ") << " (differs from the reference text)\n";
            return kExitConfig;
        }
        if (!config.marker_file.empty()) {
            MarkerList::load(config.marker_file);
        }
        out << "config ok: " << config.models.size() << " model(s), " << config.datasets.size()
            << " dataset(s), templates " << templates.version() << "\n";
    } catch (...) {
        return classify(std::current_exception(), err);
    }

    for (const auto& d : config.datasets) {
        try {
            const auto desc = describe_dataset(d.name, d.format, d.source_path, d.limit);
            const auto qs = load_dataset(desc);
            out << "dataset " << d.name << ": " << qs.size() << " question(s), sha256 " << desc.content_hash << "\n";
        } catch (...) {
            return classify(std::current_exception(), err);
        }
    }

    for (const auto& m : config.models) {
        try {
            if (m.spec.provider_id == "mock") {
                const auto mock = mock_provider_from_fixture(m.mock_fixture);
                out << "model " << m.spec.model_name << ": mock, " << mock->script().size() << " scripted response(s)\n";
                continue;
            }
            if (flags.offline) {
                out << "model " << m.spec.model_name << ": reachability skipped (offline)\n";
                continue;
            }
            const auto env = api_key_env_name(m.spec.provider_id);
            if (std::getenv(env.c_str()) == nullptr) {
                err << "provider error: " << env << " is not set for model " << m.spec.model_name << "\n";
                return kExitProvider;
            }
            std::string why;
            if (!endpoint_reachable(m.spec.endpoint_url, 10.0, &why)) {
                err << "provider error: " << m.spec.endpoint_url << " unreachable: " << why << "\n";
                return kExitProvider;
            }
            out << "model " << m.spec.model_name << ": endpoint reachable\n";
        } catch (...) {
            return classify(std::current_exception(), err);
        }
    }
    return kExitOk;
}

int cmd_run(const GlobalFlags& flags, std::ostream& out, std::ostream& err, const ProviderFactory& factory)
{
    try {
        auto config = configured(flags);
        auto plan = plan_from_config(config);
        if (const auto bad = template_mismatches(plan.templates); !bad.empty()) {
            err << "warning: running with modified templates: " << join(bad, ", ") << "\n";
        }
        if (!flags.resume.empty()) {
            const auto previous = read_manifest(plan.output_dir / flags.resume);
            if (previous.template_version != plan.templates.version()) {
                err << "config error: run " << flags.resume << " used templates " << previous.template_version
                    << ", current templates are " << plan.templates.version() << "\n";
                return kExitConfig;
            }
            plan.datasets = previous.datasets;
            for (auto& d : plan.datasets) {
                if (describe_dataset(d.name, d.format, d.source_path, d.limit).content_hash != d.content_hash) {
                    err << "dataset error: " << d.name << " changed since run " << flags.resume << "\n";
                    return kExitDataset;
                }
            }
        }
        const auto outcome = execute_run(plan, factory ? factory : default_provider_factory(config, flags.offline));
        const auto& t = outcome.manifest.totals;
        out << outcome.run_dir.string() << "\n";
        err << "run " << outcome.manifest.run_id << " complete: " << t.queries_issued << " provider call(s), "
            << t.cache_hits << " cache hit(s), " << outcome.manifest.failures.size() << " excluded question(s)\n";
        return kExitOk;
    } catch (...) {
        return classify(std::current_exception(), err);
    }
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir, const std::string& format,
               std::ostream& out, std::ostream& err)
{
    try {
        std::vector<RunSummary> summaries;
        std::vector<std::string> dataset_order;
        std::string version;
        std::string version_run;
        for (const auto& dir : run_dirs) {
            const auto m = read_manifest(dir);
            if (m.status != "complete") {
                throw ManifestMissing("run in " + dir + " is not finalized (status " + m.status + ")");
            }
            if (version.empty()) {
                version = m.template_version;
                version_run = m.run_id;
            } else if (m.template_version != version) {
                err << "IncompatibleTemplateVersions: " << version_run << " uses " << version << ", " << m.run_id
                    << " uses " << m.template_version << "\n";
                return kExitIncompatibleTemplates;
            }
            for (const auto& d : m.datasets) {
                if (std::find(dataset_order.begin(), dataset_order.end(), d.name) == dataset_order.end()) {
                    dataset_order.push_back(d.name);
                }
            }
            summaries.insert(summaries.end(), m.summaries.begin(), m.summaries.end());
        }
        const auto bundle = build_report_from_summaries(summaries, {dataset_order, {}});
        std::size_t bytes = 0;
        if (format == "all") {
            bytes = emit_all(bundle, out_dir);
        } else if (format == "markdown") {
            bytes = emit(bundle, ReportFormat::Markdown, out_dir);
        } else if (format == "csv") {
            bytes = emit(bundle, ReportFormat::Csv, out_dir);
        } else if (format == "jsonl") {
            bytes = emit(bundle, ReportFormat::JsonLines, out_dir);
        } else {
            err << "unknown report format " << format << "\n";
            return kExitUsage;
        }
        out << out_dir << "\n";
        err << "merged " << summaries.size() << " summaries from " << run_dirs.size() << " run(s), " << bytes
            << " bytes\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (...) {
        return classify(std::current_exception(), err);
    }
}

int cmd_export_dataset(const GlobalFlags& flags, const std::string& dataset_name, const std::string& out_path,
                       std::ostream& out, std::ostream& err)
{
    try {
        const auto config = configured(flags);
        const auto it = std::find_if(config.datasets.begin(), config.datasets.end(),
                                     [&](const DatasetDescriptor& d) { return d.name == dataset_name; });
        if (it == config.datasets.end()) {
            throw ConfigError("no dataset named " + dataset_name + " in config");
        }
        const auto qs = load_dataset(describe_dataset(it->name, it->format, it->source_path, it->limit));
        export_canonical(qs, out_path);
        out << out_path << "\n";
        err << "exported " << qs.size() << " question(s)\n";
        return kExitOk;
    } catch (...) {
        return classify(std::current_exception(), err);
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const ProviderFactory& factory)
{
    CLI::App app{"Prompt-order consistency benchmark for multiple-choice LLM evaluation", "orderbench"};
    app.require_subcommand(1);
    app.footer("exit codes: 0 ok, 1 usage, 2 config, 3 dataset, 4 provider, 5 aborted run, "
               "6 incompatible template versions");

    GlobalFlags flags;
    std::string policy;
    std::size_t limit = 0;
    std::size_t parallelism = 0;
    auto* limit_opt = app.add_option("--limit", limit, "Override every dataset limit");
    auto* par_opt = app.add_option("--parallelism", parallelism, "In-flight requests per provider")
                        ->check(CLI::PositiveNumber);
    app.add_option("--config", flags.config_path, "Run configuration (JSON)");
    app.add_flag("--offline", flags.offline, "Skip reachability checks; serve non-mock models from cache only");
    app.add_option("--resume", flags.resume, "Continue an interrupted run by id");
    app.add_option("--unparsed-policy", policy, "strict or lenient")->check(CLI::IsMember({"strict", "lenient"}));
    app.add_option("--output-dir", flags.output_dir, "Directory holding run directories");

    auto* validate = app.add_subcommand("validate", "Check config, templates, datasets and providers")->fallthrough();
    auto* run = app.add_subcommand("run", "Execute every (model, dataset) suite")->fallthrough();

    std::vector<std::string> run_dirs;
    std::string report_out = "report";
    std::string report_format = "all";
    auto* report = app.add_subcommand("report", "Merge finished runs into one report")->fallthrough();
    report->add_option("run_dirs", run_dirs, "Run directories")->required()->expected(1, -1);
    report->add_option("--out", report_out, "Output directory");
    report->add_option("--format", report_format, "markdown, csv, jsonl or all")
        ->check(CLI::IsMember({"markdown", "csv", "jsonl", "all"}));

    std::string export_name;
    std::string export_path;
    auto* export_ds = app.add_subcommand("export-dataset", "Write a configured dataset as canonical JSONL")->fallthrough();
    export_ds->add_option("dataset", export_name, "Dataset name from the config")->required();
    export_ds->add_option("output", export_path, "Output .jsonl path")->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) {
        rev.pop_back();
    }
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }
    if (*limit_opt) {
        flags.limit = limit;
    }
    if (*par_opt) {
        flags.parallelism = parallelism;
    }
    if (!policy.empty()) {
        flags.unparsed_policy = parse_unparsed_policy(policy);
    }

    if (*validate) {
        return cmd_validate(flags, out, err);
    }
    if (*run) {
        return cmd_run(flags, out, err, factory);
    }
    if (*report) {
        return cmd_report(run_dirs, report_out, report_format, out, err);
    }
    return cmd_export_dataset(flags, export_name, export_path, out, err);
}

} // namespace orderbench
