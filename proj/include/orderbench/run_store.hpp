#pragma once

#include "orderbench/dataset.hpp"
#include "orderbench/prompts.hpp"
#include "orderbench/provider.hpp"
#include "orderbench/records.hpp"
#include "orderbench/runner.hpp"
#include "orderbench/serialize.hpp"
#include "orderbench/stats.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orderbench {

struct RunTotals {
    std::size_t queries_issued = 0;
    std::size_t cache_hits = 0;
    std::size_t errors = 0;
};

// Declarative record of a run: written before the first query, rewritten as
// suites complete, finalized after the last.
struct RunManifest {
    std::string run_id;
    std::vector<ModelSpec> models;
    std::vector<DatasetDescriptor> datasets;
    std::vector<PromptOrder> strategies;
    std::string template_version;
    UnparsedPolicy unparsed_policy = UnparsedPolicy::Strict;
    std::size_t parallelism = 4;
    std::string status; // "running", "complete" or "aborted"
    std::string started_at;
    std::string finished_at;
    std::size_t sessions = 0; // 1 + number of resumes
    RunTotals totals;
    std::vector<TrialFailure> failures;
    std::vector<RunSummary> summaries;
    // Harness choices the numbers depend on (task variant, prompt framing, ...).
    std::map<std::string, std::string> choices;
    std::string abort_detail;
    // "model|dataset|question_id|order" -> [started_at, finished_at]
    std::map<std::string, std::pair<std::string, std::string>> trial_timestamps;
};

ordered_json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

class ManifestMissing : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Throws ManifestMissing when <run_dir>/manifest.json is absent or unreadable.
RunManifest read_manifest(const std::filesystem::path& run_dir);

struct RunPlan {
    std::string run_id; // empty: derived from the plan contents
    std::vector<ModelSpec> models;
    std::vector<DatasetDescriptor> datasets;
    std::vector<PromptOrder> strategies;
    RunnerOptions runner;
    TemplateSet templates = TemplateSet::canonical();
    std::filesystem::path output_dir = "runs";
    std::filesystem::path cache_dir; // empty: <run_dir>/cache
};

using ProviderFactory = std::function<std::shared_ptr<Provider>(const ModelSpec&)>;

// "run-" + 12 hex digits over models, dataset hashes, strategies, template
// version and unparsed policy. Rerunning an identical plan lands in the same
// run directory and reuses its cache.
std::string derive_run_id(const RunPlan& plan);

struct RunOutcome {
    std::filesystem::path run_dir;
    RunManifest manifest;
};

// Runs every (model, dataset) suite and writes <output_dir>/<run_id>/ with
// manifest.json, records.jsonl, pairs.jsonl, cache/ and report/. On
// AbortedRun the manifest is marked aborted, finished suites stay written, and
// the exception propagates.
RunOutcome execute_run(RunPlan plan, const ProviderFactory& providers);

} // namespace orderbench
