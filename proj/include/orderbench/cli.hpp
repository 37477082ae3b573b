#pragma once

#include "orderbench/config.hpp"
#include "orderbench/run_store.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace orderbench {

// Stable process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitConfig = 2,
    kExitDataset = 3,
    kExitProvider = 4,
    kExitAborted = 5,
    kExitIncompatibleTemplates = 6,
};

struct GlobalFlags {
    std::string config_path;
    bool offline = false;
    std::optional<std::size_t> limit;
    std::string resume; // run id
    std::optional<std::size_t> parallelism;
    std::optional<UnparsedPolicy> unparsed_policy;
    std::string output_dir;
};

// Flags override the config document.
void apply_flags(RunConfig& config, const GlobalFlags& flags);

RunPlan plan_from_config(const RunConfig& config);

// Mock models read their fixture; others get a chat-completions client keyed
// from the environment. With `offline`, non-mock models may only be served
// from the cache.
ProviderFactory default_provider_factory(const RunConfig& config, bool offline);

int cmd_validate(const GlobalFlags& flags, std::ostream& out, std::ostream& err);
// `factory` overrides default_provider_factory when set.
int cmd_run(const GlobalFlags& flags, std::ostream& out, std::ostream& err, const ProviderFactory& factory = {});
int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir, const std::string& format,
               std::ostream& out, std::ostream& err);
int cmd_export_dataset(const GlobalFlags& flags, const std::string& dataset_name, const std::string& out_path,
                       std::ostream& out, std::ostream& err);

// Full command line, argv[0] included.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const ProviderFactory& factory = {});

} // namespace orderbench
