#pragma once

#include "orderbench/dataset.hpp"
#include "orderbench/prompts.hpp"
#include "orderbench/provider.hpp"
#include "orderbench/records.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace orderbench {

struct ModelEntry {
    ModelSpec spec;
    double requests_per_second = 2.0;
    std::filesystem::path mock_fixture; // provider_id "mock" only
};

// One JSON document. Relative paths resolve against the config file's
// directory. API keys never appear here; they come from <PROVIDER_ID>_API_KEY.
struct RunConfig {
    std::vector<ModelEntry> models;
    std::vector<DatasetDescriptor> datasets;
    std::vector<PromptOrder> strategies;
    std::size_t parallelism = 4;
    UnparsedPolicy unparsed_policy = UnparsedPolicy::Strict;
    std::filesystem::path output_dir = "runs";
    std::filesystem::path template_dir; // empty: compiled-in templates
    std::filesystem::path cache_dir;    // empty: <run_dir>/cache
    std::filesystem::path marker_file;  // empty: built-in marker list
    std::string run_id;                 // empty: derived
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

// Structural checks only (no file access): nonempty lists, strategy set,
// unique model and dataset names. Throws ConfigError.
void check_config(const RunConfig& config);

} // namespace orderbench
