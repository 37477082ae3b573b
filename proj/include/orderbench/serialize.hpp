#pragma once

#include "orderbench/dataset.hpp"
#include "orderbench/records.hpp"
#include "orderbench/stats.hpp"

#include <json.hpp>

namespace orderbench {

using ordered_json = nlohmann::ordered_json;

// Field order is fixed so serialized artifacts are byte-stable.
ordered_json to_json(const ExtractedAnswer& a);
ordered_json to_json(const TrialRecord& r);
ordered_json to_json(const ConsistencyPair& p);
ordered_json to_json(const RunSummary& s);
ordered_json to_json(const ModelSpec& m);
ordered_json to_json(const DatasetDescriptor& d);
ordered_json to_json(const TrialFailure& f);

ExtractedAnswer extracted_from_json(const nlohmann::json& j);
TrialRecord record_from_json(const nlohmann::json& j);
ConsistencyPair pair_from_json(const nlohmann::json& j);
RunSummary summary_from_json(const nlohmann::json& j);
ModelSpec model_spec_from_json(const nlohmann::json& j);
DatasetDescriptor descriptor_from_json(const nlohmann::json& j);
TrialFailure failure_from_json(const nlohmann::json& j);

// Reads a JSON-lines file into parsed objects (blank lines skipped).
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

} // namespace orderbench
