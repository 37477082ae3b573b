#pragma once

#include "orderbench/stats.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace orderbench {

struct ReportCell {
    enum class Kind { Value, Missing, Flagged };

    Kind kind = Kind::Missing;
    double value = 0.0;    // full precision; rounded only when rendered
    std::string flag;      // for Flagged cells
    std::string run_id;    // run the value came from
    std::size_t n_models = 0; // correlation cells only

    bool operator==(const ReportCell&) const = default;
};

struct ReportTable {
    std::string title;
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    std::vector<std::vector<ReportCell>> cells; // rows x cols

    bool operator==(const ReportTable&) const = default;
};

struct ReportBundle {
    std::string generated_at;
    std::vector<std::string> run_ids;
    std::vector<ReportTable> table_accuracy; // one per dataset: models x strategies
    ReportTable table_consistency;           // models x datasets
    ReportTable table_correlation;           // datasets x strategies
    std::vector<std::string> notes;

    bool operator==(const ReportBundle&) const = default;
};

struct ReportOptions {
    // Column order for datasets; datasets not listed follow in first-seen order.
    std::vector<std::string> dataset_order;
    std::string generated_at; // empty: current time
};

// Models are listed alphabetically, strategies in canonical order. Missing
// (model, dataset) combinations render as n/a. Throws StatsError EmptyInput
// when `summaries` is empty.
ReportBundle build_report(const std::vector<RunSummary>& summaries, const std::vector<CorrelationCell>& cells,
                          const ReportOptions& options = {});

// Computes correlation cells for every dataset with at least two models and
// notes the rest, then builds the bundle.
ReportBundle build_report_from_summaries(const std::vector<RunSummary>& summaries, const ReportOptions& options = {});

enum class ReportFormat { Markdown, Csv, JsonLines };

// Writes into `dir`: accuracy/consistency/correlation .md or .csv, or
// bundle.jsonl. Returns bytes written.
std::size_t emit(const ReportBundle& bundle, ReportFormat format, const std::filesystem::path& dir);

// All three formats.
std::size_t emit_all(const ReportBundle& bundle, const std::filesystem::path& dir);

// Rendered file contents, keyed by file name.
std::vector<std::pair<std::string, std::string>> render(const ReportBundle& bundle, ReportFormat format);

ReportBundle load_bundle_jsonl(const std::filesystem::path& path);

// "0.734", "n/a", or the flag name after a dash for flagged cells.
std::string format_cell(const ReportCell& cell);

} // namespace orderbench
