#pragma once

#include "orderbench/records.hpp"

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace orderbench {

class StatsError : public std::runtime_error {
public:
    enum class Kind { EmptyInput, MixedInput, LengthMismatch, DegenerateVariance, InsufficientModels };

    StatsError(Kind kind, const std::string& detail) : std::runtime_error(detail), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// Aggregate for one (model, dataset) run.
struct RunSummary {
    std::string run_id;
    std::string model_name;
    std::string dataset_name;
    std::string template_version;
    std::map<PromptOrder, double> accuracy_by_strategy;
    std::map<PromptOrder, std::size_t> correct_by_strategy;
    std::optional<double> consistency; // present when both variants ran
    std::size_t consistent_pairs = 0;
    std::size_t counted = 0;
    std::size_t excluded = 0;

    bool operator==(const RunSummary&) const = default;
};

enum class CellFlag { None, DegenerateVariance };

std::string to_string(CellFlag flag);

struct CorrelationCell {
    std::string dataset_name;
    PromptOrder strategy = PromptOrder::Raw;
    std::optional<double> r; // absent when flagged
    CellFlag flag = CellFlag::None;
    std::size_t n_models = 0;

    bool operator==(const CorrelationCell&) const = default;
};

// correct / total over records sharing one (model, dataset, strategy).
double accuracy(std::span<const TrialRecord> records);

// consistent / total.
double consistency(std::span<const ConsistencyPair> pairs);

// Sample Pearson correlation, two-pass form. Requires |x| = |y| >= 2 and
// nonzero variance in both series.
double pearson(std::span<const double> x, std::span<const double> y);

// One cell per (dataset, strategy): each model's consistency against its
// accuracy under that strategy. Datasets keep first-seen order, strategies
// their canonical order. Throws InsufficientModels if any dataset has fewer
// than two models with a consistency value; zero-variance groups come back
// flagged instead of numeric.
std::vector<CorrelationCell> correlation_table(const std::vector<RunSummary>& summaries);

} // namespace orderbench
