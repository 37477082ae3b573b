#include "orderbench/stats.hpp"

#include <algorithm>
#include <cmath>

namespace orderbench {

std::string to_string(UnparsedPolicy policy)
{
    return policy == UnparsedPolicy::Strict ? "strict" : "lenient";
}

std::optional<UnparsedPolicy> parse_unparsed_policy(std::string_view name)
{
    if (name == "strict") {
        return UnparsedPolicy::Strict;
    }
    if (name == "lenient") {
        return UnparsedPolicy::Lenient;
    }
    return std::nullopt;
}

bool is_correct(const ExtractedAnswer& extracted, const std::string& gold_label)
{
    return extracted.parsed() && extracted.label == gold_label;
}

bool answers_agree(const ExtractedAnswer& answer_first, const ExtractedAnswer& logic_first, UnparsedPolicy policy)
{
    if (answer_first.parsed() && logic_first.parsed()) {
        return answer_first.label == logic_first.label;
    }
    return policy == UnparsedPolicy::Lenient && !answer_first.parsed() && !logic_first.parsed();
}

std::string to_string(CellFlag flag)
{
    return flag == CellFlag::DegenerateVariance ? "degenerate_variance" : "none";
}

double accuracy(std::span<const TrialRecord> records)
{
    if (records.empty()) {
        throw StatsError(StatsError::Kind::EmptyInput, "accuracy of no records");
    }
    const auto& first = records.front();
    std::size_t correct = 0;
    for (const auto& r : records) {
        if (r.model_name != first.model_name || r.dataset_name != first.dataset_name || r.order != first.order) {
            throw StatsError(StatsError::Kind::MixedInput, "accuracy over mixed (model, dataset, strategy) records");
        }
        correct += r.correct ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(records.size());
}

double consistency(std::span<const ConsistencyPair> pairs)
{
    if (pairs.empty()) {
        throw StatsError(StatsError::Kind::EmptyInput, "consistency of no pairs");
    }
    const auto c = std::count_if(pairs.begin(), pairs.end(), [](const ConsistencyPair& p) { return p.consistent; });
    return static_cast<double>(c) / static_cast<double>(pairs.size());
}

double pearson(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) {
        throw StatsError(StatsError::Kind::LengthMismatch, "pearson: series lengths differ");
    }
    if (x.size() < 2) {
        throw StatsError(StatsError::Kind::LengthMismatch, "pearson: need at least two points");
    }
    const auto n = static_cast<double>(x.size());
    double mx = 0;
    double my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0;
    double sxx = 0;
    double syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw StatsError(StatsError::Kind::DegenerateVariance, "pearson: a series has zero variance");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<CorrelationCell> correlation_table(const std::vector<RunSummary>& summaries)
{
    std::vector<std::string> datasets;
    for (const auto& s : summaries) {
        if (std::find(datasets.begin(), datasets.end(), s.dataset_name) == datasets.end()) {
            datasets.push_back(s.dataset_name);
        }
    }
    if (datasets.empty()) {
        throw StatsError(StatsError::Kind::InsufficientModels, "no summaries");
    }

    std::vector<CorrelationCell> cells;
    for (const auto& ds : datasets) {
        std::vector<const RunSummary*> group;
        for (const auto& s : summaries) {
            if (s.dataset_name == ds && s.consistency) {
                group.push_back(&s);
            }
        }
        if (group.size() < 2) {
            throw StatsError(StatsError::Kind::InsufficientModels,
                             ds + ": " + std::to_string(group.size()) + " model(s) with a consistency value");
        }
        for (auto strategy : kAllOrders) {
            std::vector<double> cons;
            std::vector<double> acc;
            for (const auto* s : group) {
                if (auto it = s->accuracy_by_strategy.find(strategy); it != s->accuracy_by_strategy.end()) {
                    cons.push_back(*s->consistency);
                    acc.push_back(it->second);
                }
            }
            if (cons.empty()) {
                continue;
            }
            if (cons.size() < 2) {
                throw StatsError(StatsError::Kind::InsufficientModels,
                                 ds + "/" + to_string(strategy) + ": only one model ran this strategy");
            }
            CorrelationCell cell{ds, strategy, std::nullopt, CellFlag::None, cons.size()};
            try {
                cell.r = pearson(cons, acc);
            } catch (const StatsError& e) {
                if (e.kind() != StatsError::Kind::DegenerateVariance) {
                    throw;
                }
                cell.flag = CellFlag::DegenerateVariance;
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

} // namespace orderbench
