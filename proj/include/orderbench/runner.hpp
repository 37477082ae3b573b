#pragma once

#include "orderbench/cache.hpp"
#include "orderbench/dataset.hpp"
#include "orderbench/extract.hpp"
#include "orderbench/prompts.hpp"
#include "orderbench/provider.hpp"
#include "orderbench/records.hpp"
#include "orderbench/stats.hpp"

#include <atomic>
#include <stdexcept>
#include <utility>
#include <vector>

namespace orderbench {

// An unrecoverable provider failure (Auth, or retries Exhausted) stopped the
// run. Responses already obtained stay in the cache.
class AbortedRun : public std::runtime_error {
public:
    explicit AbortedRun(const std::string& detail) : std::runtime_error("AbortedRun: " + detail) {}
};

class InvalidStrategySet : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Reflexive requires both variants; the list must be nonempty.
void check_strategy_set(const std::vector<PromptOrder>& strategies);

struct RunnerOptions {
    std::size_t parallelism = 4;
    UnparsedPolicy unparsed_policy = UnparsedPolicy::Strict;
    MarkerList markers = MarkerList::defaults();
};

struct SuiteResult {
    RunSummary summary;
    std::vector<TrialRecord> records;     // sorted by (question_id, order)
    std::vector<ConsistencyPair> pairs;   // sorted by question_id
    std::vector<TrialFailure> failures;
};

struct ReflexiveResult {
    TrialRecord final;
    std::pair<TrialRecord, TrialRecord> intermediates; // (answer-first, logic-first)
};

struct RunCounters {
    std::size_t queries_issued = 0;
    std::size_t cache_hits = 0;
    std::size_t errors = 0;
};

// Executes the order benchmark and the reflexive strategy for one model.
// Questions are processed by up to `parallelism` workers; results are
// collected per question slot, so output order never depends on scheduling.
class Runner {
public:
    Runner(Provider& provider, ResponseCache& cache, PromptRenderer renderer, RunnerOptions options = {});

    // Answer-first and logic-first for every question; returns c/|D| over
    // the questions that were answered, plus the pairs.
    std::pair<double, std::vector<ConsistencyPair>> run_order_benchmark(const ModelSpec& model,
                                                                        const std::vector<Question>& dataset);

    // Answer-first, logic-first, then the reflexive query embedding both full
    // responses. Cached variant responses are reused.
    ReflexiveResult run_reflexive(const ModelSpec& model, const Question& q);

    // Every (question, strategy) trial. A question whose query fails for a
    // non-fatal reason is excluded from all metrics and reported in failures.
    SuiteResult run_suite(const ModelSpec& model, const std::vector<Question>& dataset,
                          std::vector<PromptOrder> strategies);

    RunCounters counters() const;
    const PromptRenderer& renderer() const noexcept { return renderer_; }

private:
    struct QuestionOutcome;

    ModelResponse obtain(const ModelSpec& model, const RenderedPrompt& prompt);
    TrialRecord run_trial(const ModelSpec& model, const Question& q, const RenderedPrompt& prompt);
    QuestionOutcome run_question(const ModelSpec& model, const Question& q, const std::vector<PromptOrder>& strategies);

    Provider& provider_;
    ResponseCache& cache_;
    PromptRenderer renderer_;
    RunnerOptions options_;
    std::atomic<std::size_t> queries_{0};
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> errors_{0};
};

} // namespace orderbench
