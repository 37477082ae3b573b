#include "orderbench/runner.hpp"

#include "orderbench/digest.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <optional>
#include <thread>

namespace orderbench {

namespace {

bool has(const std::vector<PromptOrder>& v, PromptOrder o)
{
    return std::find(v.begin(), v.end(), o) != v.end();
}

bool is_fatal(ProviderErrorKind kind)
{
    return kind == ProviderErrorKind::Auth || kind == ProviderErrorKind::Exhausted;
}

} // namespace

void check_strategy_set(const std::vector<PromptOrder>& strategies)
{
    if (strategies.empty()) {
        throw InvalidStrategySet("strategy list is empty");
    }
    if (has(strategies, PromptOrder::Reflexive) &&
        !(has(strategies, PromptOrder::AnswerFirst) && has(strategies, PromptOrder::LogicFirst))) {
        throw InvalidStrategySet("reflexive requires both answer_first and logic_first");
    }
}

struct Runner::QuestionOutcome {
    std::vector<TrialRecord> records;
    std::optional<TrialFailure> failure;
    std::optional<std::string> fatal;
};

Runner::Runner(Provider& provider, ResponseCache& cache, PromptRenderer renderer, RunnerOptions options)
    : provider_(provider), cache_(cache), renderer_(std::move(renderer)), options_(std::move(options))
{
    options_.parallelism = std::max<std::size_t>(1, options_.parallelism);
}

RunCounters Runner::counters() const
{
    return {queries_.load(), hits_.load(), errors_.load()};
}

ModelResponse Runner::obtain(const ModelSpec& model, const RenderedPrompt& prompt)
{
    const auto fp = request_fingerprint(model, prompt);
    if (auto hit = cache_.get(fp)) {
        ++hits_;
        return *hit;
    }
    ++queries_;
    auto response = provider_.complete(model, prompt);
    response.request_fingerprint = fp;
    cache_.put(fp, response);
    return response;
}

TrialRecord Runner::run_trial(const ModelSpec& model, const Question& q, const RenderedPrompt& prompt)
{
    TrialRecord r;
    r.started_at = utc_timestamp();
    const auto response = obtain(model, prompt);
    r.finished_at = utc_timestamp();
    r.question_id = q.id;
    r.dataset_name = q.dataset_name;
    r.model_name = model.model_name;
    r.order = prompt.order;
    r.prompt_fingerprint = response.request_fingerprint;
    r.template_version = prompt.template_version;
    r.response_text = response.text;
    r.finish_reason = response.finish_reason;
    r.extracted = extract_answer(response.text, q.labels(), q.option_texts(), prompt.order, options_.markers);
    r.gold_label = q.gold_label;
    r.correct = is_correct(r.extracted, q.gold_label);
    r.attempt_count = response.attempt_count;
    r.from_cache = response.from_cache;
    return r;
}

Runner::QuestionOutcome Runner::run_question(const ModelSpec& model, const Question& q,
                                             const std::vector<PromptOrder>& strategies)
{
    QuestionOutcome out;
    const TrialRecord* af = nullptr;
    const TrialRecord* lf = nullptr;
    out.records.reserve(strategies.size());
    for (auto order : strategies) {
        try {
            RenderedPrompt prompt;
            if (order == PromptOrder::Reflexive) {
                prompt = renderer_.render_reflexive(q, af->response_text, lf->response_text);
            } else {
                prompt = renderer_.render_variant(q, order);
            }
            out.records.push_back(run_trial(model, q, prompt));
            if (order == PromptOrder::AnswerFirst) {
                af = &out.records.back();
            } else if (order == PromptOrder::LogicFirst) {
                lf = &out.records.back();
            }
        } catch (const ProviderError& e) {
            ++errors_;
            out.failure = TrialFailure{model.model_name, q.dataset_name, q.id, order, to_string(e.kind()), e.detail()};
            if (is_fatal(e.kind())) {
                out.fatal = q.id + " (" + to_string(order) + "): " + e.what();
            }
            return out;
        } catch (const PromptError& e) {
            ++errors_;
            out.failure = TrialFailure{model.model_name, q.dataset_name, q.id, order, "EmptyResult", e.what()};
            return out;
        } catch (const std::exception& e) {
            ++errors_;
            out.failure = TrialFailure{model.model_name, q.dataset_name, q.id, order, "Internal", e.what()};
            out.fatal = q.id + " (" + to_string(order) + "): " + e.what();
            return out;
        }
    }
    return out;
}

SuiteResult Runner::run_suite(const ModelSpec& model, const std::vector<Question>& dataset,
                              std::vector<PromptOrder> strategies)
{
    check_strategy_set(strategies);
    if (dataset.empty()) {
        throw std::invalid_argument("run_suite: empty dataset");
    }
    std::sort(strategies.begin(), strategies.end());
    strategies.erase(std::unique(strategies.begin(), strategies.end()), strategies.end());

    std::vector<QuestionOutcome> slots(dataset.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex fatal_mu;
    std::optional<std::string> fatal;

    auto worker = [&] {
        while (!abort.load()) {
            const auto i = next.fetch_add(1);
            if (i >= dataset.size()) {
                return;
            }
            slots[i] = run_question(model, dataset[i], strategies);
            if (slots[i].fatal) {
                std::lock_guard lock(fatal_mu);
                if (!fatal) {
                    fatal = slots[i].fatal;
                }
                abort = true;
            }
        }
    };
    {
        const auto n = std::min(options_.parallelism, dataset.size());
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (std::size_t t = 0; t < n; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (fatal) {
        throw AbortedRun(model.model_name + ": " + *fatal);
    }

    SuiteResult result;
    auto& s = result.summary;
    s.model_name = model.model_name;
    s.dataset_name = dataset.front().dataset_name;
    s.template_version = renderer_.template_version();
    const bool pairs_wanted = has(strategies, PromptOrder::AnswerFirst) && has(strategies, PromptOrder::LogicFirst);
    for (auto o : strategies) {
        s.correct_by_strategy[o] = 0;
    }

    for (auto& slot : slots) {
        if (slot.failure) {
            result.failures.push_back(*slot.failure);
            ++s.excluded;
            continue;
        }
        ++s.counted;
        const TrialRecord* af = nullptr;
        const TrialRecord* lf = nullptr;
        for (const auto& r : slot.records) {
            s.correct_by_strategy[r.order] += r.correct ? 1 : 0;
            if (r.order == PromptOrder::AnswerFirst) {
                af = &r;
            } else if (r.order == PromptOrder::LogicFirst) {
                lf = &r;
            }
        }
        if (pairs_wanted) {
            const bool agree = answers_agree(af->extracted, lf->extracted, options_.unparsed_policy);
            s.consistent_pairs += agree ? 1 : 0;
            result.pairs.push_back({af->question_id, *af, *lf, agree});
        }
        for (auto& r : slot.records) {
            result.records.push_back(std::move(r));
        }
    }
    if (s.counted == 0) {
        throw AbortedRun(model.model_name + " on " + s.dataset_name + ": every question failed");
    }
    for (auto o : strategies) {
        s.accuracy_by_strategy[o] = static_cast<double>(s.correct_by_strategy[o]) / static_cast<double>(s.counted);
    }
    if (pairs_wanted) {
        s.consistency = static_cast<double>(s.consistent_pairs) / static_cast<double>(s.counted);
    }

    std::sort(result.records.begin(), result.records.end(), [](const TrialRecord& a, const TrialRecord& b) {
        return std::tie(a.question_id, a.order) < std::tie(b.question_id, b.order);
    });
    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const ConsistencyPair& a, const ConsistencyPair& b) { return a.question_id < b.question_id; });
    return result;
}

std::pair<double, std::vector<ConsistencyPair>> Runner::run_order_benchmark(const ModelSpec& model,
                                                                            const std::vector<Question>& dataset)
{
    auto result = run_suite(model, dataset, {PromptOrder::AnswerFirst, PromptOrder::LogicFirst});
    return {*result.summary.consistency, std::move(result.pairs)};
}

ReflexiveResult Runner::run_reflexive(const ModelSpec& model, const Question& q)
{
    auto out = run_question(model, q, {PromptOrder::AnswerFirst, PromptOrder::LogicFirst, PromptOrder::Reflexive});
    if (out.failure) {
        throw AbortedRun(q.id + " (" + to_string(out.failure->order) + "): " + out.failure->kind + ": " +
                         out.failure->detail);
    }
    return {out.records[2], {out.records[0], out.records[1]}};
}

} // namespace orderbench
