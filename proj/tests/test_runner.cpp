#include <doctest.h>

#include "support.hpp"

#include "orderbench/digest.hpp"
#include "orderbench/mock_provider.hpp"
#include "orderbench/runner.hpp"
#include "orderbench/serialize.hpp"

#include <mutex>
#include <set>
#include <thread>

using namespace orderbench;
using testing_support::fixture;
using testing_support::TempDir;

namespace {

// Wraps another provider: counts calls, records prompts, tracks peak
// concurrency and can inject a failure.
class Probe : public Provider {
public:
    explicit Probe(Provider& inner) : inner_(inner) {}

    ModelResponse complete(const ModelSpec& spec, const RenderedPrompt& prompt) override
    {
        {
            std::lock_guard lock(mu_);
            prompts.push_back(prompt);
            ++in_flight_;
            peak = std::max(peak, in_flight_);
        }
        std::this_thread::sleep_for(std::chrono::microseconds(200));
        struct Leave {
            Probe& p;
            ~Leave()
            {
                std::lock_guard lock(p.mu_);
                --p.in_flight_;
            }
        } leave{*this};
        if (fail_on && fail_on(prompt)) {
            throw ProviderError(fail_kind, "injected");
        }
        return inner_.complete(spec, prompt);
    }

    std::size_t calls() const
    {
        std::lock_guard lock(mu_);
        return prompts.size();
    }

    std::vector<RenderedPrompt> prompts;
    std::size_t peak = 0;
    std::function<bool(const RenderedPrompt&)> fail_on;
    ProviderErrorKind fail_kind = ProviderErrorKind::Malformed;

private:
    Provider& inner_;
    mutable std::mutex mu_;
    std::size_t in_flight_ = 0;
};

ModelSpec mock_model()
{
    ModelSpec m;
    m.provider_id = "mock";
    m.model_name = "mock-20";
    return m;
}

std::vector<Question> fixture20()
{
    return load_dataset(describe_dataset("fixture20", DatasetFormat::CanonicalJsonl, fixture("fixture20.jsonl").string()));
}

std::string records_jsonl(const SuiteResult& r)
{
    std::string out;
    for (const auto& rec : r.records) {
        out += to_json(rec).dump() + "\n";
    }
    for (const auto& p : r.pairs) {
        out += to_json(p).dump() + "\n";
    }
    return out;
}

const std::vector<PromptOrder> kAll{PromptOrder::Raw, PromptOrder::AnswerFirst, PromptOrder::LogicFirst,
                                    PromptOrder::Reflexive};

} // namespace

TEST_CASE("reflexive call discipline: 3 calls cold, 1 call with warm variants")
{
    const auto qs = fixture20();
    auto mock = mock_provider_from_fixture(fixture("fixture20_mock.jsonl"));

    {
        TempDir dir;
        ResponseCache cache(dir.path());
        Probe probe(*mock);
        Runner runner(probe, cache, PromptRenderer{});
        for (const auto& q : qs) {
            const auto before = probe.calls();
            const auto r = runner.run_reflexive(mock_model(), q);
            CHECK(probe.calls() - before == 3);
            CHECK(r.final.order == PromptOrder::Reflexive);
            CHECK(r.intermediates.first.order == PromptOrder::AnswerFirst);
            CHECK(r.intermediates.second.order == PromptOrder::LogicFirst);
            const auto& last = probe.prompts.back();
            CHECK(last.order == PromptOrder::Reflexive);
            CHECK(last.text.find(r.intermediates.first.response_text) != std::string::npos);
            CHECK(last.text.find(r.intermediates.second.response_text) != std::string::npos);
            CHECK(last.text.find(r.intermediates.first.response_text) <
                  last.text.find(r.intermediates.second.response_text));
        }
    }
    {
        TempDir dir;
        ResponseCache cache(dir.path());
        Probe probe(*mock);
        Runner runner(probe, cache, PromptRenderer{});
        runner.run_order_benchmark(mock_model(), qs);
        CHECK(probe.calls() == 2 * qs.size());
        for (const auto& q : qs) {
            const auto before = probe.calls();
            runner.run_reflexive(mock_model(), q);
            CHECK(probe.calls() - before == 1);
        }
    }
}

TEST_CASE("full suite issues 4N calls cold and none warm")
{
    const auto qs = fixture20();
    auto mock = mock_provider_from_fixture(fixture("fixture20_mock.jsonl"));
    TempDir dir;
    ResponseCache cache(dir.path());
    Probe probe(*mock);
    Runner runner(probe, cache, PromptRenderer{});
    const auto first = runner.run_suite(mock_model(), qs, kAll);
    CHECK(probe.calls() == 4 * qs.size());
    CHECK(first.records.size() == 4 * qs.size());
    CHECK(runner.counters().queries_issued == 4 * qs.size());

    Runner again(probe, cache, PromptRenderer{});
    const auto second = again.run_suite(mock_model(), qs, kAll);
    CHECK(probe.calls() == 4 * qs.size());
    CHECK(again.counters().cache_hits == 4 * qs.size());
    CHECK(records_jsonl(first) == records_jsonl(second));
}

TEST_CASE("fixture metrics match the scripted construction")
{
    const auto qs = fixture20();
    auto mock = mock_provider_from_fixture(fixture("fixture20_mock.jsonl"));
    TempDir dir;
    ResponseCache cache(dir.path());
    Runner runner(*mock, cache, PromptRenderer{});
    const auto r = runner.run_suite(mock_model(), qs, kAll);
    const auto& s = r.summary;
    CHECK(s.counted == 20);
    CHECK(s.excluded == 0);
    CHECK(s.consistent_pairs == 17);
    CHECK(s.consistency == 17.0 / 20.0);
    CHECK(s.correct_by_strategy.at(PromptOrder::Raw) == 13);
    CHECK(s.correct_by_strategy.at(PromptOrder::AnswerFirst) == 15);
    CHECK(s.correct_by_strategy.at(PromptOrder::LogicFirst) == 12);
    CHECK(s.correct_by_strategy.at(PromptOrder::Reflexive) == 16);
    CHECK(r.pairs.size() == 20);
}

TEST_CASE("output does not depend on parallelism and concurrency stays bounded")
{
    const auto qs = fixture20();
    auto mock = mock_provider_from_fixture(fixture("fixture20_mock.jsonl"));
    std::string reference;
    for (std::size_t par : {1, 3, 8}) {
        TempDir dir;
        ResponseCache cache(dir.path());
        Probe probe(*mock);
        RunnerOptions opts;
        opts.parallelism = par;
        Runner runner(probe, cache, PromptRenderer{}, opts);
        const auto text = records_jsonl(runner.run_suite(mock_model(), qs, kAll));
        CHECK(probe.peak <= par);
        if (reference.empty()) {
            reference = text;
        }
        CHECK(text == reference);
    }
}

TEST_CASE("non-fatal failures exclude the question from every metric")
{
    const auto qs = fixture20();
    auto mock = mock_provider_from_fixture(fixture("fixture20_mock.jsonl"));
    TempDir dir;
    ResponseCache cache(dir.path());
    Probe probe(*mock);
    probe.fail_on = [](const RenderedPrompt& p) {
        return p.question_id == "fixture20-00000" && p.order == PromptOrder::LogicFirst;
    };
    Runner runner(probe, cache, PromptRenderer{});
    const auto r = runner.run_suite(mock_model(), qs, kAll);
    CHECK(r.summary.counted == 19);
    CHECK(r.summary.excluded == 1);
    REQUIRE(r.failures.size() == 1);
    CHECK(r.failures[0].question_id == "fixture20-00000");
    CHECK(r.failures[0].kind == "Malformed");
    CHECK(r.pairs.size() == 19);
    for (const auto& rec : r.records) {
        CHECK(rec.question_id != "fixture20-00000");
    }
    // Question 0 was correct under every strategy and agreed.
    CHECK(r.summary.consistent_pairs == 16);
    CHECK(r.summary.consistency == 16.0 / 19.0);
    CHECK(r.summary.accuracy_by_strategy.at(PromptOrder::Raw) == 12.0 / 19.0);
}

TEST_CASE("auth and exhausted failures abort the suite")
{
    const auto qs = fixture20();
    auto mock = mock_provider_from_fixture(fixture("fixture20_mock.jsonl"));
    for (auto kind : {ProviderErrorKind::Auth, ProviderErrorKind::Exhausted}) {
        TempDir dir;
        ResponseCache cache(dir.path());
        Probe probe(*mock);
        probe.fail_kind = kind;
        probe.fail_on = [](const RenderedPrompt& p) { return p.question_id == "fixture20-00010"; };
        Runner runner(probe, cache, PromptRenderer{});
        CHECK_THROWS_AS(runner.run_suite(mock_model(), qs, kAll), AbortedRun);
    }
}

TEST_CASE("unparsed policy")
{
    Question q;
    q.id = "u-00000";
    q.dataset_name = "u";
    q.stem = "Pick.";
    q.options = {{"A", "one"}, {"B", "two"}};
    q.gold_label = "A";
    MockProvider mock({{{q.id, PromptOrder::AnswerFirst}, {"No idea.", FinishReason::Stop}},
                       {{q.id, PromptOrder::LogicFirst}, {"Cannot say.", FinishReason::Stop}}});
    for (auto [policy, expected] : {std::pair{UnparsedPolicy::Strict, 0.0}, std::pair{UnparsedPolicy::Lenient, 1.0}}) {
        TempDir dir;
        ResponseCache cache(dir.path());
        RunnerOptions opts;
        opts.unparsed_policy = policy;
        Runner runner(mock, cache, PromptRenderer{}, opts);
        const auto r = runner.run_suite(mock_model(), {q}, {PromptOrder::AnswerFirst, PromptOrder::LogicFirst});
        CHECK(r.summary.consistency == expected);
        CHECK(r.summary.accuracy_by_strategy.at(PromptOrder::AnswerFirst) == 0.0);
    }
}

TEST_CASE("strategy set validation")
{
    CHECK_THROWS_AS(check_strategy_set({}), InvalidStrategySet);
    CHECK_THROWS_AS(check_strategy_set({PromptOrder::Reflexive, PromptOrder::AnswerFirst}), InvalidStrategySet);
    CHECK_NOTHROW(check_strategy_set({PromptOrder::Raw}));
    CHECK_NOTHROW(check_strategy_set(kAll));
}

TEST_CASE("cache: round trip, corruption is a counted miss, runner re-queries")
{
    TempDir dir;
    ResponseCache cache(dir.path());
    ModelResponse r;
    r.text = "B. because";
    r.finish_reason = FinishReason::Length;
    r.prompt_tokens = 5;
    r.attempt_count = 2;
    r.attempt_log = {"attempt 1: x", "attempt 2: ok"};
    const auto fp = sha256_hex("key");
    r.request_fingerprint = fp;
    cache.put(fp, r);
    const auto got = cache.get(fp);
    REQUIRE(got.has_value());
    CHECK(got->text == r.text);
    CHECK(got->finish_reason == FinishReason::Length);
    CHECK(got->attempt_log == r.attempt_log);
    CHECK(got->from_cache);
    CHECK_FALSE(cache.get(sha256_hex("other")).has_value());
    CHECK(cache.corrupt_reads() == 0);

    auto bytes = read_file(cache.path_for(fp));
    const auto pos = bytes.find("because");
    REQUIRE(pos != std::string::npos);
    bytes[pos] = 'X';
    write_file_atomic(cache.path_for(fp), bytes);
    CHECK_FALSE(cache.get(fp).has_value());
    CHECK(cache.corrupt_reads() == 1);

    write_file_atomic(cache.path_for(fp), "{not json");
    CHECK_FALSE(cache.get(fp).has_value());
    CHECK(cache.corrupt_reads() == 2);

    // A corrupted entry in a run cache leads to exactly one new query.
    const auto qs = fixture20();
    auto mock = mock_provider_from_fixture(fixture("fixture20_mock.jsonl"));
    TempDir run_dir;
    ResponseCache run_cache(run_dir.path());
    Probe probe(*mock);
    Runner runner(probe, run_cache, PromptRenderer{});
    runner.run_suite(mock_model(), qs, kAll);
    const auto target = probe.prompts.front();
    write_file_atomic(run_cache.path_for(request_fingerprint(mock_model(), target)), "garbage");
    Runner again(probe, run_cache, PromptRenderer{});
    again.run_suite(mock_model(), qs, kAll);
    CHECK(probe.calls() == 4 * qs.size() + 1);
    CHECK(run_cache.corrupt_reads() == 1);
}
