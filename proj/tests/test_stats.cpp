#include <doctest.h>

#include "orderbench/stats.hpp"

#include <cmath>
#include <random>

using namespace orderbench;

namespace {

// Computational textbook form, independent of the library's two-pass code.
double textbook_r(const std::vector<double>& x, const std::vector<double>& y)
{
    long double n = x.size(), sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += static_cast<long double>(x[i]) * x[i];
        syy += static_cast<long double>(y[i]) * y[i];
        sxy += static_cast<long double>(x[i]) * y[i];
    }
    return static_cast<double>((n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy)));
}

TrialRecord rec(bool correct)
{
    TrialRecord r;
    r.correct = correct;
    return r;
}

RunSummary summary(std::string model, std::string ds, double cons, double acc)
{
    RunSummary s;
    s.model_name = std::move(model);
    s.dataset_name = std::move(ds);
    s.consistency = cons;
    s.accuracy_by_strategy[PromptOrder::AnswerFirst] = acc;
    s.accuracy_by_strategy[PromptOrder::LogicFirst] = acc * 0.5 + 0.1;
    return s;
}

} // namespace

TEST_CASE("pearson is exactly +1 and -1 on linear data")
{
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> up{3, 5, 7, 9, 11};
    const std::vector<double> down{10, 8, 6, 4, 2};
    CHECK(pearson(x, up) == 1.0);
    CHECK(pearson(x, down) == -1.0);
}

TEST_CASE("pearson matches the textbook oracle on random pairs")
{
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<int> len(2, 10);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = len(rng);
        std::vector<double> x(n), y(n);
        for (int i = 0; i < n; ++i) {
            x[i] = val(rng);
            y[i] = val(rng);
        }
        CHECK(std::fabs(pearson(x, y) - textbook_r(x, y)) <= 1e-12);
    }
}

TEST_CASE("pearson properties: symmetry, affine invariance, range")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 9;
        std::vector<double> x(n), y(n);
        for (int i = 0; i < n; ++i) {
            x[i] = val(rng);
            y[i] = val(rng);
        }
        const double r = pearson(x, y);
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
        CHECK(std::fabs(r - pearson(y, x)) <= 1e-12);

        const double a = scale(rng), b = val(rng), c = scale(rng), d = val(rng);
        std::vector<double> xa(n), yc(n), yneg(n);
        for (int i = 0; i < n; ++i) {
            xa[i] = a * x[i] + b;
            yc[i] = c * y[i] + d;
            yneg[i] = -c * y[i] + d;
        }
        CHECK(std::fabs(pearson(xa, yc) - r) <= 1e-12);
        CHECK(std::fabs(pearson(xa, yneg) + r) <= 1e-12);
    }
}

TEST_CASE("pearson error cases")
{
    const std::vector<double> two{1, 2}, three{1, 2, 3}, flat{4, 4, 4}, one{1};
    auto kind_of = [](auto fn) {
        try {
            fn();
        } catch (const StatsError& e) {
            return e.kind();
        }
        FAIL("no StatsError");
        return StatsError::Kind::EmptyInput;
    };
    CHECK(kind_of([&] { pearson(two, three); }) == StatsError::Kind::LengthMismatch);
    CHECK(kind_of([&] { pearson(one, one); }) == StatsError::Kind::LengthMismatch);
    CHECK(kind_of([&] { pearson(three, flat); }) == StatsError::Kind::DegenerateVariance);
    CHECK(pearson(two, two) == 1.0);
}

TEST_CASE("accuracy and consistency are simple ratios")
{
    std::vector<TrialRecord> rs{rec(true), rec(false), rec(true), rec(true)};
    CHECK(accuracy(rs) == 0.75);
    CHECK_THROWS_AS(accuracy(std::span<const TrialRecord>{}), StatsError);

    std::vector<ConsistencyPair> ps(5);
    ps[0].consistent = ps[2].consistent = true;
    CHECK(consistency(ps) == 0.4);
    CHECK_THROWS_AS(consistency(std::span<const ConsistencyPair>{}), StatsError);
}

TEST_CASE("correlation table groups by dataset and flags degenerate cells")
{
    std::vector<RunSummary> s{
        summary("m1", "ds1", 0.9, 0.8), summary("m2", "ds1", 0.7, 0.6), summary("m3", "ds1", 0.5, 0.5),
        summary("m1", "ds2", 0.6, 0.5), summary("m2", "ds2", 0.6, 0.7),
    };
    const auto cells = correlation_table(s);
    REQUIRE(cells.size() == 4);
    CHECK(cells[0].dataset_name == "ds1");
    CHECK(cells[0].strategy == PromptOrder::AnswerFirst);
    CHECK(cells[0].n_models == 3);
    REQUIRE(cells[0].r.has_value());
    CHECK(std::fabs(*cells[0].r - textbook_r({0.9, 0.7, 0.5}, {0.8, 0.6, 0.5})) <= 1e-12);
    CHECK(cells[2].dataset_name == "ds2");
    CHECK(cells[2].flag == CellFlag::DegenerateVariance);
    CHECK_FALSE(cells[2].r.has_value());

    std::vector<RunSummary> lonely{summary("m1", "ds1", 0.9, 0.8)};
    try {
        correlation_table(lonely);
        FAIL("expected InsufficientModels");
    } catch (const StatsError& e) {
        CHECK(e.kind() == StatsError::Kind::InsufficientModels);
    }
}
