#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "agentopt/rng.hpp"
#include "agentopt/surrogates.hpp"

using namespace agentopt;
using namespace agentopt::surrogates;

namespace {

// exact rank-1 target with entries bounded away from zero
void make_rank1(std::int64_t rows, std::int64_t cols, std::uint64_t seed,
                std::vector<double>& u, std::vector<double>& v) {
    Rng rng(seed);
    u.resize(static_cast<std::size_t>(rows));
    v.resize(static_cast<std::size_t>(cols));
    for (auto& x : u) x = rng.uniform(0.5, 1.5);
    for (auto& x : v) x = rng.uniform(0.5, 1.5);
}

// observation pattern: full row r0, full column c0, plus random cells
std::vector<ObservedCell> rank1_pattern(std::int64_t rows, std::int64_t cols, double fraction,
                                        std::uint64_t seed, const std::vector<double>& u,
                                        const std::vector<double>& v,
                                        std::vector<std::uint8_t>& mask) {
    Rng rng(seed);
    mask.assign(static_cast<std::size_t>(rows * cols), 0);
    std::int64_t r0 = static_cast<std::int64_t>(rng.below(rows));
    std::int64_t c0 = static_cast<std::int64_t>(rng.below(cols));
    for (std::int64_t c = 0; c < cols; ++c) mask[static_cast<std::size_t>(r0 * cols + c)] = 1;
    for (std::int64_t r = 0; r < rows; ++r) mask[static_cast<std::size_t>(r * cols + c0)] = 1;
    std::int64_t want = static_cast<std::int64_t>(fraction * static_cast<double>(rows * cols));
    std::int64_t have = rows + cols - 1;
    while (have < want) {
        std::size_t cell = static_cast<std::size_t>(rng.below(rows * cols));
        if (mask[cell]) continue;
        mask[cell] = 1;
        ++have;
    }
    std::vector<ObservedCell> observed;
    for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t c = 0; c < cols; ++c)
            if (mask[static_cast<std::size_t>(r * cols + c)])
                observed.push_back({r, c, u[static_cast<std::size_t>(r)] *
                                              v[static_cast<std::size_t>(c)]});
    return observed;
}

}  // namespace

TEST_CASE("als recovers an exact rank-1 matrix") {
    std::vector<double> u, v;
    make_rank1(20, 50, 31, u, v);
    std::vector<ObservedCell> observed;
    for (std::int64_t r = 0; r < 20; ++r)
        for (std::int64_t c = 0; c < 50; ++c)
            observed.push_back({r, c, u[static_cast<std::size_t>(r)] * v[static_cast<std::size_t>(c)]});
    LowRankFactor f = als_fit(observed, 20, 50, 1, 0.0, 50, 7);
    double max_err = 0.0;
    for (const auto& cell : observed)
        max_err = std::max(max_err, std::abs(f.predict(cell.row, cell.col) - cell.value));
    CHECK(max_err < 1e-6);
}

TEST_CASE("als partial rank-1 recovery predicts unobserved cells") {
    std::vector<double> u, v;
    make_rank1(20, 50, 101, u, v);
    std::vector<std::uint8_t> mask;
    auto observed = rank1_pattern(20, 50, 0.3, 102, u, v, mask);
    LowRankFactor f = als_fit(observed, 20, 50, 1, 0.0, 100, 103);
    double max_err = 0.0;
    for (std::int64_t r = 0; r < 20; ++r)
        for (std::int64_t c = 0; c < 50; ++c) {
            if (mask[static_cast<std::size_t>(r * 50 + c)]) continue;
            double truth = u[static_cast<std::size_t>(r)] * v[static_cast<std::size_t>(c)];
            max_err = std::max(max_err, std::abs(f.predict(r, c) - truth));
        }
    CHECK(max_err < 1e-6);
}

TEST_CASE("als constant matrix is reproduced everywhere") {
    const double k = 0.42;
    std::vector<ObservedCell> observed;
    Rng rng(5);
    // sparse connected pattern covering every row and column: row 0 and
    // column 0 fully observed, plus random extras
    for (std::int64_t c = 0; c < 15; ++c) observed.push_back({0, c, k});
    for (std::int64_t r = 1; r < 12; ++r) observed.push_back({r, 0, k});
    for (int extra = 0; extra < 30; ++extra) {
        std::int64_t r = 1 + static_cast<std::int64_t>(rng.below(11));
        std::int64_t c = 1 + static_cast<std::int64_t>(rng.below(14));
        bool dup = false;
        for (const auto& cell : observed) dup = dup || (cell.row == r && cell.col == c);
        if (!dup) observed.push_back({r, c, k});
    }
    LowRankFactor f = als_fit(observed, 12, 15, 1, 0.0, 100, 9);
    for (std::int64_t r = 0; r < 12; ++r)
        for (std::int64_t c = 0; c < 15; ++c)
            CHECK(f.predict(r, c) == doctest::Approx(k).epsilon(1e-6));
}

TEST_CASE("als rejects empty input") {
    CHECK_THROWS_AS(als_fit({}, 5, 5, 1, 0.0, 10, 1), InsufficientObservations);
}

TEST_CASE("als objective is non-increasing across sweeps") {
    Rng rng(55);
    std::vector<ObservedCell> observed;
    for (std::int64_t r = 0; r < 15; ++r)
        for (std::int64_t c = 0; c < 20; ++c)
            if (rng.bernoulli(0.6)) observed.push_back({r, c, rng.next_double()});
    std::vector<double> trace;
    als_fit(observed, 15, 20, 2, 0.0, 40, 3, {}, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i] <= trace[i - 1] * (1.0 + 1e-9) + 1e-12);
}

TEST_CASE("ensemble stats mean and spread") {
    LowRankFactor zero{1, 1, 1, {0.0}, {1.0}};
    LowRankFactor one{1, 1, 1, {1.0}, {1.0}};
    auto stats = ensemble_stats({zero, one});
    CHECK(stats.mu_at(0, 0) == doctest::Approx(0.5));
    CHECK(stats.sigma_at(0, 0) == doctest::Approx(0.5));

    auto single = ensemble_stats({one});
    CHECK(single.mu_at(0, 0) == doctest::Approx(1.0));
    CHECK(single.sigma_at(0, 0) == 0.0);

    auto same = ensemble_stats({one, one, one});
    CHECK(same.sigma_at(0, 0) == doctest::Approx(0.0));

    LowRankFactor other{2, 3, 1, {1.0, 1.0}, {1.0, 1.0, 1.0}};
    CHECK_THROWS_AS(ensemble_stats({one, other}), ShapeMismatch);
}

TEST_CASE("surrogate interpolates training data") {
    SurrogateModel model = surrogate_fit({{0, 1}}, {0.75}, 1.0, 1e-4);
    auto at_train = model.predict({0, 1});
    CHECK(at_train.mean == doctest::Approx(0.75).epsilon(1e-3));
    CHECK(at_train.variance <= 1e-4 + 1e-6);
}

TEST_CASE("surrogate reverts to the prior far away") {
    // gamma large: any differing role collapses the kernel
    SurrogateModel model = surrogate_fit({{0, 0, 0}}, {0.9}, 8.0, 1e-6);
    auto far = model.predict({1, 1, 1});
    CHECK(std::abs(far.mean) < 1e-6);
    CHECK(far.variance == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("surrogate matches a dense solve oracle") {
    std::vector<std::vector<int>> train = {{0, 0}, {1, 2}, {2, 1}};
    std::vector<double> y = {0.2, 0.8, 0.5};
    const double gamma = 1.3, noise = 1e-4;
    SurrogateModel model = surrogate_fit(train, y, gamma, noise);

    auto hamming = [](const std::vector<int>& a, const std::vector<int>& b) {
        int d = 0;
        for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
        return d;
    };
    Eigen::Matrix3d gram;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            gram(i, j) = std::exp(-gamma * hamming(train[i], train[j])) + (i == j ? noise : 0.0);
    Eigen::Vector3d target(y[0], y[1], y[2]);
    Eigen::Vector3d alpha = gram.fullPivLu().solve(target);  // dense route, not Cholesky

    std::vector<std::vector<int>> queries = {{0, 1}, {2, 2}, {1, 0}, {0, 0}};
    for (const auto& q : queries) {
        Eigen::Vector3d k_star;
        for (int i = 0; i < 3; ++i) k_star(i) = std::exp(-gamma * hamming(train[i], q));
        double mean_oracle = k_star.dot(alpha);
        double var_oracle = 1.0 - k_star.dot(gram.fullPivLu().solve(k_star));
        auto pred = model.predict(q);
        CHECK(pred.mean == doctest::Approx(mean_oracle).epsilon(1e-8));
        CHECK(pred.variance == doctest::Approx(std::max(0.0, var_oracle)).epsilon(1e-8));
    }
}

TEST_CASE("surrogate variance at training inputs stays within noise") {
    Rng rng(17);
    std::vector<std::vector<int>> train;
    std::vector<double> y;
    for (int i = 0; i < 12; ++i) {
        train.push_back({static_cast<int>(rng.below(3)), static_cast<int>(rng.below(3)),
                         static_cast<int>(rng.below(2))});
        y.push_back(rng.next_double());
    }
    SurrogateModel model = surrogate_fit(train, y, 1.0, 1e-4);
    for (const auto& x : train) CHECK(model.predict(x).variance <= 1e-4 + 1e-6);
}

TEST_CASE("expected improvement closed form") {
    CHECK(expected_improvement(0.5, 0.0, 0.5) == 0.0);
    CHECK(expected_improvement(0.5, 1.0, 0.5) ==
          doctest::Approx(0.3989422804014327).epsilon(1e-9));  // phi(0)
    CHECK(expected_improvement(1.5, 1e-24, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(expected_improvement(0.1, 0.0, 0.5) == 0.0);

    // non-negative, and non-decreasing in mu at fixed sigma and incumbent
    Rng rng(23);
    for (int i = 0; i < 100; ++i) {
        double sigma2 = rng.uniform(0.0, 2.0);
        double best = rng.uniform(-1.0, 1.0);
        double prev = -1.0;
        for (double mu = -2.0; mu <= 2.0; mu += 0.05) {
            double ei = expected_improvement(mu, sigma2, best);
            CHECK(ei >= 0.0);
            CHECK(ei >= prev - 1e-12);
            prev = ei;
        }
    }
}
