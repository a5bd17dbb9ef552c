#pragma once

#include <cstdint>
#include <vector>

#include "agentopt/errors.hpp"

namespace agentopt::surrogates {

// One observed cell of the score grid.
struct ObservedCell {
    std::int64_t row = 0;
    std::int64_t col = 0;
    double value = 0.0;
};

// Thin factors of a rank-r approximation; prediction (i, j) = U_i . V_j.
struct LowRankFactor {
    std::int64_t n_rows = 0;
    std::int64_t n_cols = 0;
    int rank = 1;
    std::vector<double> u;  // n_rows x rank, row-major
    std::vector<double> v;  // n_cols x rank, row-major

    double predict(std::int64_t i, std::int64_t j) const {
        double s = 0.0;
        for (int k = 0; k < rank; ++k)
            s += u[static_cast<std::size_t>(i) * rank + k] * v[static_cast<std::size_t>(j) * rank + k];
        return s;
    }
};

struct AlsOptions {
    double ridge = 1e-9;
    double init_scale = 0.1;
    double tolerance = 1e-8;  // relative objective change
};

// Alternating least squares on the observed cells, ridge-regularized.
// A fraction dropout_p of the observed cells is masked out (seeded)
// before fitting, which is how ensemble members diversify.
LowRankFactor als_fit(const std::vector<ObservedCell>& observed, std::int64_t n_rows,
                      std::int64_t n_cols, int rank, double dropout_p, int iters,
                      std::uint64_t seed, const AlsOptions& options = {},
                      std::vector<double>* objective_trace = nullptr);

// Per-cell mean and population standard deviation across members.
struct EnsembleStats {
    std::int64_t n_rows = 0;
    std::int64_t n_cols = 0;
    std::vector<double> mu;     // row-major
    std::vector<double> sigma;  // row-major

    double mu_at(std::int64_t i, std::int64_t j) const { return mu[static_cast<std::size_t>(i * n_cols + j)]; }
    double sigma_at(std::int64_t i, std::int64_t j) const { return sigma[static_cast<std::size_t>(i * n_cols + j)]; }
};

EnsembleStats ensemble_stats(const std::vector<LowRankFactor>& members);

// Gaussian-process posterior over the finite combination set with the
// Hamming kernel k(c, c') = exp(-gamma * #differing roles) and sigma_n^2
// observation noise on the diagonal. Prior mean is zero.
class SurrogateModel {
public:
    struct Prediction {
        double mean = 0.0;
        double variance = 0.0;
    };

    Prediction predict(const std::vector<int>& encoding) const;

    double gamma() const { return gamma_; }

private:
    friend SurrogateModel surrogate_fit(const std::vector<std::vector<int>>&,
                                        const std::vector<double>&, double, double);
    std::vector<std::vector<int>> train_x_;
    std::vector<double> alpha_;         // (K + sn2 I)^-1 y
    std::vector<double> chol_;          // lower Cholesky factor, row-major t x t
    double gamma_ = 1.0;
    double noise_variance_ = 1e-4;
};

SurrogateModel surrogate_fit(const std::vector<std::vector<int>>& encodings,
                             const std::vector<double>& values, double gamma = 1.0,
                             double noise_variance = 1e-4);

// EI(c) = (mu - best) Phi(z) + sigma phi(z), z = (mu - best) / sigma;
// sigma = 0 degenerates to max(mu - best, 0). z is clamped to +-40.
double expected_improvement(double mean, double variance, double incumbent_best);

}  // namespace agentopt::surrogates
