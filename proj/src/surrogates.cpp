#include "agentopt/surrogates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "agentopt/rng.hpp"

namespace agentopt::surrogates {

namespace {

double gaussian_sample(Rng& rng) {
    // Box-Muller; guard against log(0)
    double u1 = std::max(rng.next_double(), 1e-300);
    double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double squared_error(const std::vector<ObservedCell>& cells, const LowRankFactor& f) {
    double err = 0.0;
    for (const auto& cell : cells) {
        double r = cell.value - f.predict(cell.row, cell.col);
        err += r * r;
    }
    return err;
}

}  // namespace

LowRankFactor als_fit(const std::vector<ObservedCell>& observed, std::int64_t n_rows,
                      std::int64_t n_cols, int rank, double dropout_p, int iters,
                      std::uint64_t seed, const AlsOptions& options,
                      std::vector<double>* objective_trace) {
    if (rank < 1) throw ConfigError("rank must be >= 1");
    if (iters < 1) throw ConfigError("iters must be >= 1");
    if (dropout_p < 0.0 || dropout_p >= 1.0) throw ConfigError("dropout must lie in [0, 1)");

    std::vector<ObservedCell> cells;
    cells.reserve(observed.size());
    if (dropout_p == 0.0) {
        cells = observed;
    } else {
        Rng mask_rng(key_mix(seed, rng_tag::kAlsDropout));
        for (const auto& cell : observed)
            if (!mask_rng.bernoulli(dropout_p)) cells.push_back(cell);
        if (cells.empty() && !observed.empty()) cells.push_back(observed.front());
    }
    if (cells.empty()) throw InsufficientObservations("no observed cells to fit");

    std::vector<std::int64_t> row_counts(static_cast<std::size_t>(n_rows), 0);
    std::vector<std::int64_t> col_counts(static_cast<std::size_t>(n_cols), 0);
    for (const auto& cell : cells) {
        if (cell.row < 0 || cell.row >= n_rows || cell.col < 0 || cell.col >= n_cols)
            throw IndexOutOfRange("observed cell outside the matrix");
        ++row_counts[static_cast<std::size_t>(cell.row)];
        ++col_counts[static_cast<std::size_t>(cell.col)];
    }
    std::int64_t max_row = *std::max_element(row_counts.begin(), row_counts.end());
    std::int64_t max_col = *std::max_element(col_counts.begin(), col_counts.end());
    if (max_row < rank || max_col < rank)
        throw InsufficientObservations("need at least rank-many entries in some row and column");

    // cells grouped per row and per column
    std::vector<std::vector<const ObservedCell*>> by_row(static_cast<std::size_t>(n_rows));
    std::vector<std::vector<const ObservedCell*>> by_col(static_cast<std::size_t>(n_cols));
    for (const auto& cell : cells) {
        by_row[static_cast<std::size_t>(cell.row)].push_back(&cell);
        by_col[static_cast<std::size_t>(cell.col)].push_back(&cell);
    }

    LowRankFactor f;
    f.n_rows = n_rows;
    f.n_cols = n_cols;
    f.rank = rank;
    f.u.resize(static_cast<std::size_t>(n_rows) * rank);
    f.v.resize(static_cast<std::size_t>(n_cols) * rank);
    Rng init_rng(key_mix(seed, rng_tag::kAlsInit));
    for (double& x : f.u) x = options.init_scale * gaussian_sample(init_rng);
    for (double& x : f.v) x = options.init_scale * gaussian_sample(init_rng);
    // Leading component of V starts at the column means: random starts
    // occasionally strand ALS on a high-norm plateau, column means land it
    // in the dominant-component basin (tiny noise keeps members distinct).
    for (std::int64_t c = 0; c < n_cols; ++c) {
        double sum = 0.0;
        for (const ObservedCell* cell : by_col[static_cast<std::size_t>(c)]) sum += cell->value;
        double mean = by_col[static_cast<std::size_t>(c)].empty()
                          ? 0.0
                          : sum / static_cast<double>(by_col[static_cast<std::size_t>(c)].size());
        f.v[static_cast<std::size_t>(c) * rank] = mean + 1e-3 * gaussian_sample(init_rng);
    }

    const double lambda = options.ridge;
    Eigen::MatrixXd gram(rank, rank);
    Eigen::VectorXd rhs(rank);
    Eigen::VectorXd other(rank);

    auto solve_side = [&](bool rows) {
        const auto& groups = rows ? by_row : by_col;
        auto& target = rows ? f.u : f.v;
        const auto& fixed = rows ? f.v : f.u;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (groups[g].empty()) continue;  // untouched factor keeps its init
            gram.setZero();
            rhs.setZero();
            for (const ObservedCell* cell : groups[g]) {
                std::size_t other_idx = static_cast<std::size_t>(rows ? cell->col : cell->row);
                for (int k = 0; k < rank; ++k) other(k) = fixed[other_idx * rank + k];
                gram.noalias() += other * other.transpose();
                rhs.noalias() += cell->value * other;
            }
            gram.diagonal().array() += lambda;
            Eigen::LLT<Eigen::MatrixXd> llt(gram);
            if (llt.info() != Eigen::Success)
                throw NumericalFailure("ALS subproblem not positive definite");
            Eigen::VectorXd sol = llt.solve(rhs);
            if (!sol.allFinite()) throw NumericalFailure("ALS produced non-finite factors");
            for (int k = 0; k < rank; ++k) target[g * rank + k] = sol(k);
        }
    };

    // equalizing ||U|| and ||V|| leaves predictions unchanged and only
    // shrinks the ridge term, so the objective stays monotone
    auto rebalance = [&]() {
        double un = 0.0, vn = 0.0;
        for (double x : f.u) un += x * x;
        for (double x : f.v) vn += x * x;
        if (un <= 0.0 || vn <= 0.0) return;
        double s = std::pow(vn / un, 0.25);
        for (double& x : f.u) x *= s;
        for (double& x : f.v) x /= s;
    };

    double prev_objective = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < iters; ++sweep) {
        solve_side(true);
        solve_side(false);
        rebalance();
        double objective = squared_error(cells, f);
        objective += lambda * (Eigen::Map<Eigen::VectorXd>(f.u.data(), f.u.size()).squaredNorm() +
                               Eigen::Map<Eigen::VectorXd>(f.v.data(), f.v.size()).squaredNorm());
        if (objective_trace) objective_trace->push_back(objective);
        if (std::isfinite(prev_objective)) {
            double denom = std::max(prev_objective, 1e-300);
            if (std::abs(prev_objective - objective) / denom < options.tolerance) break;
        }
        prev_objective = objective;
    }
    return f;
}

EnsembleStats ensemble_stats(const std::vector<LowRankFactor>& members) {
    if (members.empty()) throw ShapeMismatch("ensemble has no members");
    const auto& first = members.front();
    for (const auto& m : members)
        if (m.n_rows != first.n_rows || m.n_cols != first.n_cols)
            throw ShapeMismatch("ensemble members have different shapes");

    EnsembleStats stats;
    stats.n_rows = first.n_rows;
    stats.n_cols = first.n_cols;
    std::size_t n_cells = static_cast<std::size_t>(first.n_rows * first.n_cols);
    stats.mu.assign(n_cells, 0.0);
    stats.sigma.assign(n_cells, 0.0);
    const double e = static_cast<double>(members.size());
    for (std::int64_t i = 0; i < first.n_rows; ++i) {
        for (std::int64_t j = 0; j < first.n_cols; ++j) {
            std::size_t idx = static_cast<std::size_t>(i * first.n_cols + j);
            double sum = 0.0, sum_sq = 0.0;
            for (const auto& m : members) {
                double p = m.predict(i, j);
                sum += p;
                sum_sq += p * p;
            }
            double mean = sum / e;
            stats.mu[idx] = mean;
            double var = std::max(0.0, sum_sq / e - mean * mean);
            stats.sigma[idx] = std::sqrt(var);
        }
    }
    return stats;
}

namespace {

int hamming(const std::vector<int>& a, const std::vector<int>& b) {
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]) ? 1 : 0;
    return d;
}

}  // namespace

SurrogateModel surrogate_fit(const std::vector<std::vector<int>>& encodings,
                             const std::vector<double>& values, double gamma,
                             double noise_variance) {
    if (encodings.empty() || encodings.size() != values.size())
        throw ConfigError("surrogate needs aligned, non-empty training data");
    if (gamma <= 0.0) throw ConfigError("kernel bandwidth must be > 0");

    const int t = static_cast<int>(encodings.size());
    Eigen::MatrixXd gram(t, t);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j)
            gram(i, j) = std::exp(-gamma * hamming(encodings[i], encodings[j]));

    Eigen::VectorXd y(t);
    for (int i = 0; i < t; ++i) y(i) = values[i];

    double jitter = std::max(noise_variance, 0.0);
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::MatrixXd k = gram;
        k.diagonal().array() += jitter;
        llt.compute(k);
        if (llt.info() == Eigen::Success) {
            SurrogateModel model;
            model.train_x_ = encodings;
            model.gamma_ = gamma;
            model.noise_variance_ = jitter;
            Eigen::VectorXd alpha = llt.solve(y);
            model.alpha_.assign(alpha.data(), alpha.data() + t);
            Eigen::MatrixXd lower = llt.matrixL();
            model.chol_.resize(static_cast<std::size_t>(t) * t);
            for (int i = 0; i < t; ++i)
                for (int j = 0; j < t; ++j)
                    model.chol_[static_cast<std::size_t>(i) * t + j] = lower(i, j);
            return model;
        }
        jitter = std::max(jitter * 10.0, 1e-12);
    }
    throw NumericalFailure("kernel matrix not positive definite after jitter escalation");
}

SurrogateModel::Prediction SurrogateModel::predict(const std::vector<int>& encoding) const {
    const int t = static_cast<int>(train_x_.size());
    Eigen::VectorXd k_star(t);
    for (int i = 0; i < t; ++i)
        k_star(i) = std::exp(-gamma_ * hamming(train_x_[i], encoding));

    Prediction out;
    for (int i = 0; i < t; ++i) out.mean += k_star(i) * alpha_[static_cast<std::size_t>(i)];

    // solve L w = k_star; variance = k(x,x) - w.w
    Eigen::Map<const Eigen::MatrixXd> lower_t(chol_.data(), t, t);  // row-major data => transpose
    Eigen::MatrixXd lower = lower_t.transpose();
    Eigen::VectorXd w = lower.triangularView<Eigen::Lower>().solve(k_star);
    out.variance = std::max(0.0, 1.0 - w.squaredNorm());
    return out;
}

double expected_improvement(double mean, double variance, double incumbent_best) {
    double sigma = std::sqrt(std::max(variance, 0.0));
    double gain = mean - incumbent_best;
    if (sigma <= 0.0) return std::max(gain, 0.0);
    double z = std::clamp(gain / sigma, -40.0, 40.0);
    double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
    return std::max(0.0, gain * cdf + sigma * pdf);
}

}  // namespace agentopt::surrogates
