#include "agentopt/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace agentopt {

PipelineSpace PipelineSpace::build(std::vector<std::string> roles,
                                   std::vector<std::vector<std::string>> candidates) {
    if (roles.empty()) throw EmptyRoleSet();
    if (candidates.size() != roles.size())
        throw ConfigError("candidate lists do not match roles");
    std::set<std::string> seen_roles;
    for (const auto& r : roles) {
        if (r.empty()) throw ConfigError("role name must be non-empty");
        if (!seen_roles.insert(r).second) throw ConfigError("duplicate role '" + r + "'");
    }
    for (std::size_t i = 0; i < roles.size(); ++i) {
        if (candidates[i].empty()) throw EmptyCandidateList(roles[i]);
        std::set<std::string> seen;
        for (const auto& m : candidates[i]) {
            if (m.empty()) throw ConfigError("model name must be non-empty (role '" + roles[i] + "')");
            if (!seen.insert(m).second) throw DuplicateCandidate(roles[i], m);
        }
    }

    PipelineSpace space;
    space.roles_ = std::move(roles);
    space.candidates_ = std::move(candidates);
    space.strides_.assign(space.roles_.size(), 1);
    std::int64_t total = 1;
    for (int i = static_cast<int>(space.roles_.size()) - 1; i >= 0; --i) {
        space.strides_[i] = total;
        total *= static_cast<std::int64_t>(space.candidates_[i].size());
    }
    space.n_combos_ = total;
    return space;
}

std::optional<int> PipelineSpace::role_index(std::string_view name) const {
    for (std::size_t i = 0; i < roles_.size(); ++i)
        if (roles_[i] == name) return static_cast<int>(i);
    return std::nullopt;
}

std::vector<int> PipelineSpace::digits_of(std::int64_t index) const {
    if (index < 0 || index >= n_combos_)
        throw IndexOutOfRange("combination index " + std::to_string(index) + " out of range");
    std::vector<int> digits(roles_.size());
    for (std::size_t i = 0; i < roles_.size(); ++i)
        digits[i] = static_cast<int>(index / strides_[i] % static_cast<std::int64_t>(candidates_[i].size()));
    return digits;
}

std::int64_t PipelineSpace::index_of(std::span<const int> digits) const {
    if (digits.size() != roles_.size()) throw IndexOutOfRange("digit count does not match roles");
    std::int64_t index = 0;
    for (std::size_t i = 0; i < roles_.size(); ++i) {
        if (digits[i] < 0 || digits[i] >= static_cast<int>(candidates_[i].size()))
            throw IndexOutOfRange("candidate index out of range for role '" + roles_[i] + "'");
        index += strides_[i] * digits[i];
    }
    return index;
}

std::vector<std::string> PipelineSpace::models_of(std::int64_t index) const {
    auto digits = digits_of(index);
    std::vector<std::string> models(roles_.size());
    for (std::size_t i = 0; i < roles_.size(); ++i) models[i] = candidates_[i][digits[i]];
    return models;
}

std::optional<std::int64_t> PipelineSpace::index_of_assignment(
    const std::map<std::string, std::string>& assignment) const {
    if (assignment.size() != roles_.size()) return std::nullopt;
    std::vector<int> digits(roles_.size());
    for (std::size_t i = 0; i < roles_.size(); ++i) {
        auto it = assignment.find(roles_[i]);
        if (it == assignment.end()) return std::nullopt;
        auto pos = std::find(candidates_[i].begin(), candidates_[i].end(), it->second);
        if (pos == candidates_[i].end()) return std::nullopt;
        digits[i] = static_cast<int>(pos - candidates_[i].begin());
    }
    return index_of(digits);
}

std::vector<std::int64_t> PipelineSpace::neighbors(std::int64_t index) const {
    auto digits = digits_of(index);
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < roles_.size(); ++i) {
        int original = digits[i];
        for (int c = 0; c < static_cast<int>(candidates_[i].size()); ++c) {
            if (c == original) continue;
            digits[i] = c;
            out.push_back(index_of(digits));
        }
        digits[i] = original;
    }
    std::sort(out.begin(), out.end());
    return out;
}

double utility(double perf, double cost_usd, double latency_s, const UtilityWeights& weights) {
    if (!std::isfinite(perf) || !std::isfinite(cost_usd) || !std::isfinite(latency_s) ||
        !std::isfinite(weights.lambda_cost) || !std::isfinite(weights.lambda_latency))
        throw NonFiniteInput("utility inputs must be finite");
    return perf - weights.lambda_cost * cost_usd - weights.lambda_latency * latency_s;
}

const Price& PriceTable::lookup(const std::string& model) const {
    auto it = prices_.find(model);
    if (it == prices_.end()) throw UnknownModel(model);
    return it->second;
}

std::optional<std::string> PriceTable::first_missing(const PipelineSpace& space) const {
    for (int r = 0; r < space.n_roles(); ++r)
        for (const auto& m : space.candidates(r))
            if (!has(m)) return m;
    return std::nullopt;
}

Money call_cost(std::int64_t input_tokens, std::int64_t output_tokens,
                const std::string& model, const PriceTable& prices) {
    if (input_tokens < 0 || output_tokens < 0)
        throw ConfigError("token counts must be non-negative");
    const Price& p = prices.lookup(model);
    // tokens * (micro-USD per 10^6 tokens) lands exactly in picodollars
    return Money::from_pico(input_tokens * p.input_micro_per_mtok +
                            output_tokens * p.output_micro_per_mtok);
}

double ci_half_width(std::int64_t n, double delta, std::int64_t n_combos) {
    if (n <= 0) return std::numeric_limits<double>::infinity();
    double nn = static_cast<double>(n);
    double arg = 4.0 * static_cast<double>(n_combos) * nn * nn / delta;
    return std::sqrt(std::log(arg) / (2.0 * nn));
}

ScoreMatrix::ScoreMatrix(std::int64_t n_combos, std::int64_t n_datapoints)
    : n_combos_(n_combos), n_datapoints_(n_datapoints) {
    if (n_combos <= 0 || n_datapoints <= 0)
        throw ConfigError("score matrix dimensions must be positive");
    cells_.resize(static_cast<std::size_t>(n_combos * n_datapoints));
    state_ = std::make_unique<std::atomic<std::uint8_t>[]>(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i)
        state_[i].store(0, std::memory_order_relaxed);
}

void ScoreMatrix::check_range(std::int64_t combo, std::int64_t datapoint) const {
    if (combo < 0 || combo >= n_combos_ || datapoint < 0 || datapoint >= n_datapoints_)
        throw IndexOutOfRange("cell (" + std::to_string(combo) + ", " +
                              std::to_string(datapoint) + ") out of range");
}

void ScoreMatrix::record(std::int64_t combo, std::int64_t datapoint, const Observation& obs) {
    check_range(combo, datapoint);
    if (obs.score < 0.0 || obs.score > 1.0)
        throw ConfigError("observation score outside [0, 1]");
    std::size_t idx = static_cast<std::size_t>(combo * n_datapoints_ + datapoint);
    std::uint8_t expected = 0;
    if (!state_[idx].compare_exchange_strong(expected, 1, std::memory_order_acq_rel))
        throw CellAlreadyObserved(combo, datapoint);
    cells_[idx] = obs;
    state_[idx].store(2, std::memory_order_release);
    n_observed_.fetch_add(1, std::memory_order_acq_rel);
}

bool ScoreMatrix::observed(std::int64_t combo, std::int64_t datapoint) const {
    check_range(combo, datapoint);
    std::size_t idx = static_cast<std::size_t>(combo * n_datapoints_ + datapoint);
    return state_[idx].load(std::memory_order_acquire) == 2;
}

const Observation* ScoreMatrix::cell(std::int64_t combo, std::int64_t datapoint) const {
    check_range(combo, datapoint);
    std::size_t idx = static_cast<std::size_t>(combo * n_datapoints_ + datapoint);
    if (state_[idx].load(std::memory_order_acquire) != 2) return nullptr;
    return &cells_[idx];
}

CombinationStats ScoreMatrix::stats(std::int64_t combo, double delta) const {
    check_range(combo, 0);
    CombinationStats s;
    s.combo_index = combo;
    double score_sum = 0.0;
    double latency_sum = 0.0;
    for (std::int64_t d = 0; d < n_datapoints_; ++d) {
        const Observation* obs = cell(combo, d);
        if (!obs) continue;
        ++s.n;
        score_sum += obs->score;
        latency_sum += obs->latency_s;
        s.total_cost += obs->cost;
    }
    if (s.n == 0) {
        s.mean_score = std::numeric_limits<double>::quiet_NaN();
        s.lcb = 0.0;
        s.ucb = 1.0;
        return s;
    }
    s.mean_score = score_sum / static_cast<double>(s.n);
    s.mean_latency_s = latency_sum / static_cast<double>(s.n);
    double hw = ci_half_width(s.n, delta, n_combos_);
    s.lcb = std::clamp(s.mean_score - hw, 0.0, 1.0);
    s.ucb = std::clamp(s.mean_score + hw, 0.0, 1.0);
    return s;
}

std::int64_t ScoreMatrix::row_observed(std::int64_t combo) const {
    check_range(combo, 0);
    std::int64_t count = 0;
    for (std::int64_t d = 0; d < n_datapoints_; ++d)
        if (observed(combo, d)) ++count;
    return count;
}

}  // namespace agentopt
