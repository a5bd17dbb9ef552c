#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agentopt/errors.hpp"
#include "agentopt/money.hpp"

namespace agentopt {

// One end-to-end evaluation outcome for a (combination, datapoint) cell.
struct Observation {
    double score = 0.0;  // in [0, 1]
    Money cost;
    double latency_s = 0.0;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    bool from_cache = false;
};

// The enumerated space of role -> model assignments. Roles and their
// candidate lists are fixed at construction; combination indices follow
// lexicographic order (role 0 most significant, last role fastest).
class PipelineSpace {
public:
    static PipelineSpace build(std::vector<std::string> roles,
                               std::vector<std::vector<std::string>> candidates);

    std::int64_t n_combos() const { return n_combos_; }
    int n_roles() const { return static_cast<int>(roles_.size()); }
    const std::vector<std::string>& roles() const { return roles_; }
    const std::vector<std::string>& candidates(int role) const { return candidates_[role]; }
    std::optional<int> role_index(std::string_view name) const;

    // candidate index per role for a combination index, and back
    std::vector<int> digits_of(std::int64_t index) const;
    std::int64_t index_of(std::span<const int> digits) const;

    // model name per role
    std::vector<std::string> models_of(std::int64_t index) const;
    std::optional<std::int64_t> index_of_assignment(
        const std::map<std::string, std::string>& assignment) const;

    // all combinations differing from `index` in exactly one role, ascending
    std::vector<std::int64_t> neighbors(std::int64_t index) const;

private:
    std::vector<std::string> roles_;
    std::vector<std::vector<std::string>> candidates_;
    std::vector<std::int64_t> strides_;
    std::int64_t n_combos_ = 0;
};

// An assignment of one model per role, materialized from a space index.
struct Combination {
    std::int64_t index = 0;
    std::vector<std::string> models;  // aligned with space.roles()
};

struct UtilityWeights {
    double lambda_cost = 0.0;     // per USD
    double lambda_latency = 0.0;  // per second
};

// J = perf - lambda_c * cost - lambda_l * latency
double utility(double perf, double cost_usd, double latency_s, const UtilityWeights& weights);

class PriceTable {
public:
    void set(const std::string& model, Price price) { prices_[model] = price; }
    bool has(const std::string& model) const { return prices_.count(model) != 0; }
    const Price& lookup(const std::string& model) const;
    // name of the first model in `space` without a price entry, if any
    std::optional<std::string> first_missing(const PipelineSpace& space) const;
    const std::map<std::string, Price>& entries() const { return prices_; }

private:
    std::map<std::string, Price> prices_;
};

Money call_cost(std::int64_t input_tokens, std::int64_t output_tokens,
                const std::string& model, const PriceTable& prices);

struct CombinationStats {
    std::int64_t combo_index = 0;
    std::int64_t n = 0;
    double mean_score = 0.0;  // meaningful only when n >= 1
    double mean_latency_s = 0.0;
    Money total_cost;
    double lcb = 0.0;
    double ucb = 0.0;
};

// Time-uniform Hoeffding half width for [0,1] scores with a union bound
// over arms and sample counts: sqrt(ln(4 * n_combos * n^2 / delta) / (2n)).
double ci_half_width(std::int64_t n, double delta, std::int64_t n_combos);

// Partially observed |C| x |D| grid. Distinct cells may be written
// concurrently; each cell is written at most once per run and the
// observation count stays consistent with the set of readable cells.
class ScoreMatrix {
public:
    ScoreMatrix(std::int64_t n_combos, std::int64_t n_datapoints);

    std::int64_t n_combos() const { return n_combos_; }
    std::int64_t n_datapoints() const { return n_datapoints_; }
    std::int64_t n_observed() const { return n_observed_.load(std::memory_order_acquire); }

    void record(std::int64_t combo, std::int64_t datapoint, const Observation& obs);
    bool observed(std::int64_t combo, std::int64_t datapoint) const;
    // nullptr while unobserved
    const Observation* cell(std::int64_t combo, std::int64_t datapoint) const;

    CombinationStats stats(std::int64_t combo, double delta) const;
    std::int64_t row_observed(std::int64_t combo) const;

private:
    void check_range(std::int64_t combo, std::int64_t datapoint) const;

    std::int64_t n_combos_ = 0;
    std::int64_t n_datapoints_ = 0;
    std::vector<Observation> cells_;
    std::unique_ptr<std::atomic<std::uint8_t>[]> state_;  // 0 empty, 1 writing, 2 set
    std::atomic<std::int64_t> n_observed_{0};
};

}  // namespace agentopt
