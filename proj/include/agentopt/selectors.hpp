#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agentopt/core.hpp"
#include "agentopt/evaluator.hpp"
#include "agentopt/executor.hpp"

namespace agentopt::selectors {

// Every tunable the search strategies read. Zero-valued budget fields
// resolve against the space at run time (see resolve()).
struct SelectorConfig {
    double exploration_weight_a = 0.5;   // a
    int batch_size = 5;                  // B
    double budget_fraction = 0.2;        // beta, in (0, 1]
    double epsilon = 0.05;
    double threshold_tau = 0.5;
    double delta = 0.05;
    int rank = 1;                        // r
    int ensemble = 8;                    // E
    double warmup_fraction = 0.2;        // w, in [0, 1)
    double uncertainty_eta = 1.0;        // eta
    int restarts = 3;                    // R
    std::int64_t initial_design = 0;     // m; 0 -> min(|C|, 5)
    std::int64_t total_budget_combos = 0;  // 0 -> |C|
    std::int64_t shortlist_k = 1;
    std::uint64_t seed = 0;
    std::vector<std::int64_t> elimination_schedule;  // empty -> 8, 16, 32, ...

    std::int64_t resolved_initial_design(std::int64_t n_combos) const {
        return initial_design > 0 ? initial_design : std::min<std::int64_t>(n_combos, 5);
    }
    std::int64_t resolved_budget_combos(std::int64_t n_combos) const {
        return total_budget_combos > 0 ? total_budget_combos : n_combos;
    }
};

void validate(const SelectorConfig& config, const PipelineSpace& space,
              const evalsub::Dataset& dataset);

// Ranked statistics for one evaluated combination.
struct RankedEntry {
    std::int64_t combo_index = 0;
    std::int64_t n = 0;
    double mean_score = 0.0;
    double lcb = 0.0;
    double ucb = 0.0;
    double mean_latency_s = 0.0;
    Money total_cost;
    std::vector<std::string> models;
    bool on_pareto = false;
};

struct SelectionReport {
    std::string selector_name;
    std::uint64_t seed = 0;
    SelectorConfig config;
    std::vector<std::string> role_names;
    // evaluated combos, ranked by mean score desc, then total cost asc,
    // then combo index asc
    std::vector<RankedEntry> ranked;
    std::int64_t best_combo = -1;
    std::int64_t total_evaluations = 0;  // real attempts: observed cells + failures
    std::int64_t cache_served = 0;       // requests answered from already-evaluated state
    std::int64_t failures = 0;
    Money total_cost;
    std::vector<std::int64_t> pareto_set;
    std::optional<std::vector<std::int64_t>> above_threshold;  // threshold-se only
    evalsub::WarningCounters warnings;

    const RankedEntry* entry(std::int64_t combo) const;
};

// UCB index of one combination: +inf while unvisited, -inf once the row
// is fully observed, otherwise mean + sqrt(a / n).
double ucb_index(const CombinationStats& stats, double a, bool fully_observed);

// Queried once with roles, candidates and prices; returns a raw reply
// expected to hold a JSON array of role->model assignments.
class Proposer {
public:
    virtual ~Proposer() = default;
    virtual std::string propose(const std::string& prompt) = 0;
};

class FixedProposer : public Proposer {
public:
    explicit FixedProposer(std::string reply) : reply_(std::move(reply)) {}
    std::string propose(const std::string&) override { return reply_; }

private:
    std::string reply_;
};

std::string proposal_prompt(const PipelineSpace& space, const PriceTable& prices);
// Strictly parses a proposer reply; invalid entries are dropped and
// counted, duplicates removed, order preserved.
std::vector<std::int64_t> parse_proposals(const std::string& reply, const PipelineSpace& space,
                                          std::int64_t* invalid_count = nullptr);

// --- the ten strategies ---
SelectionReport brute_force(const PipelineSpace& space, const evalsub::Dataset& dataset,
                            evalsub::Evaluator& evaluator, const SelectorConfig& config,
                            const evalsub::ConcurrencyBudget& budget = {});
SelectionReport random_search(const PipelineSpace& space, const evalsub::Dataset& dataset,
                              evalsub::Evaluator& evaluator, const SelectorConfig& config,
                              const evalsub::ConcurrencyBudget& budget = {});
SelectionReport matrix_ucb_e(const PipelineSpace& space, const evalsub::Dataset& dataset,
                             evalsub::Evaluator& evaluator, const SelectorConfig& config,
                             const evalsub::ConcurrencyBudget& budget = {});
SelectionReport matrix_ucb_e_lrf(const PipelineSpace& space, const evalsub::Dataset& dataset,
                                 evalsub::Evaluator& evaluator, const SelectorConfig& config,
                                 const evalsub::ConcurrencyBudget& budget = {});
SelectionReport arm_elimination(const PipelineSpace& space, const evalsub::Dataset& dataset,
                                evalsub::Evaluator& evaluator, const SelectorConfig& config,
                                const evalsub::ConcurrencyBudget& budget = {});
SelectionReport epsilon_lucb(const PipelineSpace& space, const evalsub::Dataset& dataset,
                             evalsub::Evaluator& evaluator, const SelectorConfig& config,
                             const evalsub::ConcurrencyBudget& budget = {});
SelectionReport threshold_se(const PipelineSpace& space, const evalsub::Dataset& dataset,
                             evalsub::Evaluator& evaluator, const SelectorConfig& config,
                             const evalsub::ConcurrencyBudget& budget = {});
SelectionReport hill_climbing(const PipelineSpace& space, const evalsub::Dataset& dataset,
                              evalsub::Evaluator& evaluator, const SelectorConfig& config,
                              const evalsub::ConcurrencyBudget& budget = {},
                              std::vector<std::vector<std::int64_t>>* restart_traces = nullptr);
SelectionReport bayesian_opt(const PipelineSpace& space, const evalsub::Dataset& dataset,
                             evalsub::Evaluator& evaluator, const SelectorConfig& config,
                             const evalsub::ConcurrencyBudget& budget = {});
SelectionReport lm_proposal(const PipelineSpace& space, const evalsub::Dataset& dataset,
                            evalsub::Evaluator& evaluator, const SelectorConfig& config,
                            Proposer& proposer, const evalsub::ConcurrencyBudget& budget = {},
                            const PriceTable* prices = nullptr);

// Dispatch by CLI name: brute-force, random, ucb-e, ucb-e-lrf,
// arm-elimination, epsilon-lucb, threshold-se, hill-climbing, bayes-opt,
// lm-proposal. Throws ConfigError on unknown names or a missing proposer.
SelectionReport select(const std::string& selector_name, const PipelineSpace& space,
                       const evalsub::Dataset& dataset, evalsub::Evaluator& evaluator,
                       const SelectorConfig& config, const evalsub::ConcurrencyBudget& budget = {},
                       Proposer* proposer = nullptr, const PriceTable* prices = nullptr);

const std::vector<std::string>& selector_names();

}  // namespace agentopt::selectors
