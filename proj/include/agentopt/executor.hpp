#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "agentopt/core.hpp"

namespace agentopt::evalsub {

// Two-level limit: how many combinations run at once, and how many
// datapoints run at once within each combination. Global in-flight work
// never exceeds the product.
struct ConcurrencyBudget {
    int max_combos_in_flight = 1;
    int max_datapoints_per_combo = 1;
};

struct EvalTask {
    std::int64_t combo = 0;
    std::int64_t datapoint = 0;
};

struct EvalOutcome {
    std::optional<Observation> obs;
    std::string error;  // empty on success
};

struct ExecutorStats {
    std::int64_t peak_in_flight = 0;
    std::int64_t peak_per_combo = 0;
    std::int64_t executed = 0;
};

// Attempts every task exactly once. Individual failures are collected in
// the outcome slots, not thrown. Results are positioned by task order, so
// callers observe a schedule-independent merge.
std::vector<EvalOutcome> run_parallel(
    const std::vector<EvalTask>& tasks, const ConcurrencyBudget& budget,
    const std::function<Observation(std::int64_t combo, std::int64_t datapoint)>& evaluate,
    ExecutorStats* stats = nullptr);

}  // namespace agentopt::evalsub
