#pragma once

#include <cstdint>
#include <vector>

#include "agentopt/money.hpp"

namespace agentopt::report {

struct ParetoPoint {
    std::int64_t combo_index = 0;
    double mean_score = 0.0;
    Money total_cost;
    double mean_latency_s = 0.0;
};

// p dominates q iff p.score >= q.score, p.cost <= q.cost,
// p.latency <= q.latency, with at least one strict. Returns the
// non-dominated subset sorted by score desc, cost asc, latency asc,
// combo index asc. Points equal on all three objectives are all kept.
std::vector<ParetoPoint> pareto_frontier(const std::vector<ParetoPoint>& points);

bool dominates(const ParetoPoint& p, const ParetoPoint& q);

}  // namespace agentopt::report
