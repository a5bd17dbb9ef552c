#include "agentopt/pareto.hpp"

#include <algorithm>

namespace agentopt::report {

bool dominates(const ParetoPoint& p, const ParetoPoint& q) {
    bool no_worse = p.mean_score >= q.mean_score && p.total_cost <= q.total_cost &&
                    p.mean_latency_s <= q.mean_latency_s;
    bool strict = p.mean_score > q.mean_score || p.total_cost < q.total_cost ||
                  p.mean_latency_s < q.mean_latency_s;
    return no_worse && strict;
}

std::vector<ParetoPoint> pareto_frontier(const std::vector<ParetoPoint>& points) {
    std::vector<ParetoPoint> sorted = points;
    std::sort(sorted.begin(), sorted.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        if (a.mean_score != b.mean_score) return a.mean_score > b.mean_score;
        if (a.total_cost != b.total_cost) return a.total_cost < b.total_cost;
        if (a.mean_latency_s != b.mean_latency_s) return a.mean_latency_s < b.mean_latency_s;
        return a.combo_index < b.combo_index;
    });

    // In sorted order only earlier points can dominate a candidate, so a
    // single forward sweep against the kept set suffices.
    std::vector<ParetoPoint> frontier;
    for (const auto& candidate : sorted) {
        bool dominated = false;
        for (const auto& kept : frontier) {
            if (dominates(kept, candidate)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) frontier.push_back(candidate);
    }
    return frontier;
}

}  // namespace agentopt::report
