#pragma once

#include <string>

#include "agentopt/pareto.hpp"
#include "agentopt/selectors.hpp"

namespace agentopt::report {

struct SavingsSummary {
    std::int64_t selector_evaluations = 0;
    std::int64_t brute_force_evaluations = 0;
    double savings_fraction = 0.0;  // <= 1
};

// Reference side of the savings comparison: evaluation count, and total
// cost when the brute-force dollars are known.
struct BruteForceReference {
    std::int64_t evaluations = 0;
    std::optional<Money> total_cost;

    static BruteForceReference from_report(const selectors::SelectionReport& report) {
        return {report.total_evaluations, report.total_cost};
    }
};

SavingsSummary savings(const selectors::SelectionReport& report,
                       const BruteForceReference& reference);

// "61.9%" style, one decimal
std::string format_percent(double fraction);

// rank,combo_index,<role columns...>,mean_score,n_evals,mean_latency_s,
// total_cost_usd,on_pareto — rows in rank order, 6 fractional digits,
// '\n' newlines. Identical reports serialize to identical bytes.
void export_csv(const selectors::SelectionReport& report, const std::string& path);
std::string render_csv(const selectors::SelectionReport& report);

// Best assignment as `roles: {<role>: <model>}` plus selector, seed and
// the achieved mean score; keys follow the space's role order.
void export_config_yaml(const selectors::SelectionReport& report, const std::string& path);
std::string render_config_yaml(const selectors::SelectionReport& report);

}  // namespace agentopt::report
