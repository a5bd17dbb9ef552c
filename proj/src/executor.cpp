#include "agentopt/executor.hpp"

#include <atomic>
#include <thread>

#include "agentopt/errors.hpp"

namespace agentopt::evalsub {

namespace {

struct Group {
    std::int64_t combo = 0;
    std::vector<std::size_t> task_indices;
};

void bump_peak(std::atomic<std::int64_t>& peak, std::int64_t value) {
    std::int64_t cur = peak.load(std::memory_order_relaxed);
    while (value > cur && !peak.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
    }
}

}  // namespace

std::vector<EvalOutcome> run_parallel(
    const std::vector<EvalTask>& tasks, const ConcurrencyBudget& budget,
    const std::function<Observation(std::int64_t, std::int64_t)>& evaluate,
    ExecutorStats* stats) {
    if (budget.max_combos_in_flight < 1 || budget.max_datapoints_per_combo < 1)
        throw ConfigError("concurrency limits must be >= 1");

    std::vector<EvalOutcome> results(tasks.size());
    std::atomic<std::int64_t> in_flight{0};
    std::atomic<std::int64_t> peak_in_flight{0};
    std::atomic<std::int64_t> peak_per_combo{0};
    std::atomic<std::int64_t> executed{0};

    auto run_one = [&](std::size_t task_idx, std::atomic<std::int64_t>& combo_in_flight) {
        bump_peak(peak_in_flight, in_flight.fetch_add(1, std::memory_order_acq_rel) + 1);
        bump_peak(peak_per_combo, combo_in_flight.fetch_add(1, std::memory_order_acq_rel) + 1);
        const EvalTask& t = tasks[task_idx];
        try {
            results[task_idx].obs = evaluate(t.combo, t.datapoint);
        } catch (const std::exception& e) {
            results[task_idx].error = e.what();
            if (results[task_idx].error.empty()) results[task_idx].error = "evaluation failed";
        }
        executed.fetch_add(1, std::memory_order_relaxed);
        combo_in_flight.fetch_sub(1, std::memory_order_acq_rel);
        in_flight.fetch_sub(1, std::memory_order_acq_rel);
    };

    if (budget.max_combos_in_flight == 1 && budget.max_datapoints_per_combo == 1) {
        std::atomic<std::int64_t> combo_in_flight{0};
        for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i, combo_in_flight);
    } else {
        // group by combo, first-appearance order
        std::vector<Group> groups;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            Group* g = nullptr;
            for (auto it = groups.rbegin(); it != groups.rend(); ++it)
                if (it->combo == tasks[i].combo) { g = &*it; break; }
            if (!g) {
                groups.push_back({tasks[i].combo, {}});
                g = &groups.back();
            }
            g->task_indices.push_back(i);
        }

        std::atomic<std::size_t> group_cursor{0};
        auto combo_worker = [&]() {
            for (;;) {
                std::size_t gi = group_cursor.fetch_add(1, std::memory_order_acq_rel);
                if (gi >= groups.size()) return;
                const Group& group = groups[gi];
                std::atomic<std::int64_t> combo_in_flight{0};
                int inner = std::min<int>(budget.max_datapoints_per_combo,
                                          static_cast<int>(group.task_indices.size()));
                if (inner <= 1) {
                    for (std::size_t idx : group.task_indices) run_one(idx, combo_in_flight);
                } else {
                    std::atomic<std::size_t> task_cursor{0};
                    auto inner_worker = [&]() {
                        for (;;) {
                            std::size_t ti = task_cursor.fetch_add(1, std::memory_order_acq_rel);
                            if (ti >= group.task_indices.size()) return;
                            run_one(group.task_indices[ti], combo_in_flight);
                        }
                    };
                    std::vector<std::thread> inner_threads;
                    inner_threads.reserve(inner - 1);
                    for (int k = 0; k < inner - 1; ++k) inner_threads.emplace_back(inner_worker);
                    inner_worker();
                    for (auto& t : inner_threads) t.join();
                }
            }
        };

        int workers = std::min<int>(budget.max_combos_in_flight, static_cast<int>(groups.size()));
        std::vector<std::thread> threads;
        threads.reserve(workers > 0 ? workers - 1 : 0);
        for (int k = 0; k < workers - 1; ++k) threads.emplace_back(combo_worker);
        combo_worker();
        for (auto& t : threads) t.join();
    }

    if (stats) {
        stats->peak_in_flight = peak_in_flight.load();
        stats->peak_per_combo = peak_per_combo.load();
        stats->executed = executed.load();
    }
    return results;
}

}  // namespace agentopt::evalsub
