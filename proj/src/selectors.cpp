#include "agentopt/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "agentopt/pareto.hpp"
#include "agentopt/rng.hpp"
#include "agentopt/surrogates.hpp"

namespace agentopt::selectors {

using evalsub::ConcurrencyBudget;
using evalsub::Dataset;
using evalsub::EvalTask;
using evalsub::Evaluator;
using nlohmann::json;

namespace {

constexpr double kLrfDropout = 0.1;
constexpr int kAlsSweepCap = 100;
constexpr double kGpGamma = 1.0;
constexpr double kGpNoise = 1e-4;

// A single selector run: owns the score matrix, attempt flags and the
// counters that end up in the report. All evaluation goes through
// run_cells so batches merge in task order regardless of scheduling.
struct Run {
    const PipelineSpace& space;
    const Dataset& dataset;
    Evaluator& evaluator;
    const SelectorConfig& cfg;
    ConcurrencyBudget budget;
    ScoreMatrix matrix;
    std::vector<std::uint8_t> attempted;
    std::int64_t attempts = 0;
    std::int64_t failures = 0;
    std::int64_t cache_served = 0;
    evalsub::WarningCounters warnings;

    Run(const PipelineSpace& s, const Dataset& ds, Evaluator& ev, const SelectorConfig& c,
        const ConcurrencyBudget& b)
        : space(s), dataset(ds), evaluator(ev), cfg(c), budget(b),
          matrix(s.n_combos(), ds.size),
          attempted(static_cast<std::size_t>(s.n_combos() * ds.size), 0) {
        if (evaluator.serial()) budget = {1, 1};
    }

    std::int64_t n_combos() const { return space.n_combos(); }
    std::int64_t n_datapoints() const { return dataset.size; }

    bool cell_attempted(std::int64_t c, std::int64_t d) const {
        return attempted[static_cast<std::size_t>(c * dataset.size + d)] != 0;
    }
    std::int64_t row_attempted(std::int64_t c) const {
        std::int64_t count = 0;
        for (std::int64_t d = 0; d < dataset.size; ++d)
            if (cell_attempted(c, d)) ++count;
        return count;
    }
    std::vector<std::int64_t> unattempted_in_row(std::int64_t c) const {
        std::vector<std::int64_t> out;
        for (std::int64_t d = 0; d < dataset.size; ++d)
            if (!cell_attempted(c, d)) out.push_back(d);
        return out;
    }

    void run_cells(const std::vector<EvalTask>& tasks) {
        if (tasks.empty()) return;
        auto outcomes = evalsub::run_parallel(tasks, budget, [this](std::int64_t c, std::int64_t d) {
            Combination combo{c, space.models_of(c)};
            return evaluator.evaluate(combo, d);
        });
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            attempted[static_cast<std::size_t>(tasks[i].combo * dataset.size + tasks[i].datapoint)] = 1;
            ++attempts;
            if (outcomes[i].obs)
                matrix.record(tasks[i].combo, tasks[i].datapoint, *outcomes[i].obs);
            else
                ++failures;
        }
    }

    void run_row(std::int64_t combo) {
        std::vector<EvalTask> tasks;
        tasks.reserve(static_cast<std::size_t>(dataset.size));
        for (std::int64_t d = 0; d < dataset.size; ++d) tasks.push_back({combo, d});
        run_cells(tasks);
    }

    CombinationStats stats(std::int64_t combo) const { return matrix.stats(combo, cfg.delta); }

    SelectionReport finish(const std::string& name, std::int64_t best_override = -1,
                           std::optional<std::vector<std::int64_t>> above = std::nullopt) const {
        SelectionReport rep;
        rep.selector_name = name;
        rep.seed = cfg.seed;
        rep.config = cfg;
        rep.role_names = space.roles();
        for (std::int64_t c = 0; c < n_combos(); ++c) {
            CombinationStats st = stats(c);
            if (st.n == 0) continue;
            RankedEntry entry;
            entry.combo_index = c;
            entry.n = st.n;
            entry.mean_score = st.mean_score;
            entry.lcb = st.lcb;
            entry.ucb = st.ucb;
            entry.mean_latency_s = st.mean_latency_s;
            entry.total_cost = st.total_cost;
            entry.models = space.models_of(c);
            rep.ranked.push_back(std::move(entry));
            rep.total_cost += st.total_cost;
        }
        std::sort(rep.ranked.begin(), rep.ranked.end(), [](const RankedEntry& a, const RankedEntry& b) {
            if (a.mean_score != b.mean_score) return a.mean_score > b.mean_score;
            if (a.total_cost != b.total_cost) return a.total_cost < b.total_cost;
            return a.combo_index < b.combo_index;
        });
        rep.total_evaluations = matrix.n_observed() + failures;
        rep.failures = failures;
        rep.cache_served = cache_served;

        std::vector<report::ParetoPoint> points;
        points.reserve(rep.ranked.size());
        for (const auto& e : rep.ranked)
            points.push_back({e.combo_index, e.mean_score, e.total_cost, e.mean_latency_s});
        auto frontier = report::pareto_frontier(points);
        for (const auto& p : frontier) {
            rep.pareto_set.push_back(p.combo_index);
            for (auto& e : rep.ranked)
                if (e.combo_index == p.combo_index) e.on_pareto = true;
        }

        rep.best_combo = best_override >= 0 ? best_override
                                            : (rep.ranked.empty() ? -1 : rep.ranked.front().combo_index);
        rep.above_threshold = std::move(above);
        rep.warnings = evaluator.warnings();
        rep.warnings += warnings;
        return rep;
    }
};

// comparator shared by "argmax empirical mean" decisions
bool better_stats(const CombinationStats& a, const CombinationStats& b) {
    if (a.n == 0 || b.n == 0) return a.n > 0;  // observed beats unobserved
    if (a.mean_score != b.mean_score) return a.mean_score > b.mean_score;
    if (a.total_cost != b.total_cost) return a.total_cost < b.total_cost;
    return a.combo_index < b.combo_index;
}

std::int64_t argmax_mean(const Run& run, const std::vector<std::int64_t>& combos) {
    std::int64_t best = -1;
    CombinationStats best_stats;
    for (std::int64_t c : combos) {
        CombinationStats st = run.stats(c);
        if (st.n == 0) continue;
        if (best < 0 || better_stats(st, best_stats)) {
            best = c;
            best_stats = st;
        }
    }
    return best;
}

std::int64_t ceil_budget(double beta, std::int64_t grid) {
    return static_cast<std::int64_t>(std::ceil(beta * static_cast<double>(grid)));
}

std::int64_t batch_for_round(const std::vector<std::int64_t>& schedule, int round) {
    // past the end of an explicit schedule, keep doubling the last entry
    if (schedule.empty()) {
        return std::int64_t{8} << std::min(round, 40);
    }
    if (round < static_cast<int>(schedule.size())) return schedule[static_cast<std::size_t>(round)];
    int extra = round - static_cast<int>(schedule.size()) + 1;
    return schedule.back() << std::min(extra, 40);
}

// one plain UCB-E step; shared with the LRF fallback path
void ucb_step(Run& run, std::int64_t total_budget, std::int64_t step) {
    const std::int64_t n_combos = run.n_combos();
    double best_val = -std::numeric_limits<double>::infinity();
    std::int64_t best_j = -1;
    for (std::int64_t j = 0; j < n_combos; ++j) {
        bool full = run.row_attempted(j) == run.n_datapoints();
        double val = ucb_index(run.stats(j), run.cfg.exploration_weight_a, full);
        if (val > best_val) {
            best_val = val;
            best_j = j;
        }
    }
    auto open_cells = run.unattempted_in_row(best_j);
    std::int64_t k = std::min<std::int64_t>(
        {run.cfg.batch_size, total_budget - run.attempts,
         static_cast<std::int64_t>(open_cells.size())});
    Rng rng(key_mix(run.cfg.seed, rng_tag::kUcbRow, static_cast<std::uint64_t>(best_j),
                    static_cast<std::uint64_t>(step)));
    partial_shuffle(open_cells, static_cast<std::size_t>(k), rng);
    std::vector<EvalTask> tasks;
    for (std::int64_t i = 0; i < k; ++i) tasks.push_back({best_j, open_cells[static_cast<std::size_t>(i)]});
    run.run_cells(tasks);
}

}  // namespace

void validate(const SelectorConfig& config, const PipelineSpace&, const Dataset& dataset) {
    if (dataset.size < 1) throw ConfigError("dataset must contain at least one datapoint");
    if (!(config.exploration_weight_a > 0.0)) throw ConfigError("exploration weight a must be > 0");
    if (config.batch_size < 1) throw ConfigError("batch size B must be >= 1");
    if (!(config.budget_fraction > 0.0 && config.budget_fraction <= 1.0))
        throw ConfigError("budget fraction beta must lie in (0, 1]");
    if (!(config.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
    if (!std::isfinite(config.threshold_tau)) throw ConfigError("threshold tau must be finite");
    if (!(config.delta > 0.0 && config.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    if (config.rank < 1) throw ConfigError("rank r must be >= 1");
    if (config.ensemble < 1) throw ConfigError("ensemble E must be >= 1");
    if (!(config.warmup_fraction >= 0.0 && config.warmup_fraction < 1.0))
        throw ConfigError("warmup fraction w must lie in [0, 1)");
    if (!(config.uncertainty_eta >= 0.0)) throw ConfigError("uncertainty weight eta must be >= 0");
    if (config.restarts < 1) throw ConfigError("restarts R must be >= 1");
    if (config.initial_design < 0) throw ConfigError("initial design m must be >= 0");
    if (config.total_budget_combos < 0) throw ConfigError("combo budget must be >= 0");
    if (config.shortlist_k < 1) throw ConfigError("shortlist k must be >= 1");
    for (std::int64_t b : config.elimination_schedule)
        if (b < 1) throw ConfigError("elimination schedule entries must be >= 1");
}

double ucb_index(const CombinationStats& stats, double a, bool fully_observed) {
    if (fully_observed) return -std::numeric_limits<double>::infinity();
    if (stats.n == 0) return std::numeric_limits<double>::infinity();
    return stats.mean_score + std::sqrt(a / static_cast<double>(stats.n));
}

const RankedEntry* SelectionReport::entry(std::int64_t combo) const {
    for (const auto& e : ranked)
        if (e.combo_index == combo) return &e;
    return nullptr;
}

SelectionReport brute_force(const PipelineSpace& space, const Dataset& dataset,
                            Evaluator& evaluator, const SelectorConfig& config,
                            const ConcurrencyBudget& budget) {
    validate(config, space, dataset);
    Run run(space, dataset, evaluator, config, budget);
    std::vector<EvalTask> tasks;
    tasks.reserve(static_cast<std::size_t>(space.n_combos() * dataset.size));
    for (std::int64_t c = 0; c < space.n_combos(); ++c)
        for (std::int64_t d = 0; d < dataset.size; ++d) tasks.push_back({c, d});
    run.run_cells(tasks);
    return run.finish("brute-force");
}

SelectionReport random_search(const PipelineSpace& space, const Dataset& dataset,
                              Evaluator& evaluator, const SelectorConfig& config,
                              const ConcurrencyBudget& budget) {
    validate(config, space, dataset);
    std::int64_t n_chosen = config.resolved_budget_combos(space.n_combos());
    if (n_chosen > space.n_combos())
        throw BudgetExceedsSpace("combo budget " + std::to_string(n_chosen) + " exceeds |C| = " +
                                 std::to_string(space.n_combos()));
    Run run(space, dataset, evaluator, config, budget);
    std::vector<std::int64_t> order(static_cast<std::size_t>(space.n_combos()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::int64_t>(i);
    Rng rng(key_mix(config.seed, rng_tag::kRandomSearch));
    partial_shuffle(order, static_cast<std::size_t>(n_chosen), rng);
    for (std::int64_t i = 0; i < n_chosen; ++i) run.run_row(order[static_cast<std::size_t>(i)]);
    return run.finish("random");
}

SelectionReport matrix_ucb_e(const PipelineSpace& space, const Dataset& dataset,
                             Evaluator& evaluator, const SelectorConfig& config,
                             const ConcurrencyBudget& budget) {
    validate(config, space, dataset);
    if (config.budget_fraction * static_cast<double>(space.n_combos() * dataset.size) < 1.0)
        throw ConfigError("beta * |C| * |D| must be >= 1");
    Run run(space, dataset, evaluator, config, budget);
    const std::int64_t total = ceil_budget(config.budget_fraction, space.n_combos() * dataset.size);
    std::int64_t step = 0;
    while (run.attempts < total) {
        ucb_step(run, total, step);
        ++step;
    }
    return run.finish("ucb-e");
}

SelectionReport matrix_ucb_e_lrf(const PipelineSpace& space, const Dataset& dataset,
                                 Evaluator& evaluator, const SelectorConfig& config,
                                 const ConcurrencyBudget& budget) {
    validate(config, space, dataset);
    if (config.budget_fraction * static_cast<double>(space.n_combos() * dataset.size) < 1.0)
        throw ConfigError("beta * |C| * |D| must be >= 1");
    Run run(space, dataset, evaluator, config, budget);
    const std::int64_t grid = space.n_combos() * dataset.size;
    const std::int64_t total = ceil_budget(config.budget_fraction, grid);
    const std::int64_t n_combos = space.n_combos();
    const std::int64_t n_data = dataset.size;

    bool fallback = false;
    std::int64_t step = 0;
    while (run.attempts < total) {
        if (fallback) {
            ucb_step(run, total, step);
            ++step;
            continue;
        }
        if (static_cast<double>(run.attempts) / static_cast<double>(grid) <
            config.warmup_fraction) {
            // warmup: random unobserved cells anywhere in the grid
            std::vector<std::int64_t> open;
            for (std::int64_t c = 0; c < n_combos; ++c)
                for (std::int64_t d = 0; d < n_data; ++d)
                    if (!run.cell_attempted(c, d)) open.push_back(c * n_data + d);
            std::int64_t k = std::min<std::int64_t>(config.batch_size, total - run.attempts);
            Rng rng(key_mix(config.seed, rng_tag::kWarmup, static_cast<std::uint64_t>(step)));
            partial_shuffle(open, static_cast<std::size_t>(k), rng);
            std::vector<EvalTask> tasks;
            for (std::int64_t i = 0; i < k; ++i)
                tasks.push_back({open[static_cast<std::size_t>(i)] / n_data,
                                 open[static_cast<std::size_t>(i)] % n_data});
            run.run_cells(tasks);
            ++step;
            continue;
        }

        std::vector<surrogates::ObservedCell> observed;
        for (std::int64_t c = 0; c < n_combos; ++c)
            for (std::int64_t d = 0; d < n_data; ++d)
                if (const Observation* obs = run.matrix.cell(c, d))
                    observed.push_back({c, d, obs->score});

        std::vector<surrogates::LowRankFactor> members;
        try {
            for (int e = 0; e < config.ensemble; ++e) {
                std::uint64_t member_seed = key_mix(config.seed, rng_tag::kAlsMember,
                                                    static_cast<std::uint64_t>(step),
                                                    static_cast<std::uint64_t>(e));
                members.push_back(surrogates::als_fit(observed, n_combos, n_data, config.rank,
                                                      config.ensemble > 1 ? kLrfDropout : 0.0,
                                                      kAlsSweepCap, member_seed));
            }
        } catch (const Error&) {
            ++run.warnings.surrogate_fallbacks;
            fallback = true;
            continue;
        }
        surrogates::EnsembleStats ens = surrogates::ensemble_stats(members);

        double best_val = -std::numeric_limits<double>::infinity();
        std::int64_t best_j = -1;
        for (std::int64_t j = 0; j < n_combos; ++j) {
            if (run.row_attempted(j) == n_data) continue;  // nothing left to reveal
            double sum = 0.0;
            for (std::int64_t d = 0; d < n_data; ++d) {
                if (const Observation* obs = run.matrix.cell(j, d))
                    sum += obs->score;
                else
                    sum += ens.mu_at(j, d) + config.uncertainty_eta * ens.sigma_at(j, d);
            }
            double val = sum / static_cast<double>(n_data);
            if (val > best_val) {
                best_val = val;
                best_j = j;
            }
        }
        if (best_j < 0) break;  // defensive; attempts == grid implies total reached

        auto open_cells = run.unattempted_in_row(best_j);
        std::int64_t k = std::min<std::int64_t>(
            {config.batch_size, total - run.attempts,
             static_cast<std::int64_t>(open_cells.size())});
        std::stable_sort(open_cells.begin(), open_cells.end(),
                         [&](std::int64_t a, std::int64_t b) {
                             double sa = ens.sigma_at(best_j, a);
                             double sb = ens.sigma_at(best_j, b);
                             if (sa != sb) return sa > sb;
                             return a < b;
                         });
        std::vector<EvalTask> tasks;
        for (std::int64_t i = 0; i < k; ++i)
            tasks.push_back({best_j, open_cells[static_cast<std::size_t>(i)]});
        run.run_cells(tasks);
        ++step;
    }
    return run.finish("ucb-e-lrf");
}

SelectionReport arm_elimination(const PipelineSpace& space, const Dataset& dataset,
                                Evaluator& evaluator, const SelectorConfig& config,
                                const ConcurrencyBudget& budget) {
    validate(config, space, dataset);
    Run run(space, dataset, evaluator, config, budget);
    std::vector<std::int64_t> survivors(static_cast<std::size_t>(space.n_combos()));
    for (std::size_t i = 0; i < survivors.size(); ++i) survivors[i] = static_cast<std::int64_t>(i);

    std::int64_t consumed = 0;
    int round = 0;
    do {
        std::int64_t b = std::min(batch_for_round(config.elimination_schedule, round),
                                  dataset.size - consumed);
        std::vector<EvalTask> tasks;
        for (std::int64_t j : survivors)
            for (std::int64_t d = consumed; d < consumed + b; ++d) tasks.push_back({j, d});
        run.run_cells(tasks);
        consumed += b;
        ++round;

        double best_lcb = -std::numeric_limits<double>::infinity();
        for (std::int64_t j : survivors) {
            CombinationStats st = run.stats(j);
            if (st.n > 0) best_lcb = std::max(best_lcb, st.lcb);
        }
        std::vector<std::int64_t> next;
        for (std::int64_t j : survivors) {
            CombinationStats st = run.stats(j);
            if (st.n == 0 || st.ucb >= best_lcb) next.push_back(j);
        }
        survivors = std::move(next);
    } while (survivors.size() > 1 && consumed < dataset.size);
    return run.finish("arm-elimination", argmax_mean(run, survivors));
}

SelectionReport epsilon_lucb(const PipelineSpace& space, const Dataset& dataset,
                             Evaluator& evaluator, const SelectorConfig& config,
                             const ConcurrencyBudget& budget) {
    validate(config, space, dataset);
    Run run(space, dataset, evaluator, config, budget);
    const std::int64_t n_combos = space.n_combos();
    const std::int64_t n_data = dataset.size;
    std::vector<std::int64_t> next_dp(static_cast<std::size_t>(n_combos), 0);

    auto pull = [&](std::int64_t j, std::vector<EvalTask>& tasks) {
        std::int64_t from = next_dp[static_cast<std::size_t>(j)];
        std::int64_t to = std::min<std::int64_t>(from + config.batch_size, n_data);
        for (std::int64_t d = from; d < to; ++d) tasks.push_back({j, d});
        next_dp[static_cast<std::size_t>(j)] = to;
    };

    {
        std::vector<EvalTask> init;
        for (std::int64_t j = 0; j < n_combos; ++j) pull(j, init);
        run.run_cells(init);
    }

    std::int64_t best = -1;
    const std::int64_t global_cap = n_combos * n_data;
    for (;;) {
        std::int64_t leader = -1;
        CombinationStats leader_stats;
        for (std::int64_t j = 0; j < n_combos; ++j) {
            CombinationStats st = run.stats(j);
            if (st.n == 0) continue;
            if (leader < 0 || better_stats(st, leader_stats)) {
                leader = j;
                leader_stats = st;
            }
        }
        best = leader;
        if (leader < 0 || n_combos == 1) break;

        std::int64_t challenger = -1;
        double challenger_ucb = -std::numeric_limits<double>::infinity();
        for (std::int64_t j = 0; j < n_combos; ++j) {
            if (j == leader) continue;
            CombinationStats st = run.stats(j);
            double u = st.n == 0 ? 1.0 : st.ucb;
            if (u > challenger_ucb) {
                challenger_ucb = u;
                challenger = j;
            }
        }
        if (challenger < 0) break;
        if (leader_stats.lcb >= challenger_ucb - config.epsilon) break;
        if (next_dp[static_cast<std::size_t>(leader)] >= n_data ||
            next_dp[static_cast<std::size_t>(challenger)] >= n_data)
            break;
        if (run.attempts >= global_cap) break;

        std::vector<EvalTask> tasks;
        pull(leader, tasks);
        pull(challenger, tasks);
        run.run_cells(tasks);
    }
    return run.finish("epsilon-lucb", best);
}

SelectionReport threshold_se(const PipelineSpace& space, const Dataset& dataset,
                             Evaluator& evaluator, const SelectorConfig& config,
                             const ConcurrencyBudget& budget) {
    validate(config, space, dataset);
    Run run(space, dataset, evaluator, config, budget);
    const double tau = config.threshold_tau;
    enum class Status { Uncertain, Above, Below };
    std::vector<Status> status(static_cast<std::size_t>(space.n_combos()), Status::Uncertain);

    std::int64_t consumed = 0;
    int round = 0;
    for (;;) {
        std::vector<std::int64_t> uncertain;
        for (std::int64_t j = 0; j < space.n_combos(); ++j)
            if (status[static_cast<std::size_t>(j)] == Status::Uncertain) uncertain.push_back(j);
        if (uncertain.empty() || consumed >= dataset.size) break;

        std::int64_t b = std::min(batch_for_round(config.elimination_schedule, round),
                                  dataset.size - consumed);
        std::vector<EvalTask> tasks;
        for (std::int64_t j : uncertain)
            for (std::int64_t d = consumed; d < consumed + b; ++d) tasks.push_back({j, d});
        run.run_cells(tasks);
        consumed += b;
        ++round;

        for (std::int64_t j : uncertain) {
            CombinationStats st = run.stats(j);
            if (st.n == 0) continue;
            if (st.lcb > tau)
                status[static_cast<std::size_t>(j)] = Status::Above;
            else if (st.ucb < tau)
                status[static_cast<std::size_t>(j)] = Status::Below;
        }
    }

    // data exhausted: resolve the rest on empirical means
    for (std::int64_t j = 0; j < space.n_combos(); ++j) {
        if (status[static_cast<std::size_t>(j)] != Status::Uncertain) continue;
        CombinationStats st = run.stats(j);
        status[static_cast<std::size_t>(j)] =
            (st.n > 0 && st.mean_score > tau) ? Status::Above : Status::Below;
    }

    std::vector<std::int64_t> above;
    for (std::int64_t j = 0; j < space.n_combos(); ++j)
        if (status[static_cast<std::size_t>(j)] == Status::Above) above.push_back(j);
    return run.finish("threshold-se", -1, std::move(above));
}

SelectionReport hill_climbing(const PipelineSpace& space, const Dataset& dataset,
                              Evaluator& evaluator, const SelectorConfig& config,
                              const ConcurrencyBudget& budget,
                              std::vector<std::vector<std::int64_t>>* restart_traces) {
    validate(config, space, dataset);
    Run run(space, dataset, evaluator, config, budget);
    std::vector<bool> evaluated(static_cast<std::size_t>(space.n_combos()), false);

    auto eval_full = [&](std::int64_t j) {
        if (evaluated[static_cast<std::size_t>(j)]) {
            run.cache_served += dataset.size;
            return;
        }
        run.run_row(j);
        evaluated[static_cast<std::size_t>(j)] = true;
    };
    auto mean_of = [&](std::int64_t j) { return run.stats(j).mean_score; };

    std::int64_t best = -1;
    CombinationStats best_stats;
    for (int rr = 0; rr < config.restarts; ++rr) {
        Rng rng(key_mix(config.seed, rng_tag::kHillStart, static_cast<std::uint64_t>(rr)));
        std::int64_t cur = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(space.n_combos())));
        eval_full(cur);
        std::vector<std::int64_t> trace{cur};
        for (;;) {
            auto neighbor_list = space.neighbors(cur);
            for (std::int64_t nb : neighbor_list) eval_full(nb);
            std::int64_t best_nb = argmax_mean(run, neighbor_list);
            if (best_nb < 0 || !(mean_of(best_nb) > mean_of(cur))) break;
            cur = best_nb;
            trace.push_back(cur);
        }
        CombinationStats st = run.stats(cur);
        if (best < 0 || better_stats(st, best_stats)) {
            best = cur;
            best_stats = st;
        }
        if (restart_traces) restart_traces->push_back(std::move(trace));
    }
    return run.finish("hill-climbing", best);
}

SelectionReport bayesian_opt(const PipelineSpace& space, const Dataset& dataset,
                             Evaluator& evaluator, const SelectorConfig& config,
                             const ConcurrencyBudget& budget) {
    validate(config, space, dataset);
    const std::int64_t n_combos = space.n_combos();
    std::int64_t combo_budget = config.resolved_budget_combos(n_combos);
    std::int64_t m = config.resolved_initial_design(n_combos);
    if (combo_budget > n_combos)
        throw BudgetExceedsSpace("combo budget " + std::to_string(combo_budget) +
                                 " exceeds |C| = " + std::to_string(n_combos));
    if (m > combo_budget)
        throw ConfigError("initial design m exceeds the combo budget");

    Run run(space, dataset, evaluator, config, budget);
    std::vector<bool> chosen(static_cast<std::size_t>(n_combos), false);
    std::vector<std::int64_t> order(static_cast<std::size_t>(n_combos));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::int64_t>(i);
    Rng rng(key_mix(config.seed, rng_tag::kBoInit));
    partial_shuffle(order, static_cast<std::size_t>(m), rng);

    std::int64_t n_evaluated = 0;
    for (std::int64_t i = 0; i < m; ++i) {
        std::int64_t j = order[static_cast<std::size_t>(i)];
        run.run_row(j);
        chosen[static_cast<std::size_t>(j)] = true;
        ++n_evaluated;
    }

    std::int64_t step = 0;
    while (n_evaluated < combo_budget) {
        std::vector<std::vector<int>> encodings;
        std::vector<double> values;
        double incumbent = -std::numeric_limits<double>::infinity();
        for (std::int64_t j = 0; j < n_combos; ++j) {
            if (!chosen[static_cast<std::size_t>(j)]) continue;
            CombinationStats st = run.stats(j);
            if (st.n == 0) continue;
            encodings.push_back(space.digits_of(j));
            values.push_back(st.mean_score);
            incumbent = std::max(incumbent, st.mean_score);
        }

        std::int64_t next = -1;
        if (!encodings.empty()) {
            try {
                surrogates::SurrogateModel model =
                    surrogates::surrogate_fit(encodings, values, kGpGamma, kGpNoise);
                double best_ei = -1.0;
                for (std::int64_t j = 0; j < n_combos; ++j) {
                    if (chosen[static_cast<std::size_t>(j)]) continue;
                    auto pred = model.predict(space.digits_of(j));
                    double ei = surrogates::expected_improvement(pred.mean, pred.variance, incumbent);
                    if (ei > best_ei) {
                        best_ei = ei;
                        next = j;
                    }
                }
            } catch (const NumericalFailure&) {
                ++run.warnings.surrogate_fallbacks;
            }
        }
        if (next < 0) {
            // seeded random continuation over the remaining combos
            std::vector<std::int64_t> open;
            for (std::int64_t j = 0; j < n_combos; ++j)
                if (!chosen[static_cast<std::size_t>(j)]) open.push_back(j);
            Rng fb(key_mix(config.seed, rng_tag::kBoFallback, static_cast<std::uint64_t>(step)));
            next = open[static_cast<std::size_t>(fb.below(open.size()))];
        }
        run.run_row(next);
        chosen[static_cast<std::size_t>(next)] = true;
        ++n_evaluated;
        ++step;
    }
    return run.finish("bayes-opt");
}

std::string proposal_prompt(const PipelineSpace& space, const PriceTable& prices) {
    std::string prompt;
    prompt += "You are selecting models for a multi-stage agent pipeline.\n";
    prompt += "Roles, in pipeline order, with their candidate models:\n";
    for (int r = 0; r < space.n_roles(); ++r) {
        prompt += "- " + space.roles()[r] + ": ";
        const auto& cands = space.candidates(r);
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (i) prompt += ", ";
            prompt += cands[i];
        }
        prompt += "\n";
    }
    if (!prices.entries().empty()) {
        prompt += "Prices in USD per million input/output tokens:\n";
        for (const auto& [model, price] : prices.entries()) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%.2f/%.2f",
                          static_cast<double>(price.input_micro_per_mtok) / 1e6,
                          static_cast<double>(price.output_micro_per_mtok) / 1e6);
            prompt += "- " + model + ": " + buf + "\n";
        }
    }
    prompt +=
        "Reply with a JSON array of assignments ranked best first. Each element "
        "must be an object mapping every role name to one of its candidate "
        "models, with no other keys. Reply with the JSON array only.\n";
    return prompt;
}

std::vector<std::int64_t> parse_proposals(const std::string& reply, const PipelineSpace& space,
                                          std::int64_t* invalid_count) {
    std::int64_t invalid = 0;
    std::vector<std::int64_t> combos;
    json parsed = json::parse(reply, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_array()) {
        if (invalid_count) *invalid_count = 1;
        return combos;
    }
    for (const auto& element : parsed) {
        if (!element.is_object()) {
            ++invalid;
            continue;
        }
        std::map<std::string, std::string> assignment;
        bool ok = true;
        for (auto it = element.begin(); it != element.end(); ++it) {
            if (!it.value().is_string()) {
                ok = false;
                break;
            }
            assignment[it.key()] = it.value().get<std::string>();
        }
        std::optional<std::int64_t> index;
        if (ok) index = space.index_of_assignment(assignment);
        if (!index) {
            ++invalid;
            continue;
        }
        if (std::find(combos.begin(), combos.end(), *index) == combos.end())
            combos.push_back(*index);
    }
    if (invalid_count) *invalid_count = invalid;
    return combos;
}

SelectionReport lm_proposal(const PipelineSpace& space, const Dataset& dataset,
                            Evaluator& evaluator, const SelectorConfig& config,
                            Proposer& proposer, const ConcurrencyBudget& budget,
                            const PriceTable* prices) {
    validate(config, space, dataset);
    Run run(space, dataset, evaluator, config, budget);

    std::vector<std::int64_t> shortlist;
    PriceTable empty_prices;
    std::string prompt = proposal_prompt(space, prices ? *prices : empty_prices);
    try {
        std::string reply = proposer.propose(prompt);
        std::int64_t invalid = 0;
        shortlist = parse_proposals(reply, space, &invalid);
        run.warnings.invalid_proposals += invalid;
    } catch (const std::exception&) {
        ++run.warnings.invalid_proposals;  // proposer unavailable; fall back below
    }
    if (static_cast<std::int64_t>(shortlist.size()) > config.shortlist_k)
        shortlist.resize(static_cast<std::size_t>(config.shortlist_k));
    if (shortlist.empty()) {
        Rng rng(key_mix(config.seed, rng_tag::kLmFallback));
        shortlist.push_back(static_cast<std::int64_t>(
            rng.below(static_cast<std::uint64_t>(space.n_combos()))));
    }
    for (std::int64_t j : shortlist) run.run_row(j);
    return run.finish("lm-proposal");
}

SelectionReport select(const std::string& selector_name, const PipelineSpace& space,
                       const Dataset& dataset, Evaluator& evaluator, const SelectorConfig& config,
                       const ConcurrencyBudget& budget, Proposer* proposer,
                       const PriceTable* prices) {
    if (selector_name == "brute-force") return brute_force(space, dataset, evaluator, config, budget);
    if (selector_name == "random") return random_search(space, dataset, evaluator, config, budget);
    if (selector_name == "ucb-e") return matrix_ucb_e(space, dataset, evaluator, config, budget);
    if (selector_name == "ucb-e-lrf")
        return matrix_ucb_e_lrf(space, dataset, evaluator, config, budget);
    if (selector_name == "arm-elimination")
        return arm_elimination(space, dataset, evaluator, config, budget);
    if (selector_name == "epsilon-lucb")
        return epsilon_lucb(space, dataset, evaluator, config, budget);
    if (selector_name == "threshold-se")
        return threshold_se(space, dataset, evaluator, config, budget);
    if (selector_name == "hill-climbing")
        return hill_climbing(space, dataset, evaluator, config, budget);
    if (selector_name == "bayes-opt") return bayesian_opt(space, dataset, evaluator, config, budget);
    if (selector_name == "lm-proposal") {
        if (!proposer) throw ConfigError("selector 'lm-proposal' requires a proposer");
        return lm_proposal(space, dataset, evaluator, config, *proposer, budget, prices);
    }
    throw ConfigError("unknown selector '" + selector_name + "'");
}

const std::vector<std::string>& selector_names() {
    static const std::vector<std::string> names = {
        "brute-force",  "random",       "ucb-e",        "ucb-e-lrf",     "arm-elimination",
        "epsilon-lucb", "threshold-se", "hill-climbing", "bayes-opt",    "lm-proposal"};
    return names;
}

}  // namespace agentopt::selectors
