// Acceptance suite: one pass/fail line per criterion, exit code equals
// the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "agentopt/pareto.hpp"
#include "agentopt/proxy.hpp"
#include "agentopt/replay_io.hpp"
#include "agentopt/report.hpp"
#include "agentopt/rng.hpp"
#include "agentopt/selectors.hpp"
#include "agentopt/surrogates.hpp"

using namespace agentopt;
using namespace agentopt::selectors;
using evalsub::Dataset;
using evalsub::ReplayEvaluator;
using evalsub::ReplayMatrix;
using evalsub::SyntheticBernoulliEvaluator;
using nlohmann::json;

namespace {

int g_failures = 0;

void report_line(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run_criterion(int id, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
    try {
        auto [pass, detail] = body();
        report_line(id, name, pass, detail);
    } catch (const std::exception& e) {
        report_line(id, name, false, std::string("exception: ") + e.what());
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

PipelineSpace single_role_space(int n_models) {
    std::vector<std::string> models;
    for (int i = 0; i < n_models; ++i) models.push_back("m" + std::to_string(i));
    return PipelineSpace::build({"answerer"}, {models});
}

ReplayMatrix random_replay(std::int64_t n_combos, std::int64_t n_datapoints, std::uint64_t seed) {
    ReplayMatrix m;
    m.n_combos = n_combos;
    m.n_datapoints = n_datapoints;
    m.cells.resize(static_cast<std::size_t>(n_combos * n_datapoints));
    Rng rng(seed);
    for (auto& cell : m.cells) {
        cell.score = rng.next_double();
        cell.cost = Money::from_pico(static_cast<std::int64_t>(rng.below(5'000'000)));
        cell.latency_s = rng.uniform(0.0, 2.0);
    }
    return m;
}

std::int64_t exhaustive_best(const ReplayMatrix& m) {
    std::int64_t best = -1;
    double best_mean = -1.0;
    std::int64_t best_cost = 0;
    for (std::int64_t c = 0; c < m.n_combos; ++c) {
        double sum = 0.0;
        std::int64_t cost = 0;
        for (std::int64_t d = 0; d < m.n_datapoints; ++d) {
            sum += m.at(c, d).score;
            cost += m.at(c, d).cost.pico();
        }
        double mean = sum / static_cast<double>(m.n_datapoints);
        if (best < 0 || mean > best_mean || (mean == best_mean && cost < best_cost)) {
            best = c;
            best_mean = mean;
            best_cost = cost;
        }
    }
    return best;
}

// per-combo GPQA accuracies used as Bernoulli success probabilities
const std::vector<double> kGpqaMeans = {0.7475, 0.7273, 0.6818, 0.5960, 0.5101,
                                        0.5000, 0.4697, 0.3687, 0.3485};
// fixed fixture seed; the realized 9x198 draw keeps arm 0 on top, which
// criterion 2 requires of the constructed fixture
constexpr std::uint64_t kGpqaBindingSeed = 6;

std::pair<bool, std::string> criterion_budget_arithmetic() {
    auto start = std::chrono::steady_clock::now();
    auto space = single_role_space(9);
    ReplayMatrix m = random_replay(9, 198, 2024);
    ReplayEvaluator eval(m);
    Dataset data = Dataset::of_size(198);

    const std::vector<std::pair<double, std::int64_t>> expected = {
        {0.1, 179}, {0.2, 357}, {0.3, 535}, {0.5, 891}};
    std::string detail;
    bool pass = true;
    for (auto [beta, evals] : expected) {
        SelectorConfig cfg;
        cfg.seed = 9000;
        cfg.budget_fraction = beta;
        auto ucb = matrix_ucb_e(space, data, eval, cfg);
        auto lrf = matrix_ucb_e_lrf(space, data, eval, cfg);
        if (ucb.total_evaluations != evals || lrf.total_evaluations != evals) {
            pass = false;
            detail += "beta " + std::to_string(beta) + ": ucb-e " +
                      std::to_string(ucb.total_evaluations) + ", lrf " +
                      std::to_string(lrf.total_evaluations) + " != " + std::to_string(evals) + "; ";
        }
    }
    SelectorConfig cfg;
    cfg.seed = 9000;
    auto brute = brute_force(space, data, eval, cfg);
    if (brute.total_evaluations != 1782) {
        pass = false;
        detail += "brute force " + std::to_string(brute.total_evaluations) + " != 1782; ";
    }
    FixedProposer stub(R"([{"answerer": "m0"}])");
    auto lm = lm_proposal(space, data, eval, cfg, stub);
    if (lm.total_evaluations != 198) {
        pass = false;
        detail += "lm proposal " + std::to_string(lm.total_evaluations) + " != 198; ";
    }
    double elapsed = seconds_since(start);
    if (elapsed >= 1.0) {
        pass = false;
        detail += "runtime " + std::to_string(elapsed) + "s >= 1s; ";
    }
    if (pass)
        detail = "ucb-e/lrf {179,357,535,891}, brute 1782, lm 198, " +
                 std::to_string(elapsed) + "s";
    return {pass, detail};
}

std::pair<bool, std::string> criterion_best_arm_recovery() {
    auto start = std::chrono::steady_clock::now();
    auto space = single_role_space(9);
    Dataset data = Dataset::of_size(198);
    SyntheticBernoulliEvaluator eval(kGpqaMeans, kGpqaBindingSeed);

    int brute_found = 0;
    int ucb_found = 0;
    double true_sum = 0.0;
    for (int s = 0; s < 50; ++s) {
        SelectorConfig cfg;
        cfg.seed = 1000 + static_cast<std::uint64_t>(s);
        auto brute = brute_force(space, data, eval, cfg);
        if (brute.best_combo == 0) ++brute_found;
        cfg.budget_fraction = 0.5;
        auto ucb = matrix_ucb_e(space, data, eval, cfg);
        if (ucb.best_combo == 0) ++ucb_found;
        true_sum += kGpqaMeans[static_cast<std::size_t>(ucb.best_combo)];
    }
    double mean_true = true_sum / 50.0;
    double elapsed = seconds_since(start);
    bool pass = brute_found == 50 && ucb_found >= 45 && mean_true >= 0.74 && elapsed < 10.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "brute %d/50, ucb-e@0.5 %d/50, mean true acc %.4f, %.2fs", brute_found,
                  ucb_found, mean_true, elapsed);
    return {pass, buf};
}

std::pair<bool, std::string> criterion_oracle_equivalence() {
    Rng shapes(4242);
    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        // random shape with |C| <= 27, |D| <= 30
        int n_roles = 1 + static_cast<int>(shapes.below(3));
        std::vector<std::string> roles;
        std::vector<std::vector<std::string>> candidates;
        for (int r = 0; r < n_roles; ++r) {
            roles.push_back("r" + std::to_string(r));
            int n = 1 + static_cast<int>(shapes.below(3));
            std::vector<std::string> list;
            for (int i = 0; i < n; ++i) list.push_back("m" + std::to_string(i));
            candidates.push_back(list);
        }
        auto space = PipelineSpace::build(roles, candidates);
        std::int64_t n_data = 1 + static_cast<std::int64_t>(shapes.below(30));
        ReplayMatrix m = random_replay(space.n_combos(), n_data, shapes.next());
        ReplayEvaluator eval(m);
        Dataset data = Dataset::of_size(n_data);
        std::int64_t oracle = exhaustive_best(m);

        SelectorConfig cfg;
        cfg.seed = shapes.next();
        if (brute_force(space, data, eval, cfg).best_combo != oracle) ++mismatches;
        SelectorConfig bo_cfg;
        bo_cfg.seed = cfg.seed;
        bo_cfg.total_budget_combos = space.n_combos();
        bo_cfg.initial_design = std::min<std::int64_t>(space.n_combos(), 5);
        if (bayesian_opt(space, data, eval, bo_cfg).best_combo != oracle) ++mismatches;
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches over 200 matrices"};
}

std::pair<bool, std::string> criterion_elimination_safety() {
    auto start = std::chrono::steady_clock::now();
    auto space = single_role_space(5);
    Dataset data = Dataset::of_size(1000);
    int elim_correct = 0;
    int lucb_within = 0;
    const int runs = 500;
    for (int i = 0; i < runs; ++i) {
        Rng rng(key_mix(777, static_cast<std::uint64_t>(i)));
        std::vector<double> means(5);
        means[0] = rng.uniform(0.55, 0.9);
        for (int j = 1; j < 5; ++j) means[j] = means[0] - 0.1 - rng.uniform(0.0, 0.35);
        for (auto& p : means) p = std::max(p, 0.02);
        SyntheticBernoulliEvaluator eval(means, key_mix(888, static_cast<std::uint64_t>(i)));

        SelectorConfig cfg;
        cfg.seed = key_mix(999, static_cast<std::uint64_t>(i));
        cfg.delta = 0.05;
        auto elim = arm_elimination(space, data, eval, cfg);
        if (elim.best_combo == 0) ++elim_correct;

        cfg.epsilon = 0.05;
        auto lucb = epsilon_lucb(space, data, eval, cfg);
        if (means[static_cast<std::size_t>(lucb.best_combo)] >= means[0] - 0.05) ++lucb_within;
    }
    double elapsed = seconds_since(start);
    bool pass = elim_correct >= static_cast<int>(0.95 * runs) &&
                lucb_within >= static_cast<int>(0.95 * runs) && elapsed < 30.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "arm-elimination %d/%d, epsilon-lucb %d/%d, %.2fs",
                  elim_correct, runs, lucb_within, runs, elapsed);
    return {pass, buf};
}

std::pair<bool, std::string> criterion_threshold_classification() {
    auto space = single_role_space(6);
    const double tau = 0.5;
    int correct = 0;
    for (int s = 0; s < 100; ++s) {
        Rng rng(key_mix(1111, static_cast<std::uint64_t>(s)));
        std::vector<double> means(6);
        std::set<std::int64_t> expected;
        for (int j = 0; j < 6; ++j) {
            // strictly on either side of tau by at least 0.1
            if (rng.bernoulli(0.5)) {
                means[static_cast<std::size_t>(j)] = rng.uniform(tau + 0.1, 1.0);
                expected.insert(j);
            } else {
                means[static_cast<std::size_t>(j)] = rng.uniform(0.0, tau - 0.1);
            }
        }
        ReplayMatrix m = ReplayMatrix::row_constant(means, 50);
        ReplayEvaluator eval(m);
        SelectorConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(s);
        cfg.threshold_tau = tau;
        auto report = threshold_se(space, Dataset::of_size(50), eval, cfg);
        std::set<std::int64_t> got(report.above_threshold->begin(),
                                   report.above_threshold->end());
        if (got == expected) ++correct;
    }
    return {correct == 100, std::to_string(correct) + "/100 exact ABOVE sets"};
}

std::pair<bool, std::string> criterion_rank1_recovery() {
    auto start = std::chrono::steady_clock::now();
    int ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(key_mix(3131, static_cast<std::uint64_t>(trial)));
        std::vector<double> u(20), v(50);
        for (auto& x : u) x = rng.uniform(0.5, 1.5);  // no zero entries
        for (auto& x : v) x = rng.uniform(0.5, 1.5);
        std::vector<std::uint8_t> mask(20 * 50, 0);
        std::int64_t r0 = static_cast<std::int64_t>(rng.below(20));
        std::int64_t c0 = static_cast<std::int64_t>(rng.below(50));
        for (std::int64_t c = 0; c < 50; ++c) mask[static_cast<std::size_t>(r0 * 50 + c)] = 1;
        for (std::int64_t r = 0; r < 20; ++r) mask[static_cast<std::size_t>(r * 50 + c0)] = 1;
        std::int64_t have = 20 + 50 - 1;
        while (have < 300) {  // 30% of 1000 cells
            std::size_t cell = static_cast<std::size_t>(rng.below(20 * 50));
            if (mask[cell]) continue;
            mask[cell] = 1;
            ++have;
        }
        std::vector<surrogates::ObservedCell> observed;
        for (std::int64_t r = 0; r < 20; ++r)
            for (std::int64_t c = 0; c < 50; ++c)
                if (mask[static_cast<std::size_t>(r * 50 + c)])
                    observed.push_back({r, c, u[static_cast<std::size_t>(r)] *
                                                  v[static_cast<std::size_t>(c)]});
        auto factor = surrogates::als_fit(observed, 20, 50, 1, 0.0, 100,
                                          key_mix(3232, static_cast<std::uint64_t>(trial)));
        double max_err = 0.0;
        for (std::int64_t r = 0; r < 20; ++r)
            for (std::int64_t c = 0; c < 50; ++c) {
                if (mask[static_cast<std::size_t>(r * 50 + c)]) continue;
                double truth = u[static_cast<std::size_t>(r)] * v[static_cast<std::size_t>(c)];
                max_err = std::max(max_err, std::abs(factor.predict(r, c) - truth));
            }
        if (max_err < 1e-6) ++ok;
    }
    double elapsed = seconds_since(start);
    bool pass = ok == 100 && elapsed < 5.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d/100 trials within 1e-6, %.2fs", ok, elapsed);
    return {pass, buf};
}

class MeteredEvaluator : public evalsub::Evaluator {
public:
    explicit MeteredEvaluator(std::uint64_t seed) : seed_(seed) {}
    Observation evaluate(const Combination& combo, std::int64_t datapoint) override {
        ++executions;
        Rng rng(key_mix(seed_, static_cast<std::uint64_t>(combo.index),
                        static_cast<std::uint64_t>(datapoint)));
        return Observation{rng.bernoulli(0.6) ? 1.0 : 0.0, Money::from_pico(2'000'000),
                           rng.uniform(0.05, 3.0), 50, 10, false};
    }
    std::int64_t executions = 0;

private:
    std::uint64_t seed_;
};

std::pair<bool, std::string> criterion_cache_soundness() {
    auto space = single_role_space(5);
    Dataset data = Dataset::of_size(40);
    MeteredEvaluator metered(4040);
    evalsub::PayloadCache cache;
    evalsub::CachedEvaluator cached(space, metered, cache);

    SelectorConfig cfg;
    cfg.seed = 31337;
    cfg.budget_fraction = 0.5;
    auto first = matrix_ucb_e(space, data, cached, cfg);
    std::int64_t first_executions = metered.executions;
    auto second = matrix_ucb_e(space, data, cached, cfg);
    std::int64_t second_executions = metered.executions - first_executions;

    bool latencies_match = first.ranked.size() == second.ranked.size();
    for (std::size_t i = 0; latencies_match && i < first.ranked.size(); ++i)
        latencies_match = first.ranked[i].combo_index == second.ranked[i].combo_index &&
                          first.ranked[i].mean_latency_s == second.ranked[i].mean_latency_s &&
                          first.ranked[i].mean_score == second.ranked[i].mean_score;
    bool pass = second_executions == 0 && latencies_match && first_executions > 0;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "first run %lld executions, second run %lld, latencies %s",
                  static_cast<long long>(first_executions),
                  static_cast<long long>(second_executions),
                  latencies_match ? "identical" : "DIFFER");
    return {pass, buf};
}

std::pair<bool, std::string> criterion_concurrency_ceiling() {
    Rng rng(8181);
    int violations = 0;
    for (int schedule = 0; schedule < 1000; ++schedule) {
        int max_combos = 1 + static_cast<int>(rng.below(8));
        int max_dp = 1 + static_cast<int>(rng.below(8));
        int n_combos = 1 + static_cast<int>(rng.below(8));
        int n_tasks = 10 + static_cast<int>(rng.below(70));
        std::vector<evalsub::EvalTask> tasks;
        for (int i = 0; i < n_tasks; ++i)
            tasks.push_back({static_cast<std::int64_t>(rng.below(n_combos)),
                             static_cast<std::int64_t>(i)});
        bool jitter = rng.bernoulli(0.25);
        evalsub::ExecutorStats stats;
        evalsub::run_parallel(
            tasks, {max_combos, max_dp},
            [&](std::int64_t c, std::int64_t d) {
                if (jitter && ((c + d) % 7 == 0))
                    std::this_thread::sleep_for(std::chrono::microseconds(50));
                return Observation{0.5, Money(), 0, 0, 0, false};
            },
            &stats);
        if (stats.peak_in_flight > static_cast<std::int64_t>(max_combos) * max_dp) ++violations;
        if (stats.peak_per_combo > max_dp) ++violations;
        if (stats.executed != n_tasks) ++violations;
    }
    return {violations == 0, std::to_string(violations) + " violations over 1000 schedules"};
}

std::pair<bool, std::string> criterion_pareto_and_savings() {
    Rng rng(5757);
    int mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 1 + static_cast<int>(rng.below(200));
        std::vector<report::ParetoPoint> points;
        for (int i = 0; i < n; ++i)
            points.push_back({i, static_cast<double>(rng.below(8)) / 7.0,
                              Money::from_pico(static_cast<std::int64_t>(rng.below(6)) * 500'000),
                              static_cast<double>(rng.below(5))});
        auto frontier = report::pareto_frontier(points);
        std::set<std::int64_t> mine;
        for (const auto& p : frontier) mine.insert(p.combo_index);
        std::set<std::int64_t> oracle;
        for (const auto& p : points) {
            bool dominated = false;
            for (const auto& q : points)
                if (report::dominates(q, p)) {
                    dominated = true;
                    break;
                }
            if (!dominated) oracle.insert(p.combo_index);
        }
        if (mine != oracle) ++mismatches;
    }

    selectors::SelectionReport run;
    run.total_evaluations = 357;
    run.total_cost = Money::parse_usd("1.79");
    report::BruteForceReference reference{1782, Money::parse_usd("4.71")};
    double fraction = report::savings(run, reference).savings_fraction;
    bool savings_ok = fraction >= 0.619 && fraction <= 0.620;

    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d frontier mismatches, savings %.4f%s", mismatches,
                  fraction, savings_ok ? "" : " OUT OF [0.619, 0.620]");
    return {mismatches == 0 && savings_ok, buf};
}

std::pair<bool, std::string> criterion_proxy_end_to_end() {
    auto start = std::chrono::steady_clock::now();
    // echo upstream
    httplib::Server upstream;
    std::mutex seen_mutex;
    std::vector<std::string> seen_models;
    upstream.Post(R"(/.*)", [&](const httplib::Request& req, httplib::Response& res) {
        json body = json::parse(req.body, nullptr, false);
        std::string model = body.is_object() && body.contains("model")
                                ? body["model"].get<std::string>()
                                : "";
        {
            std::lock_guard lock(seen_mutex);
            seen_models.push_back(model);
        }
        json reply = {{"model", model},
                      {"usage",
                       {{"prompt_tokens", 100 + static_cast<int>(req.body.size() % 50)},
                        {"completion_tokens", 10 + static_cast<int>(req.body.size() % 7)}}}};
        res.set_content(reply.dump(), "application/json");
    });
    int upstream_port = upstream.bind_to_any_port("127.0.0.1");
    std::thread upstream_thread([&]() { upstream.listen_after_bind(); });
    upstream.wait_until_ready();

    auto space = PipelineSpace::build(
        {"planner", "solver"}, {{"p0", "p1", "p2"}, {"s0", "s1", "s2"}});
    PriceTable prices;
    prices.set("p0", {70'000, 300'000});
    prices.set("p1", {150'000, 150'000});
    prices.set("p2", {1'000'000, 5'000'000});
    prices.set("s0", {5'000'000, 25'000'000});
    prices.set("s1", {600'000, 3'000'000});
    prices.set("s2", {150'000, 600'000});

    proxy::Proxy prx(space, prices,
                     {"http://127.0.0.1:" + std::to_string(upstream_port), "", true});
    int port = prx.bind_any("127.0.0.1");
    prx.start();

    Rng rng(6006);
    bool override_ok = true;
    bool cache_ok = true;
    int cached_hits = 0;
    httplib::Client client("127.0.0.1", port);
    std::map<std::string, std::string> payload_to_body;  // payload -> first response

    for (int i = 0; i < 100; ++i) {
        std::int64_t combo = static_cast<std::int64_t>(rng.below(space.n_combos()));
        auto models = space.models_of(combo);
        std::string combo_id = "combo-" + std::to_string(combo);
        prx.register_mapping(combo_id,
                             {{"planner", models[0]}, {"solver", models[1]}});
        int role_idx = static_cast<int>(rng.below(2));
        std::string role = space.roles()[static_cast<std::size_t>(role_idx)];
        // a quarter of the payloads repeat earlier ones
        std::string prompt = "q" + std::to_string(rng.below(40));
        json body = {{"model", "placeholder"}, {"prompt", prompt}};
        httplib::Headers headers = {{"x-agentopt-data-id", prompt},
                                    {"x-agentopt-combo-id", combo_id},
                                    {"x-agentopt-role", role}};
        auto res = client.Post("/v1/chat/completions", headers, body.dump(),
                               "application/json");
        if (!res || res->status != 200) {
            override_ok = false;
            break;
        }
        json reply = json::parse(res->body);
        std::string expected_model = models[static_cast<std::size_t>(role_idx)];
        if (reply["model"] != expected_model) override_ok = false;

        std::string key = expected_model + "|" + prompt;
        auto it = payload_to_body.find(key);
        if (it == payload_to_body.end()) {
            payload_to_body[key] = res->body;
        } else {
            ++cached_hits;
            if (it->second != res->body) cache_ok = false;  // byte-identical bodies
        }
    }

    // metering conservation: per-model sums, exact in picodollars
    auto records = prx.drain_records();
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> token_sums;
    std::map<std::string, Money> cost_sums;
    for (const auto& r : records) {
        token_sums[r.effective_model].first += r.input_tokens;
        token_sums[r.effective_model].second += r.output_tokens;
        cost_sums[r.effective_model] += r.cost;
    }
    bool conservation = true;
    for (const auto& [model, tokens] : token_sums)
        conservation = conservation &&
                       cost_sums[model] == call_cost(tokens.first, tokens.second, model, prices);

    // cache actually engaged: upstream saw fewer calls than requests
    bool reused = static_cast<int>(seen_models.size()) == 100 - cached_hits;

    prx.stop();
    upstream.stop();
    upstream_thread.join();

    double elapsed = seconds_since(start);
    bool pass = override_ok && cache_ok && conservation && reused && cached_hits > 0 &&
                elapsed < 5.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "overrides %s, %d cache hits byte-identical %s, conservation %s, upstream "
                  "calls %zu, %.2fs",
                  override_ok ? "ok" : "WRONG", cached_hits, cache_ok ? "ok" : "WRONG",
                  conservation ? "exact" : "BROKEN", seen_models.size(), elapsed);
    return {pass, buf};
}

}  // namespace

int main() {
    run_criterion(1, "budget arithmetic", criterion_budget_arithmetic);
    run_criterion(2, "best-arm recovery on the bernoulli fixture", criterion_best_arm_recovery);
    run_criterion(3, "oracle equivalence", criterion_oracle_equivalence);
    run_criterion(4, "elimination safety", criterion_elimination_safety);
    run_criterion(5, "threshold classification", criterion_threshold_classification);
    run_criterion(6, "rank-1 recovery", criterion_rank1_recovery);
    run_criterion(7, "cache soundness", criterion_cache_soundness);
    run_criterion(8, "concurrency ceiling", criterion_concurrency_ceiling);
    run_criterion(9, "pareto correctness and savings", criterion_pareto_and_savings);
    run_criterion(10, "proxy end-to-end", criterion_proxy_end_to_end);
    std::printf("%d of 10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
