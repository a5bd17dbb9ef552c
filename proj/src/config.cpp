#include "agentopt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace agentopt::cli {

namespace {

void reject_unknown(const YamlNode& node, const std::set<std::string>& known,
                    const std::string& where) {
    if (!node.is_map()) throw ConfigError(where + ": expected a mapping");
    for (const auto& [key, value] : node.map)
        if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

std::vector<std::string> string_list(const YamlNode& node, const std::string& where) {
    if (!node.is_seq()) throw ConfigError(where + ": expected a list");
    std::vector<std::string> out;
    for (const auto& item : node.seq) out.push_back(item.as_string(where));
    return out;
}

std::vector<double> double_list(const YamlNode& node, const std::string& where) {
    if (!node.is_seq()) throw ConfigError(where + ": expected a list of numbers");
    std::vector<double> out;
    for (const auto& item : node.seq) out.push_back(item.as_double(where));
    return out;
}

void parse_pipeline(const YamlNode& node, RunConfig& config) {
    reject_unknown(node, {"roles", "candidates"}, "pipeline");
    const YamlNode* roles = node.find("roles");
    const YamlNode* candidates = node.find("candidates");
    if (!roles || !candidates) throw ConfigError("pipeline: needs 'roles' and 'candidates'");
    config.roles = string_list(*roles, "pipeline.roles");
    if (!candidates->is_map()) throw ConfigError("pipeline.candidates: expected a mapping");
    for (const auto& [key, value] : candidates->map) {
        bool known_role = false;
        for (const auto& r : config.roles) known_role = known_role || r == key;
        if (!known_role) throw ConfigError("pipeline.candidates: unknown role '" + key + "'");
    }
    for (const auto& role : config.roles) {
        const YamlNode* list = candidates->find(role);
        if (!list) throw ConfigError("pipeline.candidates: missing role '" + role + "'");
        config.candidates.push_back(string_list(*list, "pipeline.candidates." + role));
    }
}

void parse_prices(const YamlNode& node, RunConfig& config) {
    if (!node.is_map()) throw ConfigError("prices: expected a mapping of model -> {input, output}");
    for (const auto& [model, entry] : node.map) {
        reject_unknown(entry, {"input", "output"}, "prices." + model);
        const YamlNode* in = entry.find("input");
        const YamlNode* out = entry.find("output");
        if (!in || !out) throw ConfigError("prices." + model + ": needs 'input' and 'output'");
        config.prices.emplace_back(model,
                                   std::make_pair(in->raw_scalar("prices." + model + ".input"),
                                                  out->raw_scalar("prices." + model + ".output")));
    }
}

void parse_evaluator(const YamlNode& node, RunConfig& config) {
    reject_unknown(node,
                   {"kind", "path", "means", "cost_per_eval", "latency_s", "command", "timeout_s",
                    "proxy_url", "seed"},
                   "evaluator");
    EvaluatorSpec& spec = config.evaluator;
    if (const YamlNode* v = node.find("kind")) spec.kind = v->as_string("evaluator.kind");
    static const std::set<std::string> kinds = {"replay", "synthetic-bernoulli",
                                                "external-process", "proxy-backed"};
    if (!kinds.count(spec.kind)) throw ConfigError("evaluator.kind: unknown kind '" + spec.kind + "'");
    if (const YamlNode* v = node.find("path")) spec.path = v->as_string("evaluator.path");
    if (const YamlNode* v = node.find("means")) spec.means = double_list(*v, "evaluator.means");
    if (const YamlNode* v = node.find("cost_per_eval"))
        spec.cost_per_eval = v->raw_scalar("evaluator.cost_per_eval");
    if (const YamlNode* v = node.find("latency_s"))
        spec.latency_s = v->as_double("evaluator.latency_s");
    if (const YamlNode* v = node.find("command")) spec.command = string_list(*v, "evaluator.command");
    if (const YamlNode* v = node.find("timeout_s")) spec.timeout_s = v->as_double("evaluator.timeout_s");
    if (const YamlNode* v = node.find("proxy_url")) spec.proxy_url = v->as_string("evaluator.proxy_url");
    if (const YamlNode* v = node.find("seed"))
        spec.seed = static_cast<std::uint64_t>(v->as_int("evaluator.seed"));
}

void parse_selector(const YamlNode& node, RunConfig& config) {
    reject_unknown(node,
                   {"name", "a", "batch_size", "beta", "epsilon", "tau", "delta", "rank",
                    "ensemble", "warmup", "eta", "restarts", "initial_design", "budget_combos",
                    "shortlist", "schedule"},
                   "selector");
    selectors::SelectorConfig& sc = config.selector_config;
    if (const YamlNode* v = node.find("name")) config.selector = v->as_string("selector.name");
    if (const YamlNode* v = node.find("a")) sc.exploration_weight_a = v->as_double("selector.a");
    if (const YamlNode* v = node.find("batch_size"))
        sc.batch_size = static_cast<int>(v->as_int("selector.batch_size"));
    if (const YamlNode* v = node.find("beta")) sc.budget_fraction = v->as_double("selector.beta");
    if (const YamlNode* v = node.find("epsilon")) sc.epsilon = v->as_double("selector.epsilon");
    if (const YamlNode* v = node.find("tau")) sc.threshold_tau = v->as_double("selector.tau");
    if (const YamlNode* v = node.find("delta")) sc.delta = v->as_double("selector.delta");
    if (const YamlNode* v = node.find("rank")) sc.rank = static_cast<int>(v->as_int("selector.rank"));
    if (const YamlNode* v = node.find("ensemble"))
        sc.ensemble = static_cast<int>(v->as_int("selector.ensemble"));
    if (const YamlNode* v = node.find("warmup")) sc.warmup_fraction = v->as_double("selector.warmup");
    if (const YamlNode* v = node.find("eta")) sc.uncertainty_eta = v->as_double("selector.eta");
    if (const YamlNode* v = node.find("restarts"))
        sc.restarts = static_cast<int>(v->as_int("selector.restarts"));
    if (const YamlNode* v = node.find("initial_design"))
        sc.initial_design = v->as_int("selector.initial_design");
    if (const YamlNode* v = node.find("budget_combos"))
        sc.total_budget_combos = v->as_int("selector.budget_combos");
    if (const YamlNode* v = node.find("shortlist")) sc.shortlist_k = v->as_int("selector.shortlist");
    if (const YamlNode* v = node.find("schedule")) {
        if (!v->is_seq()) throw ConfigError("selector.schedule: expected a list of integers");
        for (const auto& item : v->seq)
            sc.elimination_schedule.push_back(item.as_int("selector.schedule"));
    }
}

void parse_proposer(const YamlNode& node, RunConfig& config) {
    reject_unknown(node, {"kind", "reply", "path", "command"}, "proposer");
    if (const YamlNode* v = node.find("kind")) config.proposer.kind = v->as_string("proposer.kind");
    static const std::set<std::string> kinds = {"fixed", "file", "command"};
    if (!kinds.count(config.proposer.kind))
        throw ConfigError("proposer.kind: unknown kind '" + config.proposer.kind + "'");
    if (const YamlNode* v = node.find("reply")) config.proposer.reply = v->as_string("proposer.reply");
    if (const YamlNode* v = node.find("path")) config.proposer.path = v->as_string("proposer.path");
    if (const YamlNode* v = node.find("command"))
        config.proposer.command = string_list(*v, "proposer.command");
}

}  // namespace

RunConfig parse_run_config(const YamlNode& root) {
    reject_unknown(root,
                   {"pipeline", "prices", "evaluator", "selector", "utility", "concurrency",
                    "dataset", "output", "seeds", "reference_best_combo", "cache", "proposer"},
                   "config");
    RunConfig config;

    const YamlNode* pipeline = root.find("pipeline");
    if (!pipeline) throw ConfigError("config: missing 'pipeline'");
    parse_pipeline(*pipeline, config);

    if (const YamlNode* prices = root.find("prices")) parse_prices(*prices, config);

    const YamlNode* evaluator = root.find("evaluator");
    if (!evaluator) throw ConfigError("config: missing 'evaluator'");
    parse_evaluator(*evaluator, config);

    if (const YamlNode* selector = root.find("selector")) parse_selector(*selector, config);

    if (const YamlNode* utility = root.find("utility")) {
        reject_unknown(*utility, {"lambda_cost", "lambda_latency"}, "utility");
        if (const YamlNode* v = utility->find("lambda_cost"))
            config.utility_weights.lambda_cost = v->as_double("utility.lambda_cost");
        if (const YamlNode* v = utility->find("lambda_latency"))
            config.utility_weights.lambda_latency = v->as_double("utility.lambda_latency");
    }
    if (const YamlNode* concurrency = root.find("concurrency")) {
        reject_unknown(*concurrency, {"combos", "datapoints_per_combo"}, "concurrency");
        if (const YamlNode* v = concurrency->find("combos"))
            config.concurrency.max_combos_in_flight = static_cast<int>(v->as_int("concurrency.combos"));
        if (const YamlNode* v = concurrency->find("datapoints_per_combo"))
            config.concurrency.max_datapoints_per_combo =
                static_cast<int>(v->as_int("concurrency.datapoints_per_combo"));
    }
    const YamlNode* dataset = root.find("dataset");
    if (!dataset) throw ConfigError("config: missing 'dataset'");
    reject_unknown(*dataset, {"size"}, "dataset");
    const YamlNode* size = dataset->find("size");
    if (!size) throw ConfigError("dataset: missing 'size'");
    config.dataset_size = size->as_int("dataset.size");
    if (config.dataset_size < 1) throw ConfigError("dataset.size must be >= 1");

    if (const YamlNode* out = root.find("output")) config.output_dir = out->as_string("output");
    if (const YamlNode* seeds = root.find("seeds")) {
        reject_unknown(*seeds, {"base", "count"}, "seeds");
        if (const YamlNode* v = seeds->find("base"))
            config.seed_base = static_cast<std::uint64_t>(v->as_int("seeds.base"));
        if (const YamlNode* v = seeds->find("count"))
            config.seed_count = static_cast<int>(v->as_int("seeds.count"));
        if (config.seed_count < 1) throw ConfigError("seeds.count must be >= 1");
    }
    if (const YamlNode* ref = root.find("reference_best_combo"))
        config.reference_best_combo = ref->as_int("reference_best_combo");
    if (const YamlNode* cache = root.find("cache")) config.cache_path = cache->as_string("cache");
    if (const YamlNode* proposer = root.find("proposer")) parse_proposer(*proposer, config);

    // structural validation happens on the built objects
    PipelineSpace space = space_from_config(config);
    PriceTable prices = prices_from_config(config);
    if (!config.prices.empty()) {
        if (auto missing = prices.first_missing(space))
            throw ConfigError("prices: missing entry for model '" + *missing + "'");
    }
    if (config.evaluator.kind == "synthetic-bernoulli") {
        if (static_cast<std::int64_t>(config.evaluator.means.size()) != space.n_combos())
            throw ConfigError("evaluator.means must list one probability per combination (" +
                              std::to_string(space.n_combos()) + ")");
        Money::parse_usd(config.evaluator.cost_per_eval);
    }
    if (config.evaluator.kind == "replay" && config.evaluator.path.empty())
        throw ConfigError("evaluator.path is required for replay");
    if ((config.evaluator.kind == "external-process" || config.evaluator.kind == "proxy-backed") &&
        config.evaluator.command.empty())
        throw ConfigError("evaluator.command is required for " + config.evaluator.kind);
    if (config.evaluator.kind == "proxy-backed" && config.evaluator.proxy_url.empty())
        throw ConfigError("evaluator.proxy_url is required for proxy-backed");
    if (config.selector == "lm-proposal" && config.proposer.kind.empty())
        throw ConfigError("selector 'lm-proposal' requires a 'proposer' section");
    selectors::validate(config.selector_config, space,
                        evalsub::Dataset::of_size(config.dataset_size));
    bool known_selector = false;
    for (const auto& name : selectors::selector_names())
        known_selector = known_selector || name == config.selector;
    if (!known_selector) throw ConfigError("selector.name: unknown selector '" + config.selector + "'");
    if (config.concurrency.max_combos_in_flight < 1 ||
        config.concurrency.max_datapoints_per_combo < 1)
        throw ConfigError("concurrency limits must be >= 1");
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(yaml_parse(buffer.str()));
}

void apply_override(YamlNode& root, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    std::string path = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);

    YamlNode* node = &root;
    std::size_t start = 0;
    for (;;) {
        auto dot = path.find('.', start);
        std::string segment = path.substr(start, dot - start);
        if (segment.empty()) throw ConfigError("--set: empty path segment in '" + path + "'");
        if (dot == std::string::npos) {
            node->set(segment, YamlNode::of_raw(value));
            return;
        }
        YamlNode* child = nullptr;
        for (auto& [k, v] : node->map)
            if (k == segment) child = &v;
        if (!child) {
            child = &node->set(segment, YamlNode::mapping());
        } else if (!child->is_map()) {
            *child = YamlNode::mapping();
        }
        node = child;
        start = dot + 1;
    }
}

YamlNode run_config_to_yaml(const RunConfig& config) {
    YamlNode root = YamlNode::mapping();

    YamlNode pipeline = YamlNode::mapping();
    YamlNode roles = YamlNode::sequence();
    for (const auto& r : config.roles) roles.seq.push_back(YamlNode::of_str(r));
    pipeline.set("roles", std::move(roles));
    YamlNode candidates = YamlNode::mapping();
    for (std::size_t i = 0; i < config.roles.size(); ++i) {
        YamlNode list = YamlNode::sequence();
        for (const auto& m : config.candidates[i]) list.seq.push_back(YamlNode::of_str(m));
        candidates.set(config.roles[i], std::move(list));
    }
    pipeline.set("candidates", std::move(candidates));
    root.set("pipeline", std::move(pipeline));

    if (!config.prices.empty()) {
        YamlNode prices = YamlNode::mapping();
        for (const auto& [model, inout] : config.prices) {
            YamlNode entry = YamlNode::mapping();
            entry.set("input", YamlNode::of_str(inout.first));
            entry.set("output", YamlNode::of_str(inout.second));
            prices.set(model, std::move(entry));
        }
        root.set("prices", std::move(prices));
    }

    YamlNode evaluator = YamlNode::mapping();
    evaluator.set("kind", YamlNode::of_str(config.evaluator.kind));
    if (!config.evaluator.path.empty()) evaluator.set("path", YamlNode::of_str(config.evaluator.path));
    if (!config.evaluator.means.empty()) {
        YamlNode means = YamlNode::sequence();
        for (double p : config.evaluator.means) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.10g", p);
            means.seq.push_back(YamlNode::of_raw(buf));
        }
        evaluator.set("means", std::move(means));
        evaluator.set("cost_per_eval", YamlNode::of_str(config.evaluator.cost_per_eval));
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.10g", config.evaluator.latency_s);
        evaluator.set("latency_s", YamlNode::of_raw(buf));
    }
    if (!config.evaluator.command.empty()) {
        YamlNode command = YamlNode::sequence();
        for (const auto& arg : config.evaluator.command) command.seq.push_back(YamlNode::of_str(arg));
        evaluator.set("command", std::move(command));
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.10g", config.evaluator.timeout_s);
        evaluator.set("timeout_s", YamlNode::of_raw(buf));
    }
    if (!config.evaluator.proxy_url.empty())
        evaluator.set("proxy_url", YamlNode::of_str(config.evaluator.proxy_url));
    evaluator.set("seed", YamlNode::of_int(static_cast<std::int64_t>(config.evaluator.seed)));
    root.set("evaluator", std::move(evaluator));

    const selectors::SelectorConfig& sc = config.selector_config;
    YamlNode selector = YamlNode::mapping();
    selector.set("name", YamlNode::of_str(config.selector));
    auto real = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return YamlNode::of_raw(buf);
    };
    selector.set("a", real(sc.exploration_weight_a));
    selector.set("batch_size", YamlNode::of_int(sc.batch_size));
    selector.set("beta", real(sc.budget_fraction));
    selector.set("epsilon", real(sc.epsilon));
    selector.set("tau", real(sc.threshold_tau));
    selector.set("delta", real(sc.delta));
    selector.set("rank", YamlNode::of_int(sc.rank));
    selector.set("ensemble", YamlNode::of_int(sc.ensemble));
    selector.set("warmup", real(sc.warmup_fraction));
    selector.set("eta", real(sc.uncertainty_eta));
    selector.set("restarts", YamlNode::of_int(sc.restarts));
    selector.set("initial_design", YamlNode::of_int(sc.initial_design));
    selector.set("budget_combos", YamlNode::of_int(sc.total_budget_combos));
    selector.set("shortlist", YamlNode::of_int(sc.shortlist_k));
    if (!sc.elimination_schedule.empty()) {
        YamlNode schedule = YamlNode::sequence();
        for (std::int64_t b : sc.elimination_schedule) schedule.seq.push_back(YamlNode::of_int(b));
        selector.set("schedule", std::move(schedule));
    }
    root.set("selector", std::move(selector));

    YamlNode utility = YamlNode::mapping();
    utility.set("lambda_cost", real(config.utility_weights.lambda_cost));
    utility.set("lambda_latency", real(config.utility_weights.lambda_latency));
    root.set("utility", std::move(utility));

    YamlNode concurrency = YamlNode::mapping();
    concurrency.set("combos", YamlNode::of_int(config.concurrency.max_combos_in_flight));
    concurrency.set("datapoints_per_combo",
                    YamlNode::of_int(config.concurrency.max_datapoints_per_combo));
    root.set("concurrency", std::move(concurrency));

    YamlNode dataset = YamlNode::mapping();
    dataset.set("size", YamlNode::of_int(config.dataset_size));
    root.set("dataset", std::move(dataset));

    root.set("output", YamlNode::of_str(config.output_dir));

    YamlNode seeds = YamlNode::mapping();
    seeds.set("base", YamlNode::of_int(static_cast<std::int64_t>(config.seed_base)));
    seeds.set("count", YamlNode::of_int(config.seed_count));
    root.set("seeds", std::move(seeds));

    if (config.reference_best_combo)
        root.set("reference_best_combo", YamlNode::of_int(*config.reference_best_combo));
    if (!config.cache_path.empty()) root.set("cache", YamlNode::of_str(config.cache_path));
    if (!config.proposer.kind.empty()) {
        YamlNode proposer = YamlNode::mapping();
        proposer.set("kind", YamlNode::of_str(config.proposer.kind));
        if (!config.proposer.reply.empty()) proposer.set("reply", YamlNode::of_str(config.proposer.reply));
        if (!config.proposer.path.empty()) proposer.set("path", YamlNode::of_str(config.proposer.path));
        if (!config.proposer.command.empty()) {
            YamlNode command = YamlNode::sequence();
            for (const auto& arg : config.proposer.command)
                command.seq.push_back(YamlNode::of_str(arg));
            proposer.set("command", std::move(command));
        }
        root.set("proposer", std::move(proposer));
    }
    return root;
}

PipelineSpace space_from_config(const RunConfig& config) {
    return PipelineSpace::build(config.roles, config.candidates);
}

PriceTable prices_from_config(const RunConfig& config) {
    PriceTable table;
    for (const auto& [model, inout] : config.prices) {
        Price price;
        price.input_micro_per_mtok = parse_micro(inout.first);
        price.output_micro_per_mtok = parse_micro(inout.second);
        table.set(model, price);
    }
    return table;
}

}  // namespace agentopt::cli
