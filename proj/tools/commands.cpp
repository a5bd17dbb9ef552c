#include "commands.hpp"

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "agentopt/config.hpp"
#include "agentopt/proxy.hpp"
#include "agentopt/proxy_client.hpp"
#include "agentopt/replay_io.hpp"
#include "agentopt/report.hpp"

namespace agentopt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitEvaluator = 3;
constexpr int kExitBind = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string fixed6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

// capture-all subprocess used by the command proposer
std::string run_command_capture(const std::vector<std::string>& argv, const std::string& input) {
    evalsub::LineProcess child;
    child.start(argv);
    std::string encoded;  // prompt flattened to one line
    for (char c : input) encoded.push_back(c == '\n' ? ' ' : c);
    child.write_line(encoded);
    auto reply = child.read_line(60'000);
    child.stop();
    if (!reply) throw ProposerUnavailable("proposer command produced no reply");
    return *reply;
}

class CommandProposer : public selectors::Proposer {
public:
    explicit CommandProposer(std::vector<std::string> argv) : argv_(std::move(argv)) {}
    std::string propose(const std::string& prompt) override {
        return run_command_capture(argv_, prompt);
    }

private:
    std::vector<std::string> argv_;
};

struct EvaluatorBundle {
    std::unique_ptr<evalsub::PayloadCache> cache;
    std::unique_ptr<evalsub::Evaluator> base;
    std::unique_ptr<evalsub::Evaluator> wrapped;
    evalsub::Evaluator& get() { return wrapped ? *wrapped : *base; }
};

EvaluatorBundle make_evaluator(const RunConfig& config, const PipelineSpace& space) {
    EvaluatorBundle bundle;
    const EvaluatorSpec& spec = config.evaluator;
    if (spec.kind == "replay") {
        std::int64_t clamped = 0;
        evalsub::ReplayMatrix matrix =
            evalsub::load_replay_csv(spec.path, space.n_combos(), config.dataset_size, &clamped);
        if (clamped > 0)
            std::cerr << "warning: clamped " << clamped << " replay scores into [0, 1]\n";
        bundle.base = std::make_unique<evalsub::ReplayEvaluator>(std::move(matrix));
    } else if (spec.kind == "synthetic-bernoulli") {
        bundle.base = std::make_unique<evalsub::SyntheticBernoulliEvaluator>(
            spec.means, spec.seed, Money::parse_usd(spec.cost_per_eval), spec.latency_s);
    } else if (spec.kind == "external-process") {
        bundle.base = std::make_unique<evalsub::ExternalProcessEvaluator>(space, spec.command,
                                                                          spec.timeout_s);
    } else if (spec.kind == "proxy-backed") {
        bundle.base = std::make_unique<evalsub::ProxyBackedEvaluator>(space, spec.command,
                                                                      spec.proxy_url, spec.timeout_s);
    } else {
        throw ConfigError("unknown evaluator kind '" + spec.kind + "'");
    }

    std::string cache_path = config.cache_path;
    if (const char* env = std::getenv("AGENTOPT_CACHE_PATH")) cache_path = env;
    if (!cache_path.empty()) {
        bundle.cache = std::make_unique<evalsub::PayloadCache>(cache_path);
        bundle.wrapped =
            std::make_unique<evalsub::CachedEvaluator>(space, *bundle.base, *bundle.cache);
    }
    return bundle;
}

std::unique_ptr<selectors::Proposer> make_proposer(const RunConfig& config) {
    const ProposerSpec& spec = config.proposer;
    if (spec.kind.empty()) return nullptr;
    if (spec.kind == "fixed") return std::make_unique<selectors::FixedProposer>(spec.reply);
    if (spec.kind == "file")
        return std::make_unique<selectors::FixedProposer>(read_file(spec.path));
    if (spec.kind == "command") return std::make_unique<CommandProposer>(spec.command);
    throw ConfigError("unknown proposer kind '" + spec.kind + "'");
}

struct ReportFile {
    std::vector<std::string> role_names;
    std::vector<selectors::RankedEntry> entries;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

ReportFile parse_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("report '" + path + "' is empty");
    auto header = split_csv_line(line);
    if (header.size() < 7 || header[0] != "rank" || header[1] != "combo_index" ||
        header.back() != "on_pareto")
        throw IoError("report '" + path + "' has an unexpected header");
    ReportFile file;
    for (std::size_t i = 2; i + 5 < header.size(); ++i) file.role_names.push_back(header[i]);

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw IoError("report '" + path + "': ragged row");
        selectors::RankedEntry entry;
        std::size_t n_roles = file.role_names.size();
        entry.combo_index = std::stoll(fields[1]);
        for (std::size_t r = 0; r < n_roles; ++r) entry.models.push_back(fields[2 + r]);
        entry.mean_score = std::stod(fields[2 + n_roles]);
        entry.n = std::stoll(fields[3 + n_roles]);
        entry.mean_latency_s = std::stod(fields[4 + n_roles]);
        entry.total_cost = Money::parse_usd(fields[5 + n_roles]);
        entry.on_pareto = fields[6 + n_roles] == "1";
        file.entries.push_back(std::move(entry));
    }
    return file;
}

}  // namespace

int cmd_select(const SelectArgs& args) {
    RunConfig config;
    try {
        YamlNode root = yaml_parse(read_file(args.config_path));
        for (const auto& assignment : args.sets) apply_override(root, assignment);
        config = parse_run_config(root);
        if (!args.out_override.empty()) config.output_dir = args.out_override;
        if (args.seed_base) config.seed_base = *args.seed_base;
        if (args.seed_count) config.seed_count = *args.seed_count;
        if (config.seed_count < 1) throw ConfigError("seed count must be >= 1");
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        PipelineSpace space = space_from_config(config);
        PriceTable prices = prices_from_config(config);
        evalsub::Dataset dataset = evalsub::Dataset::of_size(config.dataset_size);
        EvaluatorBundle evaluator = make_evaluator(config, space);
        std::unique_ptr<selectors::Proposer> proposer = make_proposer(config);

        fs::create_directories(config.output_dir);
        std::ofstream run_yaml(fs::path(config.output_dir) / "run.yaml", std::ios::binary);
        run_yaml << yaml_emit(run_config_to_yaml(config));
        run_yaml.close();

        double sum_best_mean = 0.0;
        double sum_best_true = 0.0;
        bool have_true = true;
        double sum_evals = 0.0;
        double sum_cost = 0.0;
        int found = 0;

        for (int s = 0; s < config.seed_count; ++s) {
            selectors::SelectorConfig sc = config.selector_config;
            sc.seed = config.seed_base + static_cast<std::uint64_t>(s);
            selectors::SelectionReport report =
                selectors::select(config.selector, space, dataset, evaluator.get(), sc,
                                  config.concurrency, proposer.get(), &prices);
            if (report.ranked.empty())
                throw EvaluationFailed("seed " + std::to_string(sc.seed) +
                                       ": every evaluation failed (" +
                                       std::to_string(report.failures) + " failures)");

            fs::path seed_dir = fs::path(config.output_dir) / ("seed-" + std::to_string(sc.seed));
            fs::create_directories(seed_dir);
            report::export_csv(report, (seed_dir / "report.csv").string());
            if (report.best_combo >= 0)
                report::export_config_yaml(report, (seed_dir / "best.yaml").string());

            const selectors::RankedEntry* best = report.entry(report.best_combo);
            sum_best_mean += best ? best->mean_score : 0.0;
            auto truth = evaluator.get().true_mean(report.best_combo);
            if (truth)
                sum_best_true += *truth;
            else
                have_true = false;
            sum_evals += static_cast<double>(report.total_evaluations);
            sum_cost += report.total_cost.usd();
            if (config.reference_best_combo && report.best_combo == *config.reference_best_combo)
                ++found;
        }

        double n = static_cast<double>(config.seed_count);
        std::string aggregate =
            "selector,seeds,mean_best_mean_score,mean_best_true_mean,mean_evals,mean_cost_usd,"
            "find_rate\n";
        aggregate += config.selector + "," + std::to_string(config.seed_count);
        aggregate += "," + fixed6(sum_best_mean / n);
        aggregate += have_true ? "," + fixed6(sum_best_true / n) : ",";
        aggregate += "," + fixed6(sum_evals / n);
        aggregate += "," + fixed6(sum_cost / n);
        aggregate += config.reference_best_combo
                         ? "," + fixed6(static_cast<double>(found) / n) + "\n"
                         : ",\n";
        std::ofstream agg(fs::path(config.output_dir) / "aggregate.csv", std::ios::binary);
        agg << aggregate;
        if (!agg) throw IoError("failed writing aggregate.csv");

        std::cout << aggregate;
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return kExitEvaluator;
    }
}

int cmd_replay_import(const std::string& csv_path, std::int64_t n_combos,
                      std::int64_t n_datapoints, const std::string& out_dir) {
    try {
        std::int64_t clamped = 0;
        evalsub::ReplayMatrix matrix =
            evalsub::load_replay_csv(csv_path, n_combos, n_datapoints, &clamped);
        fs::create_directories(out_dir);
        evalsub::save_replay_csv(matrix, (fs::path(out_dir) / "fixture.csv").string());
        json meta = {{"n_combos", n_combos},
                     {"n_datapoints", n_datapoints},
                     {"n_cells", n_combos * n_datapoints},
                     {"clamped_scores", clamped}};
        std::ofstream out(fs::path(out_dir) / "fixture.meta.json", std::ios::binary);
        out << meta.dump(2) << "\n";
        if (!out) throw IoError("failed writing fixture.meta.json");
        std::cout << "imported " << n_combos * n_datapoints << " cells\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "import error: " << e.what() << "\n";
        return kExitConfig;
    }
}

namespace {
proxy::Proxy* g_proxy = nullptr;
void handle_sigint(int) {
    if (g_proxy) g_proxy->stop();
}
}  // namespace

int cmd_proxy(const ProxyArgs& args) {
    try {
        RunConfig config = load_run_config(args.config_path);
        PipelineSpace space = space_from_config(config);
        PriceTable prices = prices_from_config(config);

        std::string listen = args.listen;
        if (const char* env = std::getenv("AGENTOPT_LISTEN")) listen = env;
        std::string upstream = args.upstream;
        if (const char* env = std::getenv("AGENTOPT_UPSTREAM")) upstream = env;
        std::string cache_path = args.cache_path;
        if (const char* env = std::getenv("AGENTOPT_CACHE_PATH")) cache_path = env;

        auto colon = listen.rfind(':');
        if (colon == std::string::npos) {
            std::cerr << "proxy error: listen address must be host:port\n";
            return kExitBind;
        }
        std::string host = listen.substr(0, colon);
        int port = 0;
        try {
            port = std::stoi(listen.substr(colon + 1));
        } catch (const std::exception&) {
            std::cerr << "proxy error: bad listen port in '" << listen << "'\n";
            return kExitBind;
        }

        proxy::ProxyOptions options;
        options.upstream_url = upstream;
        options.cache_path = cache_path;
        std::unique_ptr<proxy::Proxy> server;
        try {
            server = std::make_unique<proxy::Proxy>(space, prices, options);
        } catch (const ConfigError& e) {
            std::cerr << "proxy error: " << e.what() << "\n";
            return kExitBind;
        }

        g_proxy = server.get();
        std::signal(SIGINT, handle_sigint);
        std::signal(SIGTERM, handle_sigint);
        std::cout << "proxy listening on " << host << ":" << port << " -> " << upstream
                  << std::endl;
        bool ok = server->serve(host, port);
        g_proxy = nullptr;
        if (!ok) {
            std::cerr << "proxy error: cannot bind " << host << ":" << port << "\n";
            return kExitBind;
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "proxy error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_pareto(const std::vector<std::string>& report_paths, const std::string& projection) {
    bool project_2d = projection == "score-cost";
    if (!projection.empty() && !project_2d) {
        std::cerr << "pareto error: unknown projection '" << projection << "'\n";
        return kExitConfig;
    }
    try {
        struct SourcedPoint {
            std::string source;
            std::int64_t combo_index;
        };
        std::vector<report::ParetoPoint> points;
        std::vector<SourcedPoint> sources;
        for (const auto& path : report_paths) {
            ReportFile file = parse_report_csv(path);
            for (const auto& e : file.entries) {
                report::ParetoPoint p;
                p.combo_index = static_cast<std::int64_t>(points.size());  // merged id
                p.mean_score = e.mean_score;
                p.total_cost = e.total_cost;
                p.mean_latency_s = project_2d ? 0.0 : e.mean_latency_s;
                points.push_back(p);
                sources.push_back({path, e.combo_index});
            }
        }
        auto frontier = report::pareto_frontier(points);
        std::string out = "source,combo_index,mean_score,total_cost_usd,mean_latency_s\n";
        for (const auto& p : frontier) {
            const auto& src = sources[static_cast<std::size_t>(p.combo_index)];
            out += src.source + "," + std::to_string(src.combo_index) + "," +
                   fixed6(p.mean_score) + "," + p.total_cost.to_string() + "," +
                   fixed6(p.mean_latency_s) + "\n";
        }
        std::cout << out;
        return 0;
    } catch (const Error& e) {
        std::cerr << "pareto error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_export(const ExportArgs& args) {
    try {
        ReportFile file = parse_report_csv(args.report_path);
        selectors::SelectionReport report;
        report.selector_name = args.selector;
        report.seed = args.seed;
        report.role_names = file.role_names;
        report.ranked = file.entries;
        report.best_combo = file.entries.empty() ? -1 : file.entries.front().combo_index;
        if (!args.csv_out.empty()) report::export_csv(report, args.csv_out);
        if (!args.yaml_out.empty()) report::export_config_yaml(report, args.yaml_out);
        return 0;
    } catch (const Error& e) {
        std::cerr << "export error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace agentopt::cli
