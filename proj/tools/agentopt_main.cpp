#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"agentopt: model-combination search for multi-stage agent pipelines"};
    app.require_subcommand(1);

    agentopt::cli::SelectArgs select_args;
    auto* select = app.add_subcommand("select", "run a selector over the combination space");
    select->add_option("--config", select_args.config_path, "run configuration YAML")->required();
    select->add_option("--out", select_args.out_override, "output directory override");
    std::uint64_t seed_base = 0;
    int seed_count = 0;
    auto* seed_base_opt = select->add_option("--seed-base", seed_base, "first seed");
    auto* seed_count_opt = select->add_option("--seeds", seed_count, "number of seeds");
    select->add_option("--set", select_args.sets, "override a config scalar, key=value")
        ->take_all();

    auto* replay = app.add_subcommand("replay-import", "validate and index a replay matrix CSV");
    std::string replay_csv, replay_out;
    std::int64_t replay_combos = 0, replay_datapoints = 0;
    replay->add_option("--csv", replay_csv, "replay matrix CSV")->required();
    replay->add_option("--combos", replay_combos, "expected |C|")->required();
    replay->add_option("--datapoints", replay_datapoints, "expected |D|")->required();
    replay->add_option("--out", replay_out, "fixture output directory")->required();

    agentopt::cli::ProxyArgs proxy_args;
    auto* proxy = app.add_subcommand("proxy", "serve the metering forward proxy");
    proxy->add_option("--config", proxy_args.config_path, "run configuration YAML (pipeline, prices)")
        ->required();
    proxy->add_option("--listen", proxy_args.listen, "host:port to listen on")
        ->default_val("127.0.0.1:8800");
    proxy->add_option("--upstream", proxy_args.upstream, "upstream base URL (http://host:port)")
        ->required();
    proxy->add_option("--cache", proxy_args.cache_path, "response cache file");

    auto* pareto = app.add_subcommand("pareto", "merged Pareto frontier of report CSVs");
    std::vector<std::string> pareto_reports;
    std::string projection;
    pareto->add_option("reports", pareto_reports, "report.csv files")->required();
    pareto->add_option("--project", projection, "project to 2-D: score-cost");

    agentopt::cli::ExportArgs export_args;
    auto* exporter = app.add_subcommand("export", "re-export a stored report");
    exporter->add_option("--report", export_args.report_path, "report.csv to read")->required();
    exporter->add_option("--csv", export_args.csv_out, "CSV output path");
    exporter->add_option("--yaml", export_args.yaml_out, "best-combination YAML output path");
    exporter->add_option("--selector", export_args.selector, "selector name for the YAML header");
    exporter->add_option("--seed", export_args.seed, "seed for the YAML header");

    CLI11_PARSE(app, argc, argv);

    if (select->parsed()) {
        if (seed_base_opt->count() > 0) select_args.seed_base = seed_base;
        if (seed_count_opt->count() > 0) select_args.seed_count = seed_count;
        return agentopt::cli::cmd_select(select_args);
    }
    if (replay->parsed())
        return agentopt::cli::cmd_replay_import(replay_csv, replay_combos, replay_datapoints,
                                                replay_out);
    if (proxy->parsed()) return agentopt::cli::cmd_proxy(proxy_args);
    if (pareto->parsed()) return agentopt::cli::cmd_pareto(pareto_reports, projection);
    if (exporter->parsed()) return agentopt::cli::cmd_export(export_args);
    return 1;
}
