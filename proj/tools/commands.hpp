#pragma once

#include <optional>
#include <string>
#include <vector>

namespace agentopt::cli {

struct SelectArgs {
    std::string config_path;
    std::string out_override;
    std::optional<std::uint64_t> seed_base;
    std::optional<int> seed_count;
    std::vector<std::string> sets;
};

int cmd_select(const SelectArgs& args);

int cmd_replay_import(const std::string& csv_path, std::int64_t n_combos,
                      std::int64_t n_datapoints, const std::string& out_dir);

struct ProxyArgs {
    std::string config_path;
    std::string listen;  // host:port
    std::string upstream;
    std::string cache_path;
};

int cmd_proxy(const ProxyArgs& args);

int cmd_pareto(const std::vector<std::string>& report_paths, const std::string& projection);

struct ExportArgs {
    std::string report_path;
    std::string csv_out;
    std::string yaml_out;
    std::string selector = "unknown";
    std::uint64_t seed = 0;
};

int cmd_export(const ExportArgs& args);

}  // namespace agentopt::cli
