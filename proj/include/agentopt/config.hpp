#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentopt/core.hpp"
#include "agentopt/executor.hpp"
#include "agentopt/selectors.hpp"
#include "agentopt/yaml_lite.hpp"

namespace agentopt::cli {

struct EvaluatorSpec {
    std::string kind = "replay";  // replay | synthetic-bernoulli | external-process | proxy-backed
    std::string path;             // replay fixture CSV
    std::vector<double> means;    // synthetic per-combo success probabilities
    std::string cost_per_eval = "0";  // synthetic, decimal USD
    double latency_s = 0.0;           // synthetic
    std::vector<std::string> command;  // external-process / proxy-backed child argv
    double timeout_s = 300.0;
    std::string proxy_url;  // proxy-backed
    std::uint64_t seed = 0;
};

struct ProposerSpec {
    std::string kind;  // fixed | file | command; empty when unused
    std::string reply;
    std::string path;
    std::vector<std::string> command;
};

struct RunConfig {
    std::vector<std::string> roles;
    std::vector<std::vector<std::string>> candidates;  // aligned with roles
    // model -> (input, output) decimal USD per million tokens
    std::vector<std::pair<std::string, std::pair<std::string, std::string>>> prices;
    EvaluatorSpec evaluator;
    std::string selector = "brute-force";
    selectors::SelectorConfig selector_config;
    UtilityWeights utility_weights;
    evalsub::ConcurrencyBudget concurrency;
    std::int64_t dataset_size = 0;
    std::string output_dir = "runs/out";
    std::uint64_t seed_base = 42;
    int seed_count = 50;
    std::optional<std::int64_t> reference_best_combo;
    std::string cache_path;
    ProposerSpec proposer;
};

// Strict: unknown keys anywhere are rejected.
RunConfig parse_run_config(const YamlNode& root);
RunConfig load_run_config(const std::string& path);

// --set key=value with dotted paths, e.g. selector.beta=0.5
void apply_override(YamlNode& root, const std::string& assignment);

// the resolved config, re-serializable and re-parsable
YamlNode run_config_to_yaml(const RunConfig& config);

PipelineSpace space_from_config(const RunConfig& config);
PriceTable prices_from_config(const RunConfig& config);

}  // namespace agentopt::cli
