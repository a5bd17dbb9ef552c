#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "agentopt/config.hpp"

using namespace agentopt;
using namespace agentopt::cli;

namespace {

const char* kSampleConfig = R"(# demo run
pipeline:
  roles: [planner, solver]
  candidates:
    planner: ["gpt-oss-20b", ministral]
    solver: [opus, haiku]
prices:
  "gpt-oss-20b":
    input: "0.07"
    output: "0.30"
  ministral:
    input: "0.15"
    output: "0.15"
  opus:
    input: "5.00"
    output: "25.00"
  haiku:
    input: "1.00"
    output: "5.00"
evaluator:
  kind: synthetic-bernoulli
  means: [0.1, 0.2, 0.3, 0.4]
  cost_per_eval: "0.001"
  latency_s: 0.5
  seed: 1234
selector:
  name: ucb-e
  beta: 0.2
  batch_size: 5
utility:
  lambda_cost: 0.0
  lambda_latency: 0.0
concurrency:
  combos: 2
  datapoints_per_combo: 3
dataset:
  size: 40
output: runs/demo
seeds:
  base: 42
  count: 3
reference_best_combo: 3
)";

}  // namespace

TEST_CASE("yaml subset parses scalars, nesting, sequences and comments") {
    YamlNode root = yaml_parse(
        "a: 1          # trailing comment\n"
        "b: -2.5\n"
        "c: true\n"
        "d: \"quoted: [x]\"\n"
        "e: [1, 2, three]\n"
        "nested:\n"
        "  inner: value\n"
        "  deeper:\n"
        "    leaf: 9\n"
        "listy:\n"
        "  - alpha\n"
        "  - \"beta gamma\"\n");
    CHECK(root.find("a")->as_int("a") == 1);
    CHECK(root.find("b")->as_double("b") == doctest::Approx(-2.5));
    CHECK(root.find("c")->as_bool("c") == true);
    CHECK(root.find("d")->as_string("d") == "quoted: [x]");
    REQUIRE(root.find("e")->is_seq());
    CHECK(root.find("e")->seq.size() == 3);
    CHECK(root.find("e")->seq[2].as_string("e") == "three");
    CHECK(root.find("nested")->find("deeper")->find("leaf")->as_int("leaf") == 9);
    CHECK(root.find("listy")->seq[1].as_string("listy") == "beta gamma");

    CHECK_THROWS_AS(yaml_parse("a: 1\na: 2\n"), ConfigError);      // duplicate key
    CHECK_THROWS_AS(yaml_parse("a: [1, 2\n"), ConfigError);        // unterminated flow
    CHECK_THROWS_AS(yaml_parse("a:\n    b: 1\n  c: 2\n"), ConfigError);  // bad dedent
}

TEST_CASE("yaml emit/parse round trip is stable") {
    YamlNode root = yaml_parse(kSampleConfig);
    std::string emitted = yaml_emit(root);
    YamlNode reparsed = yaml_parse(emitted);
    CHECK(yaml_emit(reparsed) == emitted);
}

TEST_CASE("run config parses and validates") {
    RunConfig config = parse_run_config(yaml_parse(kSampleConfig));
    CHECK(config.roles == std::vector<std::string>{"planner", "solver"});
    CHECK(config.candidates[0] == std::vector<std::string>{"gpt-oss-20b", "ministral"});
    CHECK(config.selector == "ucb-e");
    CHECK(config.selector_config.budget_fraction == doctest::Approx(0.2));
    CHECK(config.dataset_size == 40);
    CHECK(config.seed_count == 3);
    CHECK(config.evaluator.means.size() == 4);
    CHECK(config.reference_best_combo == 3);
    CHECK(config.concurrency.max_datapoints_per_combo == 3);

    PipelineSpace space = space_from_config(config);
    CHECK(space.n_combos() == 4);
    PriceTable prices = prices_from_config(config);
    CHECK(prices.lookup("opus").output_micro_per_mtok == 25'000'000);
}

TEST_CASE("unknown keys are rejected at every level") {
    std::string bad_top = std::string(kSampleConfig) + "mystery: 1\n";
    CHECK_THROWS_WITH_AS(parse_run_config(yaml_parse(bad_top)),
                         doctest::Contains("unknown key 'mystery'"), ConfigError);

    std::string bad_selector(kSampleConfig);
    bad_selector.replace(bad_selector.find("  beta:"), 7, "  bets:");
    CHECK_THROWS_AS(parse_run_config(yaml_parse(bad_selector)), ConfigError);

    YamlNode root = yaml_parse(kSampleConfig);
    apply_override(root, "evaluator.unknown_field=3");
    CHECK_THROWS_AS(parse_run_config(root), ConfigError);
}

TEST_CASE("missing price names the model") {
    std::string text(kSampleConfig);
    auto pos = text.find("  haiku:\n    input: \"1.00\"\n    output: \"5.00\"\n");
    REQUIRE(pos != std::string::npos);
    text.erase(pos, std::string("  haiku:\n    input: \"1.00\"\n    output: \"5.00\"\n").size());
    CHECK_THROWS_WITH_AS(parse_run_config(yaml_parse(text)), doctest::Contains("haiku"),
                         ConfigError);
}

TEST_CASE("set overrides reach nested scalars") {
    YamlNode root = yaml_parse(kSampleConfig);
    apply_override(root, "selector.beta=0.5");
    apply_override(root, "seeds.count=1");
    apply_override(root, "output=elsewhere");
    RunConfig config = parse_run_config(root);
    CHECK(config.selector_config.budget_fraction == doctest::Approx(0.5));
    CHECK(config.seed_count == 1);
    CHECK(config.output_dir == "elsewhere");
    CHECK_THROWS_AS(apply_override(root, "no-equals-sign"), ConfigError);
}

TEST_CASE("config to yaml round trips semantically") {
    RunConfig config = parse_run_config(yaml_parse(kSampleConfig));
    YamlNode emitted = run_config_to_yaml(config);
    RunConfig reparsed = parse_run_config(emitted);
    CHECK(yaml_emit(run_config_to_yaml(reparsed)) == yaml_emit(emitted));
}

TEST_CASE("structural config errors") {
    // synthetic means must match |C|
    std::string wrong_means(kSampleConfig);
    wrong_means.replace(wrong_means.find("means: [0.1, 0.2, 0.3, 0.4]"),
                        std::string("means: [0.1, 0.2, 0.3, 0.4]").size(),
                        "means: [0.1, 0.2]");
    CHECK_THROWS_AS(parse_run_config(yaml_parse(wrong_means)), ConfigError);

    // unknown selector name
    YamlNode root = yaml_parse(kSampleConfig);
    apply_override(root, "selector.name=magic");
    CHECK_THROWS_AS(parse_run_config(root), ConfigError);

    // lm-proposal needs a proposer section
    YamlNode lm = yaml_parse(kSampleConfig);
    apply_override(lm, "selector.name=lm-proposal");
    CHECK_THROWS_AS(parse_run_config(lm), ConfigError);
}
