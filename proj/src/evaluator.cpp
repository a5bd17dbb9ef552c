#include "agentopt/evaluator.hpp"

#include <cmath>

#include <json.hpp>

#include "agentopt/rng.hpp"

namespace agentopt::evalsub {

using nlohmann::json;

double ReplayMatrix::row_mean(std::int64_t combo) const {
    double sum = 0.0;
    for (std::int64_t d = 0; d < n_datapoints; ++d) sum += at(combo, d).score;
    return sum / static_cast<double>(n_datapoints);
}

ReplayMatrix ReplayMatrix::row_constant(const std::vector<double>& means,
                                        std::int64_t n_datapoints, Money cost_per_eval,
                                        double latency_s) {
    ReplayMatrix m;
    m.n_combos = static_cast<std::int64_t>(means.size());
    m.n_datapoints = n_datapoints;
    m.cells.resize(static_cast<std::size_t>(m.n_combos * n_datapoints));
    for (std::int64_t c = 0; c < m.n_combos; ++c)
        for (std::int64_t d = 0; d < n_datapoints; ++d)
            m.at(c, d) = Observation{means[static_cast<std::size_t>(c)], cost_per_eval,
                                     latency_s, 0, 0, false};
    return m;
}

Observation ReplayEvaluator::evaluate(const Combination& combo, std::int64_t datapoint) {
    if (combo.index < 0 || combo.index >= matrix_.n_combos || datapoint < 0 ||
        datapoint >= matrix_.n_datapoints)
        throw IndexOutOfRange("replay cell out of range");
    return matrix_.at(combo.index, datapoint);
}

std::optional<double> ReplayEvaluator::true_mean(std::int64_t combo) const {
    if (combo < 0 || combo >= matrix_.n_combos) return std::nullopt;
    return matrix_.row_mean(combo);
}

SyntheticBernoulliEvaluator::SyntheticBernoulliEvaluator(std::vector<double> means,
                                                         std::uint64_t seed, Money cost_per_eval,
                                                         double latency_s)
    : means_(std::move(means)), seed_(seed), cost_per_eval_(cost_per_eval), latency_s_(latency_s) {
    for (double p : means_)
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError("synthetic success probabilities must lie in [0, 1]");
}

Observation SyntheticBernoulliEvaluator::evaluate(const Combination& combo,
                                                  std::int64_t datapoint) {
    if (combo.index < 0 || combo.index >= static_cast<std::int64_t>(means_.size()) ||
        datapoint < 0)
        throw IndexOutOfRange("synthetic cell out of range");
    Rng rng(key_mix(seed_, rng_tag::kSyntheticCell, static_cast<std::uint64_t>(combo.index),
                    static_cast<std::uint64_t>(datapoint)));
    double score = rng.bernoulli(means_[static_cast<std::size_t>(combo.index)]) ? 1.0 : 0.0;
    return Observation{score, cost_per_eval_, latency_s_, 0, 0, false};
}

std::optional<double> SyntheticBernoulliEvaluator::true_mean(std::int64_t combo) const {
    if (combo < 0 || combo >= static_cast<std::int64_t>(means_.size())) return std::nullopt;
    return means_[static_cast<std::size_t>(combo)];
}

Observation parse_result_line(const std::string& line,
                              std::atomic<std::int64_t>& clamped_counter) {
    json reply = json::parse(line, nullptr, false);
    if (reply.is_discarded() || !reply.is_object())
        throw ProtocolViolation("reply is not a JSON object: " + line);
    if (reply.value("type", "") != "result")
        throw ProtocolViolation("reply type is not 'result'");
    for (const char* field : {"score", "cost_usd", "latency_s"})
        if (!reply.contains(field) || !reply[field].is_number())
            throw ProtocolViolation(std::string("reply missing numeric field '") + field + "'");

    Observation obs;
    double score = reply["score"].get<double>();
    if (!std::isfinite(score)) throw ProtocolViolation("score is not finite");
    if (score < 0.0 || score > 1.0) {
        score = std::clamp(score, 0.0, 1.0);
        clamped_counter.fetch_add(1, std::memory_order_relaxed);
    }
    obs.score = score;
    double cost = reply["cost_usd"].get<double>();
    double latency = reply["latency_s"].get<double>();
    if (!std::isfinite(cost) || cost < 0.0) throw ProtocolViolation("cost_usd must be >= 0");
    if (!std::isfinite(latency) || latency < 0.0) throw ProtocolViolation("latency_s must be >= 0");
    obs.cost = Money::from_usd(cost);
    obs.latency_s = latency;
    obs.input_tokens = reply.value("input_tokens", std::int64_t{0});
    obs.output_tokens = reply.value("output_tokens", std::int64_t{0});
    if (obs.input_tokens < 0 || obs.output_tokens < 0)
        throw ProtocolViolation("token counts must be >= 0");
    return obs;
}

ExternalProcessEvaluator::ExternalProcessEvaluator(
    const PipelineSpace& space, std::vector<std::string> argv, double timeout_s,
    std::vector<std::pair<std::string, std::string>> extra_env)
    : space_(space), argv_(std::move(argv)), timeout_s_(timeout_s),
      extra_env_(std::move(extra_env)) {}

ExternalProcessEvaluator::~ExternalProcessEvaluator() = default;

std::string ExternalProcessEvaluator::request_line(const Combination& combo,
                                                   std::int64_t datapoint) const {
    json assignment = json::object();
    for (int r = 0; r < space_.n_roles(); ++r) assignment[space_.roles()[r]] = combo.models[r];
    json request = {{"type", "eval"}, {"combo", assignment}, {"datapoint", datapoint}};
    return request.dump();
}

Observation ExternalProcessEvaluator::round_trip(const std::string& request) {
    if (!child_.running()) child_.start(argv_, extra_env_);
    child_.write_line(request);
    auto line = child_.read_line(static_cast<int>(timeout_s_ * 1000.0));
    if (!line) {
        child_.stop();
        throw TimeoutExpired("agent reply timed out after " + std::to_string(timeout_s_) + " s");
    }
    return parse_result_line(*line, clamped_scores_);
}

Observation ExternalProcessEvaluator::evaluate(const Combination& combo, std::int64_t datapoint) {
    return round_trip(request_line(combo, datapoint));
}

WarningCounters ExternalProcessEvaluator::warnings() const {
    WarningCounters w;
    w.clamped_scores = clamped_scores_.load(std::memory_order_relaxed);
    return w;
}

std::string canonical_eval_payload(const PipelineSpace& space, const Combination& combo,
                                   std::int64_t datapoint) {
    json assignment = json::object();
    for (int r = 0; r < space.n_roles(); ++r) assignment[space.roles()[r]] = combo.models[r];
    json payload = {{"combo", assignment}, {"datapoint", datapoint}};
    return payload.dump();  // nlohmann objects are key-sorted; dump is whitespace-free
}

Observation CachedEvaluator::evaluate(const Combination& combo, std::int64_t datapoint) {
    std::string payload = canonical_eval_payload(space_, combo, datapoint);
    CacheResult result = cache_.lookup_or_execute(payload, [&]() {
        Observation obs = inner_.evaluate(combo, datapoint);
        json body = {{"score", obs.score},
                     {"cost_pico", obs.cost.pico()},
                     {"latency_s", obs.latency_s},
                     {"input_tokens", obs.input_tokens},
                     {"output_tokens", obs.output_tokens}};
        return ExecOutput{body.dump(), obs.latency_s, obs.input_tokens, obs.output_tokens};
    });
    json body = json::parse(result.response_bytes);
    Observation obs;
    obs.score = body["score"].get<double>();
    obs.cost = Money::from_pico(body["cost_pico"].get<std::int64_t>());
    obs.latency_s = result.latency_s;  // original execution latency on hits
    obs.input_tokens = result.input_tokens;
    obs.output_tokens = result.output_tokens;
    obs.from_cache = result.from_cache;
    return obs;
}

WarningCounters CachedEvaluator::warnings() const {
    WarningCounters w = inner_.warnings();
    w.cache_io += cache_.io_warnings();
    return w;
}

}  // namespace agentopt::evalsub
