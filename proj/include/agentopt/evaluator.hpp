#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agentopt/cache.hpp"
#include "agentopt/core.hpp"
#include "agentopt/subprocess.hpp"

namespace agentopt::evalsub {

struct DatapointId {
    std::int64_t index = 0;
    std::string label;
};

struct Dataset {
    std::int64_t size = 0;
    std::vector<std::string> labels;  // optional; empty or size-aligned

    static Dataset of_size(std::int64_t n) { return Dataset{n, {}}; }
    std::string label(std::int64_t index) const {
        if (index >= 0 && index < static_cast<std::int64_t>(labels.size())) return labels[index];
        return std::to_string(index);
    }
};

// Counts of non-fatal conditions surfaced alongside results.
struct WarningCounters {
    std::int64_t clamped_scores = 0;
    std::int64_t missing_usage = 0;
    std::int64_t cache_io = 0;
    std::int64_t invalid_proposals = 0;
    std::int64_t surrogate_fallbacks = 0;

    WarningCounters& operator+=(const WarningCounters& o) {
        clamped_scores += o.clamped_scores;
        missing_usage += o.missing_usage;
        cache_io += o.cache_io;
        invalid_proposals += o.invalid_proposals;
        surrogate_fallbacks += o.surrogate_fallbacks;
        return *this;
    }
};

// One arm pull: run the pipeline under `combo` on one datapoint.
// Implementations throw EvaluationFailed (or a subclass) on failure.
class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual Observation evaluate(const Combination& combo, std::int64_t datapoint) = 0;
    // Serial evaluators are driven one call at a time.
    virtual bool serial() const { return false; }
    // Ground-truth row mean where the binding knows it (replay, synthetic).
    virtual std::optional<double> true_mean(std::int64_t) const { return std::nullopt; }
    virtual WarningCounters warnings() const { return {}; }
};

// A fully populated ground-truth grid that selectors reveal cell by cell.
struct ReplayMatrix {
    std::int64_t n_combos = 0;
    std::int64_t n_datapoints = 0;
    std::vector<Observation> cells;  // row-major, complete

    const Observation& at(std::int64_t combo, std::int64_t datapoint) const {
        return cells[static_cast<std::size_t>(combo * n_datapoints + datapoint)];
    }
    Observation& at(std::int64_t combo, std::int64_t datapoint) {
        return cells[static_cast<std::size_t>(combo * n_datapoints + datapoint)];
    }
    double row_mean(std::int64_t combo) const;

    // every cell of row `combo` scores means[combo]; constant cost/latency
    static ReplayMatrix row_constant(const std::vector<double>& means, std::int64_t n_datapoints,
                                     Money cost_per_eval = Money(), double latency_s = 0.0);
};

class ReplayEvaluator : public Evaluator {
public:
    explicit ReplayEvaluator(ReplayMatrix matrix) : matrix_(std::move(matrix)) {}
    Observation evaluate(const Combination& combo, std::int64_t datapoint) override;
    std::optional<double> true_mean(std::int64_t combo) const override;
    const ReplayMatrix& matrix() const { return matrix_; }

private:
    ReplayMatrix matrix_;
};

// Row-constant Bernoulli scores: cell (j, k) is an independent draw with
// success probability p_j, fixed by (seed, j, k) so re-evaluation is
// reproducible. Cost and latency are per-combo constants.
class SyntheticBernoulliEvaluator : public Evaluator {
public:
    SyntheticBernoulliEvaluator(std::vector<double> means, std::uint64_t seed,
                                Money cost_per_eval = Money(), double latency_s = 0.0);
    Observation evaluate(const Combination& combo, std::int64_t datapoint) override;
    std::optional<double> true_mean(std::int64_t combo) const override;

private:
    std::vector<double> means_;
    std::uint64_t seed_;
    Money cost_per_eval_;
    double latency_s_;
};

// Drives an external agent over the newline-delimited JSON protocol:
//   {"type":"eval","combo":{"<role>":"<model>",...},"datapoint":<int>}
//   {"type":"result","score":...,"cost_usd":...,"latency_s":...,
//    "input_tokens":...,"output_tokens":...}
class ExternalProcessEvaluator : public Evaluator {
public:
    ExternalProcessEvaluator(const PipelineSpace& space, std::vector<std::string> argv,
                             double timeout_s = 300.0,
                             std::vector<std::pair<std::string, std::string>> extra_env = {});
    ~ExternalProcessEvaluator() override;

    Observation evaluate(const Combination& combo, std::int64_t datapoint) override;
    bool serial() const override { return true; }
    WarningCounters warnings() const override;

protected:
    Observation round_trip(const std::string& request_line);
    std::string request_line(const Combination& combo, std::int64_t datapoint) const;

    const PipelineSpace& space_;
    std::vector<std::string> argv_;
    double timeout_s_;
    std::vector<std::pair<std::string, std::string>> extra_env_;
    LineProcess child_;
    std::atomic<std::int64_t> clamped_scores_{0};
};

// Validates a child's reply line into an Observation. Scores outside
// [0, 1] are clamped and counted; structural problems throw
// ProtocolViolation. Exposed for reuse by the proxy-backed binding.
Observation parse_result_line(const std::string& line, std::atomic<std::int64_t>& clamped_counter);

// Wraps another evaluator with the payload-hash cache. The payload is the
// canonical JSON of (combo assignment, datapoint); on a hit the stored
// outcome is returned with from_cache=true and the original latency.
class CachedEvaluator : public Evaluator {
public:
    CachedEvaluator(const PipelineSpace& space, Evaluator& inner, PayloadCache& cache)
        : space_(space), inner_(inner), cache_(cache) {}

    Observation evaluate(const Combination& combo, std::int64_t datapoint) override;
    bool serial() const override { return inner_.serial(); }
    std::optional<double> true_mean(std::int64_t combo) const override {
        return inner_.true_mean(combo);
    }
    WarningCounters warnings() const override;

private:
    const PipelineSpace& space_;
    Evaluator& inner_;
    PayloadCache& cache_;
};

std::string canonical_eval_payload(const PipelineSpace& space, const Combination& combo,
                                   std::int64_t datapoint);

}  // namespace agentopt::evalsub
