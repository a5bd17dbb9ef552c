#pragma once

#include <string>

#include "agentopt/evaluator.hpp"

namespace agentopt::evalsub {

// combo_id convention shared between this binding and agent children:
// "role=model;role=model" in role order. data_id is the decimal
// datapoint index.
std::string proxy_combo_id(const PipelineSpace& space, const Combination& combo);

// Runs an external agent that issues its LLM calls through a proxy.
// Per cell: the combo mapping is registered with the proxy, the child is
// asked to run the datapoint (it sees the proxy URL in AGENTOPT_PROXY and
// attaches attribution headers), the child replies with the score, and
// cost/latency/tokens come from the proxy's metering records.
class ProxyBackedEvaluator : public ExternalProcessEvaluator {
public:
    ProxyBackedEvaluator(const PipelineSpace& space, std::vector<std::string> argv,
                         std::string proxy_url, double timeout_s = 300.0);

    Observation evaluate(const Combination& combo, std::int64_t datapoint) override;

private:
    std::string proxy_host_;
    int proxy_port_ = 80;
};

}  // namespace agentopt::evalsub
