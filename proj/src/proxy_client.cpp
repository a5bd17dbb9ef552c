#include "agentopt/proxy_client.hpp"

#include <httplib.h>
#include <json.hpp>

namespace agentopt::evalsub {

using nlohmann::json;

std::string proxy_combo_id(const PipelineSpace& space, const Combination& combo) {
    std::string id;
    for (int r = 0; r < space.n_roles(); ++r) {
        if (r) id.push_back(';');
        id += space.roles()[r];
        id.push_back('=');
        id += combo.models[r];
    }
    return id;
}

namespace {

void parse_host_port(const std::string& url, std::string& host, int& port) {
    const std::string prefix = "http://";
    if (url.rfind(prefix, 0) != 0)
        throw ConfigError("proxy URL must start with http:// : '" + url + "'");
    std::string rest = url.substr(prefix.size());
    while (!rest.empty() && rest.back() == '/') rest.pop_back();
    auto colon = rest.find(':');
    host = colon == std::string::npos ? rest : rest.substr(0, colon);
    port = colon == std::string::npos ? 80 : std::stoi(rest.substr(colon + 1));
    if (host.empty()) throw ConfigError("bad proxy URL '" + url + "'");
}

struct PairRecord {
    Money cost;
    double latency_s = 0.0;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    bool from_cache = false;
};

std::vector<PairRecord> pair_records(httplib::Client& client, const std::string& data_id,
                                     const std::string& combo_id) {
    auto res = client.Get("/agentopt/records");
    if (!res || res->status != 200)
        throw EvaluationFailed("proxy records query failed");
    json records = json::parse(res->body, nullptr, false);
    if (records.is_discarded() || !records.is_array())
        throw ProtocolViolation("proxy records reply is not a JSON array");
    std::vector<PairRecord> out;
    for (const auto& r : records) {
        if (r.value("data_id", "") != data_id || r.value("combo_id", "") != combo_id) continue;
        out.push_back({Money::from_usd(r.value("cost_usd", 0.0)), r.value("latency_s", 0.0),
                       r.value("input_tokens", std::int64_t{0}),
                       r.value("output_tokens", std::int64_t{0}), r.value("from_cache", false)});
    }
    return out;
}

}  // namespace

ProxyBackedEvaluator::ProxyBackedEvaluator(const PipelineSpace& space,
                                           std::vector<std::string> argv, std::string proxy_url,
                                           double timeout_s)
    : ExternalProcessEvaluator(space, std::move(argv), timeout_s,
                               {{"AGENTOPT_PROXY", proxy_url}}) {
    parse_host_port(proxy_url, proxy_host_, proxy_port_);
}

Observation ProxyBackedEvaluator::evaluate(const Combination& combo, std::int64_t datapoint) {
    httplib::Client client(proxy_host_, proxy_port_);
    client.set_connection_timeout(10, 0);

    std::string combo_id = proxy_combo_id(space_, combo);
    std::string data_id = std::to_string(datapoint);

    json assignment = json::object();
    for (int r = 0; r < space_.n_roles(); ++r) assignment[space_.roles()[r]] = combo.models[r];
    auto reg = client.Post("/agentopt/combos",
                           json{{"combo_id", combo_id}, {"assignment", assignment}}.dump(),
                           "application/json");
    if (!reg || reg->status != 200)
        throw EvaluationFailed("proxy mapping registration failed" +
                               (reg ? (": " + reg->body) : std::string()));

    std::size_t prior = pair_records(client, data_id, combo_id).size();
    Observation child = round_trip(request_line(combo, datapoint));
    auto all = pair_records(client, data_id, combo_id);

    Observation obs;
    obs.score = child.score;
    bool all_cached = all.size() > prior;
    for (std::size_t i = prior; i < all.size(); ++i) {
        obs.cost += all[i].cost;
        obs.latency_s += all[i].latency_s;
        obs.input_tokens += all[i].input_tokens;
        obs.output_tokens += all[i].output_tokens;
        all_cached = all_cached && all[i].from_cache;
    }
    obs.from_cache = all_cached;

    // completes the proxy-side observation; a rerun of the same pair is fine
    auto scored = client.Post(
        "/agentopt/scores",
        json{{"data_id", data_id}, {"combo_id", combo_id}, {"score", obs.score}}.dump(),
        "application/json");
    if (scored && scored->status != 200 && scored->status != 409)
        throw EvaluationFailed("proxy score submission failed: " + scored->body);
    return obs;
}

}  // namespace agentopt::evalsub
