// Line-protocol agent used by the external-process and proxy-backed
// tests. Modes, selected by argv[1]:
//   score     reply a deterministic score derived from (combo, datapoint)
//   fixed     reply {"score":1,"cost_usd":0,"latency_s":0.1}
//   garbage   reply a non-JSON line
//   overrange reply score 1.5 (exercises clamping)
//   silent    consume requests without ever replying
//   proxy     POST a chat payload through $AGENTOPT_PROXY with attribution
//             headers, then reply the metered score
#include <cstdlib>
#include <iostream>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "agentopt/rng.hpp"

using nlohmann::json;

namespace {

double cell_score(const json& request) {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (auto it = request["combo"].begin(); it != request["combo"].end(); ++it)
        for (char c : it.value().get<std::string>())
            h = agentopt::splitmix64(h ^ static_cast<std::uint64_t>(c));
    h = agentopt::splitmix64(h ^ request["datapoint"].get<std::uint64_t>());
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

int run_proxy_mode(const json& request) {
    const char* proxy_url = std::getenv("AGENTOPT_PROXY");
    if (!proxy_url) return 1;
    std::string url = proxy_url;
    const std::string prefix = "http://";
    std::string rest = url.substr(prefix.size());
    auto colon = rest.find(':');
    std::string host = rest.substr(0, colon);
    int port = std::stoi(rest.substr(colon + 1));

    std::string combo_id;
    for (auto it = request["combo"].begin(); it != request["combo"].end(); ++it) {
        if (!combo_id.empty()) combo_id.push_back(';');
        combo_id += it.key() + "=" + it.value().get<std::string>();
    }
    std::string data_id = std::to_string(request["datapoint"].get<std::int64_t>());

    double score_sum = 0.0;
    int calls = 0;
    for (auto it = request["combo"].begin(); it != request["combo"].end(); ++it) {
        httplib::Client client(host, port);
        httplib::Headers headers = {{"x-agentopt-data-id", data_id},
                                    {"x-agentopt-combo-id", combo_id},
                                    {"x-agentopt-role", it.key()}};
        json body = {{"model", "placeholder"},
                     {"messages", json::array({json{{"role", "user"},
                                                    {"content", "datapoint " + data_id}}})}};
        auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
        if (!res || res->status != 200) {
            json reply = {{"type", "result"}, {"score", 0.0}, {"cost_usd", 0.0},
                          {"latency_s", 0.0}};
            std::cout << reply.dump() << std::endl;
            return 0;
        }
        json parsed = json::parse(res->body, nullptr, false);
        if (!parsed.is_discarded() && parsed.contains("model")) {
            // deterministic pseudo-score keyed on the effective model
            std::uint64_t h = 0;
            for (char c : parsed["model"].get<std::string>())
                h = agentopt::splitmix64(h ^ static_cast<std::uint64_t>(c));
            score_sum += static_cast<double>(h >> 11) * 0x1.0p-53;
            ++calls;
        }
    }
    json reply = {{"type", "result"},
                  {"score", calls ? score_sum / calls : 0.0},
                  {"cost_usd", 0.0},
                  {"latency_s", 0.0}};
    std::cout << reply.dump() << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::string mode = argc > 1 ? argv[1] : "score";
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        if (mode == "silent") continue;
        if (mode == "garbage") {
            std::cout << "this is not json" << std::endl;
            continue;
        }
        json request = json::parse(line, nullptr, false);
        if (request.is_discarded()) {
            std::cout << json{{"type", "error"}}.dump() << std::endl;
            continue;
        }
        if (mode == "fixed") {
            std::cout << json{{"type", "result"}, {"score", 1.0}, {"cost_usd", 0.0},
                              {"latency_s", 0.1}}
                             .dump()
                      << std::endl;
        } else if (mode == "overrange") {
            std::cout << json{{"type", "result"}, {"score", 1.5}, {"cost_usd", 0.0},
                              {"latency_s", 0.0}}
                             .dump()
                      << std::endl;
        } else if (mode == "proxy") {
            if (run_proxy_mode(request) != 0) return 1;
        } else {
            json reply = {{"type", "result"},
                          {"score", cell_score(request)},
                          {"cost_usd", 0.001},
                          {"latency_s", 0.05},
                          {"input_tokens", 100},
                          {"output_tokens", 20}};
            std::cout << reply.dump() << std::endl;
        }
    }
    return 0;
}
