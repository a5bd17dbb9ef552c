#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agentopt/cache.hpp"
#include "agentopt/core.hpp"

namespace agentopt::proxy {

// Attribution headers carried by requests that want per-cell metering.
inline constexpr const char* kHeaderDataId = "x-agentopt-data-id";
inline constexpr const char* kHeaderComboId = "x-agentopt-combo-id";
inline constexpr const char* kHeaderRole = "x-agentopt-role";
inline constexpr const char* kUnattributed = "unattributed";

struct CallRecord {
    std::string data_id = kUnattributed;
    std::string combo_id = kUnattributed;
    std::string role = kUnattributed;
    std::string original_model;  // empty when the body had none
    std::string effective_model;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    double latency_s = 0.0;
    Money cost;
    bool from_cache = false;
    std::int64_t timestamp_ns = 0;
    std::int64_t seq = 0;

    bool attributed() const { return data_id != kUnattributed; }
};

struct ProxyOptions {
    std::string upstream_url;          // http://host[:port]
    std::string cache_path;            // empty: in-memory only
    bool cache_enabled = true;
};

std::string format_rfc3339(std::int64_t ns);
std::optional<std::int64_t> parse_rfc3339(const std::string& text);

// Forward proxy that rewrites the model per registered combo mapping,
// meters tokens/latency/cost per attributed call, and serves repeated
// payloads from the shared response cache.
class Proxy {
public:
    Proxy(PipelineSpace space, PriceTable prices, ProxyOptions options);
    ~Proxy();
    Proxy(const Proxy&) = delete;
    Proxy& operator=(const Proxy&) = delete;

    // control surface (also exposed over HTTP)
    void register_mapping(const std::string& combo_id,
                          const std::map<std::string, std::string>& assignment);
    void submit_score(const std::string& data_id, const std::string& combo_id, double score);
    std::vector<CallRecord> drain_records(std::int64_t since_ns = 0) const;
    std::optional<Observation> observation(const std::string& data_id,
                                           const std::string& combo_id) const;

    // serving
    int bind_any(const std::string& host);  // returns port; then start()
    void start();                           // serve on a background thread
    bool serve(const std::string& host, int port);  // blocking; false if bind fails
    void stop();

    std::int64_t missing_usage_warnings() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace agentopt::proxy
