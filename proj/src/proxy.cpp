#include "agentopt/proxy.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace agentopt::proxy {

using nlohmann::json;

std::string format_rfc3339(std::int64_t ns) {
    std::time_t secs = static_cast<std::time_t>(ns / 1'000'000'000);
    std::int64_t frac = ns % 1'000'000'000;
    if (frac < 0) {
        frac += 1'000'000'000;
        secs -= 1;
    }
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%09lldZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<long long>(frac));
    return buf;
}

std::optional<std::int64_t> parse_rfc3339(const std::string& text) {
    std::tm tm{};
    int year, month, day, hour, minute, second;
    int consumed = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d%n", &year, &month, &day, &hour, &minute,
                    &second, &consumed) != 6)
        return std::nullopt;
    tm.tm_year = year - 1900;
    tm.tm_mon = month - 1;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = minute;
    tm.tm_sec = second;
    std::int64_t frac_ns = 0;
    const char* p = text.c_str() + consumed;
    if (*p == '.') {
        ++p;
        std::int64_t scale = 100'000'000;
        while (*p >= '0' && *p <= '9') {
            frac_ns += (*p - '0') * scale;
            scale /= 10;
            ++p;
        }
    }
    if (*p != 'Z' && *p != '\0') return std::nullopt;
    std::time_t secs = timegm(&tm);
    return static_cast<std::int64_t>(secs) * 1'000'000'000 + frac_ns;
}

namespace {

std::int64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

json record_to_json(const CallRecord& r) {
    return json{{"data_id", r.data_id},
                {"combo_id", r.combo_id},
                {"role", r.role},
                {"original_model", r.original_model},
                {"effective_model", r.effective_model},
                {"input_tokens", r.input_tokens},
                {"output_tokens", r.output_tokens},
                {"latency_s", r.latency_s},
                {"cost_usd", r.cost.usd()},
                {"from_cache", r.from_cache},
                {"timestamp", format_rfc3339(r.timestamp_ns)}};
}

}  // namespace

struct Proxy::Impl {
    PipelineSpace space;
    PriceTable prices;
    ProxyOptions options;
    std::string upstream_host;
    int upstream_port = 80;

    evalsub::PayloadCache cache;
    httplib::Server server;
    std::thread server_thread;
    int bound_port = -1;
    std::string bound_host;

    mutable std::mutex mutex;
    std::map<std::string, std::map<std::string, std::string>> mappings;  // combo_id -> role -> model
    std::vector<CallRecord> records;
    std::map<std::pair<std::string, std::string>, Observation> observations;
    std::int64_t next_seq = 0;
    std::atomic<std::int64_t> missing_usage{0};

    explicit Impl(PipelineSpace s, PriceTable p, ProxyOptions o)
        : space(std::move(s)), prices(std::move(p)), options(std::move(o)),
          cache(options.cache_path) {
        parse_upstream();
        route();
    }

    void parse_upstream() {
        const std::string& url = options.upstream_url;
        const std::string prefix = "http://";
        if (url.rfind(prefix, 0) != 0)
            throw ConfigError("upstream URL must start with http:// : '" + url + "'");
        std::string rest = url.substr(prefix.size());
        while (!rest.empty() && rest.back() == '/') rest.pop_back();
        if (rest.empty() || rest.find('/') != std::string::npos)
            throw ConfigError("upstream URL must be http://host[:port] : '" + url + "'");
        auto colon = rest.find(':');
        if (colon == std::string::npos) {
            upstream_host = rest;
            upstream_port = 80;
        } else {
            upstream_host = rest.substr(0, colon);
            try {
                std::size_t pos = 0;
                upstream_port = std::stoi(rest.substr(colon + 1), &pos);
                if (pos != rest.size() - colon - 1) throw std::invalid_argument(rest);
            } catch (const std::exception&) {
                throw ConfigError("bad upstream port in '" + url + "'");
            }
        }
        if (upstream_host.empty() || upstream_port <= 0 || upstream_port > 65535)
            throw ConfigError("bad upstream address '" + url + "'");
    }

    void fail(httplib::Response& res, int status, const std::string& code,
              const std::string& message) {
        res.status = status;
        res.set_content(json{{"error", code}, {"message", message}}.dump(), "application/json");
    }

    void route() {
        server.Post("/agentopt/combos", [this](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object() || !body.contains("combo_id") ||
                !body.contains("assignment") || !body["assignment"].is_object())
                return fail(res, 400, "MalformedBody", "expected {combo_id, assignment}");
            std::map<std::string, std::string> assignment;
            for (auto it = body["assignment"].begin(); it != body["assignment"].end(); ++it) {
                if (!it.value().is_string())
                    return fail(res, 400, "MalformedBody", "assignment values must be strings");
                assignment[it.key()] = it.value().get<std::string>();
            }
            try {
                register_mapping(body["combo_id"].get<std::string>(), assignment);
            } catch (const Error& e) {
                return fail(res, 400, "InvalidMapping", e.what());
            }
            res.set_content(json{{"ok", true}}.dump(), "application/json");
        });

        server.Post("/agentopt/scores", [this](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object() || !body.contains("data_id") ||
                !body.contains("combo_id") || !body.contains("score") ||
                !body["score"].is_number())
                return fail(res, 400, "MalformedBody", "expected {data_id, combo_id, score}");
            try {
                submit_score(body["data_id"].get<std::string>(),
                             body["combo_id"].get<std::string>(), body["score"].get<double>());
            } catch (const ScoreOutOfRange& e) {
                return fail(res, 400, "ScoreOutOfRange", e.what());
            } catch (const DuplicateScore& e) {
                return fail(res, 409, "DuplicateScore", e.what());
            } catch (const UnknownPair& e) {
                return fail(res, 400, "UnknownPair", e.what());
            }
            res.set_content(json{{"ok", true}}.dump(), "application/json");
        });

        server.Get("/agentopt/records", [this](const httplib::Request& req, httplib::Response& res) {
            std::int64_t since = 0;
            if (req.has_param("since")) {
                auto parsed = parse_rfc3339(req.get_param_value("since"));
                if (!parsed) return fail(res, 400, "MalformedBody", "bad 'since' timestamp");
                since = *parsed;
            }
            json out = json::array();
            for (const auto& r : drain_records(since)) out.push_back(record_to_json(r));
            res.set_content(out.dump(), "application/json");
        });

        server.Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
            forward(req, res);
        });
        server.Get(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
            forward(req, res);
        });
    }

    void register_mapping(const std::string& combo_id,
                          const std::map<std::string, std::string>& assignment) {
        if (assignment.size() != static_cast<std::size_t>(space.n_roles()))
            throw UnknownRole("assignment must cover every role exactly once");
        for (const auto& [role, model] : assignment) {
            auto r = space.role_index(role);
            if (!r) throw UnknownRole(role);
            const auto& cands = space.candidates(*r);
            if (std::find(cands.begin(), cands.end(), model) == cands.end())
                throw UnknownModel(model);
        }
        std::lock_guard lock(mutex);
        mappings[combo_id] = assignment;  // last write wins
    }

    void submit_score(const std::string& data_id, const std::string& combo_id, double score) {
        if (!(score >= 0.0 && score <= 1.0))
            throw ScoreOutOfRange("score " + std::to_string(score) + " outside [0, 1]");
        std::lock_guard lock(mutex);
        auto key = std::make_pair(data_id, combo_id);
        if (observations.count(key))
            throw DuplicateScore("score already submitted for (" + data_id + ", " + combo_id + ")");
        Observation obs;
        bool seen = false;
        bool all_cached = true;
        for (const auto& r : records) {
            if (r.data_id != data_id || r.combo_id != combo_id) continue;
            seen = true;
            obs.cost += r.cost;
            obs.latency_s += r.latency_s;
            obs.input_tokens += r.input_tokens;
            obs.output_tokens += r.output_tokens;
            all_cached = all_cached && r.from_cache;
        }
        if (!seen && !mappings.count(combo_id))
            throw UnknownPair("no records or registered mapping for (" + data_id + ", " +
                              combo_id + ")");
        obs.score = score;
        obs.from_cache = seen && all_cached;
        observations[key] = obs;
    }

    std::vector<CallRecord> drain_records(std::int64_t since_ns) const {
        std::lock_guard lock(mutex);
        std::vector<CallRecord> out;
        for (const auto& r : records)
            if (r.timestamp_ns >= since_ns) out.push_back(r);
        std::sort(out.begin(), out.end(), [](const CallRecord& a, const CallRecord& b) {
            if (a.timestamp_ns != b.timestamp_ns) return a.timestamp_ns < b.timestamp_ns;
            return a.seq < b.seq;
        });
        return out;
    }

    void forward(const httplib::Request& req, httplib::Response& res) {
        std::string data_id = req.get_header_value(kHeaderDataId);
        std::string combo_id = req.get_header_value(kHeaderComboId);
        std::string role = req.get_header_value(kHeaderRole);
        bool attributed = !data_id.empty() && !combo_id.empty() && !role.empty();

        CallRecord record;
        std::string forward_body = req.body;
        if (attributed) {
            record.data_id = data_id;
            record.combo_id = combo_id;
            record.role = role;
            json body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object())
                return fail(res, 400, "MalformedBody", "attributed request body must be a JSON object");
            std::string model;
            {
                std::lock_guard lock(mutex);
                auto it = mappings.find(combo_id);
                if (it == mappings.end())
                    return fail(res, 400, "UnknownComboId", "no mapping registered for '" + combo_id + "'");
                auto role_it = it->second.find(role);
                if (role_it == it->second.end())
                    return fail(res, 400, "UnknownComboId", "mapping for '" + combo_id +
                                                               "' has no role '" + role + "'");
                model = role_it->second;
            }
            if (body.contains("model") && body["model"].is_string())
                record.original_model = body["model"].get<std::string>();
            body["model"] = model;
            record.effective_model = model;
            forward_body = body.dump();  // canonical: sorted keys, no whitespace
        } else if (!req.body.empty()) {
            json body = json::parse(req.body, nullptr, false);
            if (!body.is_discarded() && body.is_object() && body.contains("model") &&
                body["model"].is_string()) {
                record.original_model = body["model"].get<std::string>();
                record.effective_model = record.original_model;
            }
        }

        std::string target = req.target.empty() ? req.path : req.target;

        // cache key covers everything that determines the upstream answer
        std::string cache_key = req.method;
        cache_key.push_back('\n');
        cache_key += target;
        cache_key.push_back('\n');
        cache_key += forward_body;

        std::string response_body;
        std::string failure;
        auto execute = [&]() -> evalsub::ExecOutput {
            httplib::Client client(upstream_host, upstream_port);
            client.set_connection_timeout(10, 0);
            client.set_read_timeout(300, 0);
            auto started = std::chrono::steady_clock::now();
            httplib::Result upstream =
                req.method == "GET"
                    ? client.Get(target)
                    : client.Post(target, forward_body,
                                  req.get_header_value("Content-Type").empty()
                                      ? "application/json"
                                      : req.get_header_value("Content-Type"));
            double latency = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                           started)
                                 .count();
            if (!upstream || upstream->status >= 500) {
                failure = upstream ? ("upstream returned " + std::to_string(upstream->status))
                                   : ("upstream unreachable: " +
                                      httplib::to_string(upstream.error()));
                throw EvaluationFailed(failure);
            }
            evalsub::ExecOutput out;
            out.response_bytes = upstream->body;
            out.latency_s = latency;
            json parsed = json::parse(upstream->body, nullptr, false);
            if (!parsed.is_discarded() && parsed.is_object() && parsed.contains("usage") &&
                parsed["usage"].is_object()) {
                out.input_tokens = parsed["usage"].value("prompt_tokens", std::int64_t{0});
                out.output_tokens = parsed["usage"].value("completion_tokens", std::int64_t{0});
            } else {
                missing_usage.fetch_add(1, std::memory_order_relaxed);
            }
            return out;
        };

        evalsub::CacheResult result;
        try {
            if (options.cache_enabled) {
                result = cache.lookup_or_execute(cache_key, execute);
            } else {
                evalsub::ExecOutput exec = execute();
                result = {exec.response_bytes, exec.latency_s, exec.input_tokens,
                          exec.output_tokens, false};
            }
        } catch (const EvaluationFailed& e) {
            return fail(res, 502, "UpstreamUnreachable", e.what());
        }

        record.input_tokens = result.input_tokens;
        record.output_tokens = result.output_tokens;
        record.latency_s = result.latency_s;
        record.from_cache = result.from_cache;
        if (!record.effective_model.empty() && prices.has(record.effective_model))
            record.cost = call_cost(record.input_tokens, record.output_tokens,
                                    record.effective_model, prices);
        record.timestamp_ns = now_ns();
        {
            std::lock_guard lock(mutex);
            record.seq = next_seq++;
            records.push_back(record);
        }
        res.status = 200;
        res.set_content(result.response_bytes, "application/json");
    }
};

Proxy::Proxy(PipelineSpace space, PriceTable prices, ProxyOptions options)
    : impl_(std::make_unique<Impl>(std::move(space), std::move(prices), std::move(options))) {}

Proxy::~Proxy() { stop(); }

void Proxy::register_mapping(const std::string& combo_id,
                             const std::map<std::string, std::string>& assignment) {
    impl_->register_mapping(combo_id, assignment);
}

void Proxy::submit_score(const std::string& data_id, const std::string& combo_id, double score) {
    impl_->submit_score(data_id, combo_id, score);
}

std::vector<CallRecord> Proxy::drain_records(std::int64_t since_ns) const {
    return impl_->drain_records(since_ns);
}

std::optional<Observation> Proxy::observation(const std::string& data_id,
                                              const std::string& combo_id) const {
    std::lock_guard lock(impl_->mutex);
    auto it = impl_->observations.find(std::make_pair(data_id, combo_id));
    if (it == impl_->observations.end()) return std::nullopt;
    return it->second;
}

int Proxy::bind_any(const std::string& host) {
    impl_->bound_host = host;
    impl_->bound_port = impl_->server.bind_to_any_port(host);
    return impl_->bound_port;
}

void Proxy::start() {
    impl_->server_thread = std::thread([this]() { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

bool Proxy::serve(const std::string& host, int port) { return impl_->server.listen(host, port); }

void Proxy::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->server_thread.joinable()) impl_->server_thread.join();
}

std::int64_t Proxy::missing_usage_warnings() const {
    return impl_->missing_usage.load(std::memory_order_relaxed);
}

}  // namespace agentopt::proxy
