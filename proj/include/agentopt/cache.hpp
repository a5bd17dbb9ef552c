#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "agentopt/sha256.hpp"

namespace agentopt::evalsub {

struct CacheEntry {
    std::string response_bytes;
    double original_latency_s = 0.0;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::int64_t created_at_ns = 0;
};

struct CacheResult {
    std::string response_bytes;
    double latency_s = 0.0;  // original (uncached) latency on a hit
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    bool from_cache = false;
};

// What executing a missed payload produced.
struct ExecOutput {
    std::string response_bytes;
    double latency_s = 0.0;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
};

// Response cache keyed by a content hash of the canonical request payload.
// Optionally persists as an append-only file of length-prefixed records;
// the in-memory index is rebuilt on open and a truncated tail is ignored.
// Persistence failures degrade to pass-through and bump io_warnings.
class PayloadCache {
public:
    PayloadCache() = default;
    explicit PayloadCache(std::string path);

    CacheResult lookup_or_execute(std::string_view payload,
                                  const std::function<ExecOutput()>& execute);

    std::optional<CacheEntry> peek(std::string_view payload) const;
    std::size_t size() const;
    std::int64_t io_warnings() const { return io_warnings_; }

private:
    void load();
    void append(const Sha256Digest& key, const CacheEntry& entry);

    mutable std::mutex mutex_;
    std::unordered_map<std::string, CacheEntry> entries_;  // hex key -> entry
    std::string path_;
    std::int64_t io_warnings_ = 0;
};

}  // namespace agentopt::evalsub
