#include "agentopt/cache.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

namespace agentopt::evalsub {

namespace {

// record layout: [u32 response_len][32-byte key][response][f64 latency]
//                [i64 input_tokens][i64 output_tokens][i64 created_at_ns]
constexpr std::size_t kFixedTail = 8 * 4;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

std::uint32_t get_u32(const char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(p[i]);
    return v;
}

std::uint64_t get_u64(const char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(p[i]);
    return v;
}

std::int64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace

PayloadCache::PayloadCache(std::string path) : path_(std::move(path)) { load(); }

void PayloadCache::load() {
    std::FILE* f = std::fopen(path_.c_str(), "rb");
    if (!f) return;  // nothing persisted yet
    std::vector<char> header(4 + 32);
    for (;;) {
        if (std::fread(header.data(), 1, header.size(), f) != header.size()) break;
        std::uint32_t resp_len = get_u32(header.data());
        std::string body(resp_len + kFixedTail, '\0');
        if (std::fread(body.data(), 1, body.size(), f) != body.size()) break;  // truncated tail
        std::string key;
        key.reserve(64);
        static const char* hex = "0123456789abcdef";
        for (int i = 0; i < 32; ++i) {
            std::uint8_t b = static_cast<std::uint8_t>(header[4 + i]);
            key.push_back(hex[b >> 4]);
            key.push_back(hex[b & 0xf]);
        }
        CacheEntry entry;
        entry.response_bytes = body.substr(0, resp_len);
        const char* tail = body.data() + resp_len;
        std::uint64_t latency_bits = get_u64(tail);
        std::memcpy(&entry.original_latency_s, &latency_bits, 8);
        entry.input_tokens = static_cast<std::int64_t>(get_u64(tail + 8));
        entry.output_tokens = static_cast<std::int64_t>(get_u64(tail + 16));
        entry.created_at_ns = static_cast<std::int64_t>(get_u64(tail + 24));
        entries_[key] = std::move(entry);
    }
    std::fclose(f);
}

void PayloadCache::append(const Sha256Digest& key, const CacheEntry& entry) {
    if (path_.empty()) return;
    std::string record;
    record.reserve(4 + 32 + entry.response_bytes.size() + kFixedTail);
    put_u32(record, static_cast<std::uint32_t>(entry.response_bytes.size()));
    record.append(reinterpret_cast<const char*>(key.data()), key.size());
    record.append(entry.response_bytes);
    std::uint64_t latency_bits = 0;
    std::memcpy(&latency_bits, &entry.original_latency_s, 8);
    put_u64(record, latency_bits);
    put_u64(record, static_cast<std::uint64_t>(entry.input_tokens));
    put_u64(record, static_cast<std::uint64_t>(entry.output_tokens));
    put_u64(record, static_cast<std::uint64_t>(entry.created_at_ns));

    std::FILE* f = std::fopen(path_.c_str(), "ab");
    if (!f) { ++io_warnings_; return; }
    if (std::fwrite(record.data(), 1, record.size(), f) != record.size()) ++io_warnings_;
    std::fclose(f);
}

CacheResult PayloadCache::lookup_or_execute(std::string_view payload,
                                            const std::function<ExecOutput()>& execute) {
    Sha256Digest digest = sha256(payload);
    std::string key = to_hex(digest);
    {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(key);
        if (it != entries_.end()) {
            return {it->second.response_bytes, it->second.original_latency_s,
                    it->second.input_tokens, it->second.output_tokens, true};
        }
    }
    ExecOutput exec = execute();
    CacheEntry entry{exec.response_bytes, exec.latency_s, exec.input_tokens,
                     exec.output_tokens, now_ns()};
    {
        std::lock_guard lock(mutex_);
        // concurrent misses on the same key produce identical values; keep the last
        entries_[key] = entry;
        append(digest, entry);
    }
    return {exec.response_bytes, exec.latency_s, exec.input_tokens, exec.output_tokens, false};
}

std::optional<CacheEntry> PayloadCache::peek(std::string_view payload) const {
    std::string key = to_hex(sha256(payload));
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::size_t PayloadCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

}  // namespace agentopt::evalsub
