#include "agentopt/money.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace agentopt {

namespace {

// Parses "<int>[.<frac>]" into units of 10^-frac_digits, exact.
std::int64_t parse_fixed(const std::string& s, int frac_digits, const char* what) {
    if (s.empty()) throw ConfigError(std::string(what) + ": empty decimal");
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '-') { neg = true; ++i; }
    if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
        throw ConfigError(std::string(what) + ": malformed decimal '" + s + "'");
    std::int64_t whole = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        whole = whole * 10 + (s[i] - '0');
        ++i;
    }
    std::int64_t frac = 0;
    int seen = 0;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            if (seen < frac_digits) frac = frac * 10 + (s[i] - '0');
            else if (s[i] != '0')
                throw ConfigError(std::string(what) + ": '" + s + "' exceeds " +
                                  std::to_string(frac_digits) + " fractional digits");
            ++seen;
            ++i;
        }
        if (seen == 0) throw ConfigError(std::string(what) + ": malformed decimal '" + s + "'");
    }
    if (i != s.size()) throw ConfigError(std::string(what) + ": malformed decimal '" + s + "'");
    for (int d = seen; d < frac_digits; ++d) frac *= 10;
    std::int64_t scale = 1;
    for (int d = 0; d < frac_digits; ++d) scale *= 10;
    std::int64_t value = whole * scale + frac;
    return neg ? -value : value;
}

}  // namespace

Money Money::from_usd(double usd) {
    return Money(static_cast<std::int64_t>(std::llround(usd * 1e12)));
}

Money Money::parse_usd(const std::string& decimal) {
    return Money(parse_fixed(decimal, 12, "usd amount"));
}

std::string Money::to_string() const {
    std::int64_t p = pico_;
    bool neg = p < 0;
    if (neg) p = -p;
    // round pico -> micro, half away from zero
    std::int64_t micro = (p + 500'000) / 1'000'000;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%s%lld.%06lld", neg ? "-" : "",
                  static_cast<long long>(micro / 1'000'000),
                  static_cast<long long>(micro % 1'000'000));
    return buf;
}

std::int64_t parse_micro(const std::string& decimal) {
    std::int64_t v = parse_fixed(decimal, 6, "price");
    if (v < 0) throw ConfigError("price must be non-negative: '" + decimal + "'");
    return v;
}

}  // namespace agentopt
