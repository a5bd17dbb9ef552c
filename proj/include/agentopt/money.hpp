#pragma once

#include <cstdint>
#include <string>

#include "agentopt/errors.hpp"

namespace agentopt {

// Fixed-point currency. The unit is one picodollar (1e-12 USD) so that
// token-level costs are exact integers: with prices stored in micro-USD
// per million tokens, cost = tokens * price is already in picodollars.
// int64 overflows above ~9.2 million USD, far beyond this domain.
class Money {
public:
    constexpr Money() = default;
    static constexpr Money from_pico(std::int64_t pico) { return Money(pico); }
    static Money from_usd(double usd);                    // rounds to nearest pico
    static Money parse_usd(const std::string& decimal);   // exact, <= 12 fractional digits

    constexpr std::int64_t pico() const { return pico_; }
    double usd() const { return static_cast<double>(pico_) * 1e-12; }

    // Fixed 6 fractional digits (micro-USD), round half away from zero.
    std::string to_string() const;

    Money& operator+=(Money o) { pico_ += o.pico_; return *this; }
    friend constexpr Money operator+(Money a, Money b) { return Money(a.pico_ + b.pico_); }
    friend constexpr Money operator-(Money a, Money b) { return Money(a.pico_ - b.pico_); }
    friend constexpr bool operator==(Money a, Money b) { return a.pico_ == b.pico_; }
    friend constexpr bool operator!=(Money a, Money b) { return a.pico_ != b.pico_; }
    friend constexpr bool operator<(Money a, Money b) { return a.pico_ < b.pico_; }
    friend constexpr bool operator<=(Money a, Money b) { return a.pico_ <= b.pico_; }
    friend constexpr bool operator>(Money a, Money b) { return a.pico_ > b.pico_; }
    friend constexpr bool operator>=(Money a, Money b) { return a.pico_ >= b.pico_; }

private:
    explicit constexpr Money(std::int64_t pico) : pico_(pico) {}
    std::int64_t pico_ = 0;
};

// Per-million-token price in micro-USD. "5.00" => 5'000'000.
struct Price {
    std::int64_t input_micro_per_mtok = 0;
    std::int64_t output_micro_per_mtok = 0;
};

// Parses a non-negative decimal with at most 6 fractional digits into
// micro-units. Throws ConfigError on malformed or too-precise input.
std::int64_t parse_micro(const std::string& decimal);

}  // namespace agentopt
