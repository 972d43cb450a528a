#pragma once

// Fixed-point battery/cost arithmetic. Batteries and energy costs are exact
// decimals with six fractional digits, stored as scaled 64-bit integers so
// that energy accounting over a whole run admits exact comparison.

#include <cstdint>
#include <compare>
#include <stdexcept>
#include <string>

namespace csn {

class EnergyError : public std::runtime_error {
public:
    explicit EnergyError(const std::string& msg) : std::runtime_error(msg) {}
};

class Energy {
public:
    static constexpr std::int64_t kScale = 1'000'000;  // 6 decimal places

    constexpr Energy() = default;

    static constexpr Energy from_micros(std::int64_t micros) {
        Energy e;
        e.micros_ = micros;
        return e;
    }
    static constexpr Energy from_units(std::int64_t units) {
        return from_micros(units * kScale);
    }

    // Parses a plain decimal literal ("100", "2.5", "-0.000001"). Rejects
    // exponents and more than six fractional digits rather than rounding.
    static Energy parse(const std::string& text);

    constexpr std::int64_t micros() const { return micros_; }
    double to_double() const { return static_cast<double>(micros_) / kScale; }

    // Shortest decimal form, e.g. "100", "89.5", "0.000001".
    std::string str() const;

    friend constexpr Energy operator+(Energy a, Energy b) { return from_micros(a.micros_ + b.micros_); }
    friend constexpr Energy operator-(Energy a, Energy b) { return from_micros(a.micros_ - b.micros_); }
    Energy& operator+=(Energy o) { micros_ += o.micros_; return *this; }
    Energy& operator-=(Energy o) { micros_ -= o.micros_; return *this; }

    friend constexpr auto operator<=>(Energy a, Energy b) = default;

private:
    std::int64_t micros_ = 0;
};

inline constexpr Energy max_energy(Energy a, Energy b) { return a < b ? b : a; }

}  // namespace csn
