#include "csn/energy.hpp"

#include <cctype>
#include <cstdlib>

namespace csn {

Energy Energy::parse(const std::string& text) {
    if (text.empty()) throw EnergyError("empty energy literal");
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '-' || text[i] == '+') {
        neg = text[i] == '-';
        ++i;
    }
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
        throw EnergyError("malformed energy literal '" + text + "'");

    std::int64_t whole = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        whole = whole * 10 + (text[i] - '0');
        if (whole > 9'000'000'000'000) throw EnergyError("energy literal out of range '" + text + "'");
        ++i;
    }
    std::int64_t frac = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        int digits = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            if (++digits > 6)
                throw EnergyError("energy literal '" + text + "' exceeds 6 decimal places");
            frac = frac * 10 + (text[i] - '0');
            ++i;
        }
        for (; digits < 6; ++digits) frac *= 10;
    }
    if (i != text.size()) throw EnergyError("malformed energy literal '" + text + "'");

    std::int64_t micros = whole * kScale + frac;
    return from_micros(neg ? -micros : micros);
}

std::string Energy::str() const {
    std::int64_t m = micros_;
    std::string sign;
    if (m < 0) {
        sign = "-";
        m = -m;
    }
    std::int64_t whole = m / kScale;
    std::int64_t frac = m % kScale;
    std::string out = sign + std::to_string(whole);
    if (frac != 0) {
        std::string f = std::to_string(frac);
        f.insert(f.begin(), 6 - f.size(), '0');
        while (!f.empty() && f.back() == '0') f.pop_back();
        out += "." + f;
    }
    return out;
}

}  // namespace csn
