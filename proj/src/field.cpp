#include "csn/field.hpp"

#include <algorithm>
#include <cmath>

namespace csn {

std::size_t FieldSpec::arity() const {
    return std::visit(
        [](const auto& d) -> std::size_t {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Constant>) return d.values.size();
            else if constexpr (std::is_same_v<T, Grid>) return d.arity;
            else return 1;
        },
        def);
}

namespace {

double eval_term(const FieldSpec::AnalyticTerm& t, Pos at) {
    return std::visit(
        [&](const auto& x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, FieldSpec::Gaussian>) {
                double dx = at.x - x.center.x, dy = at.y - x.center.y;
                return x.peak * std::exp(-(dx * dx + dy * dy) / (2 * x.sigma * x.sigma));
            } else if constexpr (std::is_same_v<T, FieldSpec::Linear>) {
                return x.ax * at.x + x.ay * at.y + x.c;
            } else {
                return x.scale * std::hypot(at.x - x.center.x, at.y - x.center.y);
            }
        },
        t);
}

std::size_t clamp_index(double v, std::size_t n) {
    if (!(v > 0)) return 0;  // also catches NaN
    auto i = static_cast<std::size_t>(v);
    return std::min(i, n - 1);
}

}  // namespace

std::vector<double> field_at(const FieldSpec& f, Pos at) {
    return std::visit(
        [&](const auto& d) -> std::vector<double> {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, FieldSpec::Constant>) {
                return d.values;
            } else if constexpr (std::is_same_v<T, FieldSpec::Grid>) {
                // nearest cell by containment, clamped at the borders
                std::size_t col = clamp_index((at.x - d.origin.x) / d.cell, d.cols);
                std::size_t row = clamp_index((at.y - d.origin.y) / d.cell, d.rows);
                auto base = (row * d.cols + col) * d.arity;
                return {d.data.begin() + base, d.data.begin() + base + d.arity};
            } else {
                double sum = 0;
                for (const auto& t : d.terms) sum += eval_term(t, at);
                return {sum};
            }
        },
        f.def);
}

bool in_range(const Sensor& sender, const Sensor& receiver) {
    return distance(sender.position, receiver.position) < sender.radius;
}

}  // namespace csn
