#pragma once

// Sensor fields: the measurable quantity F sampled by sense, plus the
// range geometry used by broadcast. Positions live in the 2D plane with
// Euclidean distance.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "csn/ast.hpp"

namespace csn {

struct FieldSpec {
    struct Constant {
        std::vector<double> values;  // same reading everywhere
    };
    struct Grid {
        Pos origin;
        double cell = 1;
        std::size_t rows = 0, cols = 0, arity = 0;
        std::vector<double> data;  // row-major, arity values per cell
        std::string source;        // file path as written in the declaration
    };
    struct Gaussian {
        Pos center;
        double peak = 0, sigma = 1;
    };
    struct Linear {
        double ax = 0, ay = 0, c = 0;
    };
    struct Radial {
        Pos center;
        double scale = 0;
    };
    using AnalyticTerm = std::variant<Gaussian, Linear, Radial>;
    struct Analytic {
        std::vector<AnalyticTerm> terms;  // summed; arity 1
    };

    std::variant<Constant, Grid, Analytic> def = Constant{{0.0}};

    std::size_t arity() const;
};

// Total and deterministic: every position yields a vector of `arity` measures.
std::vector<double> field_at(const FieldSpec& f, Pos at);

// Strict range predicate: d(sender, receiver) < sender.radius. Asymmetric by
// design; only the emitting sensor's radius matters.
bool in_range(const Sensor& sender, const Sensor& receiver);

}  // namespace csn
