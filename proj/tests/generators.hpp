#pragma once

// Seeded random term generators for property tests.
//
// Terms are generated scope-aware so that pretty-printing followed by
// parsing reproduces the exact same tree: identifiers in value position
// are always variables, method names are labels unless they collide with
// a bound variable (the pools are disjoint, so they never do), binder
// names are distinct within one binding form, and runtime-only battery
// literals are avoided because they print as plain numbers.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "csn/ast.hpp"

namespace testgen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }

    std::size_t below(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
    }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

    // Small decimals; shortest-round-trip printing keeps them exact.
    double number() { return (static_cast<double>(below(8001)) - 4000.0) / 100.0; }

    std::string label() {
        static const char* pool[] = {"alert", "fwd", "logit", "probe", "sample", "tick"};
        return pool[below(std::size(pool))];
    }
    std::string binder_name() {
        static const char* pool[] = {"u", "v", "w", "x", "y", "z"};
        return pool[below(std::size(pool))];
    }

    csn::Value value(int depth) {
        switch (below(depth > 0 ? 8u : 7u)) {
            case 0: return csn::Value{csn::MeasureVal{number()}};
            case 1: return csn::Value{csn::PositionVal{csn::Pos{number(), number()}}};
            case 2: return csn::Value{csn::BoolVal{chance(0.5)}};
            case 3: return csn::Value{csn::UnitVal{}};
            case 4: return csn::Value{csn::SelfAttrVal{static_cast<csn::SelfAttr>(below(3))}};
            case 5: return csn::Value{csn::KeyVal{rng_() | 1}};
            case 6: {
                if (!scope_.empty() && chance(0.7)) return csn::Value{csn::VarRef{pick_bound()}};
                return csn::Value{csn::VarRef{binder_name()}};  // free variable
            }
            default: return csn::Value{csn::ModuleVal{module(depth - 1)}};
        }
    }

    std::vector<csn::Value> args(int depth) {
        std::vector<csn::Value> out;
        std::size_t n = below(3);
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(value(depth));
        return out;
    }

    csn::ProgramPtr invoke(int depth) {
        csn::Target t = chance(0.5) ? csn::Target::This : csn::Target::Net;
        csn::Value method{csn::LabelRef{label()}};
        if (!scope_.empty() && chance(0.2)) method = csn::Value{csn::VarRef{pick_bound()}};
        return csn::make_invoke(t, std::move(method), args(depth));
    }

    csn::ProgramPtr program(int depth) {
        if (depth <= 0 || chance(0.2)) return chance(0.3) ? csn::make_idle() : invoke(0);
        switch (below(7u)) {
            case 0: return csn::make_idle();
            case 1: return invoke(depth);
            case 2: return csn::make_par(program(depth - 1), program(depth - 1));
            case 3: {
                // A parallel composition cannot be the left operand of ';',
                // so regenerate the head until it is something else.
                csn::ProgramPtr head = program(depth - 1);
                while (std::holds_alternative<csn::Par>(head->node)) head = program(depth - 1);
                return csn::make_seq(std::move(head), program(depth - 1));
            }
            case 4: return csn::make_install(value(depth - 1));
            case 5: {
                std::vector<std::string> binders = distinct_binders(1 + below(2));
                push_scope(binders);
                csn::ProgramPtr body = program(depth - 1);
                pop_scope();
                return csn::make_sense(std::move(binders), std::move(body));
            }
            default: {
                csn::BExpr cond = bool_expr(depth - 1);
                return csn::make_if(std::move(cond), program(depth - 1), program(depth - 1));
            }
        }
    }

    // Conditions that survive a print/parse cycle: plain values, negations.
    csn::BExpr bool_expr(int depth) {
        if (depth > 0 && chance(0.3)) return csn::bex_not(bool_expr(depth - 1));
        if (!scope_.empty() && chance(0.3)) return csn::bex_value(csn::Value{csn::VarRef{pick_bound()}});
        return csn::bex_value(csn::Value{csn::BoolVal{chance(0.5)}});
    }

    csn::ModulePtr module(int depth) {
        auto m = std::make_shared<csn::Module>();
        std::size_t n = below(3);
        for (std::size_t i = 0; i < n; ++i) {
            std::string name = label();
            std::vector<std::string> params = distinct_binders(below(3));
            push_scope(params);
            csn::ProgramPtr body = depth > 0 ? program(depth - 1) : csn::make_idle();
            pop_scope();
            m->methods[name] = csn::Abstraction{std::move(params), std::move(body)};
        }
        return m;
    }

private:
    std::vector<std::string> distinct_binders(std::size_t want) {
        std::vector<std::string> pool = {"u", "v", "w", "x", "y", "z"};
        std::shuffle(pool.begin(), pool.end(), rng_);
        pool.resize(std::min(want, pool.size()));
        return pool;
    }

    void push_scope(const std::vector<std::string>& names) {
        for (const auto& n : names) scope_.push_back(n);
        frames_.push_back(names.size());
    }
    void pop_scope() {
        scope_.resize(scope_.size() - frames_.back());
        frames_.pop_back();
    }
    std::string pick_bound() { return scope_[below(scope_.size())]; }

    std::mt19937_64 rng_;
    std::vector<std::string> scope_;
    std::vector<std::size_t> frames_;
};

}  // namespace testgen
