#include "csn/names.hpp"

#include <algorithm>
#include <cctype>

namespace csn {

namespace {

void collect(const Value& v, std::set<std::string>& out);
void collect(const BExpr& e, std::set<std::string>& out);
void collect(const ProgramPtr& p, std::set<std::string>& out, std::set<std::string>& bound);

void collect(const Value& v, std::set<std::string>& out) {
    if (const auto* var = std::get_if<VarRef>(&v)) {
        out.insert(var->name);
    } else if (const auto* mod = std::get_if<ModuleVal>(&v)) {
        auto names = free_names(*mod->mod);
        out.insert(names.begin(), names.end());
    }
}

void collect(const BExpr& e, std::set<std::string>& out) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, BexValue>) collect(x.value, out);
            else if constexpr (std::is_same_v<T, BexNot>) collect(*x.operand, out);
            else if constexpr (std::is_same_v<T, BexLookup> || std::is_same_v<T, BexGet>) collect(x.key, out);
            else
                for (const auto& a : x.args) collect(a, out);
        },
        e.node);
}

void collect_scoped(const Value& v, std::set<std::string>& out, const std::set<std::string>& bound) {
    std::set<std::string> names;
    collect(v, names);
    for (const auto& n : names)
        if (!bound.count(n)) out.insert(n);
}

void collect_scoped(const BExpr& e, std::set<std::string>& out, const std::set<std::string>& bound) {
    std::set<std::string> names;
    collect(e, names);
    for (const auto& n : names)
        if (!bound.count(n)) out.insert(n);
}

void collect(const ProgramPtr& p, std::set<std::string>& out, std::set<std::string>& bound) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Idle>) {
            } else if constexpr (std::is_same_v<T, Par> ) {
                collect(x.left, out, bound);
                collect(x.right, out, bound);
            } else if constexpr (std::is_same_v<T, Seq>) {
                collect(x.first, out, bound);
                collect(x.rest, out, bound);
            } else if constexpr (std::is_same_v<T, Invoke>) {
                collect_scoped(x.method, out, bound);
                for (const auto& a : x.args) collect_scoped(a, out, bound);
            } else if constexpr (std::is_same_v<T, Install>) {
                collect_scoped(x.operand, out, bound);
            } else if constexpr (std::is_same_v<T, Sense>) {
                std::set<std::string> inner = bound;
                inner.insert(x.binders.begin(), x.binders.end());
                collect(x.body, out, inner);
            } else if constexpr (std::is_same_v<T, If>) {
                collect_scoped(x.cond, out, bound);
                collect(x.then_branch, out, bound);
                collect(x.else_branch, out, bound);
            } else {
                collect_scoped(x.expr, out, bound);
                std::set<std::string> inner = bound;
                inner.insert(x.var);
                collect(x.body, out, inner);
            }
        },
        p->node);
}

}  // namespace

std::set<std::string> free_names(const Value& v) {
    std::set<std::string> out;
    collect(v, out);
    return out;
}

std::set<std::string> free_names(const BExpr& e) {
    std::set<std::string> out;
    collect(e, out);
    return out;
}

std::set<std::string> free_names(const ProgramPtr& p) {
    std::set<std::string> out, bound;
    collect(p, out, bound);
    return out;
}

std::set<std::string> free_names(const Abstraction& a) {
    std::set<std::string> body = free_names(a.body);
    for (const auto& param : a.params) body.erase(param);
    return body;
}

std::set<std::string> free_names(const Module& m) {
    std::set<std::string> out;
    for (const auto& [label, abs] : m.methods) {
        auto fn = free_names(abs);
        out.insert(fn.begin(), fn.end());
    }
    return out;
}

std::set<std::string> free_names(const Sensor& s) {
    auto out = free_names(s.program);
    auto mod = free_names(*s.module);
    out.insert(mod.begin(), mod.end());
    return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    if (!avoid.count(base)) return base;
    std::string stem = base;
    while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
    if (stem.empty()) stem = "x";
    for (int i = 1;; ++i) {
        std::string candidate = stem + std::to_string(i);
        if (!avoid.count(candidate)) return candidate;
    }
}

namespace {

Subst restrict_map(const Subst& subst, const std::vector<std::string>& binders) {
    Subst out = subst;
    for (const auto& b : binders) out.erase(b);
    return out;
}

std::set<std::string> replacement_names(const Subst& subst) {
    std::set<std::string> out;
    for (const auto& [name, v] : subst) {
        auto fn = free_names(v);
        out.insert(fn.begin(), fn.end());
    }
    return out;
}

// Renames binders that would capture free names of the replacement values.
// Returns the fresh binder list and extends `inner` with the renamings.
std::vector<std::string> hygienic_binders(const std::vector<std::string>& binders, Subst& inner,
                                          const ProgramPtr& body) {
    std::set<std::string> danger = replacement_names(inner);
    bool clash = std::any_of(binders.begin(), binders.end(),
                             [&](const auto& b) { return danger.count(b) != 0; });
    if (!clash) return binders;

    std::set<std::string> avoid = danger;
    auto body_free = free_names(body);
    avoid.insert(body_free.begin(), body_free.end());
    for (const auto& [k, v] : inner) avoid.insert(k);

    std::vector<std::string> renamed;
    for (const auto& b : binders) {
        if (danger.count(b)) {
            std::string nb = fresh_name(b, avoid);
            avoid.insert(nb);
            inner[b] = Value{VarRef{nb}};
            renamed.push_back(nb);
        } else {
            avoid.insert(b);
            renamed.push_back(b);
        }
    }
    return renamed;
}

}  // namespace

Value substitute(const Value& v, const Subst& subst) {
    if (subst.empty()) return v;
    if (const auto* var = std::get_if<VarRef>(&v)) {
        auto it = subst.find(var->name);
        return it != subst.end() ? it->second : v;
    }
    if (const auto* mod = std::get_if<ModuleVal>(&v)) {
        return Value{ModuleVal{substitute(mod->mod, subst)}};
    }
    return v;
}

BExpr substitute(const BExpr& e, const Subst& subst) {
    return std::visit(
        [&](const auto& x) -> BExpr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, BexValue>) {
                return bex_value(substitute(x.value, subst));
            } else if constexpr (std::is_same_v<T, BexNot>) {
                return bex_not(substitute(*x.operand, subst));
            } else if constexpr (std::is_same_v<T, BexLookup>) {
                return bex_lookup(substitute(x.key, subst));
            } else if constexpr (std::is_same_v<T, BexGet>) {
                return bex_get(substitute(x.key, subst));
            } else {
                std::vector<Value> args;
                args.reserve(x.args.size());
                for (const auto& a : x.args) args.push_back(substitute(a, subst));
                return bex_hash(std::move(args));
            }
        },
        e.node);
}

ProgramPtr substitute(const ProgramPtr& p, const Subst& subst) {
    if (subst.empty()) return p;
    return std::visit(
        [&](const auto& x) -> ProgramPtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Idle>) {
                return p;
            } else if constexpr (std::is_same_v<T, Par>) {
                return make_par(substitute(x.left, subst), substitute(x.right, subst));
            } else if constexpr (std::is_same_v<T, Seq>) {
                return make_seq(substitute(x.first, subst), substitute(x.rest, subst));
            } else if constexpr (std::is_same_v<T, Invoke>) {
                std::vector<Value> args;
                args.reserve(x.args.size());
                for (const auto& a : x.args) args.push_back(substitute(a, subst));
                return make_invoke(x.target, substitute(x.method, subst), std::move(args));
            } else if constexpr (std::is_same_v<T, Install>) {
                return make_install(substitute(x.operand, subst));
            } else if constexpr (std::is_same_v<T, Sense>) {
                Subst inner = restrict_map(subst, x.binders);
                if (inner.empty()) return p;
                auto binders = hygienic_binders(x.binders, inner, x.body);
                return make_sense(std::move(binders), substitute(x.body, inner));
            } else if constexpr (std::is_same_v<T, If>) {
                return make_if(substitute(x.cond, subst), substitute(x.then_branch, subst),
                               substitute(x.else_branch, subst));
            } else {
                BExpr expr = substitute(x.expr, subst);
                Subst inner = restrict_map(subst, {x.var});
                if (inner.empty()) return make_let(x.var, std::move(expr), x.body);
                auto binders = hygienic_binders({x.var}, inner, x.body);
                return make_let(binders[0], std::move(expr), substitute(x.body, inner));
            }
        },
        p->node);
}

ModulePtr substitute(const ModulePtr& m, const Subst& subst) {
    if (subst.empty()) return m;
    Module out;
    for (const auto& [label, abs] : m->methods) {
        Subst inner = restrict_map(subst, abs.params);
        if (inner.empty()) {
            out.methods.emplace(label, abs);
            continue;
        }
        auto params = hygienic_binders(abs.params, inner, abs.body);
        out.methods.emplace(label, Abstraction{std::move(params), substitute(abs.body, inner)});
    }
    return std::make_shared<const Module>(std::move(out));
}

}  // namespace csn
