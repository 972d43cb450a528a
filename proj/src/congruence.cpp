#include "csn/congruence.hpp"

#include <algorithm>

#include "csn/printer.hpp"

namespace csn {

namespace {

Value normalize_value(const Value& v) {
    if (const auto* mod = std::get_if<ModuleVal>(&v)) return Value{ModuleVal{normalize(mod->mod)}};
    return v;
}

BExpr normalize_bexpr(const BExpr& e) {
    return std::visit(
        [&](const auto& x) -> BExpr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, BexValue>) {
                return bex_value(normalize_value(x.value));
            } else if constexpr (std::is_same_v<T, BexNot>) {
                return bex_not(normalize_bexpr(*x.operand));
            } else if constexpr (std::is_same_v<T, BexLookup>) {
                return bex_lookup(normalize_value(x.key));
            } else if constexpr (std::is_same_v<T, BexGet>) {
                return bex_get(normalize_value(x.key));
            } else {
                std::vector<Value> args;
                args.reserve(x.args.size());
                for (const auto& a : x.args) args.push_back(normalize_value(a));
                return bex_hash(std::move(args));
            }
        },
        e.node);
}

// Normalizes one atom (non-Par, non-Seq node), recursing into nested programs.
ProgramPtr normalize_atom(const ProgramPtr& p) {
    return std::visit(
        [&](const auto& x) -> ProgramPtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Invoke>) {
                std::vector<Value> args;
                args.reserve(x.args.size());
                for (const auto& a : x.args) args.push_back(normalize_value(a));
                return make_invoke(x.target, normalize_value(x.method), std::move(args));
            } else if constexpr (std::is_same_v<T, Install>) {
                return make_install(normalize_value(x.operand));
            } else if constexpr (std::is_same_v<T, Sense>) {
                return make_sense(x.binders, normalize(x.body));
            } else if constexpr (std::is_same_v<T, If>) {
                return make_if(normalize_bexpr(x.cond), normalize(x.then_branch),
                               normalize(x.else_branch));
            } else if constexpr (std::is_same_v<T, LetIn>) {
                return make_let(x.var, normalize_bexpr(x.expr), normalize(x.body));
            } else {
                return p;  // Idle/Par/Seq never reach here
            }
        },
        p->node);
}

// Collects the atom list of a normalized program treated as one thread.
// A normalized multi-thread program contributes a single Par atom, which
// arises only from method bodies forking ahead of a continuation; no rule
// fires inside it until it collapses.
void append_atoms(const ProgramPtr& normalized, std::vector<ProgramPtr>& out) {
    if (is_idle(*normalized)) return;
    if (const auto* seq = std::get_if<Seq>(&normalized->node)) {
        append_atoms(seq->first, out);
        append_atoms(seq->rest, out);
        return;
    }
    out.push_back(normalized);
}

void collect_threads(const ProgramPtr& normalized, std::vector<ProgramPtr>& out) {
    if (is_idle(*normalized)) return;
    if (const auto* par = std::get_if<Par>(&normalized->node)) {
        collect_threads(par->left, out);
        collect_threads(par->right, out);
        return;
    }
    out.push_back(normalized);
}

ProgramPtr rebuild_seq(const std::vector<ProgramPtr>& atoms) {
    if (atoms.empty()) return make_idle();
    ProgramPtr out = atoms.back();
    for (auto it = atoms.rbegin() + 1; it != atoms.rend(); ++it) out = make_seq(*it, out);
    return out;
}

ProgramPtr rebuild_par(std::vector<ProgramPtr> threads) {
    if (threads.empty()) return make_idle();
    std::sort(threads.begin(), threads.end(), [](const ProgramPtr& a, const ProgramPtr& b) {
        return pretty(a) < pretty(b);
    });
    ProgramPtr out = threads.back();
    for (auto it = threads.rbegin() + 1; it != threads.rend(); ++it) out = make_par(*it, out);
    return out;
}

}  // namespace

ProgramPtr normalize(const ProgramPtr& p) {
    return std::visit(
        [&](const auto& x) -> ProgramPtr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Idle>) {
                return make_idle();
            } else if constexpr (std::is_same_v<T, Par>) {
                std::vector<ProgramPtr> threads;
                collect_threads(normalize(x.left), threads);
                collect_threads(normalize(x.right), threads);
                return rebuild_par(std::move(threads));
            } else if constexpr (std::is_same_v<T, Seq>) {
                std::vector<ProgramPtr> atoms;
                append_atoms(normalize(x.first), atoms);
                append_atoms(normalize(x.rest), atoms);
                return rebuild_seq(atoms);
            } else {
                return normalize_atom(p);
            }
        },
        p->node);
}

std::vector<std::vector<ProgramPtr>> canonical_threads(const ProgramPtr& normalized) {
    std::vector<ProgramPtr> threads;
    collect_threads(normalized, threads);
    std::vector<std::vector<ProgramPtr>> out;
    out.reserve(threads.size());
    for (const auto& t : threads) {
        std::vector<ProgramPtr> atoms;
        append_atoms(t, atoms);
        out.push_back(std::move(atoms));
    }
    return out;
}

CanonicalProgram normalize_program(const ProgramPtr& p) {
    return CanonicalProgram{canonical_threads(normalize(p))};
}

bool operator==(const CanonicalProgram& a, const CanonicalProgram& b) {
    if (a.threads.size() != b.threads.size()) return false;
    for (std::size_t i = 0; i < a.threads.size(); ++i) {
        if (a.threads[i].size() != b.threads[i].size()) return false;
        for (std::size_t j = 0; j < a.threads[i].size(); ++j)
            if (!program_eq(a.threads[i][j], b.threads[i][j])) return false;
    }
    return true;
}

ModulePtr normalize(const ModulePtr& m) {
    Module out;
    for (const auto& [label, abs] : m->methods)
        out.methods.emplace(label, Abstraction{abs.params, normalize(abs.body)});
    return std::make_shared<const Module>(std::move(out));
}

Sensor canonical_sensor(const Sensor& s) {
    Sensor out = s;
    out.program = normalize(s.program);
    out.module = normalize(s.module);
    for (auto& inner : out.bag) inner = canonical_sensor(inner);
    std::sort(out.bag.begin(), out.bag.end(), [](const Sensor& a, const Sensor& b) {
        return pretty(a) < pretty(b);
    });
    Heap h = out.heap;
    for (auto& [k, v] : h.entries)
        if (const auto* mod = std::get_if<ModuleVal>(&v)) v = Value{ModuleVal{normalize(mod->mod)}};
    out.heap = std::move(h);
    return out;
}

Network canonical_network(const Network& n, const EnergyConfig& cfg) {
    Network out;
    out.expired = n.expired;
    Energy threshold = cfg.exhaustion_threshold();
    for (const auto& s : n.sensors) {
        // a sensor mid-broadcast is not in plain form, so exhaustion does
        // not rewrite it to off until its bag empties
        if (s.bag.empty() && s.battery < threshold) continue;
        out.sensors.push_back(canonical_sensor(s));
    }
    std::sort(out.sensors.begin(), out.sensors.end(), [](const Sensor& a, const Sensor& b) {
        return pretty(a) + "\x01" + pretty_attrs(a) < pretty(b) + "\x01" + pretty_attrs(b);
    });
    return out;
}

std::string canonical_print(const Network& n, const EnergyConfig& cfg) {
    Network canon = canonical_network(n, cfg);
    std::string out = pretty(canon);
    for (const auto& s : canon.sensors) out += "\n" + pretty_attrs(s);
    return out;
}

std::uint64_t canonical_hash(const Network& n, const EnergyConfig& cfg) {
    return fnv1a64(canonical_print(n, cfg));
}

bool congruent(const Network& a, const Network& b, const EnergyConfig& cfg) {
    return canonical_print(a, cfg) == canonical_print(b, cfg);
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace csn
