#include "csn/ast.hpp"

#include <cmath>

namespace csn {

double distance(Pos a, Pos b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

bool operator==(const ModuleVal& a, const ModuleVal& b) {
    if (a.mod == b.mod) return true;
    if (!a.mod || !b.mod) return false;
    return *a.mod == *b.mod;
}

bool operator==(const BExpr& a, const BExpr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, BexValue>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, BexNot>) {
                return *x.operand == *y.operand;
            } else if constexpr (std::is_same_v<T, BexLookup>) {
                return x.key == y.key;
            } else if constexpr (std::is_same_v<T, BexGet>) {
                return x.key == y.key;
            } else {
                return x.args == y.args;
            }
        },
        a.node);
}

BExpr bex_value(Value v) { return BExpr{BexValue{std::move(v)}}; }
BExpr bex_not(BExpr e) { return BExpr{BexNot{std::make_shared<const BExpr>(std::move(e))}}; }
BExpr bex_lookup(Value key) { return BExpr{BexLookup{std::move(key)}}; }
BExpr bex_get(Value key) { return BExpr{BexGet{std::move(key)}}; }
BExpr bex_hash(std::vector<Value> args) { return BExpr{BexHash{std::move(args)}}; }

bool program_eq(const ProgramPtr& a, const ProgramPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

bool operator==(const Program& a, const Program& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Idle>) {
                return true;
            } else if constexpr (std::is_same_v<T, Par>) {
                return program_eq(x.left, y.left) && program_eq(x.right, y.right);
            } else if constexpr (std::is_same_v<T, Seq>) {
                return program_eq(x.first, y.first) && program_eq(x.rest, y.rest);
            } else if constexpr (std::is_same_v<T, Invoke>) {
                return x.target == y.target && x.method == y.method && x.args == y.args;
            } else if constexpr (std::is_same_v<T, Install>) {
                return x.operand == y.operand;
            } else if constexpr (std::is_same_v<T, Sense>) {
                return x.binders == y.binders && program_eq(x.body, y.body);
            } else if constexpr (std::is_same_v<T, If>) {
                return x.cond == y.cond && program_eq(x.then_branch, y.then_branch) &&
                       program_eq(x.else_branch, y.else_branch);
            } else {
                return x.var == y.var && x.expr == y.expr && program_eq(x.body, y.body);
            }
        },
        a.node);
}

ProgramPtr make_idle() {
    static const ProgramPtr idle = std::make_shared<const Program>(Program::Node{Idle{}});
    return idle;
}
ProgramPtr make_par(ProgramPtr a, ProgramPtr b) {
    return std::make_shared<const Program>(Program::Node{Par{std::move(a), std::move(b)}});
}
ProgramPtr make_seq(ProgramPtr a, ProgramPtr b) {
    return std::make_shared<const Program>(Program::Node{Seq{std::move(a), std::move(b)}});
}
ProgramPtr make_invoke(Target t, Value method, std::vector<Value> args) {
    return std::make_shared<const Program>(Program::Node{Invoke{t, std::move(method), std::move(args)}});
}
ProgramPtr make_install(Value operand) {
    return std::make_shared<const Program>(Program::Node{Install{std::move(operand)}});
}
ProgramPtr make_sense(std::vector<std::string> binders, ProgramPtr body) {
    return std::make_shared<const Program>(Program::Node{Sense{std::move(binders), std::move(body)}});
}
ProgramPtr make_if(BExpr cond, ProgramPtr t, ProgramPtr e) {
    return std::make_shared<const Program>(Program::Node{If{std::move(cond), std::move(t), std::move(e)}});
}
ProgramPtr make_let(std::string var, BExpr expr, ProgramPtr body) {
    return std::make_shared<const Program>(Program::Node{LetIn{std::move(var), std::move(expr), std::move(body)}});
}

bool operator==(const Abstraction& a, const Abstraction& b) {
    return a.params == b.params && program_eq(a.body, b.body);
}

bool operator==(const Module& a, const Module& b) {
    return a.methods == b.methods;
}

ModulePtr module_merge(const ModulePtr& base, const ModulePtr& update) {
    Module merged = base ? *base : Module{};
    for (const auto& [label, abs] : update->methods) merged.methods[label] = abs;
    return std::make_shared<const Module>(std::move(merged));
}

bool operator==(const Heap& a, const Heap& b) {
    return a.entries == b.entries && a.nonce == b.nonce;
}

const Sensor* find_sensor(const Network& n, const std::string& name) {
    for (const auto& s : n.sensors)
        if (s.name == name) return &s;
    return nullptr;
}

Sensor* find_sensor(Network& n, const std::string& name) {
    for (auto& s : n.sensors)
        if (s.name == name) return &s;
    return nullptr;
}

bool is_reserved_name(const std::string& name) {
    return name == "p" || name == "r" || name == "b" || name == "this" || name == "net" ||
           name == "_";
}

bool is_keyword(const std::string& name) {
    return name == "idle" || name == "install" || name == "sense" || name == "in" ||
           name == "if" || name == "then" || name == "else" || name == "let" ||
           name == "true" || name == "false" || name == "off" || name == "this" ||
           name == "net";
}

}  // namespace csn
