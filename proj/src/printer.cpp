#include "csn/printer.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace csn {

std::string double_str(double d) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    (void)ec;
    return std::string(buf, end);
}

namespace {

// Where a subprogram sits in the surrounding text. Determines whether it
// needs parentheses to re-parse with the same shape: ';' binds tighter than
// '|', and sense/if/let swallow everything to their right.
enum class Ctx {
    Tail,     // rightmost position, nothing follows
    ParLeft,  // a '|' follows
    SeqHead,  // a ';' follows
    SeqRest,  // continuation of a sequence (still rightmost overall)
};

void print_program(std::ostringstream& out, const Program& p, Ctx ctx);

void print_module(std::ostringstream& out, const Module& m) {
    if (m.methods.empty()) {
        out << "{}";
        return;
    }
    out << "{";
    bool first = true;
    for (const auto& [label, abs] : m.methods) {
        out << (first ? " " : "  ") << label << " = (";
        for (std::size_t i = 0; i < abs.params.size(); ++i) {
            if (i) out << ", ";
            out << abs.params[i];
        }
        out << ") ";
        print_program(out, *abs.body, Ctx::Tail);
        first = false;
    }
    out << " }";
}

void print_value(std::ostringstream& out, const Value& v) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, VarRef> || std::is_same_v<T, LabelRef>) {
                out << x.name;
            } else if constexpr (std::is_same_v<T, MeasureVal>) {
                out << double_str(x.value);
            } else if constexpr (std::is_same_v<T, PositionVal>) {
                out << "(" << double_str(x.pos.x) << ", " << double_str(x.pos.y) << ")";
            } else if constexpr (std::is_same_v<T, BatteryVal>) {
                out << x.amount.str();
            } else if constexpr (std::is_same_v<T, BoolVal>) {
                out << (x.value ? "true" : "false");
            } else if constexpr (std::is_same_v<T, ModuleVal>) {
                print_module(out, *x.mod);
            } else if constexpr (std::is_same_v<T, KeyVal>) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "key#%llx", static_cast<unsigned long long>(x.id));
                out << buf;
            } else if constexpr (std::is_same_v<T, SelfAttrVal>) {
                out << (x.attr == SelfAttr::Position ? "p" : x.attr == SelfAttr::Radius ? "r" : "b");
            } else {
                out << "_";
            }
        },
        v);
}

void print_bexpr(std::ostringstream& out, const BExpr& e) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, BexValue>) {
                print_value(out, x.value);
            } else if constexpr (std::is_same_v<T, BexNot>) {
                out << "!";
                print_bexpr(out, *x.operand);
            } else if constexpr (std::is_same_v<T, BexLookup>) {
                out << "lookup[";
                print_value(out, x.key);
                out << "]";
            } else if constexpr (std::is_same_v<T, BexGet>) {
                out << "get[";
                print_value(out, x.key);
                out << "]";
            } else {
                out << "hash[";
                for (std::size_t i = 0; i < x.args.size(); ++i) {
                    if (i) out << ", ";
                    print_value(out, x.args[i]);
                }
                out << "]";
            }
        },
        e.node);
}

bool swallows_right(const Program& p) {
    return std::holds_alternative<Sense>(p.node) || std::holds_alternative<If>(p.node) ||
           std::holds_alternative<LetIn>(p.node);
}

bool needs_parens(const Program& p, Ctx ctx) {
    switch (ctx) {
        case Ctx::Tail:
            return false;
        case Ctx::ParLeft:
            return std::holds_alternative<Par>(p.node) || swallows_right(p);
        case Ctx::SeqHead:
            return std::holds_alternative<Par>(p.node) || std::holds_alternative<Seq>(p.node) ||
                   swallows_right(p);
        case Ctx::SeqRest:
            return std::holds_alternative<Par>(p.node);
    }
    return false;
}

void print_program(std::ostringstream& out, const Program& p, Ctx ctx) {
    if (needs_parens(p, ctx)) {
        out << "(";
        print_program(out, p, Ctx::Tail);
        out << ")";
        return;
    }
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Idle>) {
                out << "idle";
            } else if constexpr (std::is_same_v<T, Par>) {
                print_program(out, *x.left, Ctx::ParLeft);
                out << " | ";
                print_program(out, *x.right, ctx == Ctx::Tail || ctx == Ctx::SeqRest ? Ctx::Tail : ctx);
            } else if constexpr (std::is_same_v<T, Seq>) {
                print_program(out, *x.first, Ctx::SeqHead);
                out << "; ";
                print_program(out, *x.rest, ctx == Ctx::ParLeft ? Ctx::ParLeft : Ctx::SeqRest);
            } else if constexpr (std::is_same_v<T, Invoke>) {
                out << (x.target == Target::This ? "this." : "net.");
                print_value(out, x.method);
                out << "[";
                for (std::size_t i = 0; i < x.args.size(); ++i) {
                    if (i) out << ", ";
                    print_value(out, x.args[i]);
                }
                out << "]";
            } else if constexpr (std::is_same_v<T, Install>) {
                out << "install ";
                print_value(out, x.operand);
            } else if constexpr (std::is_same_v<T, Sense>) {
                out << "sense ";
                if (x.binders.size() == 1) {
                    out << x.binders[0];
                } else {
                    out << "(";
                    for (std::size_t i = 0; i < x.binders.size(); ++i) {
                        if (i) out << ", ";
                        out << x.binders[i];
                    }
                    out << ")";
                }
                out << " in ";
                print_program(out, *x.body, Ctx::Tail);
            } else if constexpr (std::is_same_v<T, If>) {
                out << "if ";
                print_bexpr(out, x.cond);
                out << " then ";
                // the else keyword terminates the then-branch, so no parens needed
                print_program(out, *x.then_branch, Ctx::Tail);
                out << " else ";
                print_program(out, *x.else_branch, Ctx::Tail);
            } else {
                out << "let " << x.var << " = ";
                print_bexpr(out, x.expr);
                out << " in ";
                print_program(out, *x.body, Ctx::Tail);
            }
        },
        p.node);
}

void print_sensor(std::ostringstream& out, const Sensor& s) {
    out << "[";
    print_program(out, *s.program, Ctx::Tail);
    out << ", ";
    print_module(out, *s.module);
    out << "] " << s.name;
    if (!s.bag.empty()) {
        out << " {";
        for (std::size_t i = 0; i < s.bag.size(); ++i) {
            if (i) out << ", ";
            print_sensor(out, s.bag[i]);
        }
        out << "}";
    }
}

void collect_attr_lines(const Sensor& s, std::ostringstream& out) {
    out << "@" << s.name << " position=(" << double_str(s.position.x) << ", "
        << double_str(s.position.y) << ") radius=" << double_str(s.radius)
        << " battery=" << s.battery.str();
    if (!s.heap.entries.empty() || s.heap.nonce != 0) {
        out << " heap={";
        bool first = true;
        for (const auto& [k, v] : s.heap.entries) {
            if (!first) out << ", ";
            char buf[32];
            std::snprintf(buf, sizeof(buf), "key#%llx: ", static_cast<unsigned long long>(k));
            out << buf;
            print_value(out, v);
            first = false;
        }
        out << "}";
        if (s.heap.nonce != 0) out << " nonce=" << s.heap.nonce;
    }
    out << "\n";
    for (const auto& inner : s.bag) collect_attr_lines(inner, out);
}

}  // namespace

std::string pretty(const Value& v) {
    std::ostringstream out;
    print_value(out, v);
    return out.str();
}

std::string pretty(const BExpr& e) {
    std::ostringstream out;
    print_bexpr(out, e);
    return out.str();
}

std::string pretty(const ProgramPtr& p) {
    std::ostringstream out;
    print_program(out, *p, Ctx::Tail);
    return out.str();
}

std::string pretty(const Module& m) {
    std::ostringstream out;
    print_module(out, m);
    return out.str();
}

std::string pretty(const Sensor& s) {
    std::ostringstream out;
    print_sensor(out, s);
    return out.str();
}

std::string pretty_attrs(const Sensor& s) {
    std::ostringstream out;
    collect_attr_lines(s, out);
    auto text = out.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

std::string pretty(const Network& n) {
    std::ostringstream out;
    if (n.sensors.empty()) {
        out << "off";
    } else {
        for (std::size_t i = 0; i < n.sensors.size(); ++i) {
            if (i) out << " | ";
            print_sensor(out, n.sensors[i]);
        }
    }
    return out.str();
}

std::string pretty(const FieldSpec& f) {
    std::ostringstream out;
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, FieldSpec::Constant>) {
                out << "constant [";
                for (std::size_t i = 0; i < d.values.size(); ++i) {
                    if (i) out << ", ";
                    out << double_str(d.values[i]);
                }
                out << "]";
            } else if constexpr (std::is_same_v<T, FieldSpec::Grid>) {
                out << "grid origin=(" << double_str(d.origin.x) << ", " << double_str(d.origin.y)
                    << ") cell=" << double_str(d.cell) << " file=\"" << d.source << "\"";
            } else {
                out << "analytic ";
                for (std::size_t i = 0; i < d.terms.size(); ++i) {
                    if (i) out << " + ";
                    std::visit(
                        [&](const auto& t) {
                            using U = std::decay_t<decltype(t)>;
                            if constexpr (std::is_same_v<U, FieldSpec::Gaussian>) {
                                out << "gaussian(" << double_str(t.center.x) << ", "
                                    << double_str(t.center.y) << ", " << double_str(t.peak) << ", "
                                    << double_str(t.sigma) << ")";
                            } else if constexpr (std::is_same_v<U, FieldSpec::Linear>) {
                                out << "linear(" << double_str(t.ax) << ", " << double_str(t.ay)
                                    << ", " << double_str(t.c) << ")";
                            } else {
                                out << "radial(" << double_str(t.center.x) << ", "
                                    << double_str(t.center.y) << ", " << double_str(t.scale) << ")";
                            }
                        },
                        d.terms[i]);
                }
            }
        },
        f.def);
    return out.str();
}

std::string pretty_file(const Network& n, const FieldSpec& f, bool include_field) {
    std::ostringstream out;
    out << pretty(n) << "\n";
    for (const auto& s : n.sensors) {
        auto attrs = pretty_attrs(s);
        if (!attrs.empty()) out << attrs << "\n";
    }
    if (include_field) out << "@field " << pretty(f) << "\n";
    return out.str();
}

}  // namespace csn
