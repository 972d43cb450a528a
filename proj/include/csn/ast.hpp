#pragma once

// Abstract syntax for sensor-network terms: values, programs, modules,
// sensors and networks. Program nodes are immutable and shared; rewriting
// builds fresh nodes.
//
// Identifier namespaces: labels name methods and appear after '.' or as
// definition heads; variables are binder-introduced (method parameters,
// sense/let binders). The reserved names p, r and b denote the executing
// sensor's position, radius and battery; they are resolved when a step
// fires and are never substituted or bound.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "csn/energy.hpp"

namespace csn {

struct Pos {
    double x = 0;
    double y = 0;
    friend bool operator==(const Pos&, const Pos&) = default;
};

double distance(Pos a, Pos b);

enum class SelfAttr { Position, Radius, Battery };
enum class Target { This, Net };

struct Module;
class Program;
using ProgramPtr = std::shared_ptr<const Program>;
using ModulePtr = std::shared_ptr<const Module>;

// ---- values ----------------------------------------------------------

struct VarRef {
    std::string name;
    friend bool operator==(const VarRef&, const VarRef&) = default;
};
struct LabelRef {
    std::string name;
    friend bool operator==(const LabelRef&, const LabelRef&) = default;
};
struct MeasureVal {
    double value = 0;
    friend bool operator==(const MeasureVal&, const MeasureVal&) = default;
};
struct PositionVal {
    Pos pos;
    friend bool operator==(const PositionVal&, const PositionVal&) = default;
};
struct BatteryVal {
    Energy amount;
    friend bool operator==(const BatteryVal&, const BatteryVal&) = default;
};
struct BoolVal {
    bool value = false;
    friend bool operator==(const BoolVal&, const BoolVal&) = default;
};
struct ModuleVal {
    ModulePtr mod;  // non-null
    friend bool operator==(const ModuleVal& a, const ModuleVal& b);
};
struct KeyVal {
    std::uint64_t id = 0;  // opaque, runtime-generated
    friend bool operator==(const KeyVal&, const KeyVal&) = default;
};
struct SelfAttrVal {
    SelfAttr attr = SelfAttr::Position;
    friend bool operator==(const SelfAttrVal&, const SelfAttrVal&) = default;
};
struct UnitVal {
    friend bool operator==(const UnitVal&, const UnitVal&) = default;
};

using Value = std::variant<VarRef, LabelRef, MeasureVal, PositionVal, BatteryVal,
                           BoolVal, ModuleVal, KeyVal, SelfAttrVal, UnitVal>;

// ---- builtin expressions (let/if right-hand sides) --------------------
//
// The state extension allows let x = e in P and if e then .. where e reads
// the sensor heap. In the core language a condition is a plain value.

struct BExpr;
using BExprPtr = std::shared_ptr<const BExpr>;

struct BexValue {
    Value value;
};
struct BexNot {
    BExprPtr operand;
};
struct BexLookup {
    Value key;
};
struct BexGet {
    Value key;
};
struct BexHash {
    std::vector<Value> args;
};

struct BExpr {
    std::variant<BexValue, BexNot, BexLookup, BexGet, BexHash> node;
};

bool operator==(const BExpr& a, const BExpr& b);
inline bool operator!=(const BExpr& a, const BExpr& b) { return !(a == b); }

BExpr bex_value(Value v);
BExpr bex_not(BExpr e);
BExpr bex_lookup(Value key);
BExpr bex_get(Value key);
BExpr bex_hash(std::vector<Value> args);

// ---- programs ---------------------------------------------------------

struct Idle {};
struct Par {
    ProgramPtr left, right;
};
struct Seq {
    ProgramPtr first, rest;
};
struct Invoke {
    Target target = Target::This;
    Value method;  // LabelRef or VarRef in well-formed programs
    std::vector<Value> args;
};
struct Install {
    Value operand;
};
struct Sense {
    std::vector<std::string> binders;
    ProgramPtr body;
};
struct If {
    BExpr cond;
    ProgramPtr then_branch, else_branch;
};
struct LetIn {
    std::string var;
    BExpr expr;
    ProgramPtr body;
};

class Program {
public:
    using Node = std::variant<Idle, Par, Seq, Invoke, Install, Sense, If, LetIn>;
    explicit Program(Node n) : node(std::move(n)) {}
    Node node;
};

bool operator==(const Program& a, const Program& b);
inline bool operator!=(const Program& a, const Program& b) { return !(a == b); }
bool program_eq(const ProgramPtr& a, const ProgramPtr& b);

ProgramPtr make_idle();
ProgramPtr make_par(ProgramPtr a, ProgramPtr b);
ProgramPtr make_seq(ProgramPtr a, ProgramPtr b);
ProgramPtr make_invoke(Target t, Value method, std::vector<Value> args);
ProgramPtr make_install(Value operand);
ProgramPtr make_sense(std::vector<std::string> binders, ProgramPtr body);
ProgramPtr make_if(BExpr cond, ProgramPtr t, ProgramPtr e);
ProgramPtr make_let(std::string var, BExpr expr, ProgramPtr body);

inline bool is_idle(const Program& p) { return std::holds_alternative<Idle>(p.node); }
inline bool is_idle(const ProgramPtr& p) { return p && is_idle(*p); }

// ---- modules ----------------------------------------------------------

struct Abstraction {
    std::vector<std::string> params;
    ProgramPtr body;
};
bool operator==(const Abstraction& a, const Abstraction& b);
inline bool operator!=(const Abstraction& a, const Abstraction& b) { return !(a == b); }

struct Module {
    std::map<std::string, Abstraction> methods;  // label -> abstraction
};
bool operator==(const Module& a, const Module& b);
inline bool operator!=(const Module& a, const Module& b) { return !(a == b); }

// install semantics: methods of `update` replace/extend those of `base`.
ModulePtr module_merge(const ModulePtr& base, const ModulePtr& update);

// ---- sensors and networks ---------------------------------------------

struct Heap {
    std::map<std::uint64_t, Value> entries;  // key id -> stored value
    std::uint64_t nonce = 0;                 // monotone counter for keyed hashing
};
bool operator==(const Heap& a, const Heap& b);

struct Sensor {
    std::string name;  // identity within a network
    ProgramPtr program;
    ModulePtr module;
    Pos position;
    double radius = 0;
    Energy battery;
    std::vector<Sensor> bag;  // sensors captured by this sensor's broadcast
    Heap heap;                // state extension; empty when disabled
};

struct ExpiredSensor {
    std::string name;
    Energy residual;  // battery left when the sensor switched off
};

struct Network {
    std::vector<Sensor> sensors;         // live, top-level
    std::vector<ExpiredSensor> expired;  // bookkeeping for energy accounting
};

const Sensor* find_sensor(const Network& n, const std::string& name);
Sensor* find_sensor(Network& n, const std::string& name);

// Reserved identifiers and keywords; rejected as binders and definition heads.
bool is_reserved_name(const std::string& name);
bool is_keyword(const std::string& name);

}  // namespace csn
