#pragma once

// Small-step reduction engine. A step is chosen by picking one enabled
// redex and applying it:
//
//   Method            this.l[v] runs the module body, cost c_in
//   NoMethod          this.l[v] with l undefined: active wait, free
//   BroadcastDeliver  net.l[v] captures one in-range sensor into the bag
//   Release           net.l[v] completes: bag emptied back, cost c_out
//   Install           install M merges methods, cost c_in
//   Sense             sense binds the field at the sensor, cost c_in
//   Cond              if picks a branch, cost c_in
//   Let               let binds a builtin expression (state ext), cost c_in
//   Event             environment fires this.handle[F(p)], free
//
// A sensor holding a nonempty bag is mid-broadcast: only deliveries and the
// release act on it, and captured sensors take no steps at all. After every
// application, any plain sensor whose battery cannot fund one more step
// (battery < max(c_in, c_out)) switches off and is garbage collected into
// the expired list.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csn/ast.hpp"
#include "csn/congruence.hpp"
#include "csn/field.hpp"

namespace csn {

enum class RuleKind { Method, NoMethod, BroadcastDeliver, Release, Install, Sense, Cond, Event, Let };

const char* rule_name(RuleKind k);                       // "method", "broadcast", ...
std::optional<RuleKind> rule_from_name(const std::string& name);

enum class DeliveryPolicy {
    AllInRange,        // release only after every capturable in-range sensor is in the bag
    Nondeterministic,  // release any time; messages may miss sensors
};

struct Features {
    bool state = false;       // heaps, put/get/lookup/hash, let
    bool events = false;      // external stimuli via fire_event
    bool hash_nonce = false;  // hash[] keys made distinct per call
};

class EngineError : public std::runtime_error {
public:
    enum class Kind { NotEnabled, ArityMismatch, DispatchError, UnknownSensor, ConfigError };

    EngineError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind(kind) {}
    Kind kind;
};

struct Redex {
    RuleKind rule = RuleKind::Method;
    std::string subject;     // acting sensor
    std::size_t thread = 0;  // index into the subject's canonical thread list
    std::string object;      // receiver, BroadcastDeliver only
    std::string label;       // method label involved, when there is one
};

struct StepLabel {
    RuleKind rule = RuleKind::Method;
    std::string subject;
    std::size_t thread = 0;  // index of the fired thread in the subject's canonical list
    std::string object;
    Energy energy;
    std::string description;
};

struct LogEntry {
    std::string intrinsic;
    std::vector<Value> args;
    std::size_t step = 0;
    std::string sensor;
};
using SinkLog = std::vector<LogEntry>;

std::string log_entry_str(const LogEntry& e);

// Deterministic enumeration over a canonical network: sensors in canonical
// order, threads in index order, receivers in canonical order. Throws
// DispatchError if an enabled head's method position is unusable.
std::vector<Redex> enabled_redexes(const Network& n, const EnergyConfig& cfg,
                                   DeliveryPolicy policy, const Features& features);

struct ApplyResult {
    Network network;
    StepLabel label;
    std::optional<LogEntry> log;  // intrinsic calls append one entry
};

ApplyResult apply(const Network& n, const Redex& r, const EnergyConfig& cfg, const FieldSpec& field,
                  const Features& features);

// Environment stimulus: composes this.handle[F(p)] onto the sensor's
// program at zero cost. Sensors without a handle method run the built-in
// default, which does nothing.
ApplyResult fire_event(const Network& n, const std::string& sensor, const EnergyConfig& cfg,
                       const FieldSpec& field, const Features& features);

bool is_intrinsic(const std::string& label);

}  // namespace csn
