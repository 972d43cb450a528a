#pragma once

// Drivers over the step engine:
//
//   run      seeded-random or scripted interleavings with weak fairness
//   explore  bounded breadth-first enumeration of the reachable state space
//
// Weak fairness for active waits: once a sensor takes its free no-method
// stutter, it is not picked again for a stutter until some productive step
// happens anywhere. When every enabled redex is a stutter the run is
// declared blocked instead of spinning.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "csn/engine.hpp"

namespace csn {

struct ScriptStep {
    RuleKind rule = RuleKind::Method;
    std::string subject;
    std::string object;  // empty: any (only BroadcastDeliver has one)
    int thread = -1;     // pin to a thread index at the subject; -1: any
};

struct RandomMode {
    std::uint64_t seed = 0;
};
struct ScriptedMode {
    std::vector<ScriptStep> steps;
};
struct ExhaustiveMode {
    std::size_t max_depth = 64;
    std::size_t max_states = 100000;
};
using RunMode = std::variant<RandomMode, ScriptedMode, ExhaustiveMode>;

struct EventSpec {
    std::size_t step = 0;  // fires before the step with this index
    std::string sensor;
};

struct RunConfig {
    RunMode mode = RandomMode{};
    EnergyConfig energy;
    DeliveryPolicy delivery = DeliveryPolicy::AllInRange;
    Features features;
    std::size_t max_steps = 10000;
    std::vector<EventSpec> events;  // scripted stimuli (events extension)
    double event_rate = 0.0;        // per-sensor stimulus probability per step
    bool emit_terms = false;        // keep the canonical term of every state
};

enum class Outcome {
    Quiescent,        // no redex at all
    QuiescentBlocked, // only free stutters remain
    StepLimit,
    AllExpired,       // every sensor ran out of battery
    StateLimit,       // exploration hit its bounds
};
const char* outcome_name(Outcome o);

struct TraceStep {
    StepLabel label;
    std::uint64_t hash = 0;  // canonical hash of the network after the step
    std::string term;        // canonical term, when emit_terms is set
};

struct Trace {
    std::vector<TraceStep> steps;
    Outcome outcome = Outcome::Quiescent;
};

struct RunResult {
    Trace trace;
    Network network;  // final state
    SinkLog log;
    Energy spent;
    std::map<RuleKind, std::size_t> rule_counts;
};

class ScriptMismatch : public std::runtime_error {
public:
    explicit ScriptMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

// Runs Random or Scripted mode; Exhaustive mode belongs to explore().
RunResult run(const Network& start, const FieldSpec& field, const RunConfig& cfg);

// ---- reachability ----------------------------------------------------------

struct ExploreEdge {
    std::size_t from = 0;
    std::size_t to = 0;  // == from for a faulted edge
    StepLabel label;
    bool faulted = false;
    std::string fault;  // error text when faulted
};

struct ExploreState {
    Network network;
    SinkLog log;
    std::size_t depth = 0;
    std::uint64_t hash = 0;
    std::optional<std::size_t> parent;     // breadth-first tree edge
    std::optional<std::size_t> parent_edge;
    bool terminal = false;  // no outgoing productive, non-faulted step
    bool blocked = false;   // terminal with stutters still enabled
};

struct ReachabilityReport {
    std::vector<ExploreState> states;  // states[0] is the start
    std::vector<ExploreEdge> edges;
    std::vector<std::size_t> terminals;
    bool truncated = false;  // bounds cut the search off
    std::size_t fault_edges = 0;
};

ReachabilityReport explore(const Network& start, const FieldSpec& field, const RunConfig& cfg);

// The breadth-first tree path start -> states[id], replayable as a script.
std::vector<ScriptStep> path_to(const ReachabilityReport& report, std::size_t id);

}  // namespace csn
