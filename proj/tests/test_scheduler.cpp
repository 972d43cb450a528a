#include <algorithm>
#include <string>
#include <vector>

#include "csn/congruence.hpp"
#include "csn/parser.hpp"
#include "csn/printer.hpp"
#include "csn/scheduler.hpp"
#include "doctest.h"

using namespace csn;

namespace {

std::string corpus_path(const std::string& name) { return std::string(CSN_CORPUS_DIR) + "/" + name; }

bool same_trace(const Trace& a, const Trace& b) {
    if (a.outcome != b.outcome || a.steps.size() != b.steps.size()) return false;
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        const StepLabel& x = a.steps[i].label;
        const StepLabel& y = b.steps[i].label;
        if (x.rule != y.rule || x.subject != y.subject || x.object != y.object ||
            x.energy != y.energy || a.steps[i].hash != b.steps[i].hash)
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("random runs are reproducible from their seed") {
    ParsedNetwork doc = parse_network_file(corpus_path("querying.csn"));
    RunConfig cfg;
    cfg.mode = RandomMode{42};
    RunResult a = run(doc.network, doc.field, cfg);
    RunResult b = run(doc.network, doc.field, cfg);
    CHECK(same_trace(a.trace, b.trace));
    CHECK(a.spent == b.spent);
    CHECK(canonical_print(a.network, cfg.energy) == canonical_print(b.network, cfg.energy));
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i)
        CHECK(log_entry_str(a.log[i]) == log_entry_str(b.log[i]));
}

TEST_CASE("an all-idle network is quiescent in zero steps") {
    ParsedNetwork doc = parse_network("[idle, {}] a | [idle, { m = () idle }] c\n");
    RunResult r = run(doc.network, doc.field, RunConfig{});
    CHECK(r.trace.outcome == Outcome::Quiescent);
    CHECK(r.trace.steps.empty());
    CHECK(r.spent == Energy{});
}

TEST_CASE("a lone undefined invocation blocks instead of spinning") {
    ParsedNetwork doc = parse_network("[this.nosuch[], {}] s\n");
    RunResult r = run(doc.network, doc.field, RunConfig{});
    CHECK(r.trace.outcome == Outcome::QuiescentBlocked);
    CHECK(r.trace.steps.empty());
    CHECK(r.spent == Energy{});
    // the waiting call survives untouched
    CHECK(pretty(find_sensor(r.network, "s")->program) == "this.nosuch[]");
}

TEST_CASE("weak fairness: stutters cannot crowd out productive steps") {
    ParsedNetwork doc = parse_network(
        "[this.ghost[], {}] waiter | [this.m[]; this.m[]; this.m[], { m = () idle }] busy\n");
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        RunConfig cfg;
        cfg.mode = RandomMode{seed};
        RunResult r = run(doc.network, doc.field, cfg);
        CHECK(r.trace.outcome == Outcome::QuiescentBlocked);
        CHECK(r.rule_counts[RuleKind::Method] == 3);
        // at most one stutter per productive phase, plus the trailing one
        CHECK(r.rule_counts[RuleKind::NoMethod] <= 4);
    }
}

TEST_CASE("a network whose sensors all exhaust reports it") {
    ParsedNetwork doc = parse_network("[this.m[]; this.m[], { m = () idle }] s\n@s battery = 10.5\n");
    RunResult r = run(doc.network, doc.field, RunConfig{});
    CHECK(r.trace.outcome == Outcome::AllExpired);
    CHECK(r.spent == Energy::from_units(1));
    CHECK(r.network.sensors.empty());
    REQUIRE(r.network.expired.size() == 1);
    CHECK(r.network.expired[0].residual == Energy::parse("9.5"));
}

TEST_CASE("step budgets cut a run short with the honest outcome") {
    ParsedNetwork doc = parse_network_file(corpus_path("querying.csn"));
    RunConfig cfg;
    cfg.mode = RandomMode{1};
    cfg.max_steps = 3;
    RunResult r = run(doc.network, doc.field, cfg);
    CHECK(r.trace.outcome == Outcome::StepLimit);
    CHECK(r.trace.steps.size() == 3);
}

TEST_CASE("scripted runs follow the script and stop at its end") {
    ParsedNetwork doc = parse_network_file(corpus_path("sample.csn"));
    std::vector<ScriptStep> steps = {
        {RuleKind::BroadcastDeliver, "senS", "senX"}, {RuleKind::Release, "senS", ""},
        {RuleKind::Method, "senX", ""},               {RuleKind::Release, "senX", ""},
        {RuleKind::Sense, "senX", ""},                {RuleKind::BroadcastDeliver, "senX", "senS"},
        {RuleKind::Release, "senX", ""},              {RuleKind::Method, "senS", ""},
    };
    RunConfig cfg;
    cfg.mode = ScriptedMode{steps};
    cfg.delivery = DeliveryPolicy::Nondeterministic;
    RunResult r = run(doc.network, doc.field, cfg);

    REQUIRE(r.trace.steps.size() == steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        CHECK(r.trace.steps[i].label.rule == steps[i].rule);
        CHECK(r.trace.steps[i].label.subject == steps[i].subject);
    }
    // the sink still holds its unfired logging call, so the run is cut short
    CHECK(r.trace.outcome == Outcome::StepLimit);
    CHECK(r.spent == Energy::from_units(33));
    const Sensor* senS = find_sensor(r.network, "senS");
    const Sensor* senX = find_sensor(r.network, "senX");
    REQUIRE(senS);
    REQUIRE(senX);
    CHECK(senS->battery == Energy::from_units(89));
    CHECK(senX->battery == Energy::from_units(78));
    CHECK(pretty(senS->program) == "this.log_position_and_value[(1, 0), 21.5]");
    CHECK(is_idle(senX->program));
    CHECK(r.trace.steps.back().hash == canonical_hash(r.network, cfg.energy));
}

TEST_CASE("a script step matching zero or several redexes is a mismatch") {
    ParsedNetwork doc = parse_network_file(corpus_path("sample.csn"));
    RunConfig zero;
    zero.mode = ScriptedMode{{{RuleKind::Method, "senX", ""}}};  // nothing to dispatch yet
    CHECK_THROWS_AS(run(doc.network, doc.field, zero), ScriptMismatch);

    ParsedNetwork fan = parse_network(
        "[net.a[], {}] src | [idle, {}] d1 | [idle, {}] d2\n"
        "@src radius = 5\n@d1 position = (1, 0)\n@d2 position = (2, 0)\n");
    RunConfig two;
    two.mode = ScriptedMode{{{RuleKind::BroadcastDeliver, "src", ""}}};  // ambiguous receiver
    CHECK_THROWS_AS(run(fan.network, fan.field, two), ScriptMismatch);

    RunConfig pinned;
    pinned.mode = ScriptedMode{{{RuleKind::BroadcastDeliver, "src", "d2"}}};  // object disambiguates
    RunResult ok = run(fan.network, fan.field, pinned);
    CHECK(ok.trace.steps.size() == 1);
    CHECK(ok.trace.steps[0].label.object == "d2");
}

TEST_CASE("emitted terms match the canonical printing of each state") {
    ParsedNetwork doc = parse_network_file(corpus_path("sample2.csn"));
    RunConfig cfg;
    cfg.mode = RandomMode{9};
    cfg.emit_terms = true;
    RunResult r = run(doc.network, doc.field, cfg);
    REQUIRE(!r.trace.steps.empty());
    for (const auto& st : r.trace.steps) {
        CHECK(!st.term.empty());
        CHECK(fnv1a64(st.term) != 0);
    }
    CHECK(r.trace.steps.back().term == canonical_print(r.network, cfg.energy));
}

TEST_CASE("scheduled stimuli fire even when the network is otherwise quiet") {
    ParsedNetwork doc = parse_network("[idle, { handle = (v) net.out[v] }] s\n");
    RunConfig cfg;
    cfg.features.events = true;
    cfg.events = {{50, "s"}};  // far past quiescence; fires anyway
    RunResult r = run(doc.network, doc.field, cfg);
    CHECK(r.trace.outcome == Outcome::Quiescent);
    CHECK(r.rule_counts[RuleKind::Event] == 1);
    CHECK(r.rule_counts[RuleKind::Method] == 1);
    CHECK(r.rule_counts[RuleKind::Release] == 1);
    CHECK(r.spent == Energy::from_units(11));
}

TEST_CASE("event stimuli are rejected when the extension is off") {
    ParsedNetwork doc = parse_network("[idle, {}] s\n");
    RunConfig cfg;
    cfg.events = {{0, "s"}};
    CHECK_THROWS_AS(run(doc.network, doc.field, cfg), EngineError);
}

TEST_CASE("exploration enumerates, bounds honestly, and its paths replay") {
    ParsedNetwork doc = parse_network_file(corpus_path("sample.csn"));
    RunConfig cfg;
    cfg.mode = ExhaustiveMode{64, 100000};
    cfg.delivery = DeliveryPolicy::Nondeterministic;
    ReachabilityReport report = explore(doc.network, doc.field, cfg);

    CHECK(!report.truncated);
    CHECK(report.states.size() > 4);
    CHECK(!report.terminals.empty());
    for (std::size_t t : report.terminals) CHECK(report.states[t].terminal);

    // a second exploration is bit-for-bit identical
    ReachabilityReport again = explore(doc.network, doc.field, cfg);
    REQUIRE(again.states.size() == report.states.size());
    for (std::size_t i = 0; i < report.states.size(); ++i)
        CHECK(again.states[i].hash == report.states[i].hash);

    // the tree path to the deepest terminal replays to the same state
    std::size_t deepest = report.terminals[0];
    for (std::size_t t : report.terminals)
        if (report.states[t].depth > report.states[deepest].depth) deepest = t;
    std::vector<ScriptStep> path = path_to(report, deepest);
    CHECK(path.size() == report.states[deepest].depth);

    RunConfig replay;
    replay.mode = ScriptedMode{path};
    replay.delivery = DeliveryPolicy::Nondeterministic;
    RunResult r = run(doc.network, doc.field, replay);
    CHECK(congruent(r.network, report.states[deepest].network, cfg.energy));
    REQUIRE(r.log.size() == report.states[deepest].log.size());
    for (std::size_t i = 0; i < r.log.size(); ++i) {
        CHECK(r.log[i].intrinsic == report.states[deepest].log[i].intrinsic);
        CHECK(r.log[i].args == report.states[deepest].log[i].args);
    }
}

TEST_CASE("exploration truncates at its bounds and says so") {
    ParsedNetwork doc = parse_network_file(corpus_path("sample.csn"));
    RunConfig depth_bound;
    depth_bound.mode = ExhaustiveMode{2, 100000};
    ReachabilityReport shallow = explore(doc.network, doc.field, depth_bound);
    CHECK(shallow.truncated);

    RunConfig state_bound;
    state_bound.mode = ExhaustiveMode{64, 3};
    ReachabilityReport tiny = explore(doc.network, doc.field, state_bound);
    CHECK(tiny.truncated);
    CHECK(tiny.states.size() <= 3);
}

TEST_CASE("faulting steps become terminal dead ends instead of vanishing") {
    // the delivered call reaches dst with one argument; dst's method wants two
    ParsedNetwork doc = parse_network(
        "[net.give[3], {}] src | [idle, { give = (x, y) idle }] dst\n"
        "@src radius = 5\n@dst position = (1, 0) radius = 5\n");
    RunConfig cfg;
    cfg.mode = ExhaustiveMode{16, 1000};
    ReachabilityReport report = explore(doc.network, doc.field, cfg);
    CHECK(report.fault_edges > 0);
    bool saw_fault_edge = false;
    for (const auto& e : report.edges)
        if (e.faulted) {
            saw_fault_edge = true;
            CHECK(e.from == e.to);
            CHECK(!e.fault.empty());
        }
    CHECK(saw_fault_edge);
}

TEST_CASE("exploration mode is not a run mode") {
    ParsedNetwork doc = parse_network("[idle, {}] s\n");
    RunConfig cfg;
    cfg.mode = ExhaustiveMode{};
    CHECK_THROWS_AS(run(doc.network, doc.field, cfg), EngineError);
    // explore, by contrast, falls back to default bounds for other modes
    ReachabilityReport report = explore(doc.network, doc.field, RunConfig{});
    CHECK(report.states.size() == 1);
    CHECK(report.states[0].terminal);
    CHECK(!report.states[0].blocked);
}
