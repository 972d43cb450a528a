#include "csn/scheduler.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "csn/printer.hpp"

namespace csn {

namespace {

std::string fmt_redex(const Redex& r) {
    std::ostringstream os;
    os << rule_name(r.rule) << ' ' << r.subject;
    if (!r.object.empty()) os << " -> " << r.object;
    if (!r.label.empty()) os << " (" << r.label << ')';
    return os.str();
}

bool matches(const ScriptStep& want, const Redex& have) {
    if (want.rule != have.rule) return false;
    if (want.subject != have.subject) return false;
    if (!want.object.empty() && want.object != have.object) return false;
    if (want.thread >= 0 && static_cast<std::size_t>(want.thread) != have.thread) return false;
    return true;
}

bool all_stutters(const std::vector<Redex>& redexes) {
    return std::all_of(redexes.begin(), redexes.end(),
                       [](const Redex& r) { return r.rule == RuleKind::NoMethod; });
}

// State identity for deduplication: the canonical term plus the observable
// log (what was logged and by whom, independent of when).
std::string state_key(const Network& n, const SinkLog& log, const EnergyConfig& cfg) {
    std::ostringstream os;
    os << canonical_print(n, cfg);
    for (const auto& e : log) {
        os << '\x02' << e.sensor << ' ' << e.intrinsic << '[';
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i) os << ", ";
            os << pretty(e.args[i]);
        }
        os << ']';
    }
    return os.str();
}

}  // namespace

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Quiescent: return "quiescent";
        case Outcome::QuiescentBlocked: return "quiescent-blocked";
        case Outcome::StepLimit: return "step-limit";
        case Outcome::AllExpired: return "all-expired";
        case Outcome::StateLimit: return "state-limit";
    }
    return "?";
}

RunResult run(const Network& start, const FieldSpec& field, const RunConfig& cfg) {
    if (std::holds_alternative<ExhaustiveMode>(cfg.mode))
        throw EngineError(EngineError::Kind::ConfigError,
                          "exhaustive mode is served by explore(), not run()");

    const auto* scripted = std::get_if<ScriptedMode>(&cfg.mode);
    std::mt19937_64 rng(scripted ? 0 : std::get<RandomMode>(cfg.mode).seed);

    RunResult res;
    res.network = canonical_network(start, cfg.energy);
    res.spent = Energy{};

    // Scripted environment stimuli, ordered by target step.
    std::vector<EventSpec> events = cfg.events;
    std::stable_sort(events.begin(), events.end(),
                     [](const EventSpec& a, const EventSpec& b) { return a.step < b.step; });
    std::size_t next_event = 0;

    std::set<std::string> stutter_debt;  // sensors that already took their free wait
    std::size_t steps = 0;               // reduction steps taken (events excluded)
    std::size_t script_pos = 0;

    auto record = [&](const ApplyResult& applied) {
        res.network = canonical_network(applied.network, cfg.energy);
        TraceStep ts;
        ts.label = applied.label;
        ts.hash = canonical_hash(res.network, cfg.energy);
        if (cfg.emit_terms) ts.term = canonical_print(res.network, cfg.energy);
        if (applied.log) {
            LogEntry e = *applied.log;
            e.step = res.trace.steps.size();
            res.log.push_back(e);
        }
        res.spent = res.spent + applied.label.energy;
        ++res.rule_counts[applied.label.rule];
        res.trace.steps.push_back(std::move(ts));
    };

    auto fire_due_events = [&](bool force_next) -> bool {
        bool fired = false;
        while (next_event < events.size() &&
               (events[next_event].step <= steps || force_next)) {
            const std::size_t at = events[next_event].step;
            while (next_event < events.size() && events[next_event].step == at) {
                record(fire_event(res.network, events[next_event].sensor, cfg.energy, field,
                                  cfg.features));
                ++next_event;
                fired = true;
            }
            force_next = false;
        }
        return fired;
    };

    while (steps < cfg.max_steps) {
        if (scripted && script_pos >= scripted->steps.size()) break;

        fire_due_events(false);

        // Spontaneous stimuli: each sensor may fire with the configured rate.
        if (!scripted && cfg.event_rate > 0.0) {
            std::bernoulli_distribution fires(cfg.event_rate);
            std::vector<std::string> names;
            for (const auto& s : res.network.sensors) names.push_back(s.name);
            for (const auto& name : names)
                if (fires(rng))
                    record(fire_event(res.network, name, cfg.energy, field, cfg.features));
        }

        if (res.network.sensors.empty()) {
            res.trace.outcome = Outcome::AllExpired;
            return res;
        }

        std::vector<Redex> redexes =
            enabled_redexes(res.network, cfg.energy, cfg.delivery, cfg.features);

        if (redexes.empty() || all_stutters(redexes)) {
            // The network cannot make productive progress on its own; any
            // still-pending scripted stimulus fires now and may unblock it.
            if (!scripted && fire_due_events(true)) continue;
            res.trace.outcome = redexes.empty() ? Outcome::Quiescent : Outcome::QuiescentBlocked;
            return res;
        }

        Redex chosen;
        if (scripted) {
            const ScriptStep& want = scripted->steps[script_pos];
            std::vector<Redex> hits;
            for (const auto& r : redexes)
                if (matches(want, r)) hits.push_back(r);
            if (hits.size() != 1) {
                std::ostringstream os;
                os << "script step " << script_pos << " (" << rule_name(want.rule) << ' '
                   << want.subject;
                if (!want.object.empty()) os << " -> " << want.object;
                if (want.thread >= 0) os << " @thread " << want.thread;
                os << ") matches " << hits.size() << " redexes; enabled:";
                for (const auto& r : redexes) os << "\n  " << fmt_redex(r);
                throw ScriptMismatch(os.str());
            }
            chosen = hits[0];
            ++script_pos;
        } else {
            // Weak fairness: a sensor gets one free stutter per productive
            // phase, so waits cannot starve the run.
            std::vector<Redex> candidates;
            for (const auto& r : redexes)
                if (r.rule != RuleKind::NoMethod || !stutter_debt.count(r.subject))
                    candidates.push_back(r);
            if (candidates.empty()) {
                res.trace.outcome = Outcome::QuiescentBlocked;
                return res;
            }
            std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
            chosen = candidates[pick(rng)];
        }

        record(apply(res.network, chosen, cfg.energy, field, cfg.features));
        if (chosen.rule == RuleKind::NoMethod)
            stutter_debt.insert(chosen.subject);
        else
            stutter_debt.clear();
        ++steps;
    }

    // Step budget (or script) exhausted: classify what is left.
    if (res.network.sensors.empty()) {
        res.trace.outcome = Outcome::AllExpired;
    } else {
        std::vector<Redex> redexes =
            enabled_redexes(res.network, cfg.energy, cfg.delivery, cfg.features);
        res.trace.outcome = redexes.empty()        ? Outcome::Quiescent
                            : all_stutters(redexes) ? Outcome::QuiescentBlocked
                                                    : Outcome::StepLimit;
    }
    return res;
}

ReachabilityReport explore(const Network& start, const FieldSpec& field, const RunConfig& cfg) {
    const ExhaustiveMode bounds = std::holds_alternative<ExhaustiveMode>(cfg.mode)
                                      ? std::get<ExhaustiveMode>(cfg.mode)
                                      : ExhaustiveMode{};

    ReachabilityReport report;
    std::unordered_map<std::string, std::size_t> ids;

    auto intern = [&](Network net, SinkLog log, std::size_t depth,
                      std::optional<std::size_t> parent,
                      std::optional<std::size_t> parent_edge) -> std::pair<std::size_t, bool> {
        std::string key = state_key(net, log, cfg.energy);
        auto it = ids.find(key);
        if (it != ids.end()) return {it->second, false};
        ExploreState st;
        st.network = std::move(net);
        st.log = std::move(log);
        st.depth = depth;
        st.hash = fnv1a64(key);
        st.parent = parent;
        st.parent_edge = parent_edge;
        std::size_t id = report.states.size();
        ids.emplace(std::move(key), id);
        report.states.push_back(std::move(st));
        return {id, true};
    };

    intern(canonical_network(start, cfg.energy), {}, 0, std::nullopt, std::nullopt);

    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        const std::size_t id = queue.front();
        queue.pop_front();

        if (report.states[id].network.sensors.empty()) {
            report.states[id].terminal = true;
            report.terminals.push_back(id);
            continue;
        }

        std::vector<Redex> redexes;
        try {
            redexes = enabled_redexes(report.states[id].network, cfg.energy, cfg.delivery,
                                      cfg.features);
        } catch (const EngineError& e) {
            // The state itself cannot be enumerated (bad method position):
            // record it as a faulted dead end.
            report.edges.push_back({id, id, StepLabel{}, true, e.what()});
            ++report.fault_edges;
            report.states[id].terminal = true;
            report.terminals.push_back(id);
            continue;
        }

        bool any_stutter = false;
        std::vector<Redex> productive;
        for (const auto& r : redexes) {
            if (r.rule == RuleKind::NoMethod)
                any_stutter = true;  // a self-loop; never expands the space
            else
                productive.push_back(r);
        }

        if (productive.empty()) {
            report.states[id].terminal = true;
            report.states[id].blocked = any_stutter;
            report.terminals.push_back(id);
            continue;
        }
        if (report.states[id].depth >= bounds.max_depth) {
            report.truncated = true;  // an unexpanded frontier remains
            continue;
        }

        std::size_t successors = 0;
        for (const auto& r : productive) {
            ApplyResult applied;
            try {
                applied = apply(report.states[id].network, r, cfg.energy, field, cfg.features);
            } catch (const EngineError& e) {
                report.edges.push_back({id, id, StepLabel{}, true, e.what()});
                ++report.fault_edges;
                continue;
            }
            SinkLog log = report.states[id].log;
            if (applied.log) {
                LogEntry entry = *applied.log;
                entry.step = report.states[id].depth;
                log.push_back(entry);
            }
            std::size_t edge_id = report.edges.size();
            auto [to, fresh] = intern(canonical_network(applied.network, cfg.energy),
                                      std::move(log), report.states[id].depth + 1, id, edge_id);
            report.edges.push_back({id, to, applied.label, false, ""});
            ++successors;
            if (fresh) {
                if (report.states.size() >= bounds.max_states) {
                    report.truncated = true;
                    queue.clear();
                    break;
                }
                queue.push_back(to);
            }
        }

        if (successors == 0 && !report.truncated) {
            // Every productive redex faulted: a dead end.
            report.states[id].terminal = true;
            report.states[id].blocked = any_stutter;
            report.terminals.push_back(id);
        }
    }
    return report;
}

std::vector<ScriptStep> path_to(const ReachabilityReport& report, std::size_t id) {
    std::vector<ScriptStep> path;
    std::size_t cur = id;
    while (report.states[cur].parent_edge) {
        const ExploreEdge& e = report.edges[*report.states[cur].parent_edge];
        ScriptStep st;
        st.rule = e.label.rule;
        st.subject = e.label.subject;
        st.object = e.label.object;
        // Pin the thread so replay stays unambiguous when two threads of the
        // same sensor offer the same rule toward the same object.
        st.thread = static_cast<int>(e.label.thread);
        path.push_back(st);
        cur = *report.states[cur].parent;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace csn
