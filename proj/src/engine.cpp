#include "csn/engine.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>

#include "csn/names.hpp"
#include "csn/printer.hpp"

namespace csn {

namespace {

using Kind = EngineError::Kind;

[[noreturn]] void fail(Kind k, const std::string& msg) { throw EngineError(k, msg); }

const std::vector<std::string> kIntrinsics = {
    "log_position_and_power",
    "log_position_and_value",
    "sing_bell",
};

bool is_heap_builtin(const std::string& l) {
    return l == "put" || l == "get" || l == "lookup" || l == "hash";
}

// ---- self-attribute resolution ------------------------------------------
//
// p, r and b written in value position denote the acting sensor's own
// attributes and are resolved when the step fires. Resolution is shallow:
// a module value travels as written, so code in it reads the attributes of
// whoever eventually installs and runs it.

Value resolve_self(const Value& v, const Sensor& s) {
    if (const auto* a = std::get_if<SelfAttrVal>(&v)) {
        switch (a->attr) {
            case SelfAttr::Position: return Value{PositionVal{s.position}};
            case SelfAttr::Radius: return Value{MeasureVal{s.radius}};
            case SelfAttr::Battery: return Value{BatteryVal{s.battery}};
        }
    }
    return v;
}

std::vector<Value> resolve_args(const std::vector<Value>& args, const Sensor& s) {
    std::vector<Value> out;
    out.reserve(args.size());
    for (const auto& a : args) out.push_back(resolve_self(a, s));
    return out;
}

// ---- builtin expression evaluation (state extension) ---------------------

uint64_t key_of(const Value& v, const char* who) {
    const auto* k = std::get_if<KeyVal>(&v);
    if (!k) fail(Kind::DispatchError, std::string(who) + " expects a key, got " + pretty(v));
    return k->id;
}

Value eval_hash(const std::vector<Value>& raw_args, Sensor& s, const Features& features) {
    std::ostringstream os;
    os << "hash";
    for (const auto& a : raw_args) os << '\x1f' << pretty(resolve_self(a, s));
    if (features.hash_nonce) {
        os << '\x1f' << s.name << '#' << s.heap.nonce;
        ++s.heap.nonce;
    }
    return Value{KeyVal{fnv1a64(os.str())}};
}

Value eval_bexpr(const BExpr& e, Sensor& s, const Features& features) {
    return std::visit(
        [&](const auto& node) -> Value {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, BexValue>) {
                return resolve_self(node.value, s);
            } else if constexpr (std::is_same_v<T, BexNot>) {
                Value v = eval_bexpr(*node.operand, s, features);
                const auto* b = std::get_if<BoolVal>(&v);
                if (!b) fail(Kind::DispatchError, "! expects a boolean, got " + pretty(v));
                return Value{BoolVal{!b->value}};
            } else if constexpr (std::is_same_v<T, BexLookup>) {
                if (!features.state) fail(Kind::ConfigError, "lookup requires the state extension");
                Value k = resolve_self(node.key, s);
                return Value{BoolVal{s.heap.entries.count(key_of(k, "lookup")) > 0}};
            } else if constexpr (std::is_same_v<T, BexGet>) {
                if (!features.state) fail(Kind::ConfigError, "get requires the state extension");
                Value k = resolve_self(node.key, s);
                auto it = s.heap.entries.find(key_of(k, "get"));
                if (it == s.heap.entries.end())
                    fail(Kind::DispatchError, "get: no entry for " + pretty(k) + " at " + s.name);
                return it->second;
            } else {
                static_assert(std::is_same_v<T, BexHash>);
                if (!features.state) fail(Kind::ConfigError, "hash requires the state extension");
                return eval_hash(node.args, s, features);
            }
        },
        e.node);
}

// ---- thread plumbing ------------------------------------------------------

// Rebuild one thread (a list of sequential atoms) into a program.
ProgramPtr rebuild_thread(const std::vector<ProgramPtr>& atoms) {
    if (atoms.empty()) return make_idle();
    ProgramPtr out = atoms.back();
    for (std::size_t i = atoms.size() - 1; i-- > 0;) out = make_seq(atoms[i], out);
    return out;
}

// Rebuild a whole program from threads, preserving thread order; the
// canonical form is restored by the caller's next normalize.
ProgramPtr rebuild_threads(const std::vector<std::vector<ProgramPtr>>& threads) {
    std::vector<ProgramPtr> ts;
    ts.reserve(threads.size());
    for (const auto& t : threads) ts.push_back(rebuild_thread(t));
    if (ts.empty()) return make_idle();
    ProgramPtr out = ts.back();
    for (std::size_t i = ts.size() - 1; i-- > 0;) out = make_par(ts[i], out);
    return out;
}

std::vector<std::vector<ProgramPtr>> threads_of(const Sensor& s) {
    return canonical_threads(normalize(s.program));
}

// Replace the head atom of a thread with a program: the continuation is the
// remaining atoms, and `head_result` (if not idle) runs before them.
void splice_head(std::vector<ProgramPtr>& thread, const ProgramPtr& head_result) {
    thread.erase(thread.begin());
    ProgramPtr rest = rebuild_thread(thread);
    ProgramPtr combined = is_idle(head_result) ? rest
                          : is_idle(rest)      ? head_result
                                               : make_seq(head_result, rest);
    thread.clear();
    thread.push_back(combined);
}

// ---- redex enumeration ----------------------------------------------------

// True when `recv` can still be captured by `sender`'s ongoing broadcast.
bool capturable(const Sensor& sender, const Sensor& recv) {
    if (recv.name == sender.name) return false;
    if (!recv.bag.empty()) return false;  // receivers must be in plain form
    return in_range(sender, recv);
}

void check_this_method(const Value& m, const Sensor& s) {
    if (std::holds_alternative<LabelRef>(m)) return;
    if (const auto* v = std::get_if<VarRef>(&m))
        fail(Kind::DispatchError,
             "unsubstituted variable '" + v->name + "' in method position at " + s.name);
    fail(Kind::DispatchError, "method position holds " + pretty(m) + " at " + s.name);
}

void check_net_method(const Value& m, const Sensor& s) {
    // A variable is allowed to travel: the receiver resolves it on dispatch.
    if (std::holds_alternative<LabelRef>(m) || std::holds_alternative<VarRef>(m)) return;
    fail(Kind::DispatchError, "method position holds " + pretty(m) + " at " + s.name);
}

std::string method_label(const Value& m) {
    if (const auto* l = std::get_if<LabelRef>(&m)) return l->name;
    if (const auto* v = std::get_if<VarRef>(&m)) return v->name;
    return pretty(m);
}

// Move any plain sensor that can no longer fund a step to the expired list.
void sweep_exhausted(Network& n, const EnergyConfig& cfg) {
    const Energy threshold = cfg.exhaustion_threshold();
    std::vector<Sensor> alive;
    alive.reserve(n.sensors.size());
    for (auto& s : n.sensors) {
        if (s.bag.empty() && s.battery < threshold)
            n.expired.push_back({s.name, s.battery});
        else
            alive.push_back(std::move(s));
    }
    n.sensors = std::move(alive);
}

Sensor& sensor_for(Network& n, const std::string& name, Kind missing_kind) {
    Sensor* s = find_sensor(n, name);
    if (!s) fail(missing_kind, "no active sensor named " + name);
    return *s;
}

std::string describe(const StepLabel& l, const std::string& detail) {
    std::ostringstream os;
    os << rule_name(l.rule);
    if (!detail.empty()) os << ' ' << detail;
    os << " at " << l.subject;
    if (!l.object.empty()) os << " -> " << l.object;
    return os.str();
}

}  // namespace

const char* rule_name(RuleKind k) {
    switch (k) {
        case RuleKind::Method: return "method";
        case RuleKind::NoMethod: return "no-method";
        case RuleKind::BroadcastDeliver: return "broadcast";
        case RuleKind::Release: return "release";
        case RuleKind::Install: return "install";
        case RuleKind::Sense: return "sense";
        case RuleKind::Cond: return "cond";
        case RuleKind::Event: return "event";
        case RuleKind::Let: return "let";
    }
    return "?";
}

std::optional<RuleKind> rule_from_name(const std::string& name) {
    static const std::map<std::string, RuleKind> table = {
        {"method", RuleKind::Method},     {"no-method", RuleKind::NoMethod},
        {"broadcast", RuleKind::BroadcastDeliver}, {"release", RuleKind::Release},
        {"install", RuleKind::Install},   {"sense", RuleKind::Sense},
        {"cond", RuleKind::Cond},         {"event", RuleKind::Event},
        {"let", RuleKind::Let},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

bool is_intrinsic(const std::string& label) {
    return std::find(kIntrinsics.begin(), kIntrinsics.end(), label) != kIntrinsics.end();
}

std::string log_entry_str(const LogEntry& e) {
    std::ostringstream os;
    os << e.step << ' ' << e.sensor << ' ' << e.intrinsic << '[';
    for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        os << pretty(e.args[i]);
    }
    os << ']';
    return os.str();
}

std::vector<Redex> enabled_redexes(const Network& n, const EnergyConfig& cfg,
                                   DeliveryPolicy policy, const Features& features) {
    Network canon = canonical_network(n, cfg);
    std::vector<Redex> out;

    for (const auto& s : canon.sensors) {
        const bool mid_broadcast = !s.bag.empty();
        auto threads = threads_of(s);

        // Precompute broadcast facts shared by every net-headed thread.
        std::vector<std::string> receivers;
        for (const auto& r : canon.sensors)
            if (capturable(s, r)) receivers.push_back(r.name);
        const bool can_send = s.battery >= cfg.c_out;
        const bool release_ok =
            policy == DeliveryPolicy::Nondeterministic || receivers.empty() || !can_send;

        for (std::size_t ti = 0; ti < threads.size(); ++ti) {
            const Program& head = *threads[ti][0];

            if (const auto* inv = std::get_if<Invoke>(&head.node)) {
                if (inv->target == Target::Net) {
                    check_net_method(inv->method, s);
                    if (can_send)
                        for (const auto& r : receivers)
                            out.push_back({RuleKind::BroadcastDeliver, s.name, ti, r,
                                           method_label(inv->method)});
                    if (release_ok)
                        out.push_back(
                            {RuleKind::Release, s.name, ti, "", method_label(inv->method)});
                    continue;
                }
                // Local dispatch. A sensor mid-broadcast only delivers and
                // releases; its other threads wait for the bag to empty.
                if (mid_broadcast) continue;
                check_this_method(inv->method, s);
                const std::string l = method_label(inv->method);
                const bool known = s.module->methods.count(l) > 0 || is_intrinsic(l) ||
                                   (features.state && is_heap_builtin(l)) ||
                                   (features.events && l == "handle");
                out.push_back({known ? RuleKind::Method : RuleKind::NoMethod, s.name, ti, "", l});
                continue;
            }

            if (mid_broadcast) continue;

            if (std::holds_alternative<Install>(head.node)) {
                out.push_back({RuleKind::Install, s.name, ti, "", ""});
            } else if (std::holds_alternative<Sense>(head.node)) {
                out.push_back({RuleKind::Sense, s.name, ti, "", ""});
            } else if (std::holds_alternative<If>(head.node)) {
                out.push_back({RuleKind::Cond, s.name, ti, "", ""});
            } else if (const auto* let = std::get_if<LetIn>(&head.node)) {
                if (!features.state)
                    fail(Kind::ConfigError,
                         "let requires the state extension (at " + s.name + ")");
                out.push_back({RuleKind::Let, s.name, ti, "", let->var});
            }
            // A parallel atom inside a thread (fork under seq) never reduces
            // on its own; Idle and Seq cannot be atoms.
        }
    }
    return out;
}

ApplyResult apply(const Network& n, const Redex& r, const EnergyConfig& cfg, const FieldSpec& field,
                  const Features& features) {
    ApplyResult res;
    res.network = canonical_network(n, cfg);
    Network& net = res.network;

    // net.sensors is mutated mid-step (captures, releases), which moves
    // elements; always re-find the subject instead of holding a reference
    // across a mutation.
    auto subject = [&]() -> Sensor& { return sensor_for(net, r.subject, Kind::NotEnabled); };

    auto threads = threads_of(subject());
    if (r.thread >= threads.size())
        fail(Kind::NotEnabled,
             "stale redex: no thread " + std::to_string(r.thread) + " at " + r.subject);
    std::vector<ProgramPtr>& thread = threads[r.thread];
    const ProgramPtr head_ptr = thread[0];  // keep the head alive across the splice
    const Program& head = *head_ptr;

    StepLabel& label = res.label;
    label.rule = r.rule;
    label.subject = r.subject;
    label.thread = r.thread;
    label.object = r.object;
    label.energy = Energy{};
    std::string detail;

    auto charge = [&](Energy cost) {
        Sensor& s = subject();
        if (s.battery < cost) fail(Kind::NotEnabled, "battery below step cost at " + s.name);
        s.battery = s.battery - cost;
        label.energy = cost;
    };

    // Sensors freed by a release join the network after the subject's
    // program is rebuilt (appending may relocate the subject).
    std::vector<Sensor> freed;

    switch (r.rule) {
        case RuleKind::Method: {
            const auto* inv = std::get_if<Invoke>(&head.node);
            if (!inv || inv->target != Target::This)
                fail(Kind::NotEnabled, "stale redex: head is not a local invocation");
            Sensor& subj = subject();
            check_this_method(inv->method, subj);
            const std::string l = method_label(inv->method);
            std::vector<Value> args = resolve_args(inv->args, subj);
            detail = l;

            auto it = subj.module->methods.find(l);
            if (it != subj.module->methods.end()) {
                const Abstraction& abs = it->second;
                if (abs.params.size() != args.size())
                    fail(Kind::ArityMismatch,
                         l + " expects " + std::to_string(abs.params.size()) + " arguments, got " +
                             std::to_string(args.size()) + " at " + subj.name);
                Subst subst;
                for (std::size_t i = 0; i < abs.params.size(); ++i) subst[abs.params[i]] = args[i];
                splice_head(thread, substitute(abs.body, subst));
            } else if (is_intrinsic(l)) {
                res.log = LogEntry{l, args, 0, subj.name};
                splice_head(thread, make_idle());
            } else if (features.state && is_heap_builtin(l)) {
                if (l == "put") {
                    if (args.size() != 2)
                        fail(Kind::ArityMismatch, "put expects 2 arguments at " + subj.name);
                    subj.heap.entries[key_of(args[0], "put")] = args[1];
                } else if (l == "get" || l == "lookup") {
                    if (args.size() != 1)
                        fail(Kind::ArityMismatch, l + " expects 1 argument at " + subj.name);
                    uint64_t k = key_of(args[0], l.c_str());
                    if (l == "get" && !subj.heap.entries.count(k))
                        fail(Kind::DispatchError,
                             "get: no entry for " + pretty(args[0]) + " at " + subj.name);
                } else {  // hash in statement position: key is discarded
                    eval_hash(inv->args, subj, features);
                }
                splice_head(thread, make_idle());
            } else if (features.events && l == "handle") {
                // Built-in default handler: accept the stimulus, do nothing.
                splice_head(thread, make_idle());
            } else {
                fail(Kind::NotEnabled, "stale redex: no method " + l + " at " + subj.name);
            }
            charge(cfg.c_in);
            break;
        }

        case RuleKind::NoMethod: {
            const auto* inv = std::get_if<Invoke>(&head.node);
            if (!inv || inv->target != Target::This)
                fail(Kind::NotEnabled, "stale redex: head is not a local invocation");
            detail = method_label(inv->method);
            // Active wait: the sensor spins at no cost until the method
            // appears; the term does not change.
            break;
        }

        case RuleKind::BroadcastDeliver: {
            const auto* inv = std::get_if<Invoke>(&head.node);
            if (!inv || inv->target != Target::Net)
                fail(Kind::NotEnabled, "stale redex: head is not a broadcast");
            if (subject().battery < cfg.c_out)
                fail(Kind::NotEnabled, "battery below release cost at " + r.subject);
            detail = method_label(inv->method);

            auto recv_it = std::find_if(net.sensors.begin(), net.sensors.end(),
                                        [&](const Sensor& s) { return s.name == r.object; });
            if (recv_it == net.sensors.end())
                fail(Kind::NotEnabled, "stale redex: no plain sensor named " + r.object);
            if (!capturable(subject(), *recv_it))
                fail(Kind::NotEnabled, r.object + " is not capturable by " + r.subject);

            // The message dispatches locally at the receiver with the
            // sender's arguments resolved at send time.
            ProgramPtr msg =
                make_invoke(Target::This, inv->method, resolve_args(inv->args, subject()));
            Sensor recv = std::move(*recv_it);
            net.sensors.erase(recv_it);
            recv.program = is_idle(recv.program) ? msg : make_par(recv.program, msg);
            subject().bag.push_back(std::move(recv));
            break;  // no battery change until the release
        }

        case RuleKind::Release: {
            const auto* inv = std::get_if<Invoke>(&head.node);
            if (!inv || inv->target != Target::Net)
                fail(Kind::NotEnabled, "stale redex: head is not a broadcast");
            detail = method_label(inv->method);
            splice_head(thread, make_idle());
            freed = std::move(subject().bag);
            subject().bag.clear();
            charge(cfg.c_out);
            break;
        }

        case RuleKind::Install: {
            const auto* ins = std::get_if<Install>(&head.node);
            if (!ins) fail(Kind::NotEnabled, "stale redex: head is not an install");
            Sensor& subj = subject();
            Value v = resolve_self(ins->operand, subj);
            const auto* mv = std::get_if<ModuleVal>(&v);
            if (!mv)
                fail(Kind::DispatchError,
                     "install expects a module, got " + pretty(v) + " at " + subj.name);
            subj.module = module_merge(subj.module, mv->mod);
            splice_head(thread, make_idle());
            charge(cfg.c_in);
            break;
        }

        case RuleKind::Sense: {
            const auto* sn = std::get_if<Sense>(&head.node);
            if (!sn) fail(Kind::NotEnabled, "stale redex: head is not a sense");
            Sensor& subj = subject();
            std::vector<double> vals = field_at(field, subj.position);
            if (sn->binders.size() != vals.size())
                fail(Kind::ArityMismatch,
                     "sense binds " + std::to_string(sn->binders.size()) +
                         " values but the field has arity " + std::to_string(vals.size()) +
                         " at " + subj.name);
            Subst subst;
            for (std::size_t i = 0; i < sn->binders.size(); ++i)
                subst[sn->binders[i]] = Value{MeasureVal{vals[i]}};
            splice_head(thread, substitute(sn->body, subst));
            charge(cfg.c_in);
            break;
        }

        case RuleKind::Cond: {
            const auto* iff = std::get_if<If>(&head.node);
            if (!iff) fail(Kind::NotEnabled, "stale redex: head is not a conditional");
            Value v = eval_bexpr(iff->cond, subject(), features);
            const auto* b = std::get_if<BoolVal>(&v);
            if (!b)
                fail(Kind::DispatchError,
                     "if expects a boolean, got " + pretty(v) + " at " + r.subject);
            detail = b->value ? "true" : "false";
            splice_head(thread, b->value ? iff->then_branch : iff->else_branch);
            charge(cfg.c_in);
            break;
        }

        case RuleKind::Let: {
            const auto* let = std::get_if<LetIn>(&head.node);
            if (!let) fail(Kind::NotEnabled, "stale redex: head is not a let");
            if (!features.state)
                fail(Kind::ConfigError, "let requires the state extension (at " + r.subject + ")");
            Value v = eval_bexpr(let->expr, subject(), features);
            detail = let->var;
            splice_head(thread, substitute(let->body, Subst{{let->var, v}}));
            charge(cfg.c_in);
            break;
        }

        case RuleKind::Event:
            fail(Kind::NotEnabled, "events fire through fire_event, not apply");
    }

    subject().program = rebuild_threads(threads);
    for (auto& s : freed) net.sensors.push_back(std::move(s));
    label.description = describe(label, detail);
    sweep_exhausted(net, cfg);
    return res;
}

ApplyResult fire_event(const Network& n, const std::string& sensor, const EnergyConfig& cfg,
                       const FieldSpec& field, const Features& features) {
    if (!features.events) fail(Kind::ConfigError, "events require the events extension");

    ApplyResult res;
    res.network = canonical_network(n, cfg);
    Sensor& subj = sensor_for(res.network, sensor, Kind::UnknownSensor);

    std::vector<double> vals = field_at(field, subj.position);
    std::vector<Value> args;
    args.reserve(vals.size());
    for (double v : vals) args.push_back(Value{MeasureVal{v}});

    ProgramPtr stim = make_invoke(Target::This, Value{LabelRef{"handle"}}, args);
    subj.program = is_idle(subj.program) ? stim : make_par(subj.program, stim);

    StepLabel& label = res.label;
    label.rule = RuleKind::Event;
    label.subject = sensor;
    label.energy = Energy{};
    label.description = describe(label, "handle");
    return res;
}

}  // namespace csn
