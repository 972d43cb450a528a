// Command line driver: parse, run, replay, explore and batch-check sensor
// network programs.
//
// Exit codes: 0 success, 1 failed run/predicate/replay, 2 bad usage or a
// file that does not parse.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "csn/parser.hpp"
#include "csn/printer.hpp"
#include "csn/scheduler.hpp"

using namespace csn;

namespace {

#ifndef CSN_DEFAULT_CORPUS_DIR
#define CSN_DEFAULT_CORPUS_DIR "corpus"
#endif

struct CommonOpts {
    std::string cin_cost = "1";
    std::string cout_cost = "10";
    std::string delivery = "all";
    std::vector<std::string> extensions;
    std::size_t max_steps = 10000;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--cin", o.cin_cost, "energy per internal step");
    cmd->add_option("--cout", o.cout_cost, "energy per broadcast release");
    cmd->add_option("--delivery", o.delivery, "all | nondet")
        ->check(CLI::IsMember({"all", "nondet"}));
    cmd->add_option("--ext", o.extensions,
                    "extensions to enable: state, events, hash-nonce")
        ->delimiter(',');
    cmd->add_option("--max-steps", o.max_steps, "step budget");
}

void fill_config(const CommonOpts& o, RunConfig& cfg) {
    cfg.energy.c_in = Energy::parse(o.cin_cost);
    cfg.energy.c_out = Energy::parse(o.cout_cost);
    cfg.delivery =
        o.delivery == "nondet" ? DeliveryPolicy::Nondeterministic : DeliveryPolicy::AllInRange;
    cfg.max_steps = o.max_steps;
    for (const auto& e : o.extensions) {
        if (e == "state")
            cfg.features.state = true;
        else if (e == "events")
            cfg.features.events = true;
        else if (e == "hash-nonce")
            cfg.features.state = cfg.features.hash_nonce = true;
        else
            throw CLI::ValidationError("--ext", "unknown extension: " + e);
    }
}

EventSpec parse_event(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--event", "expected STEP:SENSOR, got " + s);
    EventSpec ev;
    ev.step = std::stoull(s.substr(0, colon));
    ev.sensor = s.substr(colon + 1);
    return ev;
}

std::string hash_str(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

void print_step(std::ostream& out, std::size_t i, const TraceStep& ts) {
    out << i << ' ' << rule_name(ts.label.rule) << ' ' << ts.label.subject;
    if (!ts.label.object.empty()) out << " -> " << ts.label.object;
    out << ' ' << ts.label.energy.str() << ' ' << hash_str(ts.hash) << '\n';
    if (!ts.term.empty()) out << "  " << ts.term << '\n';
}

void print_run(std::ostream& out, const RunResult& res, const EnergyConfig& energy) {
    for (std::size_t i = 0; i < res.trace.steps.size(); ++i) print_step(out, i, res.trace.steps[i]);
    out << "outcome " << outcome_name(res.trace.outcome) << '\n';
    out << "spent " << res.spent.str() << '\n';
    for (const auto& e : res.log) out << "log " << log_entry_str(e) << '\n';
    out << "--- final ---\n" << canonical_print(res.network, energy);
}

// Script files hold one step per line: RULE SUBJECT [-> OBJECT].
// Golden trace files are full run output; the same reader extracts the
// schedule from their step lines.
std::vector<ScriptStep> read_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("script", "cannot open " + path);
    std::vector<ScriptStep> steps;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> tok;
        std::string t;
        while (ls >> t) tok.push_back(t);
        if (tok.empty() || tok[0][0] == '#') continue;

        // Schedule lines: "RULE SUBJECT [-> OBJECT]" in a script file, or
        // "N RULE SUBJECT [-> OBJECT] ENERGY HASH" in a golden trace.
        // Anything else (outcome, spent, log, final term) is skipped.
        std::size_t at;
        if (tok.size() >= 2 && rule_from_name(tok[0]))
            at = 0;
        else if (tok.size() >= 3 && std::isdigit(static_cast<unsigned char>(tok[0][0])) &&
                 rule_from_name(tok[1]))
            at = 1;
        else
            continue;

        ScriptStep st;
        st.rule = *rule_from_name(tok[at]);
        st.subject = tok[at + 1];
        if (at + 3 < tok.size() && tok[at + 2] == "->") st.object = tok[at + 3];
        steps.push_back(st);
    }
    return steps;
}

int run_and_report(const ParsedNetwork& parsed, RunConfig& cfg, std::ostream& out) {
    RunResult res = run(parsed.network, parsed.field, cfg);
    print_run(out, res, cfg.energy);
    out << std::endl;
    return 0;
}

// ---- corpus batch ----------------------------------------------------------

struct CorpusCase {
    std::string file;
    CommonOpts opts;
    std::vector<std::uint64_t> seeds;
    std::vector<Outcome> accept;       // allowed outcomes
    std::vector<EventSpec> events;
    std::size_t min_log = 0;           // at least this many sink-log entries
};

bool run_case(const std::string& dir, const CorpusCase& c, std::ostream& out) {
    ParsedNetwork parsed;
    try {
        parsed = parse_network_file(dir + "/" + c.file);
    } catch (const std::exception& e) {
        out << "FAIL " << c.file << " (parse: " << e.what() << ")\n";
        return false;
    }
    for (auto seed : c.seeds) {
        RunConfig cfg;
        try {
            fill_config(c.opts, cfg);
        } catch (const std::exception& e) {
            out << "FAIL " << c.file << " (config: " << e.what() << ")\n";
            return false;
        }
        cfg.mode = RandomMode{seed};
        cfg.events = c.events;
        RunResult res;
        try {
            res = run(parsed.network, parsed.field, cfg);
        } catch (const std::exception& e) {
            out << "FAIL " << c.file << " seed " << seed << " (" << e.what() << ")\n";
            return false;
        }
        bool outcome_ok = std::find(c.accept.begin(), c.accept.end(), res.trace.outcome) !=
                          c.accept.end();
        if (!outcome_ok) {
            out << "FAIL " << c.file << " seed " << seed << " (outcome "
                << outcome_name(res.trace.outcome) << ")\n";
            return false;
        }
        if (res.log.size() < c.min_log) {
            out << "FAIL " << c.file << " seed " << seed << " (log has " << res.log.size()
                << " entries, want >= " << c.min_log << ")\n";
            return false;
        }
    }
    out << "PASS " << c.file << '\n';
    return true;
}

std::vector<CorpusCase> corpus_cases() {
    const auto Q = Outcome::Quiescent;
    const auto QB = Outcome::QuiescentBlocked;
    const auto AE = Outcome::AllExpired;
    std::vector<CorpusCase> cases;
    cases.push_back({"sample.csn", {}, {1, 2, 3}, {QB}, {}, 1});
    cases.push_back({"sample2.csn", {}, {1, 2, 3}, {Q, QB}, {}, 0});
    cases.push_back({"querying.csn", {}, {1, 2, 3, 4}, {Q, QB, AE}, {}, 0});
    cases.push_back({"polling.csn", {}, {1, 2, 3}, {Q, QB, AE}, {}, 1});
    cases.push_back({"deployment.csn", {}, {1, 2, 3}, {Q, QB}, {}, 0});
    cases.push_back({"deployment2.csn", {}, {1, 2, 3}, {Q, QB}, {}, 0});
    cases.push_back({"sealing.csn", {}, {1, 2, 3}, {Q, QB}, {}, 0});
    cases.push_back({"ping.csn", {}, {1, 2, 3}, {Q, QB, AE}, {}, 0});
    {
        CorpusCase c{"ping_scoped.csn", {}, {1, 2, 3}, {Q, QB}, {}, 1};
        c.opts.extensions = {"state"};
        cases.push_back(c);
    }
    {
        CorpusCase c{"events_alarm.csn", {}, {1, 2}, {Q, QB}, {{0, "senA"}}, 1};
        c.opts.extensions = {"state", "events"};
        cases.push_back(c);
    }
    return cases;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator for a broadcast calculus of sensor networks"};
    app.require_subcommand(1);

    std::string file, script_path, golden_path, field_path;
    std::uint64_t seed = 0;
    bool emit_terms = false;
    std::vector<std::string> event_strs;
    double event_rate = 0.0;
    std::size_t max_depth = 64, max_states = 100000;
    std::string corpus_dir = CSN_DEFAULT_CORPUS_DIR;
    CommonOpts run_opts, explore_opts, replay_opts;

    CLI::App* c_run = app.add_subcommand("run", "run one network to completion");
    c_run->add_option("file", file, "network file")->required();
    c_run->add_option("--seed", seed, "random scheduler seed");
    c_run->add_option("--script", script_path, "scripted schedule file");
    c_run->add_flag("--emit-terms", emit_terms, "print the term after every step");
    c_run->add_option("--event", event_strs, "inject a stimulus, STEP:SENSOR");
    c_run->add_option("--event-rate", event_rate, "per-sensor stimulus probability");
    add_common(c_run, run_opts);

    CLI::App* c_replay = app.add_subcommand("replay", "re-run a golden trace and compare");
    c_replay->add_option("file", file, "network file")->required();
    c_replay->add_option("--golden", golden_path, "golden trace file")->required();
    add_common(c_replay, replay_opts);

    CLI::App* c_explore = app.add_subcommand("explore", "enumerate reachable states");
    c_explore->add_option("file", file, "network file")->required();
    c_explore->add_option("--max-depth", max_depth, "depth bound");
    c_explore->add_option("--max-states", max_states, "state bound");
    add_common(c_explore, explore_opts);

    CLI::App* c_parse = app.add_subcommand("parse", "parse and pretty-print a network file");
    c_parse->add_option("file", file, "network file")->required();

    CLI::App* c_corpus = app.add_subcommand("corpus", "run the bundled example scenarios");
    c_corpus->add_option("--corpus-dir", corpus_dir, "directory with the example files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_parse->parsed()) {
            ParsedNetwork parsed = parse_network_file(file);
            std::cout << pretty_file(parsed.network, parsed.field, parsed.has_field) << std::endl;
            return 0;
        }

        if (c_run->parsed()) {
            ParsedNetwork parsed = parse_network_file(file);
            RunConfig cfg;
            fill_config(run_opts, cfg);
            cfg.emit_terms = emit_terms;
            cfg.event_rate = event_rate;
            for (const auto& s : event_strs) cfg.events.push_back(parse_event(s));
            if (!script_path.empty()) {
                auto steps = read_script(script_path);
                cfg.max_steps = std::min(cfg.max_steps, steps.size());
                cfg.mode = ScriptedMode{std::move(steps)};
            } else {
                cfg.mode = RandomMode{seed};
            }
            return run_and_report(parsed, cfg, std::cout);
        }

        if (c_replay->parsed()) {
            ParsedNetwork parsed = parse_network_file(file);
            RunConfig cfg;
            fill_config(replay_opts, cfg);
            auto steps = read_script(golden_path);
            cfg.max_steps = steps.size();
            cfg.mode = ScriptedMode{std::move(steps)};
            RunResult res = run(parsed.network, parsed.field, cfg);
            std::ostringstream regen;
            print_run(regen, res, cfg.energy);
            regen << '\n';
            std::ifstream in(golden_path);
            std::stringstream want;
            want << in.rdbuf();
            if (regen.str() != want.str()) {
                std::cout << "replay MISMATCH\n--- got ---\n"
                          << regen.str() << "--- want ---\n"
                          << want.str() << std::endl;
                return 1;
            }
            std::cout << "replay ok: " << res.trace.steps.size() << " steps" << std::endl;
            return 0;
        }

        if (c_explore->parsed()) {
            ParsedNetwork parsed = parse_network_file(file);
            RunConfig cfg;
            fill_config(explore_opts, cfg);
            cfg.mode = ExhaustiveMode{max_depth, max_states};
            ReachabilityReport rep = explore(parsed.network, parsed.field, cfg);
            std::cout << "states " << rep.states.size() << " edges " << rep.edges.size()
                      << " terminals " << rep.terminals.size() << " faults " << rep.fault_edges
                      << (rep.truncated ? " truncated" : "") << '\n';
            std::size_t shown = 0;
            for (auto id : rep.terminals) {
                const auto& st = rep.states[id];
                std::cout << "terminal depth " << st.depth
                          << (st.blocked ? " blocked " : " quiescent ") << hash_str(st.hash)
                          << '\n';
                if (++shown == 20) {
                    std::cout << "... (" << rep.terminals.size() - shown << " more)\n";
                    break;
                }
            }
            return 0;
        }

        if (c_corpus->parsed()) {
            bool all_ok = true;
            for (const auto& c : corpus_cases()) all_ok &= run_case(corpus_dir, c, std::cout);
            return all_ok ? 0 : 1;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << std::endl;
        return 2;
    } catch (const ScriptMismatch& e) {
        std::cerr << "script mismatch: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 2;
}
