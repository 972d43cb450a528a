// Python bindings: a thin veneer over the parser, engine and schedulers.
// Documents are parsed once and carried around as opaque handles; runs and
// explorations return plain dictionaries and strings so the Python side
// needs no mirrored type hierarchy.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "csn/congruence.hpp"
#include "csn/engine.hpp"
#include "csn/names.hpp"
#include "csn/parser.hpp"
#include "csn/printer.hpp"
#include "csn/scheduler.hpp"

namespace py = pybind11;
using namespace csn;

namespace {

struct Document {
    Network network;
    FieldSpec field;
    bool has_field = false;
};

Document doc_from(ParsedNetwork&& p) {
    return Document{std::move(p.network), std::move(p.field), p.has_field};
}

Features features_from(const std::vector<std::string>& extensions) {
    Features f;
    for (const auto& e : extensions) {
        if (e == "state") {
            f.state = true;
        } else if (e == "events") {
            f.events = true;
        } else if (e == "hash-nonce") {
            f.state = true;
            f.hash_nonce = true;
        } else {
            throw py::value_error("unknown extension '" + e + "'");
        }
    }
    return f;
}

DeliveryPolicy delivery_from(const std::string& name) {
    if (name == "all") return DeliveryPolicy::AllInRange;
    if (name == "nondet") return DeliveryPolicy::Nondeterministic;
    throw py::value_error("delivery must be 'all' or 'nondet', got '" + name + "'");
}

EnergyConfig energy_from(const std::string& cin_cost, const std::string& cout_cost) {
    EnergyConfig cfg;
    cfg.c_in = Energy::parse(cin_cost);
    cfg.c_out = Energy::parse(cout_cost);
    return cfg;
}

RuleKind rule_from(const std::string& name) {
    auto k = rule_from_name(name);
    if (!k) throw py::value_error("unknown rule name '" + name + "'");
    return *k;
}

py::dict run_report(const RunResult& r, const EnergyConfig& cfg) {
    py::list steps;
    for (const auto& st : r.trace.steps) {
        py::dict d;
        d["rule"] = std::string(rule_name(st.label.rule));
        d["subject"] = st.label.subject;
        d["object"] = st.label.object;
        d["energy"] = st.label.energy.str();
        d["hash"] = st.hash;
        d["description"] = st.label.description;
        if (!st.term.empty()) d["term"] = st.term;
        steps.append(d);
    }
    py::list log;
    for (const auto& e : r.log) log.append(log_entry_str(e));
    py::dict counts;
    for (const auto& [rule, count] : r.rule_counts) counts[rule_name(rule)] = count;

    py::dict out;
    out["outcome"] = std::string(outcome_name(r.trace.outcome));
    out["steps"] = steps;
    out["spent"] = r.spent.str();
    out["log"] = log;
    out["rule_counts"] = counts;
    out["final"] = canonical_print(r.network, cfg);
    py::list expired;
    for (const auto& e : r.network.expired) {
        expired.append(py::make_tuple(e.name, e.residual.str()));
    }
    out["expired"] = expired;
    py::dict batteries;
    for (const auto& s : r.network.sensors) batteries[py::str(s.name)] = s.battery.str();
    out["batteries"] = batteries;
    return out;
}

}  // namespace

PYBIND11_MODULE(_csn, m) {
    m.doc() = "Sensor-network calculus: parser, step engine and schedulers";

    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<EngineError>(m, "EngineError");
    py::register_exception<ScriptMismatch>(m, "ScriptMismatch");
    py::register_exception<EnergyError>(m, "EnergyError");

    py::class_<Document>(m, "Document")
        .def_property_readonly("has_field", [](const Document& d) { return d.has_field; })
        .def("pretty", [](const Document& d) { return pretty_file(d.network, d.field); })
        .def("sensor_names",
             [](const Document& d) {
                 std::vector<std::string> names;
                 for (const auto& s : d.network.sensors) names.push_back(s.name);
                 return names;
             })
        .def("battery",
             [](const Document& d, const std::string& name) {
                 const Sensor* s = find_sensor(d.network, name);
                 if (!s) throw py::key_error("no sensor named '" + name + "'");
                 return s->battery.str();
             })
        .def("__repr__", [](const Document& d) {
            return "<Document with " + std::to_string(d.network.sensors.size()) + " sensor(s)>";
        });

    m.def(
        "parse_network",
        [](const std::string& text, const std::string& base_dir) {
            return doc_from(parse_network(text, base_dir));
        },
        py::arg("text"), py::arg("base_dir") = ".");

    m.def(
        "parse_network_file",
        [](const std::string& path) { return doc_from(parse_network_file(path)); },
        py::arg("path"));

    m.def(
        "pretty_program",
        [](const std::string& text) { return pretty(parse_program(text)); }, py::arg("text"),
        "Parse a program fragment and return its printed form");

    m.def(
        "free_names",
        [](const std::string& text) {
            auto names = free_names(parse_program(text));
            return std::vector<std::string>(names.begin(), names.end());
        },
        py::arg("text"));

    m.def(
        "congruent",
        [](const Document& a, const Document& b, const std::string& cin_cost,
           const std::string& cout_cost) {
            return congruent(a.network, b.network, energy_from(cin_cost, cout_cost));
        },
        py::arg("a"), py::arg("b"), py::arg("cin_cost") = "1", py::arg("cout_cost") = "10");

    m.def(
        "run",
        [](const Document& doc, std::uint64_t seed,
           std::optional<std::vector<std::tuple<std::string, std::string, std::string>>> script,
           std::size_t max_steps, const std::string& delivery,
           const std::vector<std::string>& extensions,
           const std::vector<std::pair<std::size_t, std::string>>& events, double event_rate,
           bool emit_terms, const std::string& cin_cost, const std::string& cout_cost) {
            RunConfig cfg;
            cfg.energy = energy_from(cin_cost, cout_cost);
            cfg.delivery = delivery_from(delivery);
            cfg.features = features_from(extensions);
            cfg.max_steps = max_steps;
            cfg.event_rate = event_rate;
            cfg.emit_terms = emit_terms;
            for (const auto& [step, sensor] : events) cfg.events.push_back({step, sensor});
            if (script) {
                ScriptedMode mode;
                for (const auto& [rule, subject, object] : *script)
                    mode.steps.push_back({rule_from(rule), subject, object});
                cfg.mode = std::move(mode);
            } else {
                cfg.mode = RandomMode{seed};
            }
            return run_report(run(doc.network, doc.field, cfg), cfg.energy);
        },
        py::arg("doc"), py::arg("seed") = 0, py::arg("script") = py::none(),
        py::arg("max_steps") = 10000, py::arg("delivery") = "all",
        py::arg("extensions") = std::vector<std::string>{},
        py::arg("events") = std::vector<std::pair<std::size_t, std::string>>{},
        py::arg("event_rate") = 0.0, py::arg("emit_terms") = false, py::arg("cin_cost") = "1",
        py::arg("cout_cost") = "10");

    m.def(
        "explore",
        [](const Document& doc, std::size_t max_depth, std::size_t max_states,
           const std::string& delivery, const std::vector<std::string>& extensions,
           const std::string& cin_cost, const std::string& cout_cost) {
            RunConfig cfg;
            cfg.energy = energy_from(cin_cost, cout_cost);
            cfg.delivery = delivery_from(delivery);
            cfg.features = features_from(extensions);
            cfg.mode = ExhaustiveMode{max_depth, max_states};
            ReachabilityReport report = explore(doc.network, doc.field, cfg);

            py::list terminals;
            for (std::size_t t : report.terminals) {
                py::dict d;
                d["depth"] = report.states[t].depth;
                d["hash"] = report.states[t].hash;
                d["blocked"] = report.states[t].blocked;
                d["term"] = canonical_print(report.states[t].network, cfg.energy);
                terminals.append(d);
            }
            py::dict out;
            out["states"] = report.states.size();
            out["edges"] = report.edges.size();
            out["terminals"] = terminals;
            out["truncated"] = report.truncated;
            out["fault_edges"] = report.fault_edges;
            return out;
        },
        py::arg("doc"), py::arg("max_depth") = 64, py::arg("max_states") = 100000,
        py::arg("delivery") = "all", py::arg("extensions") = std::vector<std::string>{},
        py::arg("cin_cost") = "1", py::arg("cout_cost") = "10");
}
