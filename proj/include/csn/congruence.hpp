#pragma once

// Structural congruence. Programs normalize to a multiset of sequential
// threads: parallel composition is flattened and sorted (commutative
// monoid with idle as unit), idle atoms vanish from sequences, and the
// rewriting recurses into sense bodies, branches and module values. At
// network level, composition is a commutative monoid with off as unit and
// a sensor whose battery cannot fund any further step is off.

#include <cstdint>
#include <string>
#include <vector>

#include "csn/ast.hpp"

namespace csn {

struct EnergyConfig {
    Energy c_in = Energy::from_units(1);    // internal step cost
    Energy c_out = Energy::from_units(10);  // broadcast release cost
    Energy exhaustion_threshold() const { return max_energy(c_in, c_out); }
};

// Canonical view of a program: each thread is the atom list of one
// sequential composition, threads sorted by printed form.
struct CanonicalProgram {
    std::vector<std::vector<ProgramPtr>> threads;
};
bool operator==(const CanonicalProgram& a, const CanonicalProgram& b);

ProgramPtr normalize(const ProgramPtr& p);
CanonicalProgram normalize_program(const ProgramPtr& p);
std::vector<std::vector<ProgramPtr>> canonical_threads(const ProgramPtr& normalized);

ModulePtr normalize(const ModulePtr& m);
Sensor canonical_sensor(const Sensor& s);

// Drops exhausted (battery below max(c_in, c_out)) and off sensors, sorts
// the remainder by printed form. Expired bookkeeping passes through.
Network canonical_network(const Network& n, const EnergyConfig& cfg);

std::string canonical_print(const Network& n, const EnergyConfig& cfg);
std::uint64_t canonical_hash(const Network& n, const EnergyConfig& cfg);

bool congruent(const Network& a, const Network& b, const EnergyConfig& cfg);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace csn
