#pragma once

// Free variables and capture-avoiding substitution. Binders are method
// parameters, sense binders and let binders; reserved p/r/b are not
// variables and are never substituted.

#include <map>
#include <set>
#include <string>

#include "csn/ast.hpp"

namespace csn {

using Subst = std::map<std::string, Value>;

std::set<std::string> free_names(const Value& v);
std::set<std::string> free_names(const BExpr& e);
std::set<std::string> free_names(const ProgramPtr& p);
std::set<std::string> free_names(const Module& m);
std::set<std::string> free_names(const Abstraction& a);
std::set<std::string> free_names(const Sensor& s);  // program plus module

Value substitute(const Value& v, const Subst& subst);
BExpr substitute(const BExpr& e, const Subst& subst);
ProgramPtr substitute(const ProgramPtr& p, const Subst& subst);
ModulePtr substitute(const ModulePtr& m, const Subst& subst);

// A name not occurring in `avoid`, derived from `base`.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

}  // namespace csn
