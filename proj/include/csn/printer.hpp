#pragma once

// Pretty-printer. Output re-parses to an equal AST for any term the parser
// can produce; run-time-only values (keys, battery literals) render as
// values of the closest printable form.

#include <string>

#include "csn/ast.hpp"
#include "csn/field.hpp"

namespace csn {

std::string double_str(double d);  // shortest round-trip decimal form

std::string pretty(const Value& v);
std::string pretty(const BExpr& e);
std::string pretty(const ProgramPtr& p);
std::string pretty(const Module& m);
std::string pretty(const Sensor& s);              // "[P, M] name" + bag suffix
std::string pretty_attrs(const Sensor& s);        // "@name position=... ..."
std::string pretty(const Network& n);             // network line only
std::string pretty(const FieldSpec& f);           // body of a "@field" line
std::string pretty_file(const Network& n, const FieldSpec& f,
                        bool include_field = true);  // full document

}  // namespace csn
