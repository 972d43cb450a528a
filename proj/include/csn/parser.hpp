#pragma once

// Concrete syntax for network documents:
//
//   MSensor(a) = { sample = () net.sample[]; sense x in net.forward[p, x]
//                  forward = (x, y) net.forward[x, y] }
//   [net.sample[], MSensor(3)] senX | [idle, {}] senY
//   @senX position=(0, 0) radius=2 battery=100
//   @field constant [21.5]
//
// Module definitions (names start uppercase) are sugar expanded at parse
// time. Sensor attributes default to position (0,0), radius 10 and battery
// 1000 when no @-line names the sensor. '//' starts a line comment.

#include <stdexcept>
#include <string>

#include "csn/ast.hpp"
#include "csn/field.hpp"

namespace csn {

class ParseError : public std::runtime_error {
public:
    enum class Kind { Generic, DuplicateMethod, ReservedName };

    ParseError(Kind kind, const std::string& msg, int line, int col)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                             std::to_string(col) + ")"),
          kind(kind),
          line(line),
          col(col) {}

    Kind kind;
    int line;
    int col;
};

struct ParsedNetwork {
    Network network;
    FieldSpec field;      // constant [0] when the document declares none
    bool has_field = false;
};

// `base_dir` anchors relative grid-file paths.
ParsedNetwork parse_network(const std::string& text, const std::string& base_dir = ".");
ParsedNetwork parse_network_file(const std::string& path);

// Fragment parsers for tests and tooling (no module-name sugar in scope).
ProgramPtr parse_program(const std::string& text);
ModulePtr parse_module_text(const std::string& text);
FieldSpec parse_field_spec(const std::string& text, const std::string& base_dir = ".");

}  // namespace csn
