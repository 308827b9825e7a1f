#pragma once

#include "probsens/program.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace probsens {

/// Parses one loop program. Identifiers that are never assigned are
/// parameters. Throws ParseError with line/column.
Program parse(std::string_view source);
Program parse_file(const std::string& path);

/// Parses a monomial over program variables such as "x*y^2"; names are not checked.
VarMonomial parse_target(std::string_view text);

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::size_t line = 0;
    std::string message;

    bool is_error() const { return severity == Severity::Error; }
    std::string to_string() const;
};

/// Empty iff the program is valid and fully numeric; symbolic probabilities
/// yield warnings only.
std::vector<Diagnostic> validate(const Program& prog);
bool has_errors(const std::vector<Diagnostic>& diags);

}  // namespace probsens
