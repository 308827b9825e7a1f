#pragma once

#include "probsens/program.hpp"

#include <map>
#include <string>
#include <vector>

namespace probsens {

/// `target = rhs [guard] else else_source`.
struct GuardedAssignment {
    std::string target;
    AssignRhs rhs;
    BExpr guard;
    std::string else_source;

    friend bool operator==(const GuardedAssignment&, const GuardedAssignment&) = default;
};

/// Loop body as a flat sequence of guarded single assignments in which every
/// variable is assigned exactly once. Reads of a variable positioned before
/// its assignment see the previous iteration's value.
///
/// The initialization keeps plain sequential semantics (variables may be
/// reassigned there); its guarded assignments use the target itself as the
/// else source.
struct NormalizedProgram {
    std::set<std::string> parameters;
    std::vector<std::string> variables;               // source variables, in declaration order
    std::map<std::string, std::string> temporaries;  // fresh name -> origin variable
    std::vector<GuardedAssignment> init;
    std::vector<GuardedAssignment> body;

    /// Source variables followed by body temporaries in body order.
    std::vector<std::string> all_variables() const;
    bool is_temporary(const std::string& name) const { return temporaries.count(name) > 0; }
    const GuardedAssignment* assignment_of(const std::string& var) const;
};

NormalizedProgram normalize(const Program& prog);

/// Appends `name = base^exponent` to the body so that the power becomes a
/// plain variable.
NormalizedProgram with_power_variable(const NormalizedProgram& np, const std::string& name,
                                      const std::string& base, unsigned exponent);

/// Source grammar extended with `[C] else v` guards.
std::string print(const NormalizedProgram& np);

}  // namespace probsens
