#pragma once

#include "probsens/param_expr.hpp"
#include "probsens/sparse_poly.hpp"

#include <map>
#include <set>
#include <string>

namespace probsens {

/// Polynomial over program variables with ParamExpr coefficients.
using PolyExpr = SparsePoly<ParamExpr>;
using VarMonomial = Monomial;
using VarValues = std::map<std::string, Rational>;

namespace polyexpr {

std::string to_string(const PolyExpr& p);
std::set<std::string> variables(const PolyExpr& p);
std::set<std::string> parameters(const PolyExpr& p);
bool mentions_parameter(const PolyExpr& p, const std::string& param);
/// Throws std::invalid_argument for unassigned variables or parameters.
Rational evaluate(const PolyExpr& p, const VarValues& vars, const ParamAssignment& sigma);
PolyExpr from_param(const ParamExpr& c);
PolyExpr variable(const std::string& name);

}  // namespace polyexpr
}  // namespace probsens
