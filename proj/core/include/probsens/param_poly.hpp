#pragma once

#include "probsens/rational.hpp"
#include "probsens/sparse_poly.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace probsens {

/// Polynomial in symbolic parameters with rational coefficients.
using ParamPoly = SparsePoly<Rational>;
using ParamAssignment = std::map<std::string, Rational>;

namespace poly {

/// Scales `p` so that its leading coefficient (degree-lex) is 1.
ParamPoly monic(const ParamPoly& p);

/// Multivariate division; nullopt unless `b` divides `a` exactly.
std::optional<ParamPoly> try_divide(const ParamPoly& a, const ParamPoly& b);
ParamPoly divide_exact(const ParamPoly& a, const ParamPoly& b);

/// Monic greatest common divisor (recursive primitive PRS over Q[params]).
ParamPoly gcd(const ParamPoly& a, const ParamPoly& b);

ParamPoly derivative(const ParamPoly& p, const std::string& name);

/// Full evaluation; throws std::invalid_argument naming an unassigned symbol.
Rational evaluate(const ParamPoly& p, const ParamAssignment& sigma);

/// Square root when `p` is the square of a polynomial with rational coefficients.
std::optional<ParamPoly> exact_sqrt(const ParamPoly& p);

/// Coefficients of `p` viewed as a univariate polynomial in `name` (index = degree).
std::vector<ParamPoly> coefficients_in(const ParamPoly& p, const std::string& name);
ParamPoly from_coefficients(const std::vector<ParamPoly>& coeffs, const std::string& name);

std::string to_string(const ParamPoly& p);

}  // namespace poly
}  // namespace probsens
