#pragma once

#include "probsens/exp_polynomial.hpp"
#include "probsens/recurrence.hpp"

#include <map>
#include <vector>

namespace probsens {

/// Univariate polynomial in x with ParamExpr coefficients, ascending degree.
using XPoly = std::vector<ParamExpr>;

struct CharFactor {
    XPoly factor;  // monic
    unsigned multiplicity = 1;
};

/// det(xI - A).
XPoly characteristic_polynomial(const std::vector<std::vector<ParamExpr>>& a);

/// Factorization of a nonzero polynomial into monic linear and irreducible
/// quadratic factors over the parameter field. `candidates` are tried as
/// roots before the generic rules; an unsplit remainder of degree >= 3 is
/// returned as a single entry.
std::vector<CharFactor> factor_charpoly(const XPoly& q, const std::vector<ParamExpr>& candidates = {});

/// Closed forms of every symbol of a closed system. Throws
/// UnsupportedFactorError for characteristic factors of degree >= 3.
std::map<SeqSymbol, ExpPolynomial> solve_system(const RecurrenceSystem& sys);

/// Exact values of every symbol for n = 0..count-1 by forward iteration.
std::map<SeqSymbol, std::vector<ParamExpr>> iterate_system(const RecurrenceSystem& sys, std::size_t count);

}  // namespace probsens
