#pragma once

#include "probsens/dependency.hpp"
#include "probsens/normalizer.hpp"
#include "probsens/recurrence.hpp"

#include <map>
#include <memory>
#include <shared_mutex>
#include <string>

namespace probsens {

/// Raw moment E(X^k) of a distribution with constant arguments.
ParamExpr distribution_moment(const DistDraw& dist, unsigned k);

/// Polynomial equal to 1 on support points satisfying `c` and 0 on the rest.
PolyExpr iverson_polynomial(const BExpr& c, const std::map<std::string, std::vector<ParamExpr>>& supports);

/// Builds moment recurrences over a normalized program by bottom-up
/// substitution of the loop body. Results are memoized; concurrent calls
/// are safe.
class MomentEngine {
public:
    explicit MomentEngine(const NormalizedProgram& np);
    MomentEngine(const NormalizedProgram& np, FiniteValues finite);

    const NormalizedProgram& program() const { return np_; }
    const FiniteValues& finite() const { return finite_; }

    /// E(M_{n+1}) as a polynomial over the variables at iteration n.
    PolyExpr next_moment(const Monomial& m) const;
    Recurrence moment_recurrence(const Monomial& m) const;
    /// E(M_0).
    ParamExpr initial_moment(const Monomial& m) const;

    /// Reduces powers of finite variables below their support size.
    PolyExpr reduce(const PolyExpr& p) const;

private:
    PolyExpr substitute(const PolyExpr& p, const GuardedAssignment& a) const;
    const PolyExpr& reduced_power(const std::string& var, unsigned e) const;

    NormalizedProgram np_;
    FiniteValues finite_;
    std::map<std::string, PolyExpr> iverson_;  // guard text -> indicator

    mutable std::shared_mutex mutex_;
    mutable std::map<Monomial, PolyExpr> memo_;
    mutable std::map<std::pair<std::string, unsigned>, PolyExpr> powers_;
};

}  // namespace probsens
