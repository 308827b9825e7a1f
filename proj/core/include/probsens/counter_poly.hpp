#pragma once

#include "probsens/param_expr.hpp"

#include <string>
#include <vector>

namespace probsens {

/// Polynomial in the loop counter n with ParamExpr coefficients, stored by
/// ascending degree with no trailing zeros.
class CounterPoly {
public:
    CounterPoly() = default;
    explicit CounterPoly(std::vector<ParamExpr> coeffs);
    CounterPoly(const ParamExpr& constant);  // NOLINT(google-explicit-constructor)

    static CounterPoly n_power(unsigned k, const ParamExpr& coeff = ParamExpr(1));

    const std::vector<ParamExpr>& coefficients() const noexcept { return c_; }
    bool is_zero() const noexcept { return c_.empty(); }
    /// Degree; -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    ParamExpr coefficient(std::size_t k) const { return k < c_.size() ? c_[k] : ParamExpr(); }

    CounterPoly operator-() const;
    friend CounterPoly operator+(const CounterPoly& a, const CounterPoly& b);
    friend CounterPoly operator-(const CounterPoly& a, const CounterPoly& b);
    friend CounterPoly operator*(const CounterPoly& a, const CounterPoly& b);
    CounterPoly scaled(const ParamExpr& k) const;
    /// n * P(n)
    CounterPoly times_n() const;

    ParamExpr at(long n) const;
    Rational evaluate(long n, const ParamAssignment& sigma) const;
    CounterPoly derivative(const std::string& param) const;

    std::string to_string() const;

    friend bool operator==(const CounterPoly& a, const CounterPoly& b) { return a.c_ == b.c_; }

private:
    void trim();
    std::vector<ParamExpr> c_;
};

inline bool is_zero(const CounterPoly& p) {
    return p.is_zero();
}

}  // namespace probsens
