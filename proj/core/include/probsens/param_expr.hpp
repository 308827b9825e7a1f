#pragma once

#include "probsens/param_poly.hpp"
#include "probsens/rational.hpp"

#include <ostream>
#include <set>
#include <string>

namespace probsens {

/// Exact rational function in the symbolic parameters over Q.
///
/// Canonical form: numerator and denominator are coprime and the denominator
/// has leading coefficient 1 (degree-lex), so equal values are structurally
/// equal. The zero function is 0/1.
class ParamExpr {
public:
    ParamExpr() : den_(Rational(1)) {}
    ParamExpr(const Rational& value) : num_(value), den_(Rational(1)) {}  // NOLINT(google-explicit-constructor)
    ParamExpr(long value) : ParamExpr(Rational(value)) {}                // NOLINT(google-explicit-constructor)
    ParamExpr(int value) : ParamExpr(Rational(value)) {}                 // NOLINT(google-explicit-constructor)
    ParamExpr(ParamPoly numerator, ParamPoly denominator);

    static ParamExpr parameter(const std::string& name);

    const ParamPoly& numerator() const noexcept { return num_; }
    const ParamPoly& denominator() const noexcept { return den_; }

    bool is_zero() const noexcept { return num_.is_zero_poly(); }
    bool is_constant() const noexcept { return num_.is_constant() && den_.is_constant(); }
    /// Value of a parameter-free expression; throws std::logic_error otherwise.
    Rational constant_value() const;
    bool depends_on(const std::string& name) const { return num_.contains(name) || den_.contains(name); }
    std::set<std::string> parameters() const;

    ParamExpr operator-() const;
    ParamExpr& operator+=(const ParamExpr& o) { return *this = *this + o; }
    ParamExpr& operator-=(const ParamExpr& o) { return *this = *this - o; }
    ParamExpr& operator*=(const ParamExpr& o) { return *this = *this * o; }
    ParamExpr& operator/=(const ParamExpr& o) { return *this = *this / o; }
    friend ParamExpr operator+(const ParamExpr& a, const ParamExpr& b);
    friend ParamExpr operator-(const ParamExpr& a, const ParamExpr& b);
    friend ParamExpr operator*(const ParamExpr& a, const ParamExpr& b);
    /// Throws std::domain_error when `b` is identically zero.
    friend ParamExpr operator/(const ParamExpr& a, const ParamExpr& b);

    ParamExpr pow(long exponent) const;
    ParamExpr derivative(const std::string& name) const;

    /// Exact value under `sigma`; throws SingularAssignmentError when the
    /// denominator vanishes.
    Rational evaluate(const ParamAssignment& sigma) const;
    ParamExpr substitute(const std::string& name, const ParamExpr& value) const;

    /// Fully parenthesized rendering, e.g. "(3*vp)/(4*d*vp - 4*d + 4)".
    std::string to_string() const;
    /// True when to_string() needs no parentheses inside a product.
    bool is_atomic() const;
    bool is_negative() const;

    friend bool operator==(const ParamExpr& a, const ParamExpr& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator<(const ParamExpr& a, const ParamExpr& b);

private:
    struct Canonical {};
    ParamExpr(ParamPoly numerator, ParamPoly denominator, Canonical)
        : num_(std::move(numerator)), den_(std::move(denominator)) {}

    ParamPoly num_;
    ParamPoly den_;
};

inline std::ostream& operator<<(std::ostream& os, const ParamExpr& e) {
    return os << e.to_string();
}

inline bool is_zero(const ParamExpr& e) {
    return e.is_zero();
}

}  // namespace probsens
