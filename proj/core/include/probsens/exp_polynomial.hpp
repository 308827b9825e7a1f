#pragma once

#include "probsens/counter_poly.hpp"
#include "probsens/param_expr.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <optional>
#include <string>
#include <vector>

namespace probsens {

using Float = boost::multiprecision::cpp_bin_float_quad;

/// Element a + b*sqrt(disc) of a quadratic extension of the parameter field;
/// the discriminant is supplied by the caller.
struct QuadraticScalar {
    ParamExpr a;
    ParamExpr b;

    bool is_zero() const { return a.is_zero() && b.is_zero(); }
    QuadraticScalar operator-() const { return {-a, -b}; }
    friend QuadraticScalar operator+(const QuadraticScalar& x, const QuadraticScalar& y) { return {x.a + y.a, x.b + y.b}; }
    friend QuadraticScalar operator-(const QuadraticScalar& x, const QuadraticScalar& y) { return {x.a - y.a, x.b - y.b}; }
    QuadraticScalar scaled(const ParamExpr& k) const { return {a * k, b * k}; }
    friend bool operator==(const QuadraticScalar& x, const QuadraticScalar& y) = default;

    static QuadraticScalar mul(const QuadraticScalar& x, const QuadraticScalar& y, const ParamExpr& disc);
    static QuadraticScalar inverse(const QuadraticScalar& x, const ParamExpr& disc);
};

/// Eigenvalue of a C-finite system: a rational function of the parameters
/// or one root of an irreducible monic quadratic x^2 + qb*x + qc.
class EigenValue {
public:
    enum class Kind { Rational, Quadratic };

    static EigenValue rational(ParamExpr value);
    /// Root (-qb + s*sqrt(qb^2 - 4*qc))/2 with s = +1 for index 0, -1 for index 1.
    static EigenValue quadratic_root(ParamExpr qb, ParamExpr qc, int index);

    Kind kind() const noexcept { return kind_; }
    bool is_rational() const noexcept { return kind_ == Kind::Rational; }
    const ParamExpr& value() const { return value_; }
    const ParamExpr& qb() const { return qb_; }
    const ParamExpr& qc() const { return qc_; }
    int index() const noexcept { return index_; }
    ParamExpr discriminant() const;
    EigenValue conjugate() const;
    /// alpha + beta*sqrt(disc); beta is zero for rational eigenvalues.
    QuadraticScalar as_scalar() const;
    bool depends_on(const std::string& param) const;

    std::string to_string() const;

    friend bool operator==(const EigenValue& x, const EigenValue& y);
    friend bool operator<(const EigenValue& x, const EigenValue& y);

private:
    Kind kind_ = Kind::Rational;
    ParamExpr value_;
    ParamExpr qb_;
    ParamExpr qc_;
    int index_ = 0;
};

/// Term (P(n) + R(n)*sqrt(disc)) * lambda^n. R is zero for rational eigenvalues.
struct ExpTerm {
    EigenValue lambda;
    CounterPoly poly;
    CounterPoly radical;
};

struct EvalResult {
    std::optional<Rational> exact;
    Float approx;

    double to_double() const { return approx.convert_to<double>(); }
};

/// Exponential polynomial with an explicit transient prefix: value(n) is
/// prefix[n] for n < n0 = prefix.size(), and sum_k P_k(n)*lambda_k^n after.
class ExpPolynomial {
public:
    ExpPolynomial() = default;
    ExpPolynomial(std::vector<ParamExpr> prefix, std::vector<ExpTerm> terms);

    static ExpPolynomial constant(const ParamExpr& c);
    static ExpPolynomial geometric(const ParamExpr& coeff, const ParamExpr& lambda);

    const std::vector<ParamExpr>& prefix() const noexcept { return prefix_; }
    const std::vector<ExpTerm>& terms() const noexcept { return terms_; }
    std::size_t n0() const noexcept { return prefix_.size(); }
    bool is_zero() const;

    /// Symbolic value at a concrete index; quadratic conjugates cancel exactly.
    ParamExpr at(long n) const;
    /// Value under a parameter assignment. Exact whenever conjugate radicals
    /// cancel (always, for closed forms of rational sequences); the float is
    /// computed in 113-bit precision.
    EvalResult evaluate(long n, const ParamAssignment& sigma) const;

    ExpPolynomial diff(const std::string& param) const;
    ExpPolynomial scaled(const ParamExpr& k) const;
    friend ExpPolynomial operator+(const ExpPolynomial& a, const ExpPolynomial& b);
    friend ExpPolynomial operator-(const ExpPolynomial& a, const ExpPolynomial& b);

    /// "prefix: [v0, ...]; n>=n0: sum of P_k(n)*(lambda_k)^n"
    std::string to_text() const;
    std::string to_json() const;

    friend bool operator==(const ExpPolynomial& a, const ExpPolynomial& b);

private:
    void canonicalize();
    ParamExpr closed_at(long n) const;

    std::vector<ParamExpr> prefix_;
    std::vector<ExpTerm> terms_;
};

ExpPolynomial ep_diff(const ExpPolynomial& f, const std::string& param);

}  // namespace probsens
