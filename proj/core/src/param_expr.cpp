#include "probsens/param_expr.hpp"

#include "probsens/errors.hpp"

#include <stdexcept>

namespace probsens {

namespace {

bool is_one(const ParamPoly& p) {
    return p.is_constant() && !p.is_zero_poly() && p.constant_term() == 1;
}

}  // namespace

ParamExpr::ParamExpr(ParamPoly numerator, ParamPoly denominator) {
    if (denominator.is_zero_poly())
        throw std::domain_error("rational function with zero denominator");
    if (numerator.is_zero_poly()) {
        den_ = ParamPoly(Rational(1));
        return;
    }
    if (!denominator.is_constant()) {
        ParamPoly g = poly::gcd(numerator, denominator);
        if (!is_one(g)) {
            numerator = poly::divide_exact(numerator, g);
            denominator = poly::divide_exact(denominator, g);
        }
    }
    Rational lc = denominator.leading_coefficient();
    if (lc != 1) {
        Rational inv = Rational(1) / lc;
        numerator = numerator.scaled(inv);
        denominator = denominator.scaled(inv);
    }
    num_ = std::move(numerator);
    den_ = std::move(denominator);
}

ParamExpr ParamExpr::parameter(const std::string& name) {
    return ParamExpr(ParamPoly::symbol(name), ParamPoly(Rational(1)), Canonical{});
}

Rational ParamExpr::constant_value() const {
    if (!is_constant())
        throw std::logic_error("expression is not constant: " + to_string());
    return num_.constant_term() / den_.constant_term();
}

std::set<std::string> ParamExpr::parameters() const {
    auto out = num_.symbols();
    auto d = den_.symbols();
    out.insert(d.begin(), d.end());
    return out;
}

ParamExpr ParamExpr::operator-() const {
    return ParamExpr(-num_, den_, Canonical{});
}

ParamExpr operator+(const ParamExpr& a, const ParamExpr& b) {
    if (a.is_zero())
        return b;
    if (b.is_zero())
        return a;
    if (a.den_ == b.den_) {
        if (is_one(a.den_))
            return ParamExpr(a.num_ + b.num_, a.den_, ParamExpr::Canonical{});
        return ParamExpr(a.num_ + b.num_, a.den_);
    }
    if (is_one(a.den_))
        return ParamExpr(a.num_ * b.den_ + b.num_, b.den_, ParamExpr::Canonical{});
    if (is_one(b.den_))
        return ParamExpr(a.num_ + b.num_ * a.den_, a.den_, ParamExpr::Canonical{});
    ParamPoly g = poly::gcd(a.den_, b.den_);
    ParamPoly ca = poly::divide_exact(b.den_, g);  // cofactor for a
    ParamPoly cb = poly::divide_exact(a.den_, g);
    return ParamExpr(a.num_ * ca + b.num_ * cb, a.den_ * ca);
}

ParamExpr operator-(const ParamExpr& a, const ParamExpr& b) {
    return a + (-b);
}

ParamExpr operator*(const ParamExpr& a, const ParamExpr& b) {
    if (a.is_zero() || b.is_zero())
        return ParamExpr();
    if (is_one(a.den_) && is_one(b.den_))
        return ParamExpr(a.num_ * b.num_, a.den_, ParamExpr::Canonical{});
    if (a.is_constant())
        return ParamExpr(b.num_.scaled(a.constant_value()), b.den_, ParamExpr::Canonical{});
    if (b.is_constant())
        return ParamExpr(a.num_.scaled(b.constant_value()), a.den_, ParamExpr::Canonical{});
    ParamPoly g1 = poly::gcd(a.num_, b.den_);
    ParamPoly g2 = poly::gcd(b.num_, a.den_);
    ParamPoly n = poly::divide_exact(a.num_, g1) * poly::divide_exact(b.num_, g2);
    ParamPoly d = poly::divide_exact(a.den_, g2) * poly::divide_exact(b.den_, g1);
    Rational lc = d.leading_coefficient();
    if (lc != 1) {
        Rational inv = Rational(1) / lc;
        n = n.scaled(inv);
        d = d.scaled(inv);
    }
    return ParamExpr(std::move(n), std::move(d), ParamExpr::Canonical{});
}

ParamExpr operator/(const ParamExpr& a, const ParamExpr& b) {
    if (b.is_zero())
        throw std::domain_error("division by the zero rational function");
    if (b.is_constant())
        return a * ParamExpr(Rational(1) / b.constant_value());
    return a * ParamExpr(b.den_, b.num_);
}

ParamExpr ParamExpr::pow(long exponent) const {
    if (exponent < 0)
        return ParamExpr(1) / pow(-exponent);
    auto e = static_cast<unsigned>(exponent);
    return ParamExpr(num_.pow(e), den_.pow(e), Canonical{}) * ParamExpr(1);
}

ParamExpr ParamExpr::derivative(const std::string& name) const {
    if (!depends_on(name))
        return ParamExpr();
    ParamPoly dn = poly::derivative(num_, name);
    if (!den_.contains(name))
        return ParamExpr(dn, den_);
    ParamPoly dd = poly::derivative(den_, name);
    return ParamExpr(dn * den_ - num_ * dd, den_ * den_);
}

Rational ParamExpr::evaluate(const ParamAssignment& sigma) const {
    Rational d = poly::evaluate(den_, sigma);
    if (probsens::is_zero(d))
        throw SingularAssignmentError(poly::to_string(den_));
    return poly::evaluate(num_, sigma) / d;
}

ParamExpr ParamExpr::substitute(const std::string& name, const ParamExpr& value) const {
    if (!depends_on(name))
        return *this;
    auto eval_poly = [&](const ParamPoly& p) {
        ParamExpr acc;
        auto coeffs = poly::coefficients_in(p, name);
        for (std::size_t k = coeffs.size(); k-- > 0;)
            acc = acc * value + ParamExpr(coeffs[k], ParamPoly(Rational(1)));
        return acc;
    };
    return eval_poly(num_) / eval_poly(den_);
}

bool ParamExpr::is_atomic() const {
    if (!is_one(den_))
        return false;
    if (num_.is_constant())
        return is_integer(num_.constant_term()) && sgn(num_.constant_term()) >= 0;
    return num_.size() == 1 && num_.leading_coefficient() == 1;
}

bool ParamExpr::is_negative() const {
    return !num_.is_zero_poly() && sgn(num_.leading_coefficient()) < 0;
}

std::string ParamExpr::to_string() const {
    std::string n = poly::to_string(num_);
    if (is_one(den_))
        return n;
    std::string d = poly::to_string(den_);
    bool simple_num = num_.size() == 1 && (num_.is_constant() || num_.leading_coefficient() == 1);
    bool simple_den = den_.size() == 1;
    return (simple_num ? n : "(" + n + ")") + "/" + (simple_den ? d : "(" + d + ")");
}

bool operator<(const ParamExpr& a, const ParamExpr& b) {
    if (a.num_.terms() != b.num_.terms())
        return a.num_.terms() < b.num_.terms();
    return a.den_.terms() < b.den_.terms();
}

}  // namespace probsens
