#include "probsens/param_poly.hpp"

#include <algorithm>
#include <stdexcept>

namespace probsens::poly {

namespace {

using UPoly = std::vector<ParamPoly>;  // univariate view, index = degree

void trim(UPoly& u) {
    while (!u.empty() && u.back().is_zero_poly())
        u.pop_back();
}

int deg(const UPoly& u) {
    return static_cast<int>(u.size()) - 1;
}

ParamPoly content(const UPoly& u) {
    ParamPoly g;
    for (const auto& c : u) {
        g = gcd(g, c);
        if (g.is_constant() && !g.is_zero_poly())
            break;
    }
    return g;
}

UPoly primitive(const UPoly& u) {
    if (u.empty())
        return u;
    ParamPoly c = content(u);
    UPoly out;
    out.reserve(u.size());
    for (const auto& coeff : u)
        out.push_back(divide_exact(coeff, c));
    return out;
}

// Pseudo-remainder of f by g in the main variable.
UPoly prem(UPoly f, const UPoly& g) {
    const int dg = deg(g);
    const ParamPoly& lc = g.back();
    int e = deg(f) - dg + 1;
    while (!f.empty() && deg(f) >= dg) {
        ParamPoly lf = f.back();
        int shift = deg(f) - dg;
        for (auto& c : f)
            c = c * lc;
        for (int j = 0; j <= dg; ++j)
            f[static_cast<std::size_t>(j + shift)] -= lf * g[static_cast<std::size_t>(j)];
        trim(f);
        --e;
    }
    if (e > 0) {
        ParamPoly scale = lc.pow(static_cast<unsigned>(e));
        for (auto& c : f)
            c = c * scale;
    }
    return f;
}

std::string smallest_symbol(const ParamPoly& a, const ParamPoly& b) {
    auto sa = a.symbols();
    auto sb = b.symbols();
    sa.insert(sb.begin(), sb.end());
    return *sa.begin();
}

}  // namespace

ParamPoly monic(const ParamPoly& p) {
    if (p.is_zero_poly())
        return p;
    Rational lc = p.leading_coefficient();
    if (lc == 1)
        return p;
    Rational inv = Rational(1) / lc;
    return p.scaled(inv);
}

std::optional<ParamPoly> try_divide(const ParamPoly& a, const ParamPoly& b) {
    if (b.is_zero_poly())
        throw std::domain_error("polynomial division by zero");
    if (b.is_constant())
        return a.scaled(Rational(1) / b.constant_term());
    ParamPoly quotient;
    ParamPoly rem = a;
    const Monomial& lm = b.leading_monomial();
    const Rational& lc = b.leading_coefficient();
    while (!rem.is_zero_poly()) {
        auto q = rem.leading_monomial().divide(lm);
        if (!q)
            return std::nullopt;
        Rational c = rem.leading_coefficient() / lc;
        quotient.add_term(*q, c);
        rem -= b.times_monomial(*q).scaled(c);
    }
    return quotient;
}

ParamPoly divide_exact(const ParamPoly& a, const ParamPoly& b) {
    auto q = try_divide(a, b);
    if (!q)
        throw std::logic_error("inexact polynomial division: (" + to_string(a) + ") / (" + to_string(b) + ")");
    return *q;
}

ParamPoly gcd(const ParamPoly& a, const ParamPoly& b) {
    if (a.is_zero_poly())
        return monic(b);
    if (b.is_zero_poly())
        return monic(a);
    if (a.is_constant() || b.is_constant())
        return ParamPoly(Rational(1));
    if (a == b)
        return monic(a);

    const std::string v = smallest_symbol(a, b);
    UPoly ua = coefficients_in(a, v);
    UPoly ub = coefficients_in(b, v);
    ParamPoly ca = content(ua);
    ParamPoly cb = content(ub);
    ParamPoly c = gcd(ca, cb);
    if (ua.size() == 1 || ub.size() == 1)
        return monic(c);

    UPoly r0 = primitive(ua);
    UPoly r1 = primitive(ub);
    if (deg(r0) < deg(r1))
        std::swap(r0, r1);
    while (!r1.empty()) {
        UPoly r = prem(r0, r1);
        r0 = std::move(r1);
        r1 = primitive(r);
    }
    if (deg(r0) == 0)
        return monic(c);
    return monic(c * from_coefficients(primitive(r0), v));
}

ParamPoly derivative(const ParamPoly& p, const std::string& name) {
    ParamPoly out;
    for (const auto& [m, c] : p.terms()) {
        unsigned e = m.degree(name);
        if (e == 0)
            continue;
        out.add_term(m.with_exponent(name, e - 1), c * e);
    }
    return out;
}

Rational evaluate(const ParamPoly& p, const ParamAssignment& sigma) {
    Rational total = 0;
    for (const auto& [m, c] : p.terms()) {
        Rational term = c;
        for (const auto& [name, e] : m.factors()) {
            auto it = sigma.find(name);
            if (it == sigma.end())
                throw std::invalid_argument("no value assigned to parameter " + name);
            term *= pow(it->second, static_cast<long>(e));
        }
        total += term;
    }
    return total;
}

std::optional<ParamPoly> exact_sqrt(const ParamPoly& p) {
    if (p.is_zero_poly())
        return p;
    const Monomial& lm = p.leading_monomial();
    std::vector<Monomial::Factor> half;
    for (const auto& [name, e] : lm.factors()) {
        if (e % 2 != 0)
            return std::nullopt;
        half.emplace_back(name, e / 2);
    }
    Rational lc_root;
    if (!probsens::exact_sqrt(p.leading_coefficient(), lc_root))
        return std::nullopt;
    ParamPoly root = ParamPoly::term(Monomial(half), lc_root);
    const Monomial lead_root = root.leading_monomial();
    // Newton-style descent: each step fixes the next-largest term of the root.
    for (std::size_t step = 0; step <= p.size() + 1; ++step) {
        ParamPoly rem = p - root * root;
        if (rem.is_zero_poly())
            return root;
        auto q = rem.leading_monomial().divide(lead_root);
        if (!q || !(*q < root.terms().begin()->first))
            return std::nullopt;
        root.add_term(*q, rem.leading_coefficient() / (2 * lc_root));
    }
    return std::nullopt;
}

std::vector<ParamPoly> coefficients_in(const ParamPoly& p, const std::string& name) {
    std::vector<ParamPoly> out(p.degree(name) + 1);
    for (const auto& [m, c] : p.terms())
        out[m.degree(name)].add_term(m.without(name), c);
    return out;
}

ParamPoly from_coefficients(const std::vector<ParamPoly>& coeffs, const std::string& name) {
    ParamPoly out;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        out += coeffs[k].times_monomial(Monomial::symbol(name, static_cast<unsigned>(k)));
    return out;
}

std::string to_string(const ParamPoly& p) {
    return p.to_string([](const Rational& q) { return probsens::to_string(q); },
                       [](const Rational& q) { return sgn(q) < 0; },
                       [](const Rational& q) { return is_integer(q); });
}

}  // namespace probsens::poly
