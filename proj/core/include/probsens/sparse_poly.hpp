#pragma once

#include "probsens/monomial.hpp"
#include "probsens/rational.hpp"

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace probsens {

/// Sparse multivariate polynomial over an exact coefficient field. Terms are
/// keyed by Monomial (degree-lex ascending); zero coefficients are never
/// stored, so structural equality is value equality.
///
/// `Coeff` must provide +, -, *, ==, construction from int, and a free
/// function `is_zero(const Coeff&)`.
template <class Coeff>
class SparsePoly {
public:
    using TermMap = std::map<Monomial, Coeff>;

    SparsePoly() = default;
    SparsePoly(const Coeff& constant) {  // NOLINT(google-explicit-constructor)
        if (!is_zero(constant))
            terms_.emplace(Monomial(), constant);
    }

    static SparsePoly term(const Monomial& m, const Coeff& c) {
        SparsePoly p;
        if (!is_zero(c))
            p.terms_.emplace(m, c);
        return p;
    }
    static SparsePoly symbol(const std::string& name) { return term(Monomial::symbol(name), Coeff(1)); }

    const TermMap& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero_poly() const noexcept { return terms_.empty(); }
    bool is_constant() const noexcept {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
    }
    Coeff constant_term() const {
        auto it = terms_.find(Monomial());
        return it == terms_.end() ? Coeff(0) : it->second;
    }
    Coeff coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Coeff(0) : it->second;
    }

    const Monomial& leading_monomial() const { return require_nonzero().rbegin()->first; }
    const Coeff& leading_coefficient() const { return require_nonzero().rbegin()->second; }

    unsigned degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.degree(); }
    unsigned degree(std::string_view name) const {
        unsigned d = 0;
        for (const auto& [m, c] : terms_)
            d = std::max(d, m.degree(name));
        return d;
    }
    bool contains(std::string_view name) const {
        for (const auto& [m, c] : terms_)
            if (m.contains(name))
                return true;
        return false;
    }
    std::set<std::string> symbols() const {
        std::set<std::string> out;
        for (const auto& [m, c] : terms_)
            for (const auto& f : m.factors())
                out.insert(f.first);
        return out;
    }

    void add_term(const Monomial& m, const Coeff& c) {
        if (is_zero(c))
            return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second = it->second + c;
            if (is_zero(it->second))
                terms_.erase(it);
        }
    }

    SparsePoly& operator+=(const SparsePoly& o) {
        for (const auto& [m, c] : o.terms_)
            add_term(m, c);
        return *this;
    }
    SparsePoly& operator-=(const SparsePoly& o) {
        for (const auto& [m, c] : o.terms_)
            add_term(m, Coeff(0) - c);
        return *this;
    }
    SparsePoly& operator*=(const SparsePoly& o) { return *this = *this * o; }

    friend SparsePoly operator+(SparsePoly a, const SparsePoly& b) { return a += b; }
    friend SparsePoly operator-(SparsePoly a, const SparsePoly& b) { return a -= b; }
    SparsePoly operator-() const {
        SparsePoly out;
        for (const auto& [m, c] : terms_)
            out.terms_.emplace_hint(out.terms_.end(), m, Coeff(0) - c);
        return out;
    }
    friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) {
        SparsePoly out;
        if (a.is_zero_poly() || b.is_zero_poly())
            return out;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_)
                out.add_term(ma * mb, ca * cb);
        return out;
    }
    SparsePoly scaled(const Coeff& k) const {
        SparsePoly out;
        if (is_zero(k))
            return out;
        for (const auto& [m, c] : terms_)
            out.add_term(m, c * k);
        return out;
    }
    SparsePoly times_monomial(const Monomial& mono) const {
        SparsePoly out;
        for (const auto& [m, c] : terms_)
            out.terms_.emplace(m * mono, c);
        return out;
    }
    SparsePoly pow(unsigned e) const {
        SparsePoly result(Coeff(1));
        SparsePoly base = *this;
        while (e > 0) {
            if (e & 1U)
                result = result * base;
            e >>= 1U;
            if (e > 0)
                base = base * base;
        }
        return result;
    }

    /// Replaces every occurrence of `name` with `value`.
    SparsePoly substitute(const std::string& name, const SparsePoly& value) const {
        if (!contains(name))
            return *this;
        std::map<unsigned, SparsePoly> powers;
        SparsePoly out;
        for (const auto& [m, c] : terms_) {
            unsigned e = m.degree(name);
            if (e == 0) {
                out.add_term(m, c);
                continue;
            }
            auto it = powers.find(e);
            if (it == powers.end())
                it = powers.emplace(e, value.pow(e)).first;
            out += it->second.times_monomial(m.without(name)).scaled(c);
        }
        return out;
    }

    template <class F>
    auto map_coefficients(F&& f) const -> SparsePoly<std::invoke_result_t<F, const Coeff&>> {
        SparsePoly<std::invoke_result_t<F, const Coeff&>> out;
        for (const auto& [m, c] : terms_)
            out.add_term(m, f(c));
        return out;
    }

    friend bool operator==(const SparsePoly& a, const SparsePoly& b) { return a.terms_ == b.terms_; }

    /// Renders terms in descending order, e.g. "d*vp^2 - 2*d + 1".
    std::string to_string(const std::function<std::string(const Coeff&)>& coeff_text,
                          const std::function<bool(const Coeff&)>& is_negative,
                          const std::function<bool(const Coeff&)>& is_atomic) const {
        if (terms_.empty())
            return "0";
        std::string out;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [m, c] = *it;
            bool neg = is_negative(c);
            Coeff mag = neg ? Coeff(0) - c : c;
            std::string ct = coeff_text(mag);
            if (!is_atomic(mag))
                ct = "(" + ct + ")";
            if (first)
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            first = false;
            if (m.is_one())
                out += ct;
            else if (ct == "1")
                out += m.to_string();
            else
                out += ct + "*" + m.to_string();
        }
        return out;
    }

private:
    const TermMap& require_nonzero() const {
        if (terms_.empty())
            throw std::logic_error("leading term of the zero polynomial");
        return terms_;
    }

    template <class>
    friend class SparsePoly;

    TermMap terms_;
};

}  // namespace probsens
