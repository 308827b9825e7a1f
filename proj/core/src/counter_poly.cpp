#include "probsens/counter_poly.hpp"

#include <algorithm>

namespace probsens {

CounterPoly::CounterPoly(std::vector<ParamExpr> coeffs) : c_(std::move(coeffs)) {
    trim();
}

CounterPoly::CounterPoly(const ParamExpr& constant) {
    if (!constant.is_zero())
        c_.push_back(constant);
}

CounterPoly CounterPoly::n_power(unsigned k, const ParamExpr& coeff) {
    std::vector<ParamExpr> c(k + 1);
    c[k] = coeff;
    return CounterPoly(std::move(c));
}

void CounterPoly::trim() {
    while (!c_.empty() && c_.back().is_zero())
        c_.pop_back();
}

CounterPoly CounterPoly::operator-() const {
    CounterPoly out;
    out.c_.reserve(c_.size());
    for (const auto& c : c_)
        out.c_.push_back(-c);
    return out;
}

CounterPoly operator+(const CounterPoly& a, const CounterPoly& b) {
    std::vector<ParamExpr> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = a.coefficient(i) + b.coefficient(i);
    return CounterPoly(std::move(c));
}

CounterPoly operator-(const CounterPoly& a, const CounterPoly& b) {
    return a + (-b);
}

CounterPoly operator*(const CounterPoly& a, const CounterPoly& b) {
    if (a.is_zero() || b.is_zero())
        return {};
    std::vector<ParamExpr> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j)
            c[i + j] += a.c_[i] * b.c_[j];
    return CounterPoly(std::move(c));
}

CounterPoly CounterPoly::scaled(const ParamExpr& k) const {
    if (k.is_zero())
        return {};
    std::vector<ParamExpr> c;
    c.reserve(c_.size());
    for (const auto& x : c_)
        c.push_back(x * k);
    return CounterPoly(std::move(c));
}

CounterPoly CounterPoly::times_n() const {
    if (c_.empty())
        return {};
    std::vector<ParamExpr> c;
    c.reserve(c_.size() + 1);
    c.emplace_back();
    c.insert(c.end(), c_.begin(), c_.end());
    return CounterPoly(std::move(c));
}

ParamExpr CounterPoly::at(long n) const {
    ParamExpr acc;
    ParamExpr nn{Rational(n)};
    for (std::size_t k = c_.size(); k-- > 0;)
        acc = acc * nn + c_[k];
    return acc;
}

Rational CounterPoly::evaluate(long n, const ParamAssignment& sigma) const {
    Rational acc = 0;
    for (std::size_t k = c_.size(); k-- > 0;)
        acc = acc * n + c_[k].evaluate(sigma);
    return acc;
}

CounterPoly CounterPoly::derivative(const std::string& param) const {
    std::vector<ParamExpr> c;
    c.reserve(c_.size());
    for (const auto& x : c_)
        c.push_back(x.derivative(param));
    return CounterPoly(std::move(c));
}

std::string CounterPoly::to_string() const {
    if (c_.empty())
        return "0";
    std::string out;
    bool first = true;
    for (std::size_t k = c_.size(); k-- > 0;) {
        if (c_[k].is_zero())
            continue;
        bool neg = c_[k].is_negative();
        ParamExpr mag = neg ? -c_[k] : c_[k];
        out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
        first = false;
        std::string ct = "(" + mag.to_string() + ")";
        if (k == 0)
            out += ct;
        else
            out += ct + "*" + (k == 1 ? std::string("n") : "n^" + std::to_string(k));
    }
    return out;
}

}  // namespace probsens
