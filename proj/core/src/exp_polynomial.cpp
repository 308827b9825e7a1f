#include "probsens/exp_polynomial.hpp"

#include "json.hpp"

#include <boost/multiprecision/cpp_complex.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>

namespace probsens {

namespace {

using Complex = boost::multiprecision::cpp_complex_quad;

// Above this index values are computed in floating point only.
constexpr long kExactIndexLimit = 4096;

QuadraticScalar qpow(QuadraticScalar base, long e, const ParamExpr& disc) {
    QuadraticScalar result{ParamExpr(1), ParamExpr()};
    while (e > 0) {
        if (e & 1)
            result = QuadraticScalar::mul(result, base, disc);
        e >>= 1;
        if (e > 0)
            base = QuadraticScalar::mul(base, base, disc);
    }
    return result;
}

struct RPair {
    Rational a;
    Rational b;
};

RPair rmul(const RPair& x, const RPair& y, const Rational& disc) {
    return {x.a * y.a + x.b * y.b * disc, x.a * y.b + x.b * y.a};
}

RPair rpow(RPair base, long e, const Rational& disc) {
    RPair result{1, 0};
    while (e > 0) {
        if (e & 1)
            result = rmul(result, base, disc);
        e >>= 1;
        if (e > 0)
            base = rmul(base, base, disc);
    }
    return result;
}

Float to_float(const Rational& q) {
    return Float(q.get_num().get_str()) / Float(q.get_den().get_str());
}

Complex csqrt(const Rational& q) {
    if (sgn(q) >= 0)
        return Complex(boost::multiprecision::sqrt(to_float(q)), Float(0));
    return Complex(Float(0), boost::multiprecision::sqrt(to_float(-q)));
}

std::string coeff_list_text(const CounterPoly& p) {
    return p.to_string();
}

}  // namespace

QuadraticScalar QuadraticScalar::mul(const QuadraticScalar& x, const QuadraticScalar& y, const ParamExpr& disc) {
    if (x.b.is_zero() && y.b.is_zero())
        return {x.a * y.a, ParamExpr()};
    return {x.a * y.a + x.b * y.b * disc, x.a * y.b + x.b * y.a};
}

QuadraticScalar QuadraticScalar::inverse(const QuadraticScalar& x, const ParamExpr& disc) {
    if (x.b.is_zero())
        return {ParamExpr(1) / x.a, ParamExpr()};
    ParamExpr norm = x.a * x.a - x.b * x.b * disc;
    return {x.a / norm, -x.b / norm};
}

EigenValue EigenValue::rational(ParamExpr value) {
    EigenValue e;
    e.kind_ = Kind::Rational;
    e.value_ = std::move(value);
    return e;
}

EigenValue EigenValue::quadratic_root(ParamExpr qb, ParamExpr qc, int index) {
    EigenValue e;
    e.kind_ = Kind::Quadratic;
    e.qb_ = std::move(qb);
    e.qc_ = std::move(qc);
    e.index_ = index;
    return e;
}

ParamExpr EigenValue::discriminant() const {
    if (is_rational())
        return ParamExpr();
    return qb_ * qb_ - ParamExpr(4) * qc_;
}

EigenValue EigenValue::conjugate() const {
    if (is_rational())
        return *this;
    return quadratic_root(qb_, qc_, 1 - index_);
}

QuadraticScalar EigenValue::as_scalar() const {
    if (is_rational())
        return {value_, ParamExpr()};
    Rational half(1, 2);
    return {-qb_ * ParamExpr(half), ParamExpr(index_ == 0 ? half : Rational(-half))};
}

bool EigenValue::depends_on(const std::string& param) const {
    if (is_rational())
        return value_.depends_on(param);
    return qb_.depends_on(param) || qc_.depends_on(param);
}

std::string EigenValue::to_string() const {
    if (is_rational())
        return value_.to_string();
    auto s = as_scalar();
    return "(" + s.a.to_string() + (index_ == 0 ? " + " : " - ") + "(1/2)*sqrt(" + discriminant().to_string() + "))";
}

bool operator==(const EigenValue& x, const EigenValue& y) {
    if (x.kind_ != y.kind_)
        return false;
    if (x.is_rational())
        return x.value_ == y.value_;
    return x.index_ == y.index_ && x.qb_ == y.qb_ && x.qc_ == y.qc_;
}

bool operator<(const EigenValue& x, const EigenValue& y) {
    if (x.kind_ != y.kind_)
        return x.kind_ < y.kind_;
    if (x.is_rational())
        return x.value_ < y.value_;
    if (!(x.qb_ == y.qb_))
        return x.qb_ < y.qb_;
    if (!(x.qc_ == y.qc_))
        return x.qc_ < y.qc_;
    return x.index_ < y.index_;
}

ExpPolynomial::ExpPolynomial(std::vector<ParamExpr> prefix, std::vector<ExpTerm> terms)
    : prefix_(std::move(prefix)), terms_(std::move(terms)) {
    canonicalize();
}

ExpPolynomial ExpPolynomial::constant(const ParamExpr& c) {
    if (c.is_zero())
        return {};
    return ExpPolynomial({}, {ExpTerm{EigenValue::rational(ParamExpr(1)), CounterPoly(c), CounterPoly()}});
}

ExpPolynomial ExpPolynomial::geometric(const ParamExpr& coeff, const ParamExpr& lambda) {
    return ExpPolynomial({}, {ExpTerm{EigenValue::rational(lambda), CounterPoly(coeff), CounterPoly()}});
}

bool ExpPolynomial::is_zero() const {
    if (!terms_.empty())
        return false;
    return std::all_of(prefix_.begin(), prefix_.end(), [](const ParamExpr& v) { return v.is_zero(); });
}

void ExpPolynomial::canonicalize() {
    std::sort(terms_.begin(), terms_.end(), [](const ExpTerm& a, const ExpTerm& b) { return a.lambda < b.lambda; });
    std::vector<ExpTerm> merged;
    for (auto& t : terms_) {
        if (t.lambda.is_rational())
            t.radical = CounterPoly();
        if (!merged.empty() && merged.back().lambda == t.lambda) {
            merged.back().poly = merged.back().poly + t.poly;
            merged.back().radical = merged.back().radical + t.radical;
        } else {
            merged.push_back(std::move(t));
        }
    }
    terms_.clear();
    std::vector<ExpTerm> zero_roots;
    for (auto& t : merged) {
        if (t.poly.is_zero() && t.radical.is_zero())
            continue;
        if (t.lambda.is_rational() && t.lambda.value().is_zero())
            zero_roots.push_back(std::move(t));
        else
            terms_.push_back(std::move(t));
    }
    // A zero eigenvalue only contributes at n = 0 (0^0 = 1).
    if (!zero_roots.empty() && prefix_.empty()) {
        ParamExpr v0 = closed_at(0);
        for (const auto& t : zero_roots)
            v0 += t.poly.at(0);
        prefix_.push_back(v0);
    }
    try {
        while (!prefix_.empty() && prefix_.back() == closed_at(static_cast<long>(prefix_.size()) - 1))
            prefix_.pop_back();
    } catch (const std::logic_error&) {
    }
}

ParamExpr ExpPolynomial::closed_at(long n) const {
    ParamExpr acc;
    std::map<ParamExpr, ParamExpr> radicals;
    for (const auto& t : terms_) {
        if (t.lambda.is_rational()) {
            acc += t.poly.at(n) * t.lambda.value().pow(n);
            continue;
        }
        ParamExpr disc = t.lambda.discriminant();
        QuadraticScalar c{t.poly.at(n), t.radical.at(n)};
        QuadraticScalar v = QuadraticScalar::mul(c, qpow(t.lambda.as_scalar(), n, disc), disc);
        acc += v.a;
        radicals[disc] += v.b;
    }
    for (const auto& [disc, r] : radicals)
        if (!r.is_zero())
            throw std::logic_error("radical parts do not cancel; not a rational sequence");
    return acc;
}

ParamExpr ExpPolynomial::at(long n) const {
    if (n < 0)
        throw std::invalid_argument("negative index");
    if (static_cast<std::size_t>(n) < prefix_.size())
        return prefix_[static_cast<std::size_t>(n)];
    return closed_at(n);
}

EvalResult ExpPolynomial::evaluate(long n, const ParamAssignment& sigma) const {
    if (n < 0)
        throw std::invalid_argument("negative index");
    EvalResult out;
    if (static_cast<std::size_t>(n) < prefix_.size()) {
        Rational v = prefix_[static_cast<std::size_t>(n)].evaluate(sigma);
        out.exact = v;
        out.approx = to_float(v);
        return out;
    }
    if (n <= kExactIndexLimit) {
        Rational acc = 0;
        std::map<ParamExpr, Rational> radicals;
        std::map<ParamExpr, Rational> disc_values;
        for (const auto& t : terms_) {
            if (t.lambda.is_rational()) {
                acc += t.poly.evaluate(n, sigma) * pow(t.lambda.value().evaluate(sigma), n);
                continue;
            }
            ParamExpr disc = t.lambda.discriminant();
            Rational d = disc.evaluate(sigma);
            disc_values[disc] = d;
            auto s = t.lambda.as_scalar();
            RPair lam{s.a.evaluate(sigma), s.b.evaluate(sigma)};
            RPair c{t.poly.evaluate(n, sigma), t.radical.evaluate(n, sigma)};
            RPair v = rmul(c, rpow(lam, n, d), d);
            acc += v.a;
            radicals[disc] += v.b;
        }
        bool cancelled = true;
        Float residual = 0;
        for (const auto& [disc, r] : radicals) {
            if (probsens::is_zero(r))
                continue;
            cancelled = false;
            residual += (to_float(r) * csqrt(disc_values[disc])).real();
        }
        if (cancelled)
            out.exact = acc;
        out.approx = to_float(acc) + residual;
        return out;
    }
    Complex acc(0);
    for (const auto& t : terms_) {
        if (t.lambda.is_rational()) {
            Float lam = to_float(t.lambda.value().evaluate(sigma));
            acc += Complex(to_float(t.poly.evaluate(n, sigma)) * boost::multiprecision::pow(lam, n), Float(0));
            continue;
        }
        Complex root = csqrt(t.lambda.discriminant().evaluate(sigma));
        auto s = t.lambda.as_scalar();
        Complex lam = Complex(to_float(s.a.evaluate(sigma))) + Complex(to_float(s.b.evaluate(sigma))) * root;
        Complex c = Complex(to_float(t.poly.evaluate(n, sigma))) + Complex(to_float(t.radical.evaluate(n, sigma))) * root;
        acc += c * pow(lam, Complex(Float(n)));
    }
    out.approx = acc.real();
    return out;
}

ExpPolynomial ExpPolynomial::diff(const std::string& param) const {
    std::vector<ParamExpr> prefix;
    prefix.reserve(prefix_.size());
    for (const auto& v : prefix_)
        prefix.push_back(v.derivative(param));
    std::vector<ExpTerm> terms;
    for (const auto& t : terms_) {
        if (t.lambda.is_rational()) {
            const ParamExpr& lam = t.lambda.value();
            CounterPoly q = t.poly.derivative(param);
            ParamExpr dlam = lam.derivative(param);
            if (!dlam.is_zero())
                q = q + t.poly.times_n().scaled(dlam / lam);
            terms.push_back({t.lambda, q, CounterPoly()});
            continue;
        }
        ParamExpr disc = t.lambda.discriminant();
        ParamExpr ddisc = disc.derivative(param);
        QuadraticScalar lam = t.lambda.as_scalar();
        QuadraticScalar dlam{lam.a.derivative(param), lam.b * ddisc / (ParamExpr(2) * disc)};
        QuadraticScalar g = QuadraticScalar::mul(dlam, QuadraticScalar::inverse(lam, disc), disc);
        // d/dp (P + R*sqrt(disc)) = P' + (R' + R*disc'/(2*disc))*sqrt(disc)
        CounterPoly dp = t.poly.derivative(param);
        CounterPoly dr = t.radical.derivative(param);
        if (!ddisc.is_zero())
            dr = dr + t.radical.scaled(ddisc / (ParamExpr(2) * disc));
        // n*(P + R*sqrt(disc))*(g.a + g.b*sqrt(disc))
        CounterPoly np = t.poly.times_n();
        CounterPoly nr = t.radical.times_n();
        dp = dp + np.scaled(g.a) + nr.scaled(g.b * disc);
        dr = dr + np.scaled(g.b) + nr.scaled(g.a);
        terms.push_back({t.lambda, dp, dr});
    }
    return ExpPolynomial(std::move(prefix), std::move(terms));
}

ExpPolynomial ep_diff(const ExpPolynomial& f, const std::string& param) {
    return f.diff(param);
}

ExpPolynomial ExpPolynomial::scaled(const ParamExpr& k) const {
    if (k.is_zero())
        return {};
    std::vector<ParamExpr> prefix;
    for (const auto& v : prefix_)
        prefix.push_back(v * k);
    std::vector<ExpTerm> terms;
    for (const auto& t : terms_)
        terms.push_back({t.lambda, t.poly.scaled(k), t.radical.scaled(k)});
    return ExpPolynomial(std::move(prefix), std::move(terms));
}

ExpPolynomial operator+(const ExpPolynomial& a, const ExpPolynomial& b) {
    std::size_t n0 = std::max(a.n0(), b.n0());
    std::vector<ParamExpr> prefix;
    for (std::size_t i = 0; i < n0; ++i)
        prefix.push_back(a.at(static_cast<long>(i)) + b.at(static_cast<long>(i)));
    std::vector<ExpTerm> terms = a.terms_;
    terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
    return ExpPolynomial(std::move(prefix), std::move(terms));
}

ExpPolynomial operator-(const ExpPolynomial& a, const ExpPolynomial& b) {
    return a + b.scaled(ParamExpr(-1));
}

bool operator==(const ExpPolynomial& a, const ExpPolynomial& b) {
    if (a.prefix_ != b.prefix_ || a.terms_.size() != b.terms_.size())
        return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
        const auto& x = a.terms_[i];
        const auto& y = b.terms_[i];
        if (!(x.lambda == y.lambda) || !(x.poly == y.poly) || !(x.radical == y.radical))
            return false;
    }
    return true;
}

std::string ExpPolynomial::to_text() const {
    std::string out = "prefix: [";
    for (std::size_t i = 0; i < prefix_.size(); ++i)
        out += (i ? ", " : "") + prefix_[i].to_string();
    out += "]; n>=" + std::to_string(prefix_.size()) + ": ";
    if (terms_.empty())
        return out + "0";
    bool first = true;
    for (const auto& t : terms_) {
        if (!first)
            out += " + ";
        first = false;
        std::string coeff = t.radical.is_zero()
                                ? "(" + coeff_list_text(t.poly) + ")"
                                : "((" + coeff_list_text(t.poly) + ") + (" + coeff_list_text(t.radical) + ")*sqrt(" +
                                      t.lambda.discriminant().to_string() + "))";
        if (t.lambda.is_rational() && t.lambda.value() == ParamExpr(1))
            out += coeff;
        else
            out += coeff + "*(" + t.lambda.to_string() + ")^n";
    }
    return out;
}

std::string ExpPolynomial::to_json() const {
    using nlohmann::json;
    auto poly_json = [](const CounterPoly& p) {
        json arr = json::array();
        for (const auto& c : p.coefficients())
            arr.push_back(c.to_string());
        return arr;
    };
    json j;
    j["n0"] = prefix_.size();
    j["prefix"] = json::array();
    for (const auto& v : prefix_)
        j["prefix"].push_back(v.to_string());
    j["terms"] = json::array();
    for (const auto& t : terms_) {
        json term;
        if (t.lambda.is_rational()) {
            term["eigenvalue"] = {{"kind", "rational"}, {"value", t.lambda.value().to_string()}};
        } else {
            term["eigenvalue"] = {{"kind", "quadratic"},
                                  {"qb", t.lambda.qb().to_string()},
                                  {"qc", t.lambda.qc().to_string()},
                                  {"index", t.lambda.index()},
                                  {"text", t.lambda.to_string()}};
        }
        term["poly"] = poly_json(t.poly);
        term["radical"] = poly_json(t.radical);
        j["terms"].push_back(term);
    }
    j["text"] = to_text();
    return j.dump();
}

}  // namespace probsens
