#include "probsens/rational.hpp"

#include <stdexcept>

namespace probsens {

std::string to_string(const Rational& q) {
    return q.get_str();
}

Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty())
        throw std::invalid_argument("empty rational literal");
    if (auto slash = s.find('/'); slash != std::string::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (is_zero(den))
            throw std::invalid_argument("zero denominator in literal " + s);
        Rational r = num / den;
        r.canonicalize();
        return r;
    }
    bool negative = false;
    std::size_t pos = 0;
    if (s[0] == '-' || s[0] == '+') {
        negative = s[0] == '-';
        pos = 1;
    }
    std::string digits;
    std::size_t fraction_digits = 0;
    bool seen_point = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (c == '.') {
            if (seen_point)
                throw std::invalid_argument("malformed decimal " + s);
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (seen_point)
                ++fraction_digits;
        } else {
            throw std::invalid_argument("malformed number " + s);
        }
    }
    if (digits.empty())
        throw std::invalid_argument("malformed number " + s);
    mpz_class num(digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, fraction_digits);
    Rational r(num, den);
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

Rational pow(const Rational& base, long exponent) {
    if (exponent < 0) {
        if (is_zero(base))
            throw std::domain_error("zero raised to a negative power");
        return pow(Rational(1) / base, -exponent);
    }
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), static_cast<unsigned long>(exponent));
    mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), static_cast<unsigned long>(exponent));
    Rational r(num, den);
    r.canonicalize();
    return r;
}

bool exact_sqrt(const Rational& q, Rational& root) {
    if (sgn(q) < 0)
        return false;
    if (!mpz_perfect_square_p(q.get_num().get_mpz_t()) || !mpz_perfect_square_p(q.get_den().get_mpz_t()))
        return false;
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), q.get_num().get_mpz_t());
    mpz_sqrt(d.get_mpz_t(), q.get_den().get_mpz_t());
    root = Rational(n, d);
    root.canonicalize();
    return true;
}

}  // namespace probsens
