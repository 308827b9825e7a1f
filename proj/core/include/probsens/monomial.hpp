#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace probsens {

/// Power product of named symbols, e.g. x*y^2. Factors are kept sorted by
/// name with strictly positive exponents; the empty product is 1.
///
/// Ordering is degree-lexicographic: total degree first, then the exponent
/// of the lexicographically smallest symbol, and so on.
class Monomial {
public:
    using Factor = std::pair<std::string, unsigned>;

    Monomial() = default;
    explicit Monomial(std::vector<Factor> factors);

    static Monomial symbol(std::string name, unsigned exponent = 1);

    const std::vector<Factor>& factors() const noexcept { return factors_; }
    bool is_one() const noexcept { return factors_.empty(); }
    unsigned degree() const noexcept { return degree_; }
    unsigned degree(std::string_view name) const;
    bool contains(std::string_view name) const { return degree(name) > 0; }
    std::set<std::string> symbols() const;

    Monomial operator*(const Monomial& other) const;
    /// Quotient when `divisor` divides this monomial.
    std::optional<Monomial> divide(const Monomial& divisor) const;
    Monomial without(std::string_view name) const;
    Monomial with_exponent(const std::string& name, unsigned exponent) const;

    std::string to_string() const;

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.factors_ == b.factors_; }
    friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);

private:
    std::vector<Factor> factors_;
    unsigned degree_ = 0;
};

/// Parses "x", "x^2", "x**2", "y*z", "1".
Monomial parse_monomial(std::string_view text);

}  // namespace probsens
