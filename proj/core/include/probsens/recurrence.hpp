#pragma once

#include "probsens/monomial.hpp"
#include "probsens/param_expr.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace probsens {

/// E(M_n) or d/dp E(M_n).
struct SeqSymbol {
    enum class Kind { Moment, Sensitivity };

    Kind kind = Kind::Moment;
    Monomial monomial;
    std::string parameter;

    static SeqSymbol moment(Monomial m) { return {Kind::Moment, std::move(m), {}}; }
    static SeqSymbol sensitivity(Monomial m, std::string p) { return {Kind::Sensitivity, std::move(m), std::move(p)}; }
    static SeqSymbol one() { return moment(Monomial()); }

    bool is_moment() const { return kind == Kind::Moment; }
    bool is_constant() const { return is_moment() && monomial.is_one(); }

    /// "E(x*y^2 | n)" style rendering at the given index text.
    std::string to_string(const std::string& index = "n") const;

    friend bool operator==(const SeqSymbol&, const SeqSymbol&) = default;
    /// Degree-lex on the monomial, then Moment before Sensitivity.
    friend std::strong_ordering operator<=>(const SeqSymbol& a, const SeqSymbol& b);
};

/// lhs(n+1) = sum of coefficient * symbol(n). Moment(1) stands for the
/// constant sequence 1.
struct Recurrence {
    SeqSymbol lhs;
    std::map<SeqSymbol, ParamExpr> rhs;

    std::string to_string() const;
    friend bool operator==(const Recurrence&, const Recurrence&) = default;
};

enum class Provenance { Sensitivity, Moment };

struct RecurrenceSystem {
    SeqSymbol target;
    std::map<SeqSymbol, Recurrence> equations;  // never contains Moment(1)
    std::map<SeqSymbol, ParamExpr> initial;
    std::map<SeqSymbol, Provenance> provenance;
    std::vector<SeqSymbol> order;  // insertion order
    /// Target is identically zero without any equation.
    bool trivially_zero = false;

    std::size_t size() const { return equations.size(); }
    void add(Recurrence r, ParamExpr initial_value, Provenance from);
    /// Every rhs symbol has its own equation (or is Moment(1)).
    bool closed() const;
    std::vector<SeqSymbol> symbols(SeqSymbol::Kind kind) const;
    std::string to_string() const;
    std::string to_json() const;
};

}  // namespace probsens
