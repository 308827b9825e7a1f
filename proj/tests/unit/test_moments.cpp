#include "doctest.h"
#include "helpers.hpp"

#include "probsens/errors.hpp"
#include "probsens/moments.hpp"
#include "probsens/oracle.hpp"

#include <filesystem>

using namespace probsens;
using namespace testing;

namespace {

ParamExpr coeff(const Recurrence& r, const SeqSymbol& s) {
    auto it = r.rhs.find(s);
    return it == r.rhs.end() ? ParamExpr(0) : it->second;
}

SeqSymbol E(const char* v, unsigned k = 1) { return SeqSymbol::moment(Monomial::symbol(v, k)); }

Rational expectation_of(const PolyExpr& p, const StateDistribution& d, const ParamAssignment& sigma) {
    Rational out = 0;
    for (const auto& [m, c] : p.terms())
        out += c.evaluate(sigma) * d.expectation(m);
    return out;
}

std::vector<Monomial> low_degree(const std::vector<std::string>& vars) {
    std::vector<Monomial> out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        out.push_back(Monomial::symbol(vars[i]));
        for (std::size_t j = i; j < vars.size(); ++j)
            out.push_back(Monomial::symbol(vars[i]) * Monomial::symbol(vars[j]));
    }
    return out;
}

}  // namespace

TEST_SUITE("moments") {

TEST_CASE("vaccination recurrences") {
    MomentEngine eng(load("vaccination.prob"));
    auto cp = P("contact_param"), vp = P("vax_param"), d = P("decline");

    auto inf = eng.moment_recurrence(Monomial::symbol("infected_prob"));
    CHECK(inf.rhs.size() == 2);
    CHECK(coeff(inf, SeqSymbol::one()) == cp);
    CHECK(coeff(inf, E("efficiency")) == -cp);

    auto eff = eng.moment_recurrence(Monomial::symbol("efficiency"));
    CHECK(eff.rhs.size() == 2);
    CHECK(coeff(eff, SeqSymbol::one()) == C(3, 4) * vp);
    CHECK(coeff(eff, E("efficiency")) == d - d * vp);

    CHECK(eng.initial_moment(Monomial::symbol("infected_prob")) == C(0));
    CHECK(eng.initial_moment(Monomial::symbol("efficiency")) == C(0));
}

TEST_CASE("non-linear update") {
    MomentEngine eng(load("nonadmissible.prob"));
    auto w = eng.moment_recurrence(Monomial::symbol("w"));
    CHECK(w.rhs.size() == 2);
    CHECK(coeff(w, E("w")) == C(5));
    CHECK(coeff(w, E("x", 2)) == C(1));
    CHECK(eng.initial_moment(Monomial::symbol("w") * Monomial::symbol("x")) == C(2));
    CHECK(eng.initial_moment(Monomial::symbol("z", 2)) == C(16));

    auto z = eng.moment_recurrence(Monomial::symbol("z"));
    CHECK(coeff(z, E("z")) == C(1));
    CHECK(coeff(z, SeqSymbol::one()) == (P("p") * P("p") + P("p")) / C(2));
}

TEST_CASE("distribution moments") {
    auto p = P("p");
    CHECK(distribution_moment(DistDraw{DistKind::Bernoulli, {p}}, 3) == p);
    CHECK(distribution_moment(DistDraw{DistKind::DiscreteUniform, {C(0), C(2)}}, 2) == C(5, 3));
    CHECK(distribution_moment(DistDraw{DistKind::Uniform, {C(0), C(1)}}, 3) == C(1, 4));
    auto mu = P("mu"), s2 = P("s2");
    CHECK(distribution_moment(DistDraw{DistKind::Normal, {mu, s2}}, 1) == mu);
    CHECK(distribution_moment(DistDraw{DistKind::Normal, {mu, s2}}, 2) == mu * mu + s2);
    CHECK(distribution_moment(DistDraw{DistKind::Normal, {mu, s2}}, 4) ==
          mu * mu * mu * mu + C(6) * mu * mu * s2 + C(3) * s2 * s2);
    CHECK(distribution_moment(DistDraw{DistKind::Normal, {mu, s2}}, 0) == C(1));
}

TEST_CASE("indicator polynomials") {
    std::map<std::string, std::vector<ParamExpr>> supports{{"b", {C(0), C(1), C(2)}}, {"a", {C(0), C(1)}}};
    auto b = PolyExpr::symbol("b"), a = PolyExpr::symbol("a");
    auto eq2 = iverson_polynomial(BExpr::compare(b, CmpOp::Eq, PolyExpr(C(2))), supports);
    CHECK(eq2 == (b * b - b) * PolyExpr(C(1, 2)));
    auto a1 = iverson_polynomial(BExpr::compare(a, CmpOp::Eq, PolyExpr(C(1))), supports);
    CHECK(a1 == a);
    auto neg = iverson_polynomial(BExpr::negate(BExpr::compare(a, CmpOp::Eq, PolyExpr(C(1)))), supports);
    CHECK(neg == PolyExpr(C(1)) - a);
    auto ge = iverson_polynomial(BExpr::compare(b, CmpOp::Ge, PolyExpr(C(1))), supports);
    for (long v = 0; v <= 2; ++v)
        CHECK(polyexpr::evaluate(ge, {{"b", v}}, {}) == (v >= 1 ? 1 : 0));
    CHECK(iverson_polynomial(BExpr::constant(true), supports) == PolyExpr(C(1)));
}

TEST_CASE("power reduction on finite variables") {
    MomentEngine eng(load("vaccination.prob"));
    auto v = PolyExpr::symbol("vax");
    CHECK(eng.reduce(v * v * v) == v);
}

TEST_CASE("one-step recurrences agree with exact enumeration") {
    for (const auto& entry : std::filesystem::directory_iterator(PROBSENS_CORPUS_DIR)) {
        if (entry.path().extension() != ".prob")
            continue;
        Program prog = parse_file(entry.path().string());
        NormalizedProgram np = normalize(prog);
        MomentEngine eng(np);
        ParamAssignment sigma;
        long k = 3;
        for (const auto& p : prog.parameters)
            sigma[p] = Q(k++, 17);
        for (unsigned n = 0; n <= 2; ++n) {
            StateDistribution now, next;
            try {
                now = enumerate_states(np, n, sigma, 100000);
                next = enumerate_states(np, n + 1, sigma, 100000);
            } catch (const Error&) {
                break;
            }
            auto vars = prog.variables;
            if (vars.size() > 8)
                vars.resize(8);
            for (const auto& m : low_degree(vars)) {
                CAPTURE(entry.path().filename().string());
                CAPTURE(m.to_string());
                CAPTURE(n);
                if (n == 0)
                    CHECK(eng.initial_moment(m).evaluate(sigma) == now.expectation(m));
                CHECK(expectation_of(eng.next_moment(m), now, sigma) == next.expectation(m));
            }
        }
    }
}

TEST_CASE("next moments only mention source variables") {
    auto np = load("vaccination.prob");
    MomentEngine eng(np);
    for (const auto& m : low_degree(np.variables))
        for (const auto& v : polyexpr::variables(eng.next_moment(m)))
            CHECK_FALSE(np.is_temporary(v));
}

}
