#include "doctest.h"
#include "helpers.hpp"

#include "probsens/errors.hpp"
#include "probsens/solver.hpp"

#include <random>

using namespace probsens;
using namespace testing;

namespace {

SeqSymbol V(int i) { return SeqSymbol::moment(Monomial::symbol("v" + std::to_string(i))); }

struct Builder {
    RecurrenceSystem sys;
    Builder() { sys.target = V(0); }
    Builder& eq(int i, std::map<SeqSymbol, ParamExpr> rhs, ParamExpr init) {
        std::erase_if(rhs, [](const auto& kv) { return kv.second.is_zero(); });
        sys.add(Recurrence{V(i), std::move(rhs)}, std::move(init), Provenance::Moment);
        return *this;
    }
};

void check_against_iteration(const RecurrenceSystem& sys, std::size_t count = 14) {
    auto closed = solve_system(sys);
    auto iter = iterate_system(sys, count);
    for (const auto& [s, f] : closed) {
        CAPTURE(s.to_string());
        CAPTURE(f.to_text());
        for (std::size_t n = 0; n < count; ++n) {
            CAPTURE(n);
            CHECK(f.at(static_cast<long>(n)) == iter.at(s)[n]);
        }
    }
}

XPoly xpoly(std::initializer_list<long> coeffs) {
    XPoly out;
    for (long c : coeffs)
        out.emplace_back(c);
    return out;
}

Rational small_rational(std::mt19937& rng) {
    static const long nums[] = {-2, -1, 0, 1, 1, 2, 3};
    static const long dens[] = {1, 1, 2, 3};
    return Q(nums[rng() % 7], dens[rng() % 4]);
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("characteristic polynomial") {
    std::vector<std::vector<ParamExpr>> a{{C(2), C(1)}, {C(0), C(3)}};
    CHECK(characteristic_polynomial(a) == xpoly({6, -5, 1}));
    auto p = P("p");
    std::vector<std::vector<ParamExpr>> b{{p, C(1)}, {C(1), C(0)}};
    CHECK(characteristic_polynomial(b) == XPoly{C(-1), -p, C(1)});
}

TEST_CASE("factorization") {
    auto cube = factor_charpoly(xpoly({0, 0, 0, 1}));
    REQUIRE(cube.size() == 1);
    CHECK(cube[0].factor == xpoly({0, 1}));
    CHECK(cube[0].multiplicity == 3);

    auto irreducible = factor_charpoly(xpoly({-2, 0, 1}));
    REQUIRE(irreducible.size() == 1);
    CHECK(irreducible[0].factor == xpoly({-2, 0, 1}));

    auto split = factor_charpoly(xpoly({-6, 11, -6, 1}));
    CHECK(split.size() == 3);
    for (const auto& f : split)
        CHECK(f.factor.size() == 2);

    auto square = factor_charpoly(xpoly({1, -2, 1}));
    REQUIRE(square.size() == 1);
    CHECK(square[0].multiplicity == 2);

    // (x - d*(1 - vp)) * (x - 1), found through the candidate list
    auto d = P("d"), vp = P("vp");
    auto lam = d - d * vp;
    XPoly q{lam, -(lam + C(1)), C(1)};
    auto f = factor_charpoly(q, {lam});
    CHECK(f.size() == 2);

    auto cubic = factor_charpoly(xpoly({-2, 0, 0, 1}));
    REQUIRE(cubic.size() == 1);
    CHECK(cubic[0].factor.size() == 4);
}

TEST_CASE("cubic factors are unsupported") {
    Builder b;
    b.eq(0, {{V(1), C(1)}}, C(1)).eq(1, {{V(2), C(1)}}, C(0)).eq(2, {{V(0), C(2)}}, C(0));
    CHECK_THROWS_AS(solve_system(b.sys), UnsupportedFactorError);
}

TEST_CASE("arithmetic progression") {
    auto c = P("c");
    Builder b;
    b.eq(0, {{V(0), C(1)}, {SeqSymbol::one(), c}}, P("u0"));
    auto f = solve_system(b.sys).at(V(0));
    for (long n = 0; n < 6; ++n)
        CHECK(f.at(n) == P("u0") + C(n) * c);
}

TEST_CASE("geometric sequence with a parametric ratio") {
    auto d = P("d"), vp = P("vp");
    Builder b;
    b.eq(0, {{V(0), d - d * vp}, {SeqSymbol::one(), C(3, 4) * vp}}, C(0));
    check_against_iteration(b.sys);
    auto f = solve_system(b.sys).at(V(0));
    CHECK(f.n0() == 0);
}

TEST_CASE("irrational eigenvalues evaluate exactly") {
    Builder b;  // Fibonacci
    b.eq(0, {{V(0), C(1)}, {V(1), C(1)}}, C(1)).eq(1, {{V(0), C(1)}}, C(0));
    check_against_iteration(b.sys, 30);
    auto f = solve_system(b.sys).at(V(0));
    auto r = f.evaluate(29, {});
    REQUIRE(r.exact);
    CHECK(*r.exact == 832040);
    bool quadratic = false;
    for (const auto& t : f.terms())
        quadratic |= !t.lambda.is_rational();
    CHECK(quadratic);
}

TEST_CASE("nilpotent parts become a prefix") {
    Builder b;
    b.eq(0, {{V(1), C(1)}}, C(5)).eq(1, {{V(2), C(1)}}, C(7)).eq(2, {{SeqSymbol::one(), C(1)}}, C(9));
    auto f = solve_system(b.sys).at(V(0));
    CHECK(f.n0() >= 1);
    check_against_iteration(b.sys);
}

TEST_CASE("resonant forcing raises the polynomial degree") {
    Builder b;
    b.eq(0, {{V(0), C(2)}, {V(1), C(1)}}, C(0)).eq(1, {{V(1), C(2)}}, C(1));
    auto f = solve_system(b.sys).at(V(0));
    for (long n = 0; n < 8; ++n)
        CHECK(C(2) * f.at(n) == C(n) * ParamExpr(Rational(mpz_class(1) << static_cast<unsigned>(n))));
    check_against_iteration(b.sys);
}

TEST_CASE("closed forms satisfy their recurrences") {
    auto p = P("p");
    Builder b;
    b.eq(0, {{V(0), p}, {V(1), C(1) - p}}, C(1)).eq(1, {{V(1), C(1, 2)}, {SeqSymbol::one(), p}}, C(0));
    auto sol = solve_system(b.sys);
    for (const auto& [lhs, r] : b.sys.equations)
        for (long n = 0; n < 6; ++n) {
            ParamExpr rhs = 0;
            for (const auto& [s, c] : r.rhs)
                rhs += c * (s.is_constant() ? C(1) : sol.at(s).at(n));
            CHECK(sol.at(lhs).at(n + 1) == rhs);
        }
}

TEST_CASE("random C-finite systems agree with forward iteration") {
    std::mt19937 rng(20261018);
    for (int trial = 0; trial < 60; ++trial) {
        CAPTURE(trial);
        Builder b;
        int size = 1 + static_cast<int>(rng() % 6);
        // blocks of size 1 or 2, solved from the last index backwards
        std::vector<std::pair<int, int>> blocks;
        for (int i = 0; i < size;) {
            int len = (i + 1 < size && rng() % 3 == 0) ? 2 : 1;
            blocks.emplace_back(i, len);
            i += len;
        }
        for (const auto& [start, len] : blocks) {
            for (int i = start; i < start + len; ++i) {
                std::map<SeqSymbol, ParamExpr> rhs;
                for (int j = start; j < start + len; ++j)
                    rhs[V(j)] = small_rational(rng);
                for (int j = start + len; j < size; ++j)
                    if (rng() % 2)
                        rhs[V(j)] = small_rational(rng);
                if (rng() % 2)
                    rhs[SeqSymbol::one()] = small_rational(rng);
                b.eq(i, std::move(rhs), small_rational(rng));
            }
        }
        try {
            check_against_iteration(b.sys, 12);
        } catch (const UnsupportedFactorError&) {
            FAIL("block of size <= 2 reported unsupported");
        }
    }
}

}
