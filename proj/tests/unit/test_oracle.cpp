#include "doctest.h"
#include "helpers.hpp"

#include "probsens/errors.hpp"
#include "probsens/moments.hpp"
#include "probsens/oracle.hpp"
#include "probsens/sensitivity.hpp"
#include "probsens/solver.hpp"

#include <cmath>
#include <json.hpp>

using namespace probsens;
using namespace testing;

TEST_SUITE("oracle") {

TEST_CASE("enumerated distributions have unit mass") {
    auto np = load("nonadmissible.prob");
    for (unsigned n = 0; n <= 5; ++n) {
        auto d = enumerate_states(np, n, {{"p", Q(3, 10)}});
        CHECK(d.total_mass() == 1);
        CHECK(d.states.size() <= (std::size_t{1} << n));
    }
}

TEST_CASE("first iterate of the worked example") {
    auto np = load("nonadmissible.prob");
    auto e = enumerate_moment(np, Monomial::symbol("z"), 1, {{"p", Q(3, 10)}});
    CHECK(e.mode == OracleEstimate::Mode::Exact);
    REQUIRE(e.exact);
    CHECK(*e.exact == Q(839, 200));
    CHECK(e.stderr_ == 0.0);
}

TEST_CASE("exact enumeration matches iterated moment systems") {
    auto np = load("vaccination.prob");
    MomentEngine eng(np);
    ParamAssignment sigma{{"contact_param", Q(1, 3)}, {"vax_param", Q(3, 5)}, {"decline", Q(4, 5)}};
    for (const char* t : {"infected_prob", "infected_prob^2", "efficiency*vax"}) {
        auto m = parse_target(t);
        auto sys = moment_system(eng, m);
        auto it = iterate_system(sys, 7);
        for (unsigned n = 0; n <= 6; ++n) {
            CAPTURE(t);
            CAPTURE(n);
            CHECK(enumerate_moment(np, m, n, sigma).exact.value() == it.at(sys.target)[n].evaluate(sigma));
        }
    }
}

TEST_CASE("sampling is reproducible") {
    auto np = load("nonadmissible.prob");
    ParamAssignment sigma{{"p", Q(3, 10)}};
    auto a = sample_moment(np, Monomial::symbol("u"), 4, sigma, 20000, 7, 4);
    auto b = sample_moment(np, Monomial::symbol("u"), 4, sigma, 20000, 7, 1);
    CHECK(a.value == b.value);
    CHECK(a.stderr_ == b.stderr_);
    auto c = sample_moment(np, Monomial::symbol("u"), 4, sigma, 20000, 8, 4);
    CHECK(a.value != c.value);
}

TEST_CASE("sampled Bernoulli mean is within four standard errors") {
    auto np = load_source("x = 0\nwhile true:\n  x = Bernoulli(q)\nend\n");
    ParamAssignment sigma{{"q", Q(3, 10)}};
    auto e = sample_moment(np, Monomial::symbol("x"), 1, sigma, 50000, 11);
    CHECK(e.mode == OracleEstimate::Mode::Sampled);
    CHECK(e.trials == 50000);
    CHECK(std::abs(e.value - 0.3) < 4 * e.stderr_);
    CHECK(e.stderr_ == doctest::Approx(std::sqrt(0.21 / 50000)).epsilon(0.05));
}

TEST_CASE("standard error shrinks with the square root of the trial count") {
    auto np = load("random_walk_1d.prob");
    ParamAssignment sigma{{"p", Q(2, 5)}};
    auto small = sample_moment(np, Monomial::symbol("x"), 10, sigma, 40000, 3);
    auto large = sample_moment(np, Monomial::symbol("x"), 10, sigma, 80000, 3);
    CHECK(small.stderr_ / large.stderr_ == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
}

TEST_CASE("continuous distributions are sampled, not enumerated") {
    auto np = load_source("x, g = 0, 0\nwhile true:\n  g = Normal(m, 1)\n  x = x + g\nend\n");
    CHECK_THROWS_AS(enumerate_moment(np, Monomial::symbol("x"), 2, {{"m", Q(1)}}), Error);
    auto e = sample_moment(np, Monomial::symbol("x"), 2, {{"m", Q(1)}}, 40000, 5);
    CHECK(std::abs(e.value - 2.0) < 4 * e.stderr_);
    auto u = sample_moment(load_source("x = 0\nwhile true:\n  x = Uniform(0, 2)\nend\n"), Monomial::symbol("x", 2), 1,
                           {}, 40000, 5);
    CHECK(std::abs(u.value - 4.0 / 3.0) < 4 * u.stderr_);
}

TEST_CASE("branch budget") {
    auto np = load("coin_flips_50.prob");
    ParamAssignment sigma;
    for (const auto& p : parse_file(corpus("coin_flips_50.prob")).parameters)
        sigma[p] = Q(1, 2);
    CHECK_THROWS_AS(enumerate_states(np, 40, sigma, 1000), Error);
}

TEST_CASE("finite differences") {
    auto np = load("nonadmissible.prob");
    ParamAssignment sigma{{"p", Q(3, 10)}};
    FdOptions exact;
    auto z = fd_sensitivity(np, Monomial::symbol("z"), 3, sigma, "p", exact);
    // E(z_n) = 4 + n(p^2 + p)/2, so the central difference is exact
    REQUIRE(z.exact);
    CHECK(*z.exact == Q(3, 2) * (2 * Q(3, 10) + 1));

    auto w = fd_sensitivity(np, Monomial::symbol("w"), 3, sigma, "p", exact);
    REQUIRE(w.exact);
    CHECK(*w.exact == 0);

    FdOptions sampled;
    sampled.mode = OracleEstimate::Mode::Sampled;
    sampled.trials = 20000;
    auto ws = fd_sensitivity(np, Monomial::symbol("w"), 3, sigma, "p", sampled);
    CHECK(ws.value == 0.0);
    auto zs = fd_sensitivity(np, Monomial::symbol("z"), 3, sigma, "p", sampled);
    CHECK(std::abs(zs.value - 2.4) < 4 * zs.stderr_ + 1e-9);
}

TEST_CASE("estimate json") {
    auto np = load("nonadmissible.prob");
    auto e = enumerate_moment(np, Monomial::symbol("z"), 1, {{"p", Q(3, 10)}});
    auto j = nlohmann::json::parse(e.to_json());
    CHECK(j.at("mode") == "exact");
    CHECK(j.at("value").get<double>() == doctest::Approx(4.195));
    CHECK(j.at("stderr").get<double>() == 0.0);
    CHECK(j.contains("trials"));
}

TEST_CASE("counter-based generator") {
    SplitMix64 a(42, 3), b(42, 3), c(42, 4);
    for (int i = 0; i < 10; ++i) {
        auto x = a.next();
        CHECK(x == b.next());
        CHECK(x != c.next());
    }
    SplitMix64 u(1, 1);
    for (int i = 0; i < 1000; ++i) {
        double v = u.uniform();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

}
