#include "doctest.h"
#include "helpers.hpp"

#include "probsens/errors.hpp"
#include "probsens/oracle.hpp"

#include <filesystem>

using namespace probsens;
using namespace testing;

namespace {

// Direct interpreter over the source program, used as the reference for the
// flattened form.
using SrcState = std::map<std::string, Rational>;
using SrcDist = std::map<SrcState, Rational>;

std::vector<std::pair<Rational, Rational>> outcomes(const AssignRhs& rhs, const SrcState& s,
                                                    const ParamAssignment& sigma) {
    std::vector<std::pair<Rational, Rational>> out;
    if (const auto* cat = std::get_if<Categorical>(&rhs)) {
        auto probs = cat->probabilities();
        for (std::size_t i = 0; i < cat->branches.size(); ++i)
            out.emplace_back(polyexpr::evaluate(cat->branches[i].value, s, sigma), probs[i].evaluate(sigma));
        return out;
    }
    const auto& d = std::get<DistDraw>(rhs);
    if (d.kind == DistKind::Bernoulli) {
        Rational p = d.args[0].evaluate(sigma);
        out.emplace_back(1, p);
        out.emplace_back(0, 1 - p);
    } else if (d.kind == DistKind::DiscreteUniform) {
        Rational lo = d.args[0].evaluate(sigma), hi = d.args[1].evaluate(sigma);
        for (Rational v = lo; v <= hi; v += 1)
            out.emplace_back(v, 1 / (hi - lo + 1));
    } else {
        throw std::runtime_error("continuous");
    }
    return out;
}

void exec(const std::vector<Stmt>& block, SrcDist& dist, const ParamAssignment& sigma);

void exec_one(const Stmt& st, SrcDist& dist, const ParamAssignment& sigma) {
    if (const auto* a = std::get_if<Assignment>(&st.node)) {
        SrcDist next;
        for (const auto& [s, w] : dist) {
            std::vector<std::pair<SrcState, Rational>> partial{{s, w}};
            for (const auto& [x, rhs] : a->targets) {
                std::vector<std::pair<SrcState, Rational>> grown;
                for (const auto& [t, tw] : partial)
                    for (const auto& [v, pr] : outcomes(rhs, s, sigma)) {
                        SrcState u = t;
                        u[x] = v;
                        grown.emplace_back(std::move(u), tw * pr);
                    }
                partial = std::move(grown);
            }
            for (auto& [t, tw] : partial)
                if (tw != 0)
                    next[t] += tw;
        }
        if (next.size() > 200000)
            throw std::runtime_error("too many states");
        dist = std::move(next);
        return;
    }
    const auto& f = std::get<IfStmt>(st.node);
    SrcDist next;
    for (const auto& [s, w] : dist) {
        SrcDist one{{s, w}};
        bool taken = false;
        for (const auto& [g, body] : f.branches)
            if (g.evaluate(s, sigma)) {
                exec(body, one, sigma);
                taken = true;
                break;
            }
        if (!taken && f.else_body)
            exec(*f.else_body, one, sigma);
        for (const auto& [t, tw] : one)
            next[t] += tw;
    }
    dist = std::move(next);
}

void exec(const std::vector<Stmt>& block, SrcDist& dist, const ParamAssignment& sigma) {
    for (const auto& st : block)
        exec_one(st, dist, sigma);
}

SrcDist run_source(const Program& prog, unsigned n, const ParamAssignment& sigma) {
    SrcState zero;
    for (const auto& v : prog.variables)
        zero[v] = 0;
    SrcDist dist{{zero, 1}};
    exec(prog.init, dist, sigma);
    for (unsigned i = 0; i < n; ++i)
        exec(prog.body, dist, sigma);
    return dist;
}

SrcDist project(const StateDistribution& d, const std::vector<std::string>& vars) {
    SrcDist out;
    for (const auto& [st, w] : d.states) {
        SrcState s;
        for (const auto& v : vars) {
            auto i = std::find(d.variables.begin(), d.variables.end(), v) - d.variables.begin();
            s[v] = st[static_cast<std::size_t>(i)];
        }
        out[s] += w;
    }
    return out;
}

ParamAssignment sample_sigma(const std::set<std::string>& params) {
    ParamAssignment sigma;
    long k = 2;
    for (const auto& p : params)
        sigma[p] = Q(k++, 11);
    return sigma;
}

std::size_t assigned_count(const NormalizedProgram& np, const std::string& v) {
    return static_cast<std::size_t>(
        std::count_if(np.body.begin(), np.body.end(), [&](const GuardedAssignment& a) { return a.target == v; }));
}

}  // namespace

TEST_SUITE("normalizer") {

TEST_CASE("straight-line body is kept as is") {
    auto np = load("nonadmissible.prob");
    REQUIRE(np.body.size() == 5);
    CHECK(np.temporaries.empty());
    std::vector<std::string> order;
    for (const auto& a : np.body) {
        order.push_back(a.target);
        CHECK(a.guard.is_true());
    }
    CHECK(order == std::vector<std::string>{"z", "y", "w", "x", "u"});
    CHECK(np.init.size() == 5);
}

TEST_CASE("every body variable is assigned exactly once") {
    for (const auto& entry : std::filesystem::directory_iterator(PROBSENS_CORPUS_DIR)) {
        if (entry.path().extension() != ".prob")
            continue;
        CAPTURE(entry.path().filename().string());
        auto np = normalize(parse_file(entry.path().string()));
        for (const auto& a : np.body)
            CHECK(assigned_count(np, a.target) == 1);
        for (const auto& v : np.all_variables()) {
            if (np.is_temporary(v))
                CHECK(assigned_count(np, v) == 1);
        }
    }
}

TEST_CASE("if/else becomes guarded assignments with else sources") {
    auto np = load("vaccination.prob");
    REQUIRE(np.body.size() == 4);
    CHECK(np.temporaries == std::map<std::string, std::string>{{"_t0", "efficiency"}});
    const auto& t0 = np.body[2];
    CHECK(t0.target == "_t0");
    CHECK(t0.guard.to_string() == "vax == 1");
    CHECK(t0.else_source == "efficiency");
    const auto& eff = np.body[3];
    CHECK(eff.target == "efficiency");
    CHECK(eff.else_source == "_t0");
    CHECK(eff.guard.to_string() == "not (vax == 1)");
}

TEST_CASE("sequential updates introduce temporaries") {
    auto np = load_source("x = 1\nwhile true:\n  x = x + 1\n  x = 2*x\nend\n");
    REQUIRE(np.body.size() == 2);
    CHECK(np.body[0].target == "_t0");
    CHECK(np.body[1].target == "x");
    CHECK(rhs_variables(np.body[1].rhs) == std::set<std::string>{"_t0"});
    CHECK(np.temporaries.at("_t0") == "x");
}

TEST_CASE("late reads of an updated guard variable use a snapshot") {
    auto np = load("grammar_coverage.prob");
    const auto* snap = np.assignment_of("_t0");
    REQUIRE(snap != nullptr);
    CHECK(rhs_variables(snap->rhs) == std::set<std::string>{"s"});
    const auto* g = np.assignment_of("g");
    REQUIRE(g != nullptr);
    CHECK(g->guard.variables() == std::set<std::string>{"_t0"});
}

TEST_CASE("implicit zero initialization of body-only variables") {
    auto np = load("hawk_dove.prob");
    bool s1 = false;
    for (const auto& a : np.init)
        if (a.target == "s1") {
            s1 = true;
            CHECK(to_string(a.rhs) == "0");
        }
    CHECK(s1);
}

TEST_CASE("simultaneous initialization reads the old state") {
    auto np = load_source("x, y = 1, 2\nx, y = y, x\nwhile true:\n  x = x + y\nend\n");
    auto d = enumerate_states(np, 0, {});
    CHECK(d.expectation(Monomial::symbol("x")) == 2);
    CHECK(d.expectation(Monomial::symbol("y")) == 1);
}

TEST_CASE("flattened program has the source semantics") {
    for (const auto& entry : std::filesystem::directory_iterator(PROBSENS_CORPUS_DIR)) {
        if (entry.path().extension() != ".prob")
            continue;
        Program prog = parse_file(entry.path().string());
        NormalizedProgram np = normalize(prog);
        auto sigma = sample_sigma(prog.parameters);
        for (unsigned n = 0; n <= 3; ++n) {
            CAPTURE(entry.path().filename().string());
            CAPTURE(n);
            SrcDist expected;
            try {
                expected = run_source(prog, n, sigma);
            } catch (const std::runtime_error&) {
                break;  // continuous or too large
            }
            StateDistribution got;
            try {
                got = enumerate_states(np, n, sigma, 200000);
            } catch (const Error&) {
                break;
            }
            CHECK(project(got, prog.variables) == expected);
        }
    }
}

TEST_CASE("power variable extension") {
    auto np = load("random_walk_1d.prob");
    auto ext = with_power_variable(np, "x2", "x", 2);
    REQUIRE(ext.body.size() == np.body.size() + 1);
    CHECK(ext.body.back().target == "x2");
    auto d = enumerate_states(ext, 3, {{"p", Q(1, 3)}});
    CHECK(d.expectation(Monomial::symbol("x2")) == d.expectation(Monomial::symbol("x", 2)));
}

TEST_CASE("printing shows guards and temporaries") {
    std::string text = print(load("vaccination.prob"));
    CHECK(text.find("# _t0 <- efficiency") != std::string::npos);
    CHECK(text.find("[vax == 1] else efficiency") != std::string::npos);
    CHECK(text.find("while true:") != std::string::npos);
}

}
