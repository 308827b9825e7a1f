#include "doctest.h"
#include "helpers.hpp"

#include "probsens/analysis.hpp"
#include "probsens/errors.hpp"

#include <json.hpp>

using namespace probsens;
using namespace testing;

namespace {

AnalysisOptions opts(const std::string& target, std::optional<std::string> wrt, Method method = Method::Auto) {
    AnalysisOptions o;
    o.target = target;
    o.wrt = std::move(wrt);
    o.method = method;
    return o;
}

AnalysisReport run(const std::string& file, const AnalysisOptions& o) {
    return analyze_file(corpus(file), o);
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("method selection") {
    auto a = run("vaccination.prob", opts("infected_prob", "vax_param"));
    CHECK(a.method == "diff");
    CHECK(a.admissible);
    CHECK(a.rec_count == 2);
    CHECK(a.program_id == "vaccination");
    CHECK(a.quantity() == "d/dvax_param E(infected_prob_n)");

    auto b = run("nonadmissible.prob", opts("u", "p"));
    CHECK(b.method == "sensrec");
    CHECK(b.rec_count == 9);

    auto c = run("vaccination.prob", opts("infected_prob", "vax_param", Method::SensRec));
    CHECK(c.method == "sensrec");
    CHECK(c.rec_count == 3);

    auto m = run("vaccination.prob", opts("infected_prob", std::nullopt));
    CHECK(m.method == "moment");
    CHECK(m.quantity() == "E(infected_prob_n)");
}

TEST_CASE("diff on a non-admissible program is a classification error") {
    try {
        run("nonadmissible.prob", opts("u", "p", Method::Diff));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Classification);
        CHECK(exit_code(e.kind()) == 3);
    }
}

TEST_CASE("moment closure of a defective variable exceeds the cap") {
    auto o = opts("w", std::nullopt);
    o.cap = 40;
    try {
        run("nonadmissible.prob", o);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CapExceeded);
        CHECK(exit_code(e.kind()) == 5);
    }
}

TEST_CASE("parameter-independent target") {
    for (auto method : {Method::Auto, Method::SensRec}) {
        auto r = run("nonadmissible.prob", opts("w", "p", method));
        CHECK(r.trivially_zero);
        CHECK(r.rec_count == 0);
        REQUIRE(r.closed_form);
        CHECK(r.closed_form->is_zero());
    }
}

TEST_CASE("diff and sensrec closed forms agree") {
    struct Row {
        const char* file;
        const char* target;
        const char* p;
    };
    const Row rows[] = {
        {"vaccination.prob", "infected_prob", "vax_param"},
        {"vaccination.prob", "infected_prob^2", "decline"},
        {"randomized_response.prob", "p1", "p"},
        {"randomized_response.prob", "p1^2", "p"},
        {"las_vegas_search.prob", "attempts", "p"},
        {"component_health.prob", "obs", "p1"},
    };
    for (const auto& row : rows) {
        CAPTURE(row.file);
        CAPTURE(row.target);
        auto d = run(row.file, opts(row.target, row.p, Method::Diff));
        auto s = run(row.file, opts(row.target, row.p, Method::SensRec));
        REQUIRE(d.closed_form);
        REQUIRE(s.closed_form);
        for (long n = 0; n < 12; ++n)
            CHECK(d.closed_form->at(n) == s.closed_form->at(n));
    }
}

TEST_CASE("evaluations") {
    auto o = opts("infected_prob", "vax_param");
    o.eval = parse_assignment("contact_param=1/2,vax_param=0.6,decline=0.9");
    o.at_n = {1, 2, 3};
    auto r = run("vaccination.prob", o);
    REQUIRE(r.evaluations.size() == 3);
    CHECK(r.evaluations[0].exact == Q(0));
    CHECK(r.evaluations[1].exact == Q(-3, 8));
    CHECK(r.evaluations[2].exact == Q(-123, 400));
    CHECK(r.evaluations[2].approx == doctest::Approx(-0.3075));

    o.eval = parse_assignment("contact_param=1/2");
    o.at_n = {3};
    auto partial = run("vaccination.prob", o);
    REQUIRE(partial.evaluations.size() == 1);
    CHECK_FALSE(partial.evaluations[0].exact);
    REQUIRE(partial.evaluations[0].symbolic);
    CHECK(partial.evaluations[0].symbolic->parameters() == std::set<std::string>{"decline", "vax_param"});
}

TEST_CASE("text and json carry the same numbers") {
    auto o = opts("u", "p");
    o.eval = parse_assignment("p=3/10");
    o.at_n = {1, 2, 5, 8};
    auto r = run("nonadmissible.prob", o);
    auto j = nlohmann::json::parse(r.to_json());
    auto text = r.to_text();
    CHECK(j.at("schema_version") == kReportSchemaVersion);
    CHECK(j.at("rec") == r.rec_count);
    CHECK(text.find("Rec: " + std::to_string(r.rec_count)) != std::string::npos);
    CHECK(j.at("closed_form").get<std::string>() == r.closed_form->to_text());
    CHECK(text.find(r.closed_form->to_text()) != std::string::npos);
    REQUIRE(j.at("evaluations").size() == 4);
    for (const auto& e : j.at("evaluations")) {
        auto exact = e.at("exact").get<std::string>();
        auto line = "value at n=" + std::to_string(e.at("n").get<long>()) + ": ";
        auto pos = text.find(line);
        REQUIRE(pos != std::string::npos);
        auto eol = text.find('\n', pos);
        auto rendered = text.substr(pos, eol - pos);
        CHECK(rendered.find("(exact " + exact + ")") != std::string::npos);
        CHECK(rendered.find(nlohmann::json(e.at("value").get<double>()).dump()) != std::string::npos);
    }
}

TEST_CASE("dumps and explanations") {
    auto o = opts("u", "p");
    o.dump_normalized = true;
    o.dump_recurrences = true;
    o.explain = "x";
    auto r = run("nonadmissible.prob", o);
    REQUIRE(r.normalized);
    REQUIRE(r.explanation);
    auto text = r.to_text();
    CHECK(text.find("while true:") != std::string::npos);
    CHECK(text.find("d/dp E(u") != std::string::npos);
    auto j = nlohmann::json::parse(r.to_json());
    CHECK(j.contains("recurrences"));
    CHECK(j.contains("normalized"));
    CHECK(j.contains("explanation"));
}

TEST_CASE("system only") {
    auto o = opts("u", "p");
    o.solve = false;
    auto r = run("nonadmissible.prob", o);
    CHECK(r.rec_count == 9);
    CHECK_FALSE(r.closed_form);
}

TEST_CASE("input validation") {
    CHECK(parse_assignment("a=1/2, b=0.25") == ParamAssignment{{"a", Q(1, 2)}, {"b", Q(1, 4)}});
    CHECK(parse_number("-0.9") == Q(-9, 10));
    CHECK_THROWS_AS(parse_assignment("a"), Error);
    CHECK_THROWS_AS(parse_number("1/0"), Error);
    CHECK_THROWS_AS(parse_number("abc"), Error);
    CHECK_THROWS_AS(run("vaccination.prob", opts("nosuch", "vax_param")), Error);
    CHECK_THROWS_AS(run("vaccination.prob", opts("infected_prob", "nosuch")), Error);
    CHECK(parse_method("sensrec") == Method::SensRec);
    CHECK_THROWS(parse_method("magic"));
}

TEST_CASE("exit codes") {
    CHECK(exit_code(ErrorKind::Parse) == 2);
    CHECK(exit_code(ErrorKind::Validation) == 2);
    CHECK(exit_code(ErrorKind::Classification) == 3);
    CHECK(exit_code(ErrorKind::UnsupportedFactor) == 4);
    CHECK(exit_code(ErrorKind::CapExceeded) == 5);
    CHECK(exit_code(ErrorKind::SingularEvaluation) == 6);
}

TEST_CASE("classification reports") {
    Program prog = parse_file(corpus("nonadmissible_pinfluenced.prob"));
    auto text = classify_text(prog, std::string("p"));
    CHECK(text.find("not applicable") != std::string::npos);
    auto j = nlohmann::json::parse(classify_json(prog, std::nullopt));
    CHECK(j.dump().find("\"admissible\":false") != std::string::npos);
}

}
