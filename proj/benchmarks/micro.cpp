#include "probsens/analysis.hpp"
#include "probsens/oracle.hpp"
#include "probsens/parser.hpp"
#include "probsens/sensitivity.hpp"
#include "probsens/solver.hpp"

#include <benchmark/benchmark.h>

using namespace probsens;

namespace {

std::string corpus(const char* name) { return std::string(PROBSENS_CORPUS_DIR) + "/" + name; }

const NormalizedProgram& program(const char* name) {
    static std::map<std::string, NormalizedProgram> cache;
    auto it = cache.find(name);
    if (it == cache.end())
        it = cache.emplace(name, normalize(parse_file(corpus(name)))).first;
    return it->second;
}

void BM_ParseNormalize(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(normalize(parse_file(corpus("coin_flips_50.prob"))));
}
BENCHMARK(BM_ParseNormalize);

void BM_Classify(benchmark::State& state) {
    const auto& np = program("nonadmissible_pinfluenced.prob");
    for (auto _ : state) {
        DependencyGraph g(np);
        benchmark::DoNotOptimize(g.classify("p"));
    }
}
BENCHMARK(BM_Classify);

void BM_SensRecSystem(benchmark::State& state) {
    const auto& np = program("nonadmissible3.prob");
    for (auto _ : state) {
        MomentEngine eng(np);  // fresh memo each round
        DependencyGraph g(np);
        benchmark::DoNotOptimize(algorithm1(eng, g, parse_target("z1^2"), "p"));
    }
}
BENCHMARK(BM_SensRecSystem)->Unit(benchmark::kMillisecond);

void BM_MomentSystemCoins(benchmark::State& state) {
    const auto& np = program("coin_flips_50.prob");
    for (auto _ : state) {
        MomentEngine eng(np);
        benchmark::DoNotOptimize(moment_system(eng, parse_target("total")));
    }
}
BENCHMARK(BM_MomentSystemCoins)->Unit(benchmark::kMillisecond);

void BM_SolveSensRec(benchmark::State& state) {
    const auto& np = program("nonadmissible.prob");
    MomentEngine eng(np);
    DependencyGraph g(np);
    auto sys = algorithm1(eng, g, parse_target("u"), "p");
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_system(sys));
}
BENCHMARK(BM_SolveSensRec)->Unit(benchmark::kMillisecond);

void BM_DiffPath(benchmark::State& state) {
    const auto& np = program("vaccination.prob");
    for (auto _ : state) {
        MomentEngine eng(np);
        DependencyGraph g(np);
        benchmark::DoNotOptimize(sensitivity_via_closed_form(eng, g, parse_target("infected_prob^2"), "vax_param"));
    }
}
BENCHMARK(BM_DiffPath)->Unit(benchmark::kMillisecond);

void BM_EvaluateClosedForm(benchmark::State& state) {
    AnalysisOptions o;
    o.target = "infected_prob";
    o.wrt = "vax_param";
    auto r = analyze_file(corpus("vaccination.prob"), o);
    ParamAssignment sigma{{"decline", Rational(9, 10)}, {"contact_param", Rational(7, 10)}, {"vax_param", Rational(1, 10)}};
    for (auto _ : state)
        benchmark::DoNotOptimize(r.closed_form->evaluate(state.range(0), sigma));
}
BENCHMARK(BM_EvaluateClosedForm)->Arg(11)->Arg(1000);

void BM_EnumerateStates(benchmark::State& state) {
    const auto& np = program("nonadmissible.prob");
    for (auto _ : state)
        benchmark::DoNotOptimize(enumerate_states(np, static_cast<unsigned>(state.range(0)), {{"p", Rational(3, 10)}}));
}
BENCHMARK(BM_EnumerateStates)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SampleMoment(benchmark::State& state) {
    const auto& np = program("random_walk_2d.prob");
    ParamAssignment sigma;
    for (const auto& p : parse_file(corpus("random_walk_2d.prob")).parameters)
        sigma[p] = Rational(1, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_moment(np, Monomial::symbol("x", 2), 50, sigma, 10000, 1, 1));
}
BENCHMARK(BM_SampleMoment)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
