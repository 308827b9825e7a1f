#include "probsens/analysis.hpp"
#include "probsens/bench.hpp"
#include "probsens/errors.hpp"
#include "probsens/oracle.hpp"
#include "probsens/parser.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

using namespace probsens;

namespace {

struct Common {
    std::string format = "text";
    std::string method = "auto";
    bool dump_normalized = false;
    bool dump_recurrences = false;
    std::string explain;
};

void add_common(CLI::App* cmd, Common& c, bool with_method) {
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    if (with_method)
        cmd->add_option("--method", c.method, "Sensitivity method")->check(CLI::IsMember({"auto", "diff", "sensrec"}));
    cmd->add_flag("--dump-normalized", c.dump_normalized, "Print the normalized program");
    cmd->add_flag("--dump-recurrences", c.dump_recurrences, "Print the recurrence system");
    cmd->add_option("--explain", c.explain, "Explain the dependencies of a variable");
}

std::vector<long> parse_indices(const std::string& text) {
    std::vector<long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        try {
            if (auto dots = item.find(".."); dots != std::string::npos) {
                long lo = std::stol(item.substr(0, dots)), hi = std::stol(item.substr(dots + 2));
                for (long n = lo; n <= hi; ++n)
                    out.push_back(n);
            } else {
                out.push_back(std::stol(item));
            }
        } catch (const std::exception&) {
            throw Error(ErrorKind::Validation, "bad index list '" + text + "'");
        }
    }
    for (long n : out)
        if (n < 0)
            throw Error(ErrorKind::Validation, "negative loop index in '" + text + "'");
    return out;
}

int emit_analysis(const std::string& file, const std::string& target, const std::string& wrt, const Common& c,
                  const std::string& eval, const std::string& at_n, bool solve) {
    AnalysisOptions o;
    o.target = target;
    if (!wrt.empty())
        o.wrt = wrt;
    o.method = parse_method(c.method);
    if (!eval.empty())
        o.eval = parse_assignment(eval);
    if (!at_n.empty())
        o.at_n = parse_indices(at_n);
    o.solve = solve;
    o.dump_normalized = c.dump_normalized;
    o.dump_recurrences = c.dump_recurrences || !solve;
    if (!c.explain.empty())
        o.explain = c.explain;
    AnalysisReport r = analyze_file(file, o);
    std::cout << (c.format == "json" ? r.to_json() + "\n" : r.to_text());
    return 0;
}

int run_simulate(const std::string& file, const std::string& monomial, unsigned n, std::size_t trials,
                 std::uint64_t seed, const std::vector<std::string>& params, const std::string& fd,
                 const std::string& mode, const std::string& format) {
    Program prog = parse_file(file);
    auto diags = validate(prog);
    for (const auto& d : diags)
        if (d.is_error())
            throw Error(ErrorKind::Validation, d.to_string());
    NormalizedProgram np = normalize(prog);
    Monomial m = parse_target(monomial);
    for (const auto& v : m.symbols())
        if (!prog.is_variable(v))
            throw Error(ErrorKind::Validation, "unknown program variable '" + v + "'");
    ParamAssignment sigma;
    for (const auto& p : params)
        for (const auto& [k, v] : parse_assignment(p))
            sigma[k] = v;
    for (const auto& p : prog.parameters)
        if (!sigma.count(p))
            throw Error(ErrorKind::Validation, "missing --param " + p + "=value");

    bool has_continuous = false;
    for (const auto* seq : {&np.init, &np.body})
        for (const auto& a : *seq)
            if (const auto* d = std::get_if<DistDraw>(&a.rhs))
                has_continuous |= d->kind == DistKind::Normal || d->kind == DistKind::Uniform;
    bool exact = mode == "exact" || (mode == "auto" && !has_continuous);

    auto run = [&](bool exact_mode) -> OracleEstimate {
        if (!fd.empty()) {
            FdOptions fo;
            std::string p = fd;
            if (auto colon = fd.find(':'); colon != std::string::npos) {
                p = fd.substr(0, colon);
                fo.epsilon = parse_number(fd.substr(colon + 1));
            }
            fo.mode = exact_mode ? OracleEstimate::Mode::Exact : OracleEstimate::Mode::Sampled;
            fo.trials = trials;
            fo.seed = seed;
            return fd_sensitivity(np, m, n, sigma, p, fo);
        }
        if (exact_mode)
            return enumerate_moment(np, m, n, sigma);
        return sample_moment(np, m, n, sigma, trials, seed);
    };
    OracleEstimate e;
    if (exact && mode == "auto") {
        try {
            e = run(true);
        } catch (const Error& err) {
            if (err.kind() != ErrorKind::Oracle)
                throw;
            e = run(false);
        }
    } else {
        e = run(exact);
    }
    if (format == "json") {
        std::cout << e.to_json() << "\n";
    } else {
        std::cout << "value: " << nlohmann::json(e.value).dump();
        if (e.exact)
            std::cout << " (exact " << e.exact->get_str() << ")";
        std::cout << "\nstderr: " << nlohmann::json(e.stderr_).dump() << "\ntrials: " << e.trials
                  << "\nmode: " << to_string(e.mode) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sensitivities of moments of probabilistic loops"};
    app.require_subcommand(1);

    Common common;
    std::string file, target, wrt, eval, at_n;

    auto* analyze = app.add_subcommand("analyze", "Closed form of a moment or of its sensitivity");
    analyze->add_option("file", file, "Program file")->required();
    analyze->add_option("--target", target, "Target monomial, e.g. x or x^2*y")->required();
    analyze->add_option("--wrt", wrt, "Parameter to differentiate by");
    analyze->add_option("--eval", eval, "Parameter values k=v,...");
    analyze->add_option("--at-n", at_n, "Loop indices to evaluate, e.g. 11 or 1..8");
    add_common(analyze, common, true);

    auto* dump = app.add_subcommand("dump-recurrences", "Print the recurrence system without solving it");
    dump->add_option("file", file, "Program file")->required();
    dump->add_option("--target", target, "Target monomial")->required();
    dump->add_option("--wrt", wrt, "Parameter");
    add_common(dump, common, true);

    auto* classify = app.add_subcommand("classify", "Admissibility and applicability of sensitivity recurrences");
    classify->add_option("file", file, "Program file")->required();
    classify->add_option("--wrt", wrt, "Parameter (default: all)");
    add_common(classify, common, false);

    std::string monomial, fd, mode = "auto";
    unsigned n = 1;
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
    std::vector<std::string> params;
    auto* simulate = app.add_subcommand("simulate", "Oracle estimate by exact enumeration or sampling");
    simulate->add_option("file", file, "Program file")->required();
    simulate->add_option("--monomial", monomial, "Monomial to estimate")->required();
    simulate->add_option("--n", n, "Loop iterations")->required();
    simulate->add_option("--trials", trials, "Monte Carlo trials");
    simulate->add_option("--seed", seed, "Random seed");
    simulate->add_option("--param", params, "Parameter value name=value (repeatable)");
    simulate->add_option("--fd", fd, "Finite-difference sensitivity p[:eps]");
    simulate->add_option("--mode", mode, "auto, exact or sampled")->check(CLI::IsMember({"auto", "exact", "sampled"}));
    std::string sim_format = "json";
    simulate->add_option("--format", sim_format, "Output format")->check(CLI::IsMember({"text", "json"}));

    std::string manifest = "corpus/manifest.json";
    double timeout = 120.0;
    unsigned jobs = 1;
    auto* bench = app.add_subcommand("bench", "Run the benchmark manifest");
    bench->add_option("manifest", manifest, "Manifest file");
    bench->add_option("--timeout", timeout, "Per-row timeout in seconds");
    bench->add_option("--jobs", jobs, "Rows run in parallel");
    bench->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed())
            return emit_analysis(file, target, wrt, common, eval, at_n, true);
        if (dump->parsed())
            return emit_analysis(file, target, wrt, common, "", "", false);
        if (classify->parsed()) {
            Program prog = parse_file(file);
            if (common.format == "json") {
                std::cout << classify_json(prog, wrt.empty() ? std::nullopt : std::optional(wrt)) << "\n";
            } else {
                if (common.dump_normalized)
                    std::cout << print(normalize(prog)) << "\n";
                if (!common.explain.empty()) {
                    DependencyGraph g(normalize(prog));
                    std::cout << g.explain(common.explain, wrt.empty() ? std::nullopt : std::optional(wrt)) << "\n";
                }
                std::cout << classify_text(prog, wrt.empty() ? std::nullopt : std::optional(wrt));
            }
            return 0;
        }
        if (simulate->parsed())
            return run_simulate(file, monomial, n, trials, seed, params, fd, mode, sim_format);
        if (bench->parsed()) {
            BenchOptions bo;
            bo.timeout_seconds = timeout;
            bo.jobs = jobs;
            auto results = run_bench(load_manifest(manifest), bo);
            std::cout << (common.format == "json" ? bench_json(results) + "\n" : bench_table(results));
            return bench_passed(results) ? 0 : 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
