#include "probsens/analysis.hpp"

#include "probsens/errors.hpp"
#include "probsens/moments.hpp"
#include "probsens/parser.hpp"
#include "probsens/solver.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <charconv>
#include <sstream>

namespace probsens {

const char* to_string(Method m) {
    switch (m) {
    case Method::Auto: return "auto";
    case Method::Diff: return "diff";
    case Method::SensRec: return "sensrec";
    }
    return "auto";
}

Method parse_method(const std::string& text) {
    if (text == "auto")
        return Method::Auto;
    if (text == "diff")
        return Method::Diff;
    if (text == "sensrec")
        return Method::SensRec;
    throw Error(ErrorKind::Validation, "unknown method '" + text + "' (expected auto, diff or sensrec)");
}

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Validation: return 2;
    case ErrorKind::Classification: return 3;
    case ErrorKind::UnsupportedFactor: return 4;
    case ErrorKind::CapExceeded: return 5;
    case ErrorKind::SingularEvaluation: return 6;
    case ErrorKind::Unsupported: return 4;
    case ErrorKind::Oracle:
    case ErrorKind::Internal: return 1;
    }
    return 1;
}

Rational parse_number(const std::string& text) {
    try {
        return parse_rational(text);
    } catch (const std::invalid_argument&) {
        throw Error(ErrorKind::Validation, "not a number: '" + text + "'");
    }
}

ParamAssignment parse_assignment(const std::string& text) {
    ParamAssignment out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos)
            continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Validation, "expected name=value, got '" + item + "'");
        std::string name = item.substr(0, eq);
        name.erase(0, name.find_first_not_of(" \t"));
        name.erase(name.find_last_not_of(" \t") + 1);
        out[name] = parse_number(item.substr(eq + 1));
    }
    return out;
}

namespace {

ParamExpr subst(ParamExpr e, const ParamAssignment& sigma) {
    for (const auto& [k, v] : sigma)
        if (e.depends_on(k))
            e = e.substitute(k, ParamExpr(v));
    return e;
}

CounterPoly subst(const CounterPoly& p, const ParamAssignment& sigma) {
    std::vector<ParamExpr> c;
    for (const auto& x : p.coefficients())
        c.push_back(subst(x, sigma));
    return CounterPoly(std::move(c));
}

bool fully_assigned(const ParamExpr& e, const ParamAssignment& sigma) {
    for (const auto& p : e.parameters())
        if (!sigma.count(p))
            return false;
    return true;
}

bool fully_assigned(const ExpPolynomial& f, const ParamAssignment& sigma) {
    for (const auto& v : f.prefix())
        if (!fully_assigned(v, sigma))
            return false;
    for (const auto& t : f.terms()) {
        for (const auto& c : t.poly.coefficients())
            if (!fully_assigned(c, sigma))
                return false;
        for (const auto& c : t.radical.coefficients())
            if (!fully_assigned(c, sigma))
                return false;
        if (t.lambda.is_rational() ? !fully_assigned(t.lambda.value(), sigma)
                                   : !fully_assigned(t.lambda.qb(), sigma) || !fully_assigned(t.lambda.qc(), sigma))
            return false;
    }
    return true;
}

std::string format_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace

ExpPolynomial substitute(const ExpPolynomial& f, const ParamAssignment& sigma) {
    std::vector<ParamExpr> prefix;
    for (const auto& v : f.prefix())
        prefix.push_back(subst(v, sigma));
    std::vector<ExpTerm> terms;
    for (const auto& t : f.terms()) {
        EigenValue l = t.lambda.is_rational()
                           ? EigenValue::rational(subst(t.lambda.value(), sigma))
                           : EigenValue::quadratic_root(subst(t.lambda.qb(), sigma), subst(t.lambda.qc(), sigma),
                                                        t.lambda.index());
        terms.push_back({l, subst(t.poly, sigma), subst(t.radical, sigma)});
    }
    return ExpPolynomial(std::move(prefix), std::move(terms));
}

std::string AnalysisReport::quantity() const {
    std::string m = "E(" + target + "_n)";
    return parameter ? "d/d" + *parameter + " " + m : m;
}

std::string AnalysisReport::to_text() const {
    std::ostringstream os;
    if (normalized)
        os << "normalized program:\n" << *normalized << "\n";
    if (explanation)
        os << *explanation << "\n";
    os << "program: " << program_id << "\n";
    os << "quantity: " << quantity() << "\n";
    os << "method: " << method << "\n";
    os << "admissible: " << (admissible ? "yes" : "no") << "\n";
    if (classification && parameter)
        os << "sensitivity recurrences (" << *parameter << "): "
           << (classification->thm2_ok ? "applicable" : "not applicable") << "\n";
    os << "Rec: " << rec_count << "\n";
    if (include_recurrences)
        os << "recurrences:\n" << system.to_string();
    if (closed_form)
        os << "closed form: " << closed_form->to_text() << "\n";
    for (const auto& e : evaluations) {
        os << "value at n=" << e.n << ": ";
        if (e.symbolic)
            os << e.symbolic->to_string();
        else {
            os << format_double(e.approx);
            if (e.exact)
                os << " (exact " << e.exact->get_str() << ")";
        }
        os << "\n";
    }
    os << "time: " << format_double(seconds) << " s\n";
    return os.str();
}

std::string AnalysisReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["program"] = program_id;
    j["target"] = target;
    j["quantity"] = quantity();
    j["parameter"] = parameter ? nlohmann::ordered_json(*parameter) : nlohmann::ordered_json(nullptr);
    j["method"] = method;
    j["admissible"] = admissible;
    if (classification && parameter) {
        const auto& c = *classification;
        nlohmann::ordered_json cj;
        cj["sensitivity_recurrences_applicable"] = c.thm2_ok;
        cj["guards_finite"] = c.guards_finite;
        cj["defective"] = c.defective;
        cj["p_dependent"] = c.p_dependent;
        cj["defective_p_dependent"] = c.defective_p_dependent;
        cj["influenced_defective"] = nlohmann::ordered_json::array();
        for (const auto& w : c.influenced_defective)
            cj["influenced_defective"].push_back(
                {{"from", w.from}, {"to", w.to}, {"edge", {w.edge.from, w.edge.to}}});
        j["classification"] = cj;
    }
    j["trivially_zero"] = trivially_zero;
    j["rec"] = rec_count;
    if (include_recurrences)
        j["recurrences"] = nlohmann::ordered_json::parse(system.to_json());
    if (closed_form) {
        j["closed_form"] = closed_form->to_text();
        j["closed_form_structure"] = nlohmann::ordered_json::parse(closed_form->to_json());
    }
    j["evaluations"] = nlohmann::ordered_json::array();
    for (const auto& e : evaluations) {
        nlohmann::ordered_json ej;
        ej["n"] = e.n;
        if (e.symbolic) {
            ej["symbolic"] = e.symbolic->to_string();
        } else {
            ej["value"] = e.approx;
            if (e.exact)
                ej["exact"] = e.exact->get_str();
        }
        j["evaluations"].push_back(ej);
    }
    if (normalized)
        j["normalized"] = *normalized;
    if (explanation)
        j["explanation"] = *explanation;
    j["seconds"] = seconds;
    return j.dump(2);
}

AnalysisReport analyze(const Program& prog, const AnalysisOptions& options, const std::string& program_id) {
    auto start = std::chrono::steady_clock::now();
    auto diags = validate(prog);
    if (has_errors(diags)) {
        for (const auto& d : diags)
            if (d.severity == Diagnostic::Severity::Error)
                throw Error(ErrorKind::Validation, d.message);
    }
    AnalysisReport rep;
    rep.program_id = program_id;
    Monomial m = parse_target(options.target);
    for (const auto& v : m.symbols())
        if (!prog.is_variable(v))
            throw Error(ErrorKind::Validation, "unknown program variable '" + v + "' in target");
    rep.target = m.to_string();
    if (options.wrt && !prog.parameters.count(*options.wrt))
        throw Error(ErrorKind::Validation, "'" + *options.wrt + "' is not a parameter of the program");
    rep.parameter = options.wrt;

    NormalizedProgram np = normalize(prog);
    if (options.dump_normalized)
        rep.normalized = print(np);
    DependencyGraph graph(np);
    if (options.explain) {
        if (std::find(graph.vertices().begin(), graph.vertices().end(), *options.explain) == graph.vertices().end())
            throw Error(ErrorKind::Validation, "unknown program variable '" + *options.explain + "'");
        rep.explanation = graph.explain(*options.explain, options.wrt);
    }
    rep.admissible = graph.admissible();
    rep.include_recurrences = options.dump_recurrences;
    MomentEngine engine(np, graph.finite());

    if (!options.wrt) {
        rep.method = "moment";
        rep.system = moment_system(engine, m, options.cap);
        if (options.solve)
            rep.closed_form =
                m.is_one() ? ExpPolynomial::constant(ParamExpr(1)) : solve_system(rep.system).at(rep.system.target);
    } else {
        const std::string& p = *options.wrt;
        rep.classification = graph.classify(p);
        Method method = options.method;
        if (method == Method::Auto)
            method = rep.admissible ? Method::Diff : Method::SensRec;
        rep.method = to_string(method);
        if (!graph.p_dependent(m, p)) {
            rep.trivially_zero = true;
            rep.system.target = SeqSymbol::sensitivity(m, p);
            rep.system.trivially_zero = true;
            if (options.solve)
                rep.closed_form = ExpPolynomial();
        } else if (method == Method::SensRec) {
            EngineOptions eo;
            eo.cap = options.cap;
            rep.system = algorithm1(engine, graph, m, p, eo);
            if (options.solve)
                rep.closed_form = solve_system(rep.system).at(rep.system.target);
        } else {
            if (!rep.admissible)
                throw_not_admissible(graph);
            rep.system = moment_system(engine, m, options.cap);
            if (options.solve) {
                ExpPolynomial f = m.is_one() ? ExpPolynomial::constant(ParamExpr(1))
                                             : solve_system(rep.system).at(rep.system.target);
                rep.closed_form = ep_diff(f, p);
            }
        }
    }
    rep.rec_count = rep.system.size();

    if (rep.closed_form) {
        for (long n : options.at_n) {
            Evaluation e;
            e.n = n;
            if (fully_assigned(*rep.closed_form, options.eval)) {
                EvalResult r = rep.closed_form->evaluate(n, options.eval);
                e.exact = r.exact;
                e.approx = r.to_double();
            } else {
                e.symbolic = substitute(*rep.closed_form, options.eval).at(n);
            }
            rep.evaluations.push_back(std::move(e));
        }
        if (!options.eval.empty() && options.at_n.empty())
            rep.closed_form = substitute(*rep.closed_form, options.eval);
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

AnalysisReport analyze_file(const std::string& path, const AnalysisOptions& options) {
    Program prog = parse_file(path);
    return analyze(prog, options, std::filesystem::path(path).stem().string());
}

namespace {

std::vector<std::string> parameters_of(const Program& prog, const std::optional<std::string>& wrt) {
    if (wrt) {
        if (!prog.parameters.count(*wrt))
            throw Error(ErrorKind::Validation, "'" + *wrt + "' is not a parameter of the program");
        return {*wrt};
    }
    return {prog.parameters.begin(), prog.parameters.end()};
}

}  // namespace

std::string classify_text(const Program& prog, const std::optional<std::string>& wrt) {
    NormalizedProgram np = normalize(prog);
    DependencyGraph graph(np);
    std::ostringstream os;
    os << "admissible: " << (graph.admissible() ? "yes" : "no") << "\n";
    auto defective = graph.defective_variables();
    os << "defective:";
    for (const auto& d : defective)
        os << " " << d;
    os << (defective.empty() ? " none\n" : "\n");
    for (const auto& d : defective)
        if (auto w = graph.witness_path(d, d, true))
            os << "  " << *w << "\n";
    for (const auto& p : parameters_of(prog, wrt)) {
        Classification c = graph.classify(p);
        os << "sensitivity recurrences (" << p << "): " << (c.thm2_ok ? "applicable" : "not applicable") << "\n";
        os << "  " << p << "-dependent:";
        for (const auto& v : c.p_dependent)
            os << " " << v;
        os << "\n";
        for (const auto& v : c.infinite_guard_vars)
            os << "  guard variable not finite: " << v << "\n";
        for (const auto& v : c.defective_p_dependent)
            os << "  defective variable depends on " << p << ": " << v << "\n";
        for (const auto& w : c.influenced_defective)
            os << "  " << w.from << " ->+_" << p << " " << w.to << " (defective) via " << w.edge.from << " =" << p
               << "=> " << w.edge.to << "\n";
    }
    return os.str();
}

std::string classify_json(const Program& prog, const std::optional<std::string>& wrt) {
    NormalizedProgram np = normalize(prog);
    DependencyGraph graph(np);
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["admissible"] = graph.admissible();
    j["defective"] = graph.defective_variables();
    j["parameters"] = nlohmann::ordered_json::array();
    for (const auto& p : parameters_of(prog, wrt)) {
        Classification c = graph.classify(p);
        nlohmann::ordered_json cj;
        cj["parameter"] = p;
        cj["sensitivity_recurrences_applicable"] = c.thm2_ok;
        cj["guards_finite"] = c.guards_finite;
        cj["p_dependent"] = c.p_dependent;
        cj["defective_p_dependent"] = c.defective_p_dependent;
        cj["influenced_defective"] = nlohmann::ordered_json::array();
        for (const auto& w : c.influenced_defective)
            cj["influenced_defective"].push_back(
                {{"from", w.from}, {"to", w.to}, {"edge", {w.edge.from, w.edge.to}}});
        j["parameters"].push_back(cj);
    }
    return j.dump(2);
}

}  // namespace probsens
