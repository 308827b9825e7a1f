#include "probsens/parser.hpp"

#include <algorithm>

namespace probsens {

namespace {

class Validator {
public:
    explicit Validator(std::vector<Diagnostic>& out) : out_(out) {}

    void error(std::size_t line, std::string msg) { out_.push_back({Diagnostic::Severity::Error, line, std::move(msg)}); }
    void warning(std::size_t line, std::string msg) {
        out_.push_back({Diagnostic::Severity::Warning, line, std::move(msg)});
    }

    void check_reads(const std::set<std::string>& reads, const std::set<std::string>& assigned, std::size_t line,
                     const Program& prog) {
        for (const auto& v : reads)
            if (prog.is_variable(v) && !assigned.count(v))
                error(line, "variable '" + v + "' may be read before it is initialized");
    }

    void check_rhs(const AssignRhs& rhs, std::size_t line) {
        if (const auto* d = std::get_if<DistDraw>(&rhs)) {
            check_dist(*d, line);
            return;
        }
        const auto& c = std::get<Categorical>(rhs);
        bool numeric = true;
        std::set<std::string> params;
        Rational sum = 0;
        bool omitted = false;
        for (const auto& b : c.branches) {
            if (!b.prob) {
                omitted = true;
                continue;
            }
            if (!b.prob->is_constant()) {
                numeric = false;
                auto ps = b.prob->parameters();
                params.insert(ps.begin(), ps.end());
                continue;
            }
            Rational q = b.prob->constant_value();
            if (sgn(q) < 0 || q > 1)
                error(line, "probability " + to_string(q) + " outside [0, 1]");
            sum += q;
        }
        if (!numeric) {
            std::string names;
            for (const auto& p : params)
                names += (names.empty() ? "" : ", ") + p;
            warning(line, "symbolic probability; validity assumed for " + names + " ∈ [0,1]");
            return;
        }
        if (omitted ? sum > 1 : sum != 1)
            error(line, "probabilities sum to " + to_string(sum) + (omitted ? " (> 1)" : " instead of 1"));
    }

    void check_dist(const DistDraw& d, std::size_t line) {
        auto numeric = [](const ParamExpr& e) { return e.is_constant(); };
        switch (d.kind) {
        case DistKind::Bernoulli:
            if (numeric(d.args[0])) {
                Rational q = d.args[0].constant_value();
                if (sgn(q) < 0 || q > 1)
                    error(line, "Bernoulli parameter outside [0, 1]");
            } else {
                warning(line, "symbolic probability; validity assumed for Bernoulli parameter ∈ [0,1]");
            }
            break;
        case DistKind::DiscreteUniform:
            if (!numeric(d.args[0]) || !numeric(d.args[1]) || !is_integer(d.args[0].constant_value()) ||
                !is_integer(d.args[1].constant_value()))
                error(line, "DiscreteUniform bounds must be integer literals");
            else if (d.args[0].constant_value() > d.args[1].constant_value())
                error(line, "DiscreteUniform lower bound exceeds upper bound");
            break;
        case DistKind::Uniform:
            if (numeric(d.args[0]) && numeric(d.args[1]) && d.args[0].constant_value() >= d.args[1].constant_value())
                error(line, "Uniform requires a < b");
            break;
        case DistKind::Normal:
            if (numeric(d.args[1]) && sgn(d.args[1].constant_value()) < 0)
                error(line, "Normal variance must be non-negative");
            break;
        }
    }

    // Returns the set of definitely assigned variables after `stmts`.
    std::set<std::string> walk(const std::vector<Stmt>& stmts, std::set<std::string> assigned, const Program& prog) {
        for (const auto& s : stmts) {
            if (const auto* a = std::get_if<Assignment>(&s.node)) {
                for (const auto& [target, rhs] : a->targets) {
                    check_reads(rhs_variables(rhs), assigned, a->line, prog);
                    check_rhs(rhs, a->line);
                }
                for (const auto& [target, rhs] : a->targets)
                    assigned.insert(target);
                continue;
            }
            const auto& f = std::get<IfStmt>(s.node);
            std::optional<std::set<std::string>> meet;
            for (const auto& [cond, body] : f.branches) {
                check_reads(cond.variables(), assigned, f.line, prog);
                auto after = walk(body, assigned, prog);
                meet = meet ? intersect(*meet, after) : after;
            }
            if (f.else_body)
                meet = intersect(*meet, walk(*f.else_body, assigned, prog));
            else
                meet = intersect(*meet, assigned);
            assigned = *meet;
        }
        return assigned;
    }

private:
    static std::set<std::string> intersect(const std::set<std::string>& a, const std::set<std::string>& b) {
        std::set<std::string> out;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
        return out;
    }

    std::vector<Diagnostic>& out_;
};

}  // namespace

std::string Diagnostic::to_string() const {
    std::string out = line ? "line " + std::to_string(line) + ": " : std::string();
    out += severity == Severity::Error ? "error: " : "warning: ";
    return out + message;
}

std::vector<Diagnostic> validate(const Program& prog) {
    std::vector<Diagnostic> out;
    Validator v(out);
    auto after_init = v.walk(prog.init, {}, prog);
    v.walk(prog.body, after_init, prog);
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.is_error(); });
}

}  // namespace probsens
