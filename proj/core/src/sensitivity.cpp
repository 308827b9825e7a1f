#include "probsens/sensitivity.hpp"

#include "probsens/solver.hpp"

#include <cstdlib>
#include <set>

namespace probsens {

std::size_t equation_cap() {
    const char* env = std::getenv("PROBSENS_EQ_CAP");
    if (!env || !*env)
        return kDefaultEquationCap;
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
        return kDefaultEquationCap;
    return v;
}

Recurrence sensitivity_recurrence(const MomentEngine& engine, const DependencyGraph& graph, const Monomial& m,
                                  const std::string& p, bool drop_vanishing) {
    Recurrence mom = engine.moment_recurrence(m);
    Recurrence r;
    r.lhs = SeqSymbol::sensitivity(m, p);
    for (const auto& [w, c] : mom.rhs) {
        ParamExpr dc = c.derivative(p);
        if (!dc.is_zero() || (!drop_vanishing && !w.monomial.is_one()))
            r.rhs[w] = r.rhs[w] + dc;
        if (w.monomial.is_one())
            continue;  // d/dp of the constant sequence
        if (drop_vanishing && !graph.p_dependent(w.monomial, p))
            continue;
        r.rhs[SeqSymbol::sensitivity(w.monomial, p)] = c;
    }
    return r;
}

namespace {

std::string thm2_message(const Classification& c) {
    std::string msg = "sensitivity recurrences are not applicable for parameter '" + c.parameter + "'";
    if (!c.guards_finite) {
        msg += ": guard variable '" + c.infinite_guard_vars.front() + "' is not finite-valued";
    } else if (!c.defective_p_dependent.empty()) {
        msg += ": defective variable '" + c.defective_p_dependent.front() + "' depends on " + c.parameter;
    } else if (!c.influenced_defective.empty()) {
        const auto& w = c.influenced_defective.front();
        msg += ": " + w.from + " ->+_" + c.parameter + " " + w.to + " with " + w.to + " defective (edge " + w.edge.from +
               " =" + c.parameter + "=> " + w.edge.to + ")";
    }
    return msg;
}

void check_cap(const RecurrenceSystem& sys, std::size_t cap, const SeqSymbol& next) {
    if (sys.size() >= cap)
        throw CapExceededError(cap, "next equation " + next.to_string());
}

}  // namespace

RecurrenceSystem algorithm1(const MomentEngine& engine, const DependencyGraph& graph, const Monomial& m,
                            const std::string& p, const EngineOptions& options) {
    RecurrenceSystem sys;
    sys.target = SeqSymbol::sensitivity(m, p);
    if (!graph.p_dependent(m, p)) {
        sys.trivially_zero = true;
        return sys;
    }
    Classification c = graph.classify(p);
    if (!c.thm2_ok)
        throw ClassificationError(thm2_message(c), c);

    const bool drop = !options.keep_vanishing_terms;
    std::set<Monomial> sens{m};
    std::set<Monomial> mom;
    std::set<Monomial> sens_done;
    while (!sens.empty()) {
        Monomial w = *sens.begin();
        sens.erase(sens.begin());
        check_cap(sys, options.cap, SeqSymbol::sensitivity(w, p));
        Recurrence r = sensitivity_recurrence(engine, graph, w, p, drop);
        sens_done.insert(w);
        for (const auto& [s, coeff] : r.rhs) {
            if (s.is_moment()) {
                if (!s.monomial.is_one())
                    mom.insert(s.monomial);
            } else if (!sens_done.count(s.monomial)) {
                sens.insert(s.monomial);
            }
        }
        sys.add(std::move(r), engine.initial_moment(w).derivative(p), Provenance::Sensitivity);
    }
    std::set<Monomial> mom_done;
    while (!mom.empty()) {
        Monomial w = *mom.begin();
        mom.erase(mom.begin());
        check_cap(sys, options.cap, SeqSymbol::moment(w));
        Recurrence r = engine.moment_recurrence(w);
        mom_done.insert(w);
        for (const auto& [s, coeff] : r.rhs)
            if (!s.monomial.is_one() && !mom_done.count(s.monomial))
                mom.insert(s.monomial);
        sys.add(std::move(r), engine.initial_moment(w), Provenance::Moment);
    }
    return sys;
}

RecurrenceSystem moment_system(const MomentEngine& engine, const Monomial& m, std::size_t cap) {
    RecurrenceSystem sys;
    sys.target = SeqSymbol::moment(m);
    if (m.is_one())
        return sys;
    std::set<Monomial> work{m};
    std::set<Monomial> done;
    while (!work.empty()) {
        Monomial w = *work.begin();
        work.erase(work.begin());
        check_cap(sys, cap, SeqSymbol::moment(w));
        Recurrence r = engine.moment_recurrence(w);
        done.insert(w);
        for (const auto& [s, coeff] : r.rhs)
            if (!s.monomial.is_one() && !done.count(s.monomial))
                work.insert(s.monomial);
        sys.add(std::move(r), engine.initial_moment(w), Provenance::Moment);
    }
    return sys;
}

void throw_not_admissible(const DependencyGraph& graph) {
    Classification c;
    c.guards_finite = true;
    for (const auto& g : graph.guard_variables())
        if (!graph.finite().is_finite(g)) {
            c.guards_finite = false;
            c.infinite_guard_vars.push_back(g);
        }
    c.defective = graph.defective_variables();
    std::string msg = "program is not admissible";
    if (!c.guards_finite)
        msg += ": guard variable '" + c.infinite_guard_vars.front() + "' is not finite-valued";
    else if (!c.defective.empty()) {
        const auto& d = c.defective.front();
        msg += ": " + graph.witness_path(d, d, true).value_or(d) + " : defective";
    }
    throw ClassificationError(msg, c);
}

ExpPolynomial sensitivity_via_closed_form(const MomentEngine& engine, const DependencyGraph& graph, const Monomial& m,
                                          const std::string& p, RecurrenceSystem* system_out) {
    if (!graph.admissible())
        throw_not_admissible(graph);
    RecurrenceSystem sys = moment_system(engine, m);
    ExpPolynomial closed;
    if (m.is_one()) {
        closed = ExpPolynomial::constant(ParamExpr(1));
    } else {
        auto solved = solve_system(sys);
        closed = solved.at(SeqSymbol::moment(m));
    }
    if (system_out)
        *system_out = std::move(sys);
    return ep_diff(closed, p);
}

}  // namespace probsens
