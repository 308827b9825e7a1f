#include "probsens/dependency.hpp"

#include "probsens/errors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace probsens {

namespace {

using Support = std::set<ParamExpr>;
using State = std::map<std::string, std::optional<Support>>;  // nullopt: unbounded

constexpr std::size_t kComboLimit = 1U << 17;

ParamExpr eval_poly(const PolyExpr& p, const std::map<std::string, ParamExpr>& values) {
    ParamExpr total(0);
    for (const auto& [m, c] : p.terms()) {
        ParamExpr t = c;
        for (const auto& [v, e] : m.factors())
            t *= values.at(v).pow(e);
        total += t;
    }
    return total;
}

std::optional<bool> eval_guard(const BExpr& g, const std::map<std::string, ParamExpr>& values) {
    if (!g.parameters().empty())
        return std::nullopt;
    VarValues vv;
    for (const auto& v : g.variables()) {
        const auto& x = values.at(v);
        if (!x.is_constant())
            return std::nullopt;
        vv[v] = x.constant_value();
    }
    return g.evaluate(vv, {});
}

std::optional<Support> draw_support(const DistDraw& d, std::size_t cap) {
    switch (d.kind) {
    case DistKind::Bernoulli: return Support{ParamExpr(0), ParamExpr(1)};
    case DistKind::DiscreteUniform: {
        if (!d.args[0].is_constant() || !d.args[1].is_constant())
            return std::nullopt;
        Rational a = d.args[0].constant_value();
        Rational b = d.args[1].constant_value();
        if (b - a + 1 > Rational(static_cast<long>(cap)))
            return std::nullopt;
        Support s;
        for (Rational v = a; v <= b; v += 1)
            s.insert(ParamExpr(v));
        return s;
    }
    default: return std::nullopt;
    }
}

// Values the assignment can store; nullopt when unbounded.
std::optional<Support> transfer(const GuardedAssignment& a, const State& state, std::size_t cap) {
    Support out;
    if (!a.guard.is_true()) {
        const auto& d = state.at(a.else_source);
        if (!d)
            return std::nullopt;
        out = *d;
    }
    if (const auto* draw = std::get_if<DistDraw>(&a.rhs)) {
        auto s = draw_support(*draw, cap);
        if (!s)
            return std::nullopt;
        out.insert(s->begin(), s->end());
        return out;
    }
    const auto& cat = std::get<Categorical>(a.rhs);
    std::set<std::string> rhs_vars = rhs_variables(a.rhs);
    for (const auto& v : rhs_vars)
        if (!state.at(v))
            return std::nullopt;
    std::vector<std::string> vars(rhs_vars.begin(), rhs_vars.end());
    bool filter = true;
    for (const auto& v : a.guard.variables()) {
        if (rhs_vars.count(v))
            continue;
        if (state.at(v))
            vars.push_back(v);
        else
            filter = false;
    }
    std::size_t combos = 1;
    for (const auto& v : vars) {
        combos *= std::max<std::size_t>(state.at(v)->size(), 1);
        if (combos > kComboLimit)
            return std::nullopt;
    }
    std::vector<std::vector<ParamExpr>> domains;
    for (const auto& v : vars) {
        domains.emplace_back(state.at(v)->begin(), state.at(v)->end());
        if (domains.back().empty())
            return out;  // a source without values yet: nothing reachable
    }
    std::map<std::string, ParamExpr> values;
    std::vector<std::size_t> idx(vars.size(), 0);
    for (;;) {
        for (std::size_t i = 0; i < vars.size(); ++i)
            values[vars[i]] = domains[i][idx[i]];
        bool take = true;
        if (filter && !a.guard.is_true()) {
            auto g = eval_guard(a.guard, values);
            take = !g || *g;
        }
        if (take) {
            for (const auto& b : cat.branches) {
                out.insert(eval_poly(b.value, values));
                if (out.size() > cap)
                    return std::nullopt;
            }
        }
        std::size_t k = 0;
        while (k < vars.size() && ++idx[k] == domains[k].size()) {
            idx[k] = 0;
            ++k;
        }
        if (k == vars.size())
            break;
    }
    return out;
}

std::set<std::string> assignment_reads(const GuardedAssignment& a) {
    std::set<std::string> out = rhs_variables(a.rhs);
    for (const auto& v : a.guard.variables())
        out.insert(v);
    if (!a.guard.is_true())
        out.insert(a.else_source);
    return out;
}

bool rhs_mentions(const AssignRhs& rhs, const std::string& p) {
    return rhs_parameters(rhs).count(p) > 0;
}

}  // namespace

const std::vector<ParamExpr>* FiniteValues::support(const std::string& var) const {
    auto it = supports_.find(var);
    return it == supports_.end() ? nullptr : &it->second;
}

FiniteValues finite_values(const NormalizedProgram& np, std::size_t cap) {
    State state;
    auto declare = [&](const std::string& v) { state.try_emplace(v, Support{}); };
    for (const auto& a : np.init)
        declare(a.target);
    for (const auto& a : np.body)
        declare(a.target);
    for (const auto& v : np.variables)
        declare(v);

    bool changed = true;
    while (changed) {
        changed = false;
        auto step = [&](const GuardedAssignment& a) {
            auto& cur = state.at(a.target);
            if (!cur)
                return;
            auto next = transfer(a, state, cap);
            if (!next) {
                cur.reset();
                changed = true;
                return;
            }
            std::size_t before = cur->size();
            cur->insert(next->begin(), next->end());
            if (cur->size() > cap)
                cur.reset();
            if (!cur || cur->size() != before)
                changed = true;
        };
        for (const auto& a : np.init)
            step(a);
        for (const auto& a : np.body)
            step(a);
    }

    FiniteValues fv;
    for (const auto& [v, s] : state)
        if (s && !s->empty())
            fv.supports_[v] = std::vector<ParamExpr>(s->begin(), s->end());
    return fv;
}

std::string Classification::summary() const {
    std::ostringstream os;
    os << "admissible: " << (admissible ? "yes" : "no") << "\n";
    os << "sensitivity recurrences (" << parameter << "): " << (thm2_ok ? "applicable" : "not applicable") << "\n";
    if (!guards_finite) {
        os << "  guard variables not finite:";
        for (const auto& v : infinite_guard_vars)
            os << " " << v;
        os << "\n";
    }
    for (const auto& v : defective_p_dependent)
        os << "  defective variable depends on " << parameter << ": " << v << "\n";
    for (const auto& w : influenced_defective)
        os << "  " << w.from << " ->+_" << parameter << " " << w.to << " (defective) via " << w.edge.from << " =" << parameter
           << "=> " << w.edge.to << "\n";
    return os.str();
}

DependencyGraph::DependencyGraph(const NormalizedProgram& np) : np_(np), finite_(finite_values(np)) {
    vertices_ = np.all_variables();
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        index_[vertices_[i]] = i;
    const std::size_t n = vertices_.size();
    direct_.assign(n, std::vector<char>(n, 0));
    nonlinear_.assign(n, std::vector<char>(n, 0));

    for (const auto& a : np.body) {
        std::size_t x = index(a.target);
        for (const auto& y : assignment_reads(a))
            direct_[x][index(y)] = 1;
        if (const auto* cat = std::get_if<Categorical>(&a.rhs)) {
            for (const auto& b : cat->branches)
                for (const auto& [m, c] : b.value.terms())
                    for (const auto& [y, e] : m.factors())
                        if (e >= 2 || m.factors().size() > 1)
                            nonlinear_[x][index(y)] = 1;
        }
    }

    reach_ = direct_;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (reach_[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (reach_[k][j])
                        reach_[i][j] = 1;

    std::set<std::string> params = np.parameters;
    for (const auto& p : params) {
        PInfo info;
        // p-dependence: direct mention, guard mention, or dependence on a
        // p-dependent variable, including initialization.
        bool grow = true;
        while (grow) {
            grow = false;
            auto mark = [&](const std::string& v) {
                if (info.dependent.insert(v).second)
                    grow = true;
            };
            for (const auto* seq : {&np.init, &np.body}) {
                for (const auto& a : *seq) {
                    if (info.dependent.count(a.target))
                        continue;
                    if (rhs_mentions(a.rhs, p) || a.guard.mentions_parameter(p)) {
                        mark(a.target);
                        continue;
                    }
                    for (const auto& y : assignment_reads(a))
                        if (y != a.target && info.dependent.count(y)) {
                            mark(a.target);
                            break;
                        }
                }
            }
        }

        for (const auto& a : np.body) {
            bool guard_p = a.guard.mentions_parameter(p);
            for (const auto& g : a.guard.variables())
                guard_p = guard_p || info.dependent.count(g) > 0;
            if (guard_p) {
                for (const auto& y : assignment_reads(a))
                    info.influenced.insert({a.target, y});
                continue;
            }
            const auto* cat = std::get_if<Categorical>(&a.rhs);
            if (!cat)
                continue;
            bool prob_p = false;
            for (const auto& b : cat->branches)
                if (b.prob && b.prob->depends_on(p))
                    prob_p = true;
            for (const auto& b : cat->branches) {
                for (const auto& [m, c] : b.value.terms()) {
                    for (const auto& [y, e] : m.factors()) {
                        if (prob_p) {
                            info.influenced.insert({a.target, y});
                            continue;
                        }
                        Monomial rest = m.with_exponent(y, e - 1);
                        bool hit = c.depends_on(p);
                        for (const auto& [z, ez] : rest.factors())
                            hit = hit || info.dependent.count(z) > 0;
                        if (hit)
                            info.influenced.insert({a.target, y});
                    }
                }
            }
        }
        pinfo_.emplace(p, std::move(info));
    }
}

std::size_t DependencyGraph::index(const std::string& v) const {
    auto it = index_.find(v);
    if (it == index_.end())
        throw Error(ErrorKind::Validation, "unknown variable '" + v + "'");
    return it->second;
}

bool DependencyGraph::direct(const std::string& x, const std::string& y) const {
    return direct_[index(x)][index(y)] != 0;
}

bool DependencyGraph::nonlinear(const std::string& x, const std::string& y) const {
    return nonlinear_[index(x)][index(y)] != 0;
}

bool DependencyGraph::depends(const std::string& x, const std::string& y) const {
    return reach_[index(x)][index(y)] != 0;
}

bool DependencyGraph::depends_nonlinearly(const std::string& x, const std::string& y) const {
    std::size_t i = index(x), j = index(y);
    const std::size_t n = vertices_.size();
    for (std::size_t a = 0; a < n; ++a) {
        if (a != i && !reach_[i][a])
            continue;
        for (std::size_t b = 0; b < n; ++b)
            if (nonlinear_[a][b] && (b == j || reach_[b][j]))
                return true;
    }
    return false;
}

std::vector<std::string> DependencyGraph::defective_variables() const {
    std::vector<std::string> out;
    for (const auto& v : vertices_)
        if (defective(v))
            out.push_back(v);
    return out;
}

std::set<std::string> DependencyGraph::guard_variables() const {
    std::set<std::string> out;
    for (const auto& a : np_.body)
        for (const auto& v : a.guard.variables())
            out.insert(v);
    return out;
}

const DependencyGraph::PInfo& DependencyGraph::pinfo(const std::string& p) const {
    auto it = pinfo_.find(p);
    if (it == pinfo_.end())
        throw Error(ErrorKind::Validation, "unknown parameter '" + p + "'");
    return it->second;
}

bool DependencyGraph::p_dependent(const std::string& x, const std::string& p) const {
    return pinfo(p).dependent.count(x) > 0;
}

bool DependencyGraph::p_dependent(const Monomial& m, const std::string& p) const {
    for (const auto& [v, e] : m.factors())
        if (p_dependent(v, p))
            return true;
    return false;
}

bool DependencyGraph::p_influenced(const std::string& x, const std::string& y, const std::string& p) const {
    return pinfo(p).influenced.count({x, y}) > 0;
}

std::optional<Edge> DependencyGraph::influenced_edge_on_path(const std::string& x, const std::string& y,
                                                             const std::string& p) const {
    std::size_t i = index(x), j = index(y);
    for (const auto& e : pinfo(p).influenced) {
        std::size_t a = index(e.from), b = index(e.to);
        if ((a == i || reach_[i][a]) && (b == j || reach_[b][j]))
            return e;
    }
    return std::nullopt;
}

bool DependencyGraph::depends_p(const std::string& x, const std::string& y, const std::string& p) const {
    return influenced_edge_on_path(x, y, p).has_value();
}

bool DependencyGraph::admissible() const {
    for (const auto& g : guard_variables())
        if (!finite_.is_finite(g))
            return false;
    return defective_variables().empty();
}

Classification DependencyGraph::classify(const std::string& p) const {
    Classification c;
    c.parameter = p;
    for (const auto& g : guard_variables())
        if (!finite_.is_finite(g)) {
            c.guards_finite = false;
            c.infinite_guard_vars.push_back(g);
        }
    c.defective = defective_variables();
    for (const auto& v : vertices_)
        if (p_dependent(v, p))
            c.p_dependent.push_back(v);
    for (const auto& d : c.defective)
        if (p_dependent(d, p))
            c.defective_p_dependent.push_back(d);
    for (const auto& x : vertices_)
        for (const auto& y : c.defective)
            if (depends(x, y))
                if (auto e = influenced_edge_on_path(x, y, p))
                    c.influenced_defective.push_back({x, y, *e});
    c.admissible = c.guards_finite && c.defective.empty();
    c.thm2_ok = c.guards_finite && c.defective_p_dependent.empty() && c.influenced_defective.empty();
    return c;
}

std::optional<std::vector<std::string>> DependencyGraph::path(const std::string& x, const std::string& y) const {
    // Shortest non-empty path x -> ... -> y over direct edges.
    const std::size_t n = vertices_.size();
    std::size_t s = index(x), t = index(y);
    std::vector<long> prev(n, -1);
    std::vector<char> seen(n, 0);
    std::deque<std::size_t> q;
    for (std::size_t b = 0; b < n; ++b)
        if (direct_[s][b] && !seen[b]) {
            seen[b] = 1;
            prev[b] = static_cast<long>(s);
            q.push_back(b);
        }
    while (!q.empty()) {
        std::size_t a = q.front();
        q.pop_front();
        if (a == t)
            break;
        for (std::size_t b = 0; b < n; ++b)
            if (direct_[a][b] && !seen[b]) {
                seen[b] = 1;
                prev[b] = static_cast<long>(a);
                q.push_back(b);
            }
    }
    if (!seen[t])
        return std::nullopt;
    std::vector<std::string> out{y};
    std::size_t cur = t;
    do {
        cur = static_cast<std::size_t>(prev[cur]);
        out.push_back(vertices_[cur]);
    } while (cur != s || out.size() == 1);
    std::reverse(out.begin(), out.end());
    return out;
}

std::optional<std::string> DependencyGraph::witness_path(const std::string& x, const std::string& y,
                                                         bool require_nonlinear) const {
    auto render = [&](const std::vector<std::string>& nodes) {
        std::string out = nodes.front();
        for (std::size_t i = 1; i < nodes.size(); ++i)
            out += (nonlinear(nodes[i - 1], nodes[i]) ? " =N=> " : " => ") + nodes[i];
        return out;
    };
    if (!require_nonlinear) {
        auto p = path(x, y);
        if (!p)
            return std::nullopt;
        return render(*p);
    }
    std::optional<std::vector<std::string>> best;
    for (const auto& a : vertices_) {
        if (a != x && !depends(x, a))
            continue;
        for (const auto& b : vertices_) {
            if (!nonlinear(a, b) || (b != y && !depends(b, y)))
                continue;
            std::vector<std::string> nodes;
            if (a == x) {
                nodes.push_back(x);
            } else {
                nodes = *path(x, a);
            }
            nodes.push_back(b);
            if (b != y) {
                auto tail = *path(b, y);
                nodes.insert(nodes.end(), tail.begin() + 1, tail.end());
            }
            if (!best || nodes.size() < best->size())
                best = nodes;
        }
    }
    if (!best)
        return std::nullopt;
    return render(*best);
}

std::string DependencyGraph::explain(const std::string& var, const std::optional<std::string>& p) const {
    std::ostringstream os;
    index(var);
    os << var << ":";
    if (const auto* s = finite_.support(var)) {
        os << " finite {";
        for (std::size_t i = 0; i < s->size(); ++i)
            os << (i ? ", " : "") << (*s)[i].to_string();
        os << "}";
    } else {
        os << " unbounded";
    }
    if (np_.is_temporary(var))
        os << ", temporary of " << np_.temporaries.at(var);
    os << "\n";
    os << "  depends on:";
    for (const auto& v : vertices_)
        if (depends(var, v))
            os << " " << v;
    os << "\n";
    if (auto w = witness_path(var, var, true))
        os << "  " << *w << " : defective\n";
    else
        os << "  effective\n";
    if (p) {
        os << "  " << (p_dependent(var, *p) ? "depends on " : "independent of ") << *p << "\n";
        for (const auto& y : defective_variables()) {
            if (!depends(var, y))
                continue;
            if (auto e = influenced_edge_on_path(var, y, *p))
                os << "  " << var << " ->+_" << *p << " " << y << " via " << e->from << " =" << *p << "=> " << e->to
                   << " : violates p-free dependency on defective " << y << "\n";
        }
    }
    return os.str();
}

}  // namespace probsens
