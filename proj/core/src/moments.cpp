#include "probsens/moments.hpp"

#include "probsens/errors.hpp"

#include <mutex>

namespace probsens {

namespace {

constexpr std::size_t kIversonPointCap = 1U << 14;

}  // namespace

ParamExpr distribution_moment(const DistDraw& dist, unsigned k) {
    if (k == 0)
        return ParamExpr(1);
    const auto& a = dist.args;
    switch (dist.kind) {
    case DistKind::Bernoulli: return a[0];
    case DistKind::Uniform: {
        const auto kk = static_cast<long>(k);
        return (a[1].pow(kk + 1) - a[0].pow(kk + 1)) / (ParamExpr(kk + 1) * (a[1] - a[0]));
    }
    case DistKind::DiscreteUniform: {
        Rational lo = a[0].constant_value();
        Rational hi = a[1].constant_value();
        Rational sum = 0;
        for (Rational i = lo; i <= hi; i += 1)
            sum += pow(i, static_cast<long>(k));
        return ParamExpr(sum / (hi - lo + 1));
    }
    case DistKind::Normal: {
        ParamExpr m0(1);
        ParamExpr m1 = a[0];
        for (unsigned j = 2; j <= k; ++j) {
            ParamExpr next = a[0] * m1 + ParamExpr(static_cast<long>(j - 1)) * a[1] * m0;
            m0 = m1;
            m1 = next;
        }
        return m1;
    }
    }
    throw Error(ErrorKind::Unsupported, "unsupported distribution");
}

PolyExpr iverson_polynomial(const BExpr& c, const std::map<std::string, std::vector<ParamExpr>>& supports) {
    if (c.is_true())
        return PolyExpr(ParamExpr(1));
    if (c.is_false())
        return PolyExpr();
    if (!c.parameters().empty())
        throw Error(ErrorKind::Unsupported, "branching condition mentions a parameter: " + c.to_string());
    std::vector<std::string> vars;
    std::vector<std::vector<Rational>> domains;
    std::size_t points = 1;
    for (const auto& v : c.variables()) {
        auto it = supports.find(v);
        if (it == supports.end())
            throw Error(ErrorKind::Classification, "guard variable '" + v + "' is not finite-valued");
        std::vector<Rational> dom;
        for (const auto& s : it->second) {
            if (!s.is_constant())
                throw Error(ErrorKind::Unsupported, "guard variable '" + v + "' has a parametric value set");
            dom.push_back(s.constant_value());
        }
        points *= dom.size();
        if (points > kIversonPointCap)
            throw Error(ErrorKind::Unsupported, "guard support too large: " + c.to_string());
        vars.push_back(v);
        domains.push_back(std::move(dom));
    }
    // Univariate Lagrange bases per variable and support point.
    std::vector<std::vector<PolyExpr>> basis(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
        for (std::size_t s = 0; s < domains[i].size(); ++s) {
            PolyExpr l(ParamExpr(1));
            for (std::size_t t = 0; t < domains[i].size(); ++t) {
                if (t == s)
                    continue;
                Rational denom = domains[i][s] - domains[i][t];
                PolyExpr factor = polyexpr::variable(vars[i]) - PolyExpr(ParamExpr(domains[i][t]));
                l = (l * factor).scaled(ParamExpr(Rational(1) / denom));
            }
            basis[i].push_back(std::move(l));
        }
    }
    PolyExpr q;
    std::vector<std::size_t> idx(vars.size(), 0);
    VarValues values;
    for (;;) {
        for (std::size_t i = 0; i < vars.size(); ++i)
            values[vars[i]] = domains[i][idx[i]];
        if (c.evaluate(values, {})) {
            PolyExpr term(ParamExpr(1));
            for (std::size_t i = 0; i < vars.size(); ++i)
                term = term * basis[i][idx[i]];
            q += term;
        }
        std::size_t k = 0;
        while (k < vars.size() && ++idx[k] == domains[k].size()) {
            idx[k] = 0;
            ++k;
        }
        if (k == vars.size())
            break;
    }
    return q;
}

MomentEngine::MomentEngine(const NormalizedProgram& np) : MomentEngine(np, finite_values(np)) {}

MomentEngine::MomentEngine(const NormalizedProgram& np, FiniteValues finite)
    : np_(np), finite_(std::move(finite)) {
    for (const auto* seq : {&np_.init, &np_.body})
        for (const auto& a : *seq) {
            if (a.guard.is_true())
                continue;
            std::string key = a.guard.to_string();
            if (iverson_.count(key))
                continue;
            try {
                iverson_.emplace(key, reduce(iverson_polynomial(a.guard, finite_.supports())));
            } catch (const Error&) {
                // Reported when the guard is actually needed.
            }
        }
}

const PolyExpr& MomentEngine::reduced_power(const std::string& var, unsigned e) const {
    // Called with the unique lock held.
    auto key = std::make_pair(var, e);
    auto it = powers_.find(key);
    if (it != powers_.end())
        return it->second;
    const auto& s = *finite_.support(var);
    PolyExpr value;
    if (e < s.size()) {
        value = PolyExpr::term(Monomial::symbol(var, e), ParamExpr(1));
    } else if (e == s.size()) {
        // v^m = v^m - prod (v - s_i)
        PolyExpr prod(ParamExpr(1));
        for (const auto& si : s)
            prod = prod * (polyexpr::variable(var) - PolyExpr(si));
        value = PolyExpr::term(Monomial::symbol(var, e), ParamExpr(1)) - prod;
    } else {
        PolyExpr prev = reduced_power(var, e - 1);
        PolyExpr shifted = prev * polyexpr::variable(var);
        PolyExpr top = PolyExpr::term(Monomial::symbol(var, static_cast<unsigned>(s.size())), ParamExpr(1));
        ParamExpr lead = shifted.coefficient(top.terms().begin()->first);
        shifted -= top.scaled(lead);
        value = shifted + reduced_power(var, static_cast<unsigned>(s.size())).scaled(lead);
    }
    return powers_.emplace(key, std::move(value)).first->second;
}

PolyExpr MomentEngine::reduce(const PolyExpr& p) const {
    bool needed = false;
    for (const auto& [m, c] : p.terms())
        for (const auto& [v, e] : m.factors())
            if (const auto* s = finite_.support(v); s && e >= s->size())
                needed = true;
    if (!needed)
        return p;
    std::unique_lock lock(mutex_);
    PolyExpr out;
    for (const auto& [m, c] : p.terms()) {
        PolyExpr t = PolyExpr::term(Monomial(), c);
        std::vector<Monomial::Factor> keep;
        for (const auto& [v, e] : m.factors()) {
            const auto* s = finite_.support(v);
            if (s && e >= s->size())
                t = t * reduced_power(v, e);
            else
                keep.emplace_back(v, e);
        }
        out += t.times_monomial(Monomial(keep));
    }
    return out;
}

PolyExpr MomentEngine::substitute(const PolyExpr& p, const GuardedAssignment& a) const {
    const std::string& x = a.target;
    if (!p.contains(x))
        return p;
    PolyExpr q;
    if (!a.guard.is_true()) {
        auto it = iverson_.find(a.guard.to_string());
        if (it == iverson_.end())
            iverson_polynomial(a.guard, finite_.supports());  // throws the precise reason
        q = it->second;
    }
    std::map<unsigned, PolyExpr> repl;
    auto replacement = [&](unsigned k) -> const PolyExpr& {
        auto it = repl.find(k);
        if (it != repl.end())
            return it->second;
        PolyExpr base;
        if (const auto* cat = std::get_if<Categorical>(&a.rhs)) {
            auto probs = cat->probabilities();
            for (std::size_t i = 0; i < cat->branches.size(); ++i)
                base += cat->branches[i].value.pow(k).scaled(probs[i]);
        } else {
            base = PolyExpr(distribution_moment(std::get<DistDraw>(a.rhs), k));
        }
        PolyExpr r = base;
        if (!a.guard.is_true()) {
            PolyExpr d = PolyExpr::term(Monomial::symbol(a.else_source, k), ParamExpr(1));
            r = (PolyExpr(ParamExpr(1)) - q) * d + q * base;
        }
        return repl.emplace(k, reduce(r)).first->second;
    };
    PolyExpr out;
    for (const auto& [m, c] : p.terms()) {
        unsigned k = m.degree(x);
        if (k == 0) {
            out.add_term(m, c);
            continue;
        }
        out += replacement(k).times_monomial(m.without(x)).scaled(c);
    }
    return reduce(out);
}

PolyExpr MomentEngine::next_moment(const Monomial& m) const {
    {
        std::shared_lock lock(mutex_);
        auto it = memo_.find(m);
        if (it != memo_.end())
            return it->second;
    }
    PolyExpr p = PolyExpr::term(m, ParamExpr(1));
    for (auto it = np_.body.rbegin(); it != np_.body.rend(); ++it)
        p = substitute(p, *it);
    std::unique_lock lock(mutex_);
    return memo_.emplace(m, std::move(p)).first->second;
}

Recurrence MomentEngine::moment_recurrence(const Monomial& m) const {
    Recurrence r;
    r.lhs = SeqSymbol::moment(m);
    PolyExpr next = next_moment(m);
    for (const auto& [w, c] : next.terms())
        r.rhs.emplace(SeqSymbol::moment(w), c);
    return r;
}

ParamExpr MomentEngine::initial_moment(const Monomial& m) const {
    PolyExpr p = PolyExpr::term(m, ParamExpr(1));
    for (auto it = np_.init.rbegin(); it != np_.init.rend(); ++it)
        p = substitute(p, *it);
    if (!p.is_constant())
        throw Error(ErrorKind::Validation, "initial value of " + m.to_string() + " depends on uninitialized variables");
    return p.constant_term();
}

}  // namespace probsens
