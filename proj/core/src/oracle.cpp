#include "probsens/oracle.hpp"

#include "probsens/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace probsens {

const char* to_string(OracleEstimate::Mode mode) {
    return mode == OracleEstimate::Mode::Exact ? "exact" : "sampled";
}

std::string OracleEstimate::to_json() const {
    nlohmann::ordered_json j;
    j["value"] = value;
    j["stderr"] = stderr_;
    j["trials"] = trials;
    j["mode"] = to_string(mode);
    if (exact)
        j["exact"] = exact->get_str();
    return j.dump();
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

SplitMix64::SplitMix64(std::uint64_t seed, std::uint64_t stream)
    : state_(mix64(seed + 0x632BE59BD9B4E019ULL) ^ mix64(stream * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL)) {}

std::uint64_t SplitMix64::next() {
    return mix64(state_ += 0x9E3779B97F4A7C15ULL);
}

double SplitMix64::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

Rational StateDistribution::total_mass() const {
    Rational s = 0;
    for (const auto& [st, w] : states)
        s += w;
    return s;
}

Rational StateDistribution::expectation(const Monomial& m) const {
    std::vector<std::pair<std::size_t, unsigned>> idx;
    for (const auto& [v, e] : m.factors()) {
        auto it = std::find(variables.begin(), variables.end(), v);
        if (it == variables.end())
            throw Error(ErrorKind::Oracle, "unknown variable in monomial: " + v);
        idx.emplace_back(static_cast<std::size_t>(it - variables.begin()), e);
    }
    Rational s = 0;
    for (const auto& [st, w] : states) {
        Rational t = w;
        for (const auto& [i, e] : idx)
            for (unsigned k = 0; k < e; ++k)
                t *= st[i];
        s += t;
    }
    return s;
}

namespace {

double to_double(const Rational& q) {
    return q.get_d();
}
Rational from_rational(const Rational& q, Rational*) {
    return q;
}
double from_rational(const Rational& q, double*) {
    return q.get_d();
}

template <class T>
T convert(const Rational& q) {
    return from_rational(q, static_cast<T*>(nullptr));
}

template <class T>
struct CPoly {
    std::vector<std::pair<T, std::vector<std::pair<std::size_t, unsigned>>>> terms;

    T eval(const std::vector<T>& s) const {
        T sum = 0;
        for (const auto& [c, f] : terms) {
            T t = c;
            for (const auto& [i, e] : f)
                for (unsigned k = 0; k < e; ++k)
                    t *= s[i];
            sum += t;
        }
        return sum;
    }
};

template <class T>
struct CGuard {
    BExpr::Kind kind = BExpr::Kind::True;
    CmpOp op = CmpOp::Eq;
    CPoly<T> lhs, rhs;
    std::vector<CGuard> children;

    bool eval(const std::vector<T>& s) const {
        switch (kind) {
        case BExpr::Kind::True: return true;
        case BExpr::Kind::False: return false;
        case BExpr::Kind::Not: return !children[0].eval(s);
        case BExpr::Kind::And:
            for (const auto& c : children)
                if (!c.eval(s))
                    return false;
            return true;
        case BExpr::Kind::Or:
            for (const auto& c : children)
                if (c.eval(s))
                    return true;
            return false;
        case BExpr::Kind::Cmp: break;
        }
        T a = lhs.eval(s), b = rhs.eval(s);
        switch (op) {
        case CmpOp::Eq: return a == b;
        case CmpOp::Ne: return a != b;
        case CmpOp::Lt: return a < b;
        case CmpOp::Gt: return a > b;
        case CmpOp::Ge: return a >= b;
        case CmpOp::Le: return a <= b;
        }
        return false;
    }
};

template <class T>
struct CAssign {
    std::size_t target = 0;
    std::size_t else_source = 0;
    bool guarded = false;
    CGuard<T> guard;
    bool categorical = true;
    std::vector<std::pair<CPoly<T>, T>> branches;
    DistKind dist = DistKind::Bernoulli;
    std::vector<T> args;
};

template <class T>
class Compiled {
public:
    Compiled(const NormalizedProgram& np, const ParamAssignment& sigma) : vars_(np.all_variables()) {
        for (const auto& a : np.init)
            if (std::find(vars_.begin(), vars_.end(), a.target) == vars_.end())
                vars_.push_back(a.target);
        for (std::size_t i = 0; i < vars_.size(); ++i)
            index_[vars_[i]] = i;
        for (const auto& a : np.init)
            init_.push_back(compile(a, sigma));
        for (const auto& a : np.body)
            body_.push_back(compile(a, sigma));
    }

    const std::vector<std::string>& variables() const { return vars_; }
    const std::vector<CAssign<T>>& init() const { return init_; }
    const std::vector<CAssign<T>>& body() const { return body_; }

    std::vector<std::pair<std::size_t, unsigned>> monomial(const Monomial& m) const {
        std::vector<std::pair<std::size_t, unsigned>> out;
        for (const auto& [v, e] : m.factors()) {
            auto it = index_.find(v);
            if (it == index_.end())
                throw Error(ErrorKind::Oracle, "unknown variable in monomial: " + v);
            out.emplace_back(it->second, e);
        }
        return out;
    }

private:
    static T param(const ParamExpr& c, const ParamAssignment& sigma) { return convert<T>(c.evaluate(sigma)); }

    CPoly<T> compile(const PolyExpr& p, const ParamAssignment& sigma) const {
        CPoly<T> out;
        for (const auto& [m, c] : p.terms()) {
            std::vector<std::pair<std::size_t, unsigned>> f;
            for (const auto& [v, e] : m.factors())
                f.emplace_back(index_.at(v), e);
            out.terms.emplace_back(param(c, sigma), std::move(f));
        }
        return out;
    }

    CGuard<T> compile(const BExpr& b, const ParamAssignment& sigma) const {
        CGuard<T> g;
        g.kind = b.kind();
        if (g.kind == BExpr::Kind::Cmp) {
            g.op = b.op();
            g.lhs = compile(b.lhs(), sigma);
            g.rhs = compile(b.rhs(), sigma);
        } else if (g.kind != BExpr::Kind::True && g.kind != BExpr::Kind::False) {
            for (const auto& c : b.children())
                g.children.push_back(compile(c, sigma));
        }
        return g;
    }

    CAssign<T> compile(const GuardedAssignment& a, const ParamAssignment& sigma) const {
        CAssign<T> c;
        c.target = index_.at(a.target);
        c.else_source = index_.at(a.else_source);
        c.guarded = !a.guard.is_true();
        c.guard = compile(a.guard, sigma);
        if (const auto* cat = std::get_if<Categorical>(&a.rhs)) {
            auto probs = cat->probabilities();
            for (std::size_t i = 0; i < cat->branches.size(); ++i)
                c.branches.emplace_back(compile(cat->branches[i].value, sigma), param(probs[i], sigma));
        } else {
            const auto& d = std::get<DistDraw>(a.rhs);
            c.categorical = false;
            c.dist = d.kind;
            for (const auto& x : d.args)
                c.args.push_back(param(x, sigma));
        }
        return c;
    }

    std::vector<std::string> vars_;
    std::map<std::string, std::size_t> index_;
    std::vector<CAssign<T>> init_;
    std::vector<CAssign<T>> body_;
};

using State = std::vector<Rational>;
using Dist = std::map<State, Rational>;

void enumerate_step(const CAssign<Rational>& a, Dist& dist, std::size_t budget) {
    Dist next;
    auto put = [&](State s, const Rational& w) {
        if (w == 0)
            return;
        auto [it, fresh] = next.try_emplace(std::move(s), w);
        if (!fresh)
            it->second += w;
        if (next.size() > budget)
            throw Error(ErrorKind::Oracle, "enumeration budget of " + std::to_string(budget) + " states exceeded");
    };
    for (auto& [s, w] : dist) {
        State st = s;
        if (a.guarded && !a.guard.eval(st)) {
            st[a.target] = st[a.else_source];
            put(std::move(st), w);
            continue;
        }
        if (a.categorical) {
            for (const auto& [v, pr] : a.branches) {
                State t = st;
                t[a.target] = v.eval(st);
                put(std::move(t), w * pr);
            }
            continue;
        }
        switch (a.dist) {
        case DistKind::Bernoulli: {
            State t = st;
            t[a.target] = 1;
            put(t, w * a.args[0]);
            t[a.target] = 0;
            put(std::move(t), w * (1 - a.args[0]));
            break;
        }
        case DistKind::DiscreteUniform: {
            Rational lo = a.args[0], hi = a.args[1];
            Rational pr = Rational(1) / (hi - lo + 1);
            for (Rational v = lo; v <= hi; v += 1) {
                State t = st;
                t[a.target] = v;
                put(std::move(t), w * pr);
            }
            break;
        }
        default:
            throw Error(ErrorKind::Oracle, std::string("exact enumeration does not support ") + to_string(a.dist));
        }
    }
    dist = std::move(next);
}

double draw(const CAssign<double>& a, const std::vector<double>& st, SplitMix64& rng) {
    if (a.categorical) {
        if (a.branches.size() == 1)
            return a.branches[0].first.eval(st);
        double u = rng.uniform();
        double acc = 0;
        for (std::size_t i = 0; i + 1 < a.branches.size(); ++i) {
            acc += a.branches[i].second;
            if (u < acc)
                return a.branches[i].first.eval(st);
        }
        return a.branches.back().first.eval(st);
    }
    switch (a.dist) {
    case DistKind::Bernoulli: return rng.uniform() < a.args[0] ? 1.0 : 0.0;
    case DistKind::DiscreteUniform: {
        double span = a.args[1] - a.args[0] + 1;
        return a.args[0] + std::min(std::floor(rng.uniform() * span), span - 1);
    }
    case DistKind::Uniform: return a.args[0] + (a.args[1] - a.args[0]) * rng.uniform();
    case DistKind::Normal: {
        double u1 = rng.uniform(), u2 = rng.uniform();
        double z = std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return a.args[0] + std::sqrt(a.args[1]) * z;
    }
    }
    return 0;
}

double run_trial(const Compiled<double>& prog, const std::vector<std::pair<std::size_t, unsigned>>& mono, unsigned n,
                 std::uint64_t seed, std::uint64_t trial) {
    SplitMix64 rng(seed, trial);
    std::vector<double> st(prog.variables().size(), 0.0);
    auto exec = [&](const CAssign<double>& a) {
        // Always consume the draws so both sides of a finite difference stay aligned.
        double v = draw(a, st, rng);
        st[a.target] = (!a.guarded || a.guard.eval(st)) ? v : st[a.else_source];
    };
    for (const auto& a : prog.init())
        exec(a);
    for (unsigned i = 0; i < n; ++i)
        for (const auto& a : prog.body())
            exec(a);
    double t = 1;
    for (const auto& [i, e] : mono)
        for (unsigned k = 0; k < e; ++k)
            t *= st[i];
    return t;
}

template <class F>
std::vector<double> parallel_trials(std::size_t trials, unsigned threads, F&& f) {
    std::vector<double> out(trials);
    if (threads == 0)
        threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, trials / 1024)));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < trials; i += threads)
                out[i] = f(i);
        });
    for (auto& th : pool)
        th.join();
    return out;
}

OracleEstimate summarize(const std::vector<double>& xs) {
    OracleEstimate e;
    e.mode = OracleEstimate::Mode::Sampled;
    e.trials = xs.size();
    double mean = 0;
    for (double x : xs)
        mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs)
        var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size() > 1 ? xs.size() - 1 : 1);
    e.value = mean;
    e.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    return e;
}

}  // namespace

StateDistribution enumerate_states(const NormalizedProgram& np, unsigned n, const ParamAssignment& sigma,
                                   std::size_t budget) {
    Compiled<Rational> prog(np, sigma);
    Dist dist;
    dist.emplace(State(prog.variables().size(), Rational(0)), Rational(1));
    for (const auto& a : prog.init())
        enumerate_step(a, dist, budget);
    for (unsigned i = 0; i < n; ++i)
        for (const auto& a : prog.body())
            enumerate_step(a, dist, budget);
    return {prog.variables(), std::move(dist)};
}

OracleEstimate enumerate_moment(const NormalizedProgram& np, const Monomial& m, unsigned n,
                                const ParamAssignment& sigma, std::size_t budget) {
    Rational v = enumerate_states(np, n, sigma, budget).expectation(m);
    OracleEstimate e;
    e.mode = OracleEstimate::Mode::Exact;
    e.exact = v;
    e.value = to_double(v);
    e.trials = 1;
    return e;
}

OracleEstimate sample_moment(const NormalizedProgram& np, const Monomial& m, unsigned n,
                             const ParamAssignment& sigma, std::size_t trials, std::uint64_t seed, unsigned threads) {
    if (trials < 2)
        throw Error(ErrorKind::Oracle, "sampling needs at least 2 trials");
    Compiled<double> prog(np, sigma);
    auto mono = prog.monomial(m);
    auto xs = parallel_trials(trials, threads, [&](std::size_t i) { return run_trial(prog, mono, n, seed, i); });
    return summarize(xs);
}

OracleEstimate fd_sensitivity(const NormalizedProgram& np, const Monomial& m, unsigned n,
                              const ParamAssignment& sigma, const std::string& p, const FdOptions& options) {
    const bool exact = options.mode == OracleEstimate::Mode::Exact;
    Rational eps = options.epsilon.value_or(exact ? Rational(1, 10000) : Rational(1, 100));
    eps.canonicalize();
    if (eps <= 0)
        throw Error(ErrorKind::Oracle, "finite-difference step must be positive");
    if (!sigma.count(p))
        throw Error(ErrorKind::Oracle, "no value given for parameter '" + p + "'");
    ParamAssignment plus = sigma, minus = sigma;
    plus[p] += eps;
    minus[p] -= eps;
    if (exact) {
        Rational hi = enumerate_states(np, n, plus, options.budget).expectation(m);
        Rational lo = enumerate_states(np, n, minus, options.budget).expectation(m);
        Rational d = (hi - lo) / (2 * eps);
        OracleEstimate e;
        e.exact = d;
        e.value = to_double(d);
        e.trials = 1;
        return e;
    }
    if (options.trials < 2)
        throw Error(ErrorKind::Oracle, "sampling needs at least 2 trials");
    Compiled<double> hi(np, plus), lo(np, minus);
    auto mono = hi.monomial(m);
    const double scale = 1.0 / (2.0 * to_double(eps));
    auto xs = parallel_trials(options.trials, options.threads, [&](std::size_t i) {
        return (run_trial(hi, mono, n, options.seed, i) - run_trial(lo, mono, n, options.seed, i)) * scale;
    });
    return summarize(xs);
}

}  // namespace probsens
