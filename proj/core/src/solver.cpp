#include "probsens/solver.hpp"

#include "probsens/errors.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace probsens {

namespace {

void trim(XPoly& p) {
    while (!p.empty() && p.back().is_zero())
        p.pop_back();
}

int xdegree(const XPoly& p) {
    return static_cast<int>(p.size()) - 1;
}

// Quotient by (x - r) when r is a root.
std::optional<XPoly> divide_root(const XPoly& p, const ParamExpr& r) {
    if (p.size() < 2)
        return std::nullopt;
    XPoly q(p.size() - 1);
    ParamExpr carry;
    for (std::size_t i = p.size(); i-- > 1;) {
        carry = p[i] + carry * r;
        q[i - 1] = carry;
    }
    ParamExpr rem = p[0] + carry * r;
    if (!rem.is_zero())
        return std::nullopt;
    return q;
}

XPoly make_monic(XPoly p) {
    trim(p);
    ParamExpr lead = p.back();
    for (auto& c : p)
        c /= lead;
    return p;
}

std::string xpoly_text(const XPoly& p) {
    std::string out;
    for (std::size_t i = p.size(); i-- > 0;) {
        if (p[i].is_zero())
            continue;
        if (!out.empty())
            out += " + ";
        out += "(" + p[i].to_string() + ")";
        if (i > 0)
            out += i == 1 ? "*x" : "*x^" + std::to_string(i);
    }
    return out.empty() ? "0" : out;
}

std::optional<ParamExpr> sqrt_expr(const ParamExpr& v) {
    if (v.is_zero())
        return ParamExpr(0);
    auto n = poly::exact_sqrt(v.numerator());
    auto d = poly::exact_sqrt(v.denominator());
    if (!n || !d)
        return std::nullopt;
    return ParamExpr(*n, *d);
}

std::vector<mpz_class> divisors(mpz_class v) {
    std::vector<mpz_class> out;
    v = abs(v);
    if (v == 0 || v > mpz_class("1000000000000"))
        return out;
    for (mpz_class d = 1; d * d <= v; ++d) {
        if (v % d == 0) {
            out.push_back(d);
            if (d * d != v)
                out.push_back(v / d);
        }
        if (out.size() > 4096)
            break;
    }
    return out;
}

// Rational roots of a polynomial with constant coefficients.
std::vector<ParamExpr> numeric_root_candidates(const XPoly& p) {
    std::vector<ParamExpr> out;
    for (const auto& c : p)
        if (!c.is_constant())
            return out;
    mpz_class l = 1;
    for (const auto& c : p)
        l = lcm(l, c.constant_value().get_den());
    std::vector<mpz_class> ints;
    for (const auto& c : p)
        ints.push_back(mpz_class(c.constant_value() * l));
    std::size_t lo = 0;
    while (lo < ints.size() && ints[lo] == 0)
        ++lo;
    if (lo + 1 >= ints.size())
        return out;
    auto num = divisors(ints[lo]);
    auto den = divisors(ints.back());
    if (num.size() * den.size() > 20000)
        return out;
    for (const auto& a : num)
        for (const auto& b : den) {
            Rational r(a, b);
            r.canonicalize();
            out.emplace_back(r);
            out.emplace_back(-r);
        }
    return out;
}

}  // namespace

XPoly characteristic_polynomial(const std::vector<std::vector<ParamExpr>>& a) {
    const std::size_t m = a.size();
    XPoly c(m + 1);
    c[m] = ParamExpr(1);
    std::vector<std::vector<ParamExpr>> mk(m, std::vector<ParamExpr>(m));
    for (std::size_t k = 1; k <= m; ++k) {
        // M_k = A*M_{k-1} + c_{m-k+1} I
        std::vector<std::vector<ParamExpr>> next(m, std::vector<ParamExpr>(m));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                ParamExpr s;
                for (std::size_t l = 0; l < m; ++l)
                    if (!a[i][l].is_zero() && !mk[l][j].is_zero())
                        s += a[i][l] * mk[l][j];
                next[i][j] = s;
            }
        for (std::size_t i = 0; i < m; ++i)
            next[i][i] += c[m - k + 1];
        mk = std::move(next);
        ParamExpr tr;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t l = 0; l < m; ++l)
                if (!a[i][l].is_zero() && !mk[l][i].is_zero())
                    tr += a[i][l] * mk[l][i];
        c[m - k] = -tr / ParamExpr(static_cast<long>(k));
    }
    return c;
}

std::vector<CharFactor> factor_charpoly(const XPoly& q, const std::vector<ParamExpr>& candidates) {
    XPoly p = q;
    trim(p);
    if (p.empty())
        throw std::invalid_argument("factor_charpoly: zero polynomial");
    p = make_monic(p);
    std::vector<CharFactor> out;
    auto add_linear = [&](const ParamExpr& r, unsigned mult) {
        XPoly f{-r, ParamExpr(1)};
        for (auto& e : out)
            if (e.factor == f) {
                e.multiplicity += mult;
                return;
            }
        out.push_back({f, mult});
    };

    unsigned z = 0;
    while (p.size() > 1 && p[0].is_zero()) {
        p.erase(p.begin());
        ++z;
    }
    if (z > 0)
        add_linear(ParamExpr(0), z);

    auto try_root = [&](const ParamExpr& r) {
        if (r.is_zero())
            return;
        unsigned mult = 0;
        while (xdegree(p) >= 1) {
            auto d = divide_root(p, r);
            if (!d)
                break;
            p = std::move(*d);
            ++mult;
        }
        if (mult > 0)
            add_linear(r, mult);
    };
    std::vector<ParamExpr> cands = candidates;
    cands.emplace_back(1);
    cands.emplace_back(-1);
    for (const auto& r : cands) {
        if (xdegree(p) < 1)
            break;
        try_root(r);
    }
    if (xdegree(p) >= 3)
        for (const auto& r : numeric_root_candidates(p)) {
            if (xdegree(p) < 3)
                break;
            try_root(r);
        }

    if (xdegree(p) == 1) {
        add_linear(-p[0] / p[1], 1);
    } else if (xdegree(p) == 2) {
        ParamExpr qb = p[1], qc = p[0];
        ParamExpr disc = qb * qb - ParamExpr(4) * qc;
        if (auto s = sqrt_expr(disc)) {
            ParamExpr r0 = (-qb + *s) / ParamExpr(2);
            ParamExpr r1 = (-qb - *s) / ParamExpr(2);
            add_linear(r0, 1);
            add_linear(r1, 1);
        } else {
            out.push_back({p, 1});
        }
    } else if (xdegree(p) >= 3) {
        out.push_back({p, 1});
    }
    // Merge equal quadratic factors.
    std::vector<CharFactor> merged;
    for (auto& f : out) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const CharFactor& g) { return g.factor == f.factor; });
        if (it == merged.end())
            merged.push_back(f);
        else
            it->multiplicity += f.multiplicity;
    }
    return merged;
}

namespace {

class ValueTable {
public:
    explicit ValueTable(const RecurrenceSystem& sys) {
        for (const auto& [s, r] : sys.equations)
            index_[s] = symbols_.size(), symbols_.push_back(s);
        rows_.resize(symbols_.size());
        for (const auto& [s, r] : sys.equations) {
            auto& row = rows_[index_.at(s)];
            for (const auto& [t, c] : r.rhs) {
                if (c.is_zero())
                    continue;
                if (t.is_constant())
                    row.constant += c;
                else
                    row.terms.emplace_back(index_.at(t), c);
            }
        }
        std::vector<ParamExpr> v0;
        for (const auto& s : symbols_)
            v0.push_back(sys.initial.at(s));
        values_.push_back(std::move(v0));
    }

    std::size_t index(const SeqSymbol& s) const { return index_.at(s); }
    const std::vector<SeqSymbol>& symbols() const { return symbols_; }

    const ParamExpr& at(std::size_t n, std::size_t i) {
        extend(n + 1);
        return values_[n][i];
    }

    void extend(std::size_t count) {
        while (values_.size() < count) {
            const auto& cur = values_.back();
            std::vector<ParamExpr> next(symbols_.size());
            for (std::size_t i = 0; i < symbols_.size(); ++i) {
                ParamExpr s = rows_[i].constant;
                for (const auto& [j, c] : rows_[i].terms)
                    if (!cur[j].is_zero())
                        s += c * cur[j];
                next[i] = std::move(s);
            }
            values_.push_back(std::move(next));
        }
    }

    struct Row {
        ParamExpr constant;
        std::vector<std::pair<std::size_t, ParamExpr>> terms;
    };
    const std::vector<Row>& rows() const { return rows_; }

private:
    std::vector<SeqSymbol> symbols_;
    std::map<SeqSymbol, std::size_t> index_;
    std::vector<Row> rows_;
    std::vector<std::vector<ParamExpr>> values_;
};

// Tarjan; components come out dependencies first.
std::vector<std::vector<std::size_t>> components(const std::vector<ValueTable::Row>& rows) {
    const std::size_t n = rows.size();
    std::vector<long> idx(n, -1), low(n, 0);
    std::vector<char> on(n, 0);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> out;
    long counter = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        idx[v] = low[v] = counter++;
        stack.push_back(v);
        on[v] = 1;
        for (const auto& [w, c] : rows[v].terms) {
            if (idx[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on[w]) {
                low[v] = std::min(low[v], idx[w]);
            }
        }
        if (low[v] == idx[v]) {
            std::vector<std::size_t> comp;
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on[w] = 0;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            out.push_back(std::move(comp));
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (idx[v] < 0)
            visit(v);
    return out;
}

struct RationalMode {
    ParamExpr lambda;
    unsigned mult = 0;  // characteristic multiplicity
    int forcing = -1;   // forcing polynomial degree, -1 if absent
};

struct QuadraticMode {
    ParamExpr qb, qc;
    unsigned mult = 0;
    int forcing = -1;
};

unsigned mode_degree(unsigned mult, int forcing) {
    return mult + static_cast<unsigned>(forcing + 1) - 1;
}

// Solves M X = R in place (Gauss-Jordan); false if M is singular.
bool gauss_jordan(std::vector<std::vector<ParamExpr>>& m, std::vector<std::vector<ParamExpr>>& r) {
    const std::size_t k = m.size();
    const std::size_t cols = r.empty() ? 0 : r[0].size();
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = k;
        for (std::size_t i = c; i < k; ++i) {
            if (m[i][c].is_zero())
                continue;
            if (piv == k || (m[i][c].is_constant() && !m[piv][c].is_constant()))
                piv = i;
        }
        if (piv == k)
            return false;
        std::swap(m[c], m[piv]);
        std::swap(r[c], r[piv]);
        ParamExpr inv = ParamExpr(1) / m[c][c];
        for (std::size_t j = c; j < k; ++j)
            m[c][j] *= inv;
        for (std::size_t j = 0; j < cols; ++j)
            r[c][j] *= inv;
        for (std::size_t i = 0; i < k; ++i) {
            if (i == c || m[i][c].is_zero())
                continue;
            ParamExpr f = m[i][c];
            for (std::size_t j = c; j < k; ++j)
                if (!m[c][j].is_zero())
                    m[i][j] -= f * m[c][j];
            for (std::size_t j = 0; j < cols; ++j)
                if (!r[c][j].is_zero())
                    r[i][j] -= f * r[c][j];
        }
    }
    return true;
}

}  // namespace

std::map<SeqSymbol, std::vector<ParamExpr>> iterate_system(const RecurrenceSystem& sys, std::size_t count) {
    ValueTable table(sys);
    table.extend(count);
    std::map<SeqSymbol, std::vector<ParamExpr>> out;
    for (std::size_t i = 0; i < table.symbols().size(); ++i) {
        auto& v = out[table.symbols()[i]];
        for (std::size_t n = 0; n < count; ++n)
            v.push_back(table.at(n, i));
    }
    return out;
}

std::map<SeqSymbol, ExpPolynomial> solve_system(const RecurrenceSystem& sys) {
    ValueTable table(sys);
    const auto& syms = table.symbols();
    const auto& rows = table.rows();
    std::vector<ExpPolynomial> closed(syms.size());
    std::vector<ParamExpr> seen_eigen;

    for (const auto& comp : components(rows)) {
        std::map<std::size_t, std::size_t> local;
        for (std::size_t i = 0; i < comp.size(); ++i)
            local[comp[i]] = i;
        const std::size_t m = comp.size();

        std::vector<std::vector<ParamExpr>> a(m, std::vector<ParamExpr>(m));
        std::vector<RationalMode> rat;
        std::vector<QuadraticMode> quad;
        auto rat_mode = [&](const ParamExpr& l) -> RationalMode& {
            for (auto& r : rat)
                if (r.lambda == l)
                    return r;
            rat.push_back({l, 0, -1});
            return rat.back();
        };
        auto quad_mode = [&](const ParamExpr& qb, const ParamExpr& qc) -> QuadraticMode& {
            for (auto& q : quad)
                if (q.qb == qb && q.qc == qc)
                    return q;
            quad.push_back({qb, qc, 0, -1});
            return quad.back();
        };

        std::size_t n_in = 0;
        std::vector<ParamExpr> cands;
        for (std::size_t i = 0; i < m; ++i) {
            const auto& row = rows[comp[i]];
            if (!row.constant.is_zero()) {
                auto& r = rat_mode(ParamExpr(1));
                r.forcing = std::max(r.forcing, 0);
            }
            for (const auto& [j, c] : row.terms) {
                auto it = local.find(j);
                if (it != local.end()) {
                    a[i][it->second] += c;
                    continue;
                }
                const ExpPolynomial& f = closed[j];
                n_in = std::max(n_in, f.n0());
                for (const auto& t : f.terms()) {
                    int d = std::max(t.poly.degree(), t.radical.degree());
                    if (t.lambda.is_rational()) {
                        auto& r = rat_mode(t.lambda.value());
                        r.forcing = std::max(r.forcing, d);
                    } else {
                        auto& q = quad_mode(t.lambda.qb(), t.lambda.qc());
                        q.forcing = std::max(q.forcing, d);
                    }
                }
            }
        }
        for (std::size_t i = 0; i < m; ++i)
            cands.push_back(a[i][i]);
        for (const auto& r : rat)
            cands.push_back(r.lambda);
        cands.insert(cands.end(), seen_eigen.begin(), seen_eigen.end());

        XPoly cp = characteristic_polynomial(a);
        unsigned z = 0;
        for (const auto& f : factor_charpoly(cp, cands)) {
            if (f.factor.size() == 2) {
                ParamExpr root = -f.factor[0];
                if (root.is_zero()) {
                    z += f.multiplicity;
                    continue;
                }
                rat_mode(root).mult += f.multiplicity;
                if (std::find(seen_eigen.begin(), seen_eigen.end(), root) == seen_eigen.end())
                    seen_eigen.push_back(root);
            } else if (f.factor.size() == 3) {
                quad_mode(f.factor[1], f.factor[0]).mult += f.multiplicity;
            } else {
                throw UnsupportedFactorError(xpoly_text(f.factor));
            }
        }

        // Ansatz columns.
        struct Column {
            bool lucas = false;
            bool second = false;  // U instead of S
            std::size_t mode = 0;
            unsigned power = 0;
        };
        std::vector<Column> cols;
        for (std::size_t k = 0; k < rat.size(); ++k)
            for (unsigned j = 0; j <= mode_degree(rat[k].mult, rat[k].forcing); ++j)
                cols.push_back({false, false, k, j});
        for (std::size_t k = 0; k < quad.size(); ++k)
            for (unsigned j = 0; j <= mode_degree(quad[k].mult, quad[k].forcing); ++j) {
                cols.push_back({true, false, k, j});
                cols.push_back({true, true, k, j});
            }
        const std::size_t kk = cols.size();
        const std::size_t n0 = n_in + z;
        const std::size_t last = n0 + kk + 2;
        table.extend(last);

        // Lucas sequences per quadratic mode.
        std::vector<std::vector<ParamExpr>> s_seq(quad.size()), u_seq(quad.size());
        for (std::size_t k = 0; k < quad.size(); ++k) {
            auto& s = s_seq[k];
            auto& u = u_seq[k];
            s = {ParamExpr(2), -quad[k].qb};
            u = {ParamExpr(0), ParamExpr(1)};
            while (s.size() < last) {
                std::size_t t = s.size();
                s.push_back(-quad[k].qb * s[t - 1] - quad[k].qc * s[t - 2]);
                u.push_back(-quad[k].qb * u[t - 1] - quad[k].qc * u[t - 2]);
            }
        }
        auto column_value = [&](const Column& c, std::size_t n) {
            ParamExpr base;
            if (!c.lucas)
                base = rat[c.mode].lambda.pow(static_cast<long>(n));
            else
                base = c.second ? u_seq[c.mode][n] : s_seq[c.mode][n];
            if (c.power == 0)
                return base;
            return base * ParamExpr(Rational(static_cast<long>(n))).pow(c.power);
        };

        std::vector<std::vector<ParamExpr>> coeffs(kk, std::vector<ParamExpr>(m));
        if (kk > 0) {
            std::vector<std::vector<ParamExpr>> mat(kk, std::vector<ParamExpr>(kk));
            std::vector<std::vector<ParamExpr>> rhs(kk, std::vector<ParamExpr>(m));
            for (std::size_t r = 0; r < kk; ++r) {
                for (std::size_t c = 0; c < kk; ++c)
                    mat[r][c] = column_value(cols[c], n0 + r);
                for (std::size_t i = 0; i < m; ++i)
                    rhs[r][i] = table.at(n0 + r, comp[i]);
            }
            if (!gauss_jordan(mat, rhs))
                throw Error(ErrorKind::Internal, "singular seed system while solving " + syms[comp[0]].to_string());
            coeffs = std::move(rhs);
        }

        for (std::size_t i = 0; i < m; ++i) {
            std::vector<ParamExpr> prefix;
            for (std::size_t n = 0; n < n0; ++n)
                prefix.push_back(table.at(n, comp[i]));
            std::vector<ExpTerm> terms;
            for (std::size_t k = 0; k < rat.size(); ++k) {
                std::vector<ParamExpr> pc;
                for (std::size_t c = 0; c < kk; ++c)
                    if (!cols[c].lucas && cols[c].mode == k)
                        pc.push_back(coeffs[c][i]);
                terms.push_back({EigenValue::rational(rat[k].lambda), CounterPoly(pc), CounterPoly()});
            }
            for (std::size_t k = 0; k < quad.size(); ++k) {
                std::vector<ParamExpr> sc, uc;
                for (std::size_t c = 0; c < kk; ++c)
                    if (cols[c].lucas && cols[c].mode == k)
                        (cols[c].second ? uc : sc).push_back(coeffs[c][i]);
                ParamExpr disc = quad[k].qb * quad[k].qb - ParamExpr(4) * quad[k].qc;
                CounterPoly s(sc);
                CounterPoly u = CounterPoly(uc).scaled(ParamExpr(1) / disc);
                terms.push_back({EigenValue::quadratic_root(quad[k].qb, quad[k].qc, 0), s, u});
                terms.push_back({EigenValue::quadratic_root(quad[k].qb, quad[k].qc, 1), s, -u});
            }
            ExpPolynomial f(std::move(prefix), std::move(terms));
            for (std::size_t n = n0 + kk; n < last; ++n)
                if (!(f.at(static_cast<long>(n)) == table.at(n, comp[i])))
                    throw Error(ErrorKind::Internal,
                                "closed form of " + syms[comp[i]].to_string() + " disagrees with iteration at n=" +
                                    std::to_string(n));
            closed[comp[i]] = std::move(f);
        }
    }

    std::map<SeqSymbol, ExpPolynomial> out;
    for (std::size_t i = 0; i < syms.size(); ++i)
        out.emplace(syms[i], std::move(closed[i]));
    return out;
}

}  // namespace probsens
