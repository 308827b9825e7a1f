#include "probsens/program.hpp"

#include <algorithm>
#include <stdexcept>

namespace probsens {

struct BExpr::Node {
    Kind kind = Kind::True;
    PolyExpr lhs;
    PolyExpr rhs;
    CmpOp op = CmpOp::Eq;
    std::vector<BExpr> kids;
};

namespace {

std::shared_ptr<const BExpr::Node> constant_node(bool value) {
    static const auto t = [] {
        auto n = std::make_shared<BExpr::Node>();
        n->kind = BExpr::Kind::True;
        return n;
    }();
    static const auto f = [] {
        auto n = std::make_shared<BExpr::Node>();
        n->kind = BExpr::Kind::False;
        return n;
    }();
    return value ? t : f;
}

PolyExpr rename_poly(const PolyExpr& p, const std::map<std::string, std::string>& names) {
    PolyExpr out;
    for (const auto& [m, c] : p.terms()) {
        std::vector<Monomial::Factor> factors;
        for (const auto& [v, e] : m.factors()) {
            auto it = names.find(v);
            factors.emplace_back(it == names.end() ? v : it->second, e);
        }
        out.add_term(Monomial(std::move(factors)), c);
    }
    return out;
}

void indent(std::string& out, int depth) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
}

void print_stmts(std::string& out, const std::vector<Stmt>& stmts, int depth);

void print_stmt(std::string& out, const Stmt& s, int depth) {
    if (const auto* a = std::get_if<Assignment>(&s.node)) {
        indent(out, depth);
        for (std::size_t i = 0; i < a->targets.size(); ++i)
            out += (i ? ", " : "") + a->targets[i].first;
        out += " = ";
        for (std::size_t i = 0; i < a->targets.size(); ++i)
            out += (i ? ", " : "") + to_string(a->targets[i].second);
        out += "\n";
        return;
    }
    const auto& f = std::get<IfStmt>(s.node);
    for (std::size_t i = 0; i < f.branches.size(); ++i) {
        indent(out, depth);
        out += (i == 0 ? "if " : "else if ") + f.branches[i].first.to_string() + ":\n";
        print_stmts(out, f.branches[i].second, depth + 1);
    }
    if (f.else_body) {
        indent(out, depth);
        out += "else:\n";
        print_stmts(out, *f.else_body, depth + 1);
    }
    indent(out, depth);
    out += "end\n";
}

void print_stmts(std::string& out, const std::vector<Stmt>& stmts, int depth) {
    for (const auto& s : stmts)
        print_stmt(out, s, depth);
}

}  // namespace

const char* to_string(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Le: return "<=";
    }
    return "?";
}

const char* to_string(DistKind kind) {
    switch (kind) {
    case DistKind::Bernoulli: return "Bernoulli";
    case DistKind::Normal: return "Normal";
    case DistKind::Uniform: return "Uniform";
    case DistKind::DiscreteUniform: return "DiscreteUniform";
    }
    return "?";
}

BExpr::BExpr() : node_(constant_node(true)) {}

BExpr BExpr::constant(bool value) {
    return BExpr(constant_node(value));
}

BExpr BExpr::compare(PolyExpr lhs, CmpOp op, PolyExpr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Cmp;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->op = op;
    return BExpr(std::move(n));
}

BExpr BExpr::negate(BExpr inner) {
    if (inner.is_true())
        return constant(false);
    if (inner.is_false())
        return constant(true);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Not;
    n->kids.push_back(std::move(inner));
    return BExpr(std::move(n));
}

BExpr BExpr::conj(BExpr a, BExpr b) {
    if (a.is_false() || b.is_false())
        return constant(false);
    if (a.is_true())
        return b;
    if (b.is_true())
        return a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::And;
    n->kids = {std::move(a), std::move(b)};
    return BExpr(std::move(n));
}

BExpr BExpr::disj(BExpr a, BExpr b) {
    if (a.is_true() || b.is_true())
        return constant(true);
    if (a.is_false())
        return b;
    if (b.is_false())
        return a;
    auto n = std::make_shared<Node>();
    n->kind = Kind::Or;
    n->kids = {std::move(a), std::move(b)};
    return BExpr(std::move(n));
}

BExpr::Kind BExpr::kind() const { return node_->kind; }
const PolyExpr& BExpr::lhs() const { return node_->lhs; }
const PolyExpr& BExpr::rhs() const { return node_->rhs; }
CmpOp BExpr::op() const { return node_->op; }
const std::vector<BExpr>& BExpr::children() const { return node_->kids; }

std::set<std::string> BExpr::variables() const {
    std::set<std::string> out;
    if (kind() == Kind::Cmp) {
        out = polyexpr::variables(lhs());
        auto r = polyexpr::variables(rhs());
        out.insert(r.begin(), r.end());
    }
    for (const auto& k : children()) {
        auto v = k.variables();
        out.insert(v.begin(), v.end());
    }
    return out;
}

std::set<std::string> BExpr::parameters() const {
    std::set<std::string> out;
    if (kind() == Kind::Cmp) {
        out = polyexpr::parameters(lhs());
        auto r = polyexpr::parameters(rhs());
        out.insert(r.begin(), r.end());
    }
    for (const auto& k : children()) {
        auto v = k.parameters();
        out.insert(v.begin(), v.end());
    }
    return out;
}

bool BExpr::mentions_parameter(const std::string& param) const {
    return parameters().count(param) > 0;
}

bool BExpr::evaluate(const VarValues& vars, const ParamAssignment& sigma) const {
    switch (kind()) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Not: return !children()[0].evaluate(vars, sigma);
    case Kind::And: return children()[0].evaluate(vars, sigma) && children()[1].evaluate(vars, sigma);
    case Kind::Or: return children()[0].evaluate(vars, sigma) || children()[1].evaluate(vars, sigma);
    case Kind::Cmp: break;
    }
    int s = sgn(polyexpr::evaluate(lhs(), vars, sigma) - polyexpr::evaluate(rhs(), vars, sigma));
    switch (op()) {
    case CmpOp::Eq: return s == 0;
    case CmpOp::Ne: return s != 0;
    case CmpOp::Lt: return s < 0;
    case CmpOp::Gt: return s > 0;
    case CmpOp::Ge: return s >= 0;
    case CmpOp::Le: return s <= 0;
    }
    return false;
}

BExpr BExpr::rename(const std::map<std::string, std::string>& names) const {
    switch (kind()) {
    case Kind::True:
    case Kind::False: return *this;
    case Kind::Cmp: return compare(rename_poly(lhs(), names), op(), rename_poly(rhs(), names));
    case Kind::Not: return negate(children()[0].rename(names));
    case Kind::And: return conj(children()[0].rename(names), children()[1].rename(names));
    case Kind::Or: return disj(children()[0].rename(names), children()[1].rename(names));
    }
    return *this;
}

std::string BExpr::to_string() const {
    switch (kind()) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Cmp:
        return polyexpr::to_string(lhs()) + " " + probsens::to_string(op()) + " " + polyexpr::to_string(rhs());
    case Kind::Not: return "not (" + children()[0].to_string() + ")";
    case Kind::And: return "(" + children()[0].to_string() + ") and (" + children()[1].to_string() + ")";
    case Kind::Or: return "(" + children()[0].to_string() + ") or (" + children()[1].to_string() + ")";
    }
    return "?";
}

bool operator==(const BExpr& a, const BExpr& b) {
    if (a.node_ == b.node_)
        return true;
    if (a.kind() != b.kind())
        return false;
    if (a.kind() == BExpr::Kind::Cmp)
        return a.op() == b.op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
    return a.children() == b.children();
}

std::vector<ParamExpr> Categorical::probabilities() const {
    std::vector<ParamExpr> out;
    ParamExpr rest(1);
    for (const auto& b : branches)
        if (b.prob)
            rest -= *b.prob;
    for (const auto& b : branches)
        out.push_back(b.prob ? *b.prob : rest);
    return out;
}

std::string to_string(const AssignRhs& rhs) {
    if (const auto* d = std::get_if<DistDraw>(&rhs)) {
        std::string out = std::string(to_string(d->kind)) + "(";
        for (std::size_t i = 0; i < d->args.size(); ++i)
            out += (i ? ", " : "") + d->args[i].to_string();
        return out + ")";
    }
    const auto& c = std::get<Categorical>(rhs);
    std::string out;
    for (std::size_t i = 0; i < c.branches.size(); ++i) {
        const auto& b = c.branches[i];
        out += (i ? " " : "") + polyexpr::to_string(b.value);
        if (b.prob)
            out += " {" + b.prob->to_string() + "}";
    }
    return out;
}

std::set<std::string> rhs_variables(const AssignRhs& rhs) {
    std::set<std::string> out;
    if (const auto* c = std::get_if<Categorical>(&rhs))
        for (const auto& b : c->branches) {
            auto v = polyexpr::variables(b.value);
            out.insert(v.begin(), v.end());
        }
    return out;
}

std::set<std::string> rhs_parameters(const AssignRhs& rhs) {
    std::set<std::string> out;
    if (const auto* d = std::get_if<DistDraw>(&rhs)) {
        for (const auto& a : d->args) {
            auto p = a.parameters();
            out.insert(p.begin(), p.end());
        }
        return out;
    }
    for (const auto& b : std::get<Categorical>(rhs).branches) {
        auto v = polyexpr::parameters(b.value);
        out.insert(v.begin(), v.end());
        if (b.prob) {
            auto p = b.prob->parameters();
            out.insert(p.begin(), p.end());
        }
    }
    return out;
}

AssignRhs rename_rhs(const AssignRhs& rhs, const std::map<std::string, std::string>& names) {
    if (std::holds_alternative<DistDraw>(rhs))
        return rhs;
    Categorical c = std::get<Categorical>(rhs);
    for (auto& b : c.branches)
        b.value = rename_poly(b.value, names);
    return c;
}

bool operator==(const IfStmt& a, const IfStmt& b) {
    return a.branches == b.branches && a.else_body == b.else_body;
}

bool Program::is_variable(const std::string& name) const {
    return std::find(variables.begin(), variables.end(), name) != variables.end();
}

bool operator==(const Program& a, const Program& b) {
    return a.parameters == b.parameters && a.variables == b.variables && a.init == b.init && a.guard == b.guard &&
           a.body == b.body;
}

std::string print(const Program& prog) {
    std::string out;
    print_stmts(out, prog.init, 0);
    out += "while " + prog.guard.to_string() + ":\n";
    print_stmts(out, prog.body, 1);
    out += "end\n";
    return out;
}

}  // namespace probsens
