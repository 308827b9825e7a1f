#pragma once

#include "probsens/param_expr.hpp"
#include "probsens/poly_expr.hpp"

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace probsens {

enum class CmpOp { Eq, Ne, Lt, Gt, Ge, Le };

const char* to_string(CmpOp op);

/// Boolean guard expression; immutable and cheap to copy.
class BExpr {
public:
    enum class Kind { True, False, Cmp, Not, And, Or };

    BExpr();  // true
    static BExpr constant(bool value);
    static BExpr compare(PolyExpr lhs, CmpOp op, PolyExpr rhs);
    static BExpr negate(BExpr inner);
    static BExpr conj(BExpr a, BExpr b);
    static BExpr disj(BExpr a, BExpr b);

    Kind kind() const;
    bool is_true() const { return kind() == Kind::True; }
    bool is_false() const { return kind() == Kind::False; }
    const PolyExpr& lhs() const;
    const PolyExpr& rhs() const;
    CmpOp op() const;
    const std::vector<BExpr>& children() const;

    std::set<std::string> variables() const;
    std::set<std::string> parameters() const;
    bool mentions_parameter(const std::string& param) const;
    bool evaluate(const VarValues& vars, const ParamAssignment& sigma) const;
    BExpr rename(const std::map<std::string, std::string>& names) const;

    std::string to_string() const;

    friend bool operator==(const BExpr& a, const BExpr& b);

    struct Node;

private:
    explicit BExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

enum class DistKind { Bernoulli, Normal, Uniform, DiscreteUniform };

const char* to_string(DistKind kind);

/// One branch of a probabilistic choice; an omitted probability stands for
/// the complement of the others.
struct Branch {
    PolyExpr value;
    std::optional<ParamExpr> prob;

    friend bool operator==(const Branch&, const Branch&) = default;
};

struct Categorical {
    std::vector<Branch> branches;

    /// Probabilities with the omitted one resolved to the complement.
    std::vector<ParamExpr> probabilities() const;
    bool is_deterministic() const { return branches.size() == 1; }

    friend bool operator==(const Categorical&, const Categorical&) = default;
};

struct DistDraw {
    DistKind kind = DistKind::Bernoulli;
    std::vector<ParamExpr> args;

    friend bool operator==(const DistDraw&, const DistDraw&) = default;
};

using AssignRhs = std::variant<Categorical, DistDraw>;

std::string to_string(const AssignRhs& rhs);
std::set<std::string> rhs_variables(const AssignRhs& rhs);
std::set<std::string> rhs_parameters(const AssignRhs& rhs);
AssignRhs rename_rhs(const AssignRhs& rhs, const std::map<std::string, std::string>& names);

struct Stmt;

/// `x, y = e1, e2`: every right-hand side reads the pre-assignment state.
struct Assignment {
    std::vector<std::pair<std::string, AssignRhs>> targets;
    std::size_t line = 0;

    friend bool operator==(const Assignment& a, const Assignment& b) { return a.targets == b.targets; }
};

struct IfStmt {
    std::vector<std::pair<BExpr, std::vector<Stmt>>> branches;
    std::optional<std::vector<Stmt>> else_body;
    std::size_t line = 0;

    friend bool operator==(const IfStmt& a, const IfStmt& b);
};

struct Stmt {
    std::variant<Assignment, IfStmt> node;

    friend bool operator==(const Stmt& a, const Stmt& b) { return a.node == b.node; }
};

/// A single non-nested probabilistic loop preceded by initialization.
/// Guarded loops are stored desugared, so `guard` is always true.
struct Program {
    std::set<std::string> parameters;
    std::vector<std::string> variables;  // order of first assignment
    std::vector<Stmt> init;
    BExpr guard;
    std::vector<Stmt> body;

    bool is_variable(const std::string& name) const;

    friend bool operator==(const Program& a, const Program& b);
};

/// Source text that parses back to a structurally equal Program.
std::string print(const Program& prog);

}  // namespace probsens
