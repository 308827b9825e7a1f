#pragma once

#include "probsens/normalizer.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace probsens {

/// Value-set abstraction: a variable is finite when every value it can ever
/// hold lies in its support.
class FiniteValues {
public:
    static constexpr std::size_t kDefaultCap = 64;

    bool is_finite(const std::string& var) const { return supports_.count(var) > 0; }
    /// Sorted support of a finite variable, nullptr otherwise.
    const std::vector<ParamExpr>* support(const std::string& var) const;
    const std::map<std::string, std::vector<ParamExpr>>& supports() const { return supports_; }

    friend FiniteValues finite_values(const NormalizedProgram& np, std::size_t cap);

private:
    std::map<std::string, std::vector<ParamExpr>> supports_;
};

FiniteValues finite_values(const NormalizedProgram& np, std::size_t cap = FiniteValues::kDefaultCap);

struct Edge {
    std::string from;
    std::string to;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Classification {
    std::string parameter;
    bool admissible = false;
    bool thm2_ok = false;
    bool guards_finite = true;
    std::vector<std::string> infinite_guard_vars;
    std::vector<std::string> defective;
    std::vector<std::string> p_dependent;
    /// Defective variables that depend on the parameter.
    std::vector<std::string> defective_p_dependent;
    /// x ->+_p y with y defective, reported with one influenced edge on the path.
    struct Influenced {
        std::string from;
        std::string to;
        Edge edge;
    };
    std::vector<Influenced> influenced_defective;

    std::string summary() const;
};

/// Direct, non-linear and p-influenced dependencies over the variables of a
/// normalized program, with their closures.
class DependencyGraph {
public:
    explicit DependencyGraph(const NormalizedProgram& np);

    const std::vector<std::string>& vertices() const { return vertices_; }
    const NormalizedProgram& program() const { return np_; }
    const FiniteValues& finite() const { return finite_; }

    bool direct(const std::string& x, const std::string& y) const;
    bool nonlinear(const std::string& x, const std::string& y) const;
    /// x ->+ y
    bool depends(const std::string& x, const std::string& y) const;
    /// x ->+_N y
    bool depends_nonlinearly(const std::string& x, const std::string& y) const;
    bool defective(const std::string& x) const { return depends_nonlinearly(x, x); }
    std::vector<std::string> defective_variables() const;
    std::set<std::string> guard_variables() const;

    bool p_dependent(const std::string& x, const std::string& p) const;
    bool p_dependent(const Monomial& m, const std::string& p) const;
    bool p_influenced(const std::string& x, const std::string& y, const std::string& p) const;
    /// x ->+_p y: some path from x to y crosses a p-influenced edge.
    bool depends_p(const std::string& x, const std::string& y, const std::string& p) const;
    std::optional<Edge> influenced_edge_on_path(const std::string& x, const std::string& y,
                                                const std::string& p) const;

    Classification classify(const std::string& p) const;
    /// Moment-path admissibility (parameter agnostic).
    bool admissible() const;

    /// Shortest path as rendered edges, e.g. "x =N=> w => x".
    std::optional<std::string> witness_path(const std::string& x, const std::string& y, bool require_nonlinear) const;
    std::string explain(const std::string& var, const std::optional<std::string>& p) const;

private:
    struct PInfo {
        std::set<std::string> dependent;
        std::set<Edge> influenced;
    };
    const PInfo& pinfo(const std::string& p) const;
    std::size_t index(const std::string& v) const;
    std::optional<std::vector<std::string>> path(const std::string& x, const std::string& y) const;

    NormalizedProgram np_;
    FiniteValues finite_;
    std::vector<std::string> vertices_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::vector<char>> direct_;
    std::vector<std::vector<char>> nonlinear_;
    std::vector<std::vector<char>> reach_;  // transitive closure of direct_
    std::map<std::string, PInfo> pinfo_;
};

}  // namespace probsens
