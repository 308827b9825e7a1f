#include "probsens/poly_expr.hpp"

#include <stdexcept>

namespace probsens::polyexpr {

std::string to_string(const PolyExpr& p) {
    return p.to_string([](const ParamExpr& c) { return c.to_string(); },
                       [](const ParamExpr& c) { return c.is_negative(); },
                       [](const ParamExpr& c) { return c.is_atomic(); });
}

std::set<std::string> variables(const PolyExpr& p) {
    return p.symbols();
}

std::set<std::string> parameters(const PolyExpr& p) {
    std::set<std::string> out;
    for (const auto& [m, c] : p.terms()) {
        auto ps = c.parameters();
        out.insert(ps.begin(), ps.end());
    }
    return out;
}

bool mentions_parameter(const PolyExpr& p, const std::string& param) {
    for (const auto& [m, c] : p.terms())
        if (c.depends_on(param))
            return true;
    return false;
}

Rational evaluate(const PolyExpr& p, const VarValues& vars, const ParamAssignment& sigma) {
    Rational acc = 0;
    for (const auto& [m, c] : p.terms()) {
        Rational t = c.is_constant() ? c.constant_value() : c.evaluate(sigma);
        for (const auto& [name, e] : m.factors()) {
            auto it = vars.find(name);
            if (it == vars.end())
                throw std::invalid_argument("no value for variable '" + name + "'");
            t *= pow(it->second, static_cast<long>(e));
        }
        acc += t;
    }
    return acc;
}

PolyExpr from_param(const ParamExpr& c) {
    return PolyExpr(c);
}

PolyExpr variable(const std::string& name) {
    return PolyExpr::symbol(name);
}

}  // namespace probsens::polyexpr
