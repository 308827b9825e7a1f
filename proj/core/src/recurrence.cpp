#include "probsens/recurrence.hpp"

#include "json.hpp"

namespace probsens {

std::string SeqSymbol::to_string(const std::string& index) const {
    std::string m = monomial.to_string();
    if (is_moment())
        return "E(" + m + " | " + index + ")";
    return "d/d" + parameter + " E(" + m + " | " + index + ")";
}

std::strong_ordering operator<=>(const SeqSymbol& a, const SeqSymbol& b) {
    if (auto c = a.monomial <=> b.monomial; c != 0)
        return c;
    if (a.kind != b.kind)
        return a.kind == SeqSymbol::Kind::Moment ? std::strong_ordering::less : std::strong_ordering::greater;
    return a.parameter <=> b.parameter;
}

std::string Recurrence::to_string() const {
    std::string out = lhs.to_string("n+1") + " = ";
    if (rhs.empty())
        return out + "0";
    bool first = true;
    for (auto it = rhs.rbegin(); it != rhs.rend(); ++it) {
        const auto& [sym, c] = *it;
        bool neg = c.is_negative();
        ParamExpr mag = neg ? -c : c;
        std::string ct = mag.to_string();
        if (!mag.is_atomic())
            ct = "(" + ct + ")";
        out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
        first = false;
        if (sym.is_constant())
            out += ct;
        else if (ct == "1")
            out += sym.to_string();
        else
            out += ct + "*" + sym.to_string();
    }
    return out;
}

void RecurrenceSystem::add(Recurrence r, ParamExpr initial_value, Provenance from) {
    SeqSymbol s = r.lhs;
    if (equations.count(s))
        return;
    order.push_back(s);
    initial[s] = std::move(initial_value);
    provenance[s] = from;
    equations.emplace(s, std::move(r));
}

bool RecurrenceSystem::closed() const {
    for (const auto& [s, r] : equations)
        for (const auto& [t, c] : r.rhs)
            if (!t.is_constant() && !equations.count(t))
                return false;
    return true;
}

std::vector<SeqSymbol> RecurrenceSystem::symbols(SeqSymbol::Kind kind) const {
    std::vector<SeqSymbol> out;
    for (const auto& [s, r] : equations)
        if (s.kind == kind)
            out.push_back(s);
    return out;
}

std::string RecurrenceSystem::to_string() const {
    std::string out;
    for (const auto& s : order) {
        out += equations.at(s).to_string();
        out += "    [" + s.to_string("0") + " = " + initial.at(s).to_string() + "]\n";
    }
    return out;
}

std::string RecurrenceSystem::to_json() const {
    nlohmann::json j;
    j["target"] = target.to_string();
    j["size"] = size();
    j["equations"] = nlohmann::json::array();
    for (const auto& s : order) {
        const auto& r = equations.at(s);
        nlohmann::json e;
        e["lhs"] = {{"kind", s.is_moment() ? "moment" : "sensitivity"},
                    {"monomial", s.monomial.to_string()},
                    {"parameter", s.parameter}};
        e["rhs"] = nlohmann::json::array();
        for (const auto& [t, c] : r.rhs)
            e["rhs"].push_back({{"kind", t.is_moment() ? "moment" : "sensitivity"},
                                {"monomial", t.monomial.to_string()},
                                {"coefficient", c.to_string()}});
        e["initial"] = initial.at(s).to_string();
        e["provenance"] = provenance.at(s) == Provenance::Moment ? "mom" : "sens";
        e["text"] = r.to_string();
        j["equations"].push_back(e);
    }
    return j.dump();
}

}  // namespace probsens
