#include "probsens/normalizer.hpp"

#include <algorithm>
#include <functional>

namespace probsens {

namespace {

// Versions are written "x@k"; '@' never occurs in identifiers.
std::string version_name(const std::string& var, int k) {
    return var + "@" + std::to_string(k);
}

std::string origin_of(const std::string& version) {
    return version.substr(0, version.find('@'));
}

struct RawAssignment {
    std::string var;
    std::string version;
    AssignRhs rhs;
    BExpr guard;
    std::string else_version;
    bool snapshot = false;
};

using Env = std::map<std::string, std::string>;

class BodyFlattener {
public:
    explicit BodyFlattener(const std::vector<std::string>& vars) {
        for (const auto& v : vars) {
            merged_[v] = version_name(v, 0);
            counter_[v] = 0;
        }
    }

    void run(const std::vector<Stmt>& body) {
        Env env = merged_;
        walk(body, BExpr(), env);
    }

    std::vector<RawAssignment> raw;

private:
    std::string fresh_version(const std::string& var) {
        return version_name(var, ++counter_[var]);
    }

    void walk(const std::vector<Stmt>& stmts, const BExpr& path, Env& env) {
        for (const auto& s : stmts) {
            if (const auto* a = std::get_if<Assignment>(&s.node)) {
                assign(*a, path, env);
                continue;
            }
            const auto& f = std::get<IfStmt>(s.node);
            const Env entry = env;
            BExpr none_before = BExpr();
            std::set<std::string> touched;
            auto run_branch = [&](const BExpr& cond, const std::vector<Stmt>& body) {
                Env local = entry;
                auto before = raw.size();
                walk(body, BExpr::conj(path, cond), local);
                for (auto i = before; i < raw.size(); ++i)
                    touched.insert(raw[i].var);
            };
            for (const auto& [cond, body] : f.branches) {
                BExpr c = cond.rename(entry);
                run_branch(BExpr::conj(none_before, c), body);
                none_before = BExpr::conj(none_before, BExpr::negate(c));
            }
            if (f.else_body)
                run_branch(none_before, *f.else_body);
            for (const auto& v : touched)
                env[v] = merged_[v];
        }
    }

    void assign(const Assignment& a, const BExpr& path, Env& env) {
        std::vector<std::pair<std::string, std::string>> created;
        for (const auto& [var, rhs] : a.targets) {
            RawAssignment r;
            r.var = var;
            r.version = fresh_version(var);
            r.rhs = rename_rhs(rhs, env);
            r.guard = path;
            r.else_version = merged_[var];
            merged_[var] = r.version;
            created.emplace_back(var, r.version);
            raw.push_back(std::move(r));
        }
        for (const auto& [var, version] : created)
            env[var] = version;
    }

    Env merged_;
    std::map<std::string, int> counter_;
};

std::set<std::string> reads_of(const RawAssignment& r) {
    std::set<std::string> out = rhs_variables(r.rhs);
    for (const auto& v : r.guard.variables())
        out.insert(v);
    return out;
}

std::string fresh_name(const std::string& prefix, int& counter, const std::set<std::string>& taken) {
    for (;;) {
        std::string name = prefix + std::to_string(counter++);
        if (!taken.count(name))
            return name;
    }
}

void collect_assigned(const std::vector<Stmt>& stmts, std::set<std::string>& out) {
    for (const auto& s : stmts) {
        if (const auto* a = std::get_if<Assignment>(&s.node)) {
            for (const auto& t : a->targets)
                out.insert(t.first);
            continue;
        }
        const auto& f = std::get<IfStmt>(s.node);
        for (const auto& b : f.branches)
            collect_assigned(b.second, out);
        if (f.else_body)
            collect_assigned(*f.else_body, out);
    }
}

class InitFlattener {
public:
    InitFlattener(std::vector<GuardedAssignment>& out, const std::set<std::string>& taken)
        : out_(out), taken_(taken) {}

    void walk(const std::vector<Stmt>& stmts, const BExpr& path) {
        for (const auto& s : stmts) {
            if (const auto* a = std::get_if<Assignment>(&s.node)) {
                assign(*a, path);
                continue;
            }
            const auto& f = std::get<IfStmt>(s.node);
            std::set<std::string> assigned;
            collect_assigned({s}, assigned);
            std::set<std::string> guard_vars;
            for (const auto& b : f.branches)
                for (const auto& v : b.first.variables())
                    guard_vars.insert(v);
            std::map<std::string, std::string> names;
            for (const auto& v : guard_vars)
                if (assigned.count(v))
                    names[v] = snapshot(v);
            BExpr none_before;
            for (const auto& [cond, body] : f.branches) {
                BExpr c = cond.rename(names);
                walk(body, BExpr::conj(path, BExpr::conj(none_before, c)));
                none_before = BExpr::conj(none_before, BExpr::negate(c));
            }
            if (f.else_body)
                walk(*f.else_body, BExpr::conj(path, none_before));
        }
    }

private:
    std::string snapshot(const std::string& var) {
        std::string name = fresh_name("_i", counter_, taken_);
        taken_.insert(name);
        Categorical c;
        c.branches.push_back({polyexpr::variable(var), std::nullopt});
        out_.push_back({name, c, BExpr(), name});
        return name;
    }

    void assign(const Assignment& a, const BExpr& path) {
        std::map<std::string, std::string> names;
        if (a.targets.size() > 1) {
            std::set<std::string> earlier;
            for (const auto& [var, rhs] : a.targets) {
                for (const auto& r : rhs_variables(rhs))
                    if (earlier.count(r) && !names.count(r))
                        names[r] = "";
                earlier.insert(var);
            }
            for (auto& [var, name] : names)
                name = snapshot(var);
        }
        for (const auto& [var, rhs] : a.targets)
            out_.push_back({var, rename_rhs(rhs, names), path, var});
    }

    std::vector<GuardedAssignment>& out_;
    std::set<std::string> taken_;
    int counter_ = 0;
};

}  // namespace

std::vector<std::string> NormalizedProgram::all_variables() const {
    std::vector<std::string> out = variables;
    for (const auto& a : body)
        if (is_temporary(a.target))
            out.push_back(a.target);
    return out;
}

const GuardedAssignment* NormalizedProgram::assignment_of(const std::string& var) const {
    for (const auto& a : body)
        if (a.target == var)
            return &a;
    return nullptr;
}

NormalizedProgram normalize(const Program& prog) {
    NormalizedProgram np;
    np.parameters = prog.parameters;
    np.variables = prog.variables;

    std::set<std::string> taken(prog.variables.begin(), prog.variables.end());
    for (const auto& p : prog.parameters)
        taken.insert(p);

    // Initialization; body variables never initialized start at zero (their
    // initial value is never observed, validation rejects genuine reads).
    InitFlattener init(np.init, taken);
    init.walk(prog.init, BExpr());
    std::set<std::string> initialized;
    collect_assigned(prog.init, initialized);
    for (const auto& v : prog.variables)
        if (!initialized.count(v)) {
            Categorical zero;
            zero.branches.push_back({PolyExpr(ParamExpr(0)), std::nullopt});
            np.init.push_back({v, zero, BExpr(), v});
        }
    for (const auto& a : np.init)
        taken.insert(a.target);

    BodyFlattener flat(prog.variables);
    flat.run(prog.body);
    auto& raw = flat.raw;

    std::map<std::string, std::size_t> first_pos, final_pos;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        first_pos.try_emplace(raw[i].var, i);
        final_pos[raw[i].var] = i;
    }

    // Entry values read after the variable's own final assignment go through a
    // snapshot taken before its first assignment.
    std::set<std::string> needs_snapshot;
    for (std::size_t i = 0; i < raw.size(); ++i)
        for (const auto& v : reads_of(raw[i])) {
            if (v.substr(v.find('@')) != "@0")
                continue;
            std::string var = origin_of(v);
            auto it = final_pos.find(var);
            if (it != final_pos.end() && it->second < i)
                needs_snapshot.insert(var);
        }

    std::vector<RawAssignment> seq;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto& r = raw[i];
        if (needs_snapshot.count(r.var) && first_pos[r.var] == i) {
            RawAssignment s;
            s.var = r.var;
            s.version = r.var + "@snapshot";
            Categorical c;
            c.branches.push_back({polyexpr::variable(version_name(r.var, 0)), std::nullopt});
            s.rhs = c;
            s.else_version = s.version;
            s.snapshot = true;
            seq.push_back(std::move(s));
        }
        seq.push_back(r);
    }

    std::map<std::string, std::string> names;
    for (const auto& v : prog.variables)
        names[version_name(v, 0)] = v;
    int counter = 0;
    for (const auto& r : seq) {
        if (!r.snapshot && final_pos[r.var] < raw.size() && raw[final_pos[r.var]].version == r.version) {
            names[r.version] = r.var;
            continue;
        }
        std::string name = fresh_name("_t", counter, taken);
        taken.insert(name);
        names[r.version] = name;
        np.temporaries[name] = r.var;
    }

    std::map<std::size_t, std::size_t> seq_pos;  // raw index -> sequence index
    for (std::size_t i = 0, j = 0; i < seq.size(); ++i)
        if (!seq[i].snapshot)
            seq_pos[j++] = i;

    for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto& r = seq[i];
        std::map<std::string, std::string> local = names;
        // Entry reads after the final assignment use the snapshot.
        for (const auto& v : reads_of(r)) {
            if (v.substr(v.find('@')) != "@0")
                continue;
            std::string var = origin_of(v);
            if (!needs_snapshot.count(var))
                continue;
            if (seq_pos[final_pos[var]] < i)
                local[v] = names[var + "@snapshot"];
        }
        GuardedAssignment g;
        g.target = names.at(r.version);
        g.rhs = rename_rhs(r.rhs, local);
        g.guard = r.guard.rename(local);
        g.else_source = r.snapshot ? g.target : names.at(r.else_version);
        if (g.guard.is_true())
            g.else_source = g.target;
        np.body.push_back(std::move(g));
    }
    return np;
}

NormalizedProgram with_power_variable(const NormalizedProgram& np, const std::string& name,
                                      const std::string& base, unsigned exponent) {
    NormalizedProgram out = np;
    Categorical c;
    c.branches.push_back({polyexpr::variable(base).pow(exponent), std::nullopt});
    out.variables.push_back(name);
    out.body.push_back({name, c, BExpr(), name});
    // Initial value consistent with the definition at iteration zero.
    out.init.push_back({name, c, BExpr(), name});
    return out;
}

namespace {

std::string print_assignment(const GuardedAssignment& a) {
    std::string line = a.target + " = " + to_string(a.rhs);
    if (!a.guard.is_true())
        line += " [" + a.guard.to_string() + "] else " + a.else_source;
    return line;
}

}  // namespace

std::string print(const NormalizedProgram& np) {
    std::string out;
    for (const auto& [temp, origin] : np.temporaries)
        out += "# " + temp + " <- " + origin + "\n";
    for (const auto& a : np.init)
        out += print_assignment(a) + "\n";
    out += "while true:\n";
    for (const auto& a : np.body)
        out += "  " + print_assignment(a) + "\n";
    out += "end\n";
    return out;
}

}  // namespace probsens
