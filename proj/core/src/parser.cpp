#include "probsens/parser.hpp"

#include "probsens/errors.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>

namespace probsens {

namespace {

enum class Tok {
    Ident, Number, Plus, Minus, Star, Pow, Slash, LParen, RParen, LBrace, RBrace, Comma, Assign,
    Eq, Ne, Lt, Gt, Le, Ge, Colon, Newline, Not, And, Or, If, Else, Elif, End, While, True, False, Eof
};

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t col;
};

const std::map<std::string, Tok>& keywords() {
    static const std::map<std::string, Tok> k = {
        {"if", Tok::If},   {"else", Tok::Else}, {"elif", Tok::Elif}, {"end", Tok::End},   {"while", Tok::While},
        {"true", Tok::True}, {"false", Tok::False}, {"not", Tok::Not}, {"and", Tok::And}, {"or", Tok::Or},
    };
    return k;
}

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t i = 0;
    auto push = [&](Tok k, std::string text, std::size_t width) {
        out.push_back({k, std::move(text), line, col});
        i += width;
        col += width;
    };
    auto starts = [&](std::string_view s) { return src.substr(i, s.size()) == s; };
    while (i < src.size()) {
        char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n')
                ++i;
            continue;
        }
        if (c == '\n') {
            out.push_back({Tok::Newline, "\\n", line, col});
            ++i;
            ++line;
            col = 1;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            ++col;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.'))
                ++j;
            push(Tok::Number, std::string(src.substr(i, j - i)), j - i);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            std::string word(src.substr(i, j - i));
            auto it = keywords().find(word);
            push(it == keywords().end() ? Tok::Ident : it->second, word, j - i);
            continue;
        }
        // multi-byte operators first
        if (starts("⋆") || starts("★")) { push(Tok::True, "true", 3); col -= 2; continue; }
        if (starts("≤")) { push(Tok::Le, "<=", 3); col -= 2; continue; }
        if (starts("≥")) { push(Tok::Ge, ">=", 3); col -= 2; continue; }
        if (starts("≠")) { push(Tok::Ne, "!=", 3); col -= 2; continue; }
        if (starts("¬")) { push(Tok::Not, "not", 2); col -= 1; continue; }
        if (starts("∧")) { push(Tok::And, "and", 3); col -= 2; continue; }
        if (starts("∨")) { push(Tok::Or, "or", 3); col -= 2; continue; }
        if (starts("**")) { push(Tok::Pow, "**", 2); continue; }
        if (starts("==")) { push(Tok::Eq, "==", 2); continue; }
        if (starts("!=")) { push(Tok::Ne, "!=", 2); continue; }
        if (starts("<=")) { push(Tok::Le, "<=", 2); continue; }
        if (starts(">=")) { push(Tok::Ge, ">=", 2); continue; }
        if (starts("&&")) { push(Tok::And, "and", 2); continue; }
        if (starts("||")) { push(Tok::Or, "or", 2); continue; }
        switch (c) {
        case '+': push(Tok::Plus, "+", 1); continue;
        case '-': push(Tok::Minus, "-", 1); continue;
        case '*': push(Tok::Star, "*", 1); continue;
        case '^': push(Tok::Pow, "^", 1); continue;
        case '/': push(Tok::Slash, "/", 1); continue;
        case '(': push(Tok::LParen, "(", 1); continue;
        case ')': push(Tok::RParen, ")", 1); continue;
        case '{': push(Tok::LBrace, "{", 1); continue;
        case '}': push(Tok::RBrace, "}", 1); continue;
        case ',': push(Tok::Comma, ",", 1); continue;
        case '=': push(Tok::Assign, "=", 1); continue;
        case '<': push(Tok::Lt, "<", 1); continue;
        case '>': push(Tok::Gt, ">", 1); continue;
        case ':': push(Tok::Colon, ":", 1); continue;
        case ';': push(Tok::Newline, ";", 1); continue;
        case '!': push(Tok::Not, "not", 1); continue;
        default: break;
        }
        throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::Eof, "<eof>", line, col});
    return out;
}

// Expression tree before identifiers are split into variables and parameters.
struct Raw {
    enum class Kind { Num, Ident, Add, Sub, Mul, Div, Neg, Pow } kind;
    Rational num;
    std::string name;
    unsigned exponent = 0;
    std::shared_ptr<Raw> l;
    std::shared_ptr<Raw> r;
    std::size_t line = 0;
    std::size_t col = 0;
};
using RawPtr = std::shared_ptr<Raw>;

struct RawCmp;
struct RawBool {
    enum class Kind { True, False, Cmp, Not, And, Or } kind = Kind::True;
    RawPtr lhs;
    RawPtr rhs;
    CmpOp op = CmpOp::Eq;
    std::vector<std::shared_ptr<RawBool>> kids;
};
using RawBoolPtr = std::shared_ptr<RawBool>;

struct RawBranch {
    RawPtr value;
    RawPtr prob;  // may be null
};

struct RawRhs {
    bool is_dist = false;
    DistKind dist = DistKind::Bernoulli;
    std::vector<RawPtr> args;
    std::vector<RawBranch> branches;
    std::size_t line = 0;
    std::size_t col = 0;
};

struct RawStmt {
    bool is_if = false;
    std::size_t line = 0;
    std::vector<std::string> targets;
    std::vector<RawRhs> rhs;
    std::vector<std::pair<RawBoolPtr, std::vector<RawStmt>>> branches;
    bool has_else = false;
    std::vector<RawStmt> else_body;
};

const std::map<std::string, DistKind>& distributions() {
    static const std::map<std::string, DistKind> d = {
        {"Bernoulli", DistKind::Bernoulli},
        {"Normal", DistKind::Normal},
        {"Uniform", DistKind::Uniform},
        {"DiscreteUniform", DistKind::DiscreteUniform},
    };
    return d;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

    void parse_program(std::vector<RawStmt>& init, RawBoolPtr& guard, std::vector<RawStmt>& body) {
        skip_newlines();
        while (peek().kind != Tok::While) {
            if (peek().kind == Tok::Eof)
                fail(peek(), "expected 'while'");
            init.push_back(statement());
            skip_newlines();
        }
        next();
        guard = bexpr();
        expect(Tok::Colon, "':' after loop guard");
        skip_newlines();
        body = statements_until({Tok::End});
        if (body.empty())
            fail(peek(), "empty loop body");
        expect(Tok::End, "'end' closing the loop");
        skip_newlines();
        if (peek().kind != Tok::Eof)
            fail(peek(), "unexpected input after loop (nested or second loops are not supported)");
    }

    RawPtr expr_only() {
        RawPtr e = expr();
        skip_newlines();
        if (peek().kind != Tok::Eof)
            fail(peek(), "unexpected trailing input");
        return e;
    }

private:
    const Token& peek(std::size_t k = 0) const { return t_[std::min(pos_ + k, t_.size() - 1)]; }
    const Token& next() { return t_[pos_ < t_.size() - 1 ? pos_++ : pos_]; }
    bool accept(Tok k) {
        if (peek().kind != k)
            return false;
        next();
        return true;
    }
    const Token& expect(Tok k, const std::string& what) {
        if (peek().kind != k)
            fail(peek(), "expected " + what + ", found '" + peek().text + "'");
        return next();
    }
    [[noreturn]] static void fail(const Token& at, const std::string& msg) { throw ParseError(at.line, at.col, msg); }
    void skip_newlines() {
        while (peek().kind == Tok::Newline)
            next();
    }
    void end_of_statement() {
        if (peek().kind == Tok::Eof || peek().kind == Tok::End || peek().kind == Tok::Else || peek().kind == Tok::Elif)
            return;
        expect(Tok::Newline, "end of statement");
    }

    std::vector<RawStmt> statements_until(std::initializer_list<Tok> stops) {
        std::vector<RawStmt> out;
        skip_newlines();
        for (;;) {
            Tok k = peek().kind;
            for (Tok s : stops)
                if (k == s)
                    return out;
            if (k == Tok::Eof)
                fail(peek(), "unexpected end of input, missing 'end'");
            if (k == Tok::While)
                fail(peek(), "nested loops are not supported");
            out.push_back(statement());
            skip_newlines();
        }
    }

    RawStmt statement() {
        if (peek().kind == Tok::If)
            return if_statement();
        RawStmt s;
        s.line = peek().line;
        s.targets.push_back(expect(Tok::Ident, "assignment target").text);
        while (accept(Tok::Comma))
            s.targets.push_back(expect(Tok::Ident, "assignment target").text);
        expect(Tok::Assign, "'='");
        s.rhs.push_back(assign_right());
        while (accept(Tok::Comma))
            s.rhs.push_back(assign_right());
        if (s.rhs.size() != s.targets.size())
            fail(peek(), "simultaneous assignment has " + std::to_string(s.targets.size()) + " targets but " +
                             std::to_string(s.rhs.size()) + " right-hand sides");
        for (std::size_t i = 0; i < s.targets.size(); ++i)
            for (std::size_t j = i + 1; j < s.targets.size(); ++j)
                if (s.targets[i] == s.targets[j])
                    throw ParseError(s.line, 1, "variable '" + s.targets[i] + "' assigned twice in one statement");
        end_of_statement();
        return s;
    }

    RawStmt if_statement() {
        RawStmt s;
        s.is_if = true;
        s.line = peek().line;
        expect(Tok::If, "'if'");
        for (;;) {
            RawBoolPtr cond = bexpr();
            expect(Tok::Colon, "':' after condition");
            auto stmts = statements_until({Tok::Else, Tok::Elif, Tok::End});
            if (stmts.empty())
                fail(peek(), "empty branch");
            s.branches.emplace_back(cond, std::move(stmts));
            if (accept(Tok::Elif))
                continue;
            if (peek().kind == Tok::Else && peek(1).kind == Tok::If) {
                next();
                next();
                continue;
            }
            if (accept(Tok::Else)) {
                expect(Tok::Colon, "':' after else");
                s.has_else = true;
                s.else_body = statements_until({Tok::End});
                if (s.else_body.empty())
                    fail(peek(), "empty else branch");
            }
            expect(Tok::End, "'end' closing the if-statement");
            end_of_statement();
            return s;
        }
    }

    RawRhs assign_right() {
        RawRhs r;
        r.line = peek().line;
        r.col = peek().col;
        if (peek().kind == Tok::Ident && peek(1).kind == Tok::LParen) {
            auto it = distributions().find(peek().text);
            if (it != distributions().end()) {
                next();
                next();
                r.is_dist = true;
                r.dist = it->second;
                if (peek().kind != Tok::RParen) {
                    r.args.push_back(expr());
                    while (accept(Tok::Comma))
                        r.args.push_back(expr());
                }
                expect(Tok::RParen, "')' closing distribution arguments");
                return r;
            }
        }
        r.branches.push_back({expr(), nullptr});
        while (accept(Tok::LBrace)) {
            r.branches.back().prob = expr();
            expect(Tok::RBrace, "'}'");
            if (starts_expression())
                r.branches.push_back({expr(), nullptr});
            else
                break;
        }
        return r;
    }

    bool starts_expression() const {
        Tok k = peek().kind;
        return k == Tok::Number || k == Tok::Ident || k == Tok::LParen || k == Tok::Minus;
    }

    // expressions
    RawPtr make(Raw::Kind k, const Token& at, RawPtr l = nullptr, RawPtr r = nullptr) {
        auto n = std::make_shared<Raw>();
        n->kind = k;
        n->l = std::move(l);
        n->r = std::move(r);
        n->line = at.line;
        n->col = at.col;
        return n;
    }

    RawPtr expr() {
        RawPtr left = term();
        for (;;) {
            const Token& op = peek();
            if (op.kind == Tok::Plus) {
                next();
                left = make(Raw::Kind::Add, op, left, term());
            } else if (op.kind == Tok::Minus) {
                next();
                left = make(Raw::Kind::Sub, op, left, term());
            } else {
                return left;
            }
        }
    }

    RawPtr term() {
        RawPtr left = unary();
        for (;;) {
            const Token& op = peek();
            if (op.kind == Tok::Star) {
                next();
                left = make(Raw::Kind::Mul, op, left, unary());
            } else if (op.kind == Tok::Slash) {
                next();
                left = make(Raw::Kind::Div, op, left, unary());
            } else {
                return left;
            }
        }
    }

    RawPtr unary() {
        if (peek().kind == Tok::Minus) {
            const Token& op = next();
            return make(Raw::Kind::Neg, op, unary());
        }
        if (peek().kind == Tok::Plus)
            next();
        return power();
    }

    RawPtr power() {
        RawPtr base = atom();
        if (peek().kind == Tok::Pow) {
            const Token& op = next();
            const Token& e = peek();
            if (e.kind != Tok::Number || e.text.find('.') != std::string::npos)
                fail(e, "exponent must be a natural-number literal");
            next();
            auto n = make(Raw::Kind::Pow, op, base);
            n->exponent = static_cast<unsigned>(std::stoul(e.text));
            return n;
        }
        return base;
    }

    RawPtr atom() {
        const Token& tk = peek();
        if (tk.kind == Tok::Number) {
            next();
            auto n = make(Raw::Kind::Num, tk);
            try {
                n->num = parse_rational(tk.text);
            } catch (const std::exception&) {
                fail(tk, "malformed number '" + tk.text + "'");
            }
            return n;
        }
        if (tk.kind == Tok::Ident) {
            if (distributions().count(tk.text))
                fail(tk, "distribution '" + tk.text + "' may only appear as a whole right-hand side");
            next();
            auto n = make(Raw::Kind::Ident, tk);
            n->name = tk.text;
            return n;
        }
        if (tk.kind == Tok::LParen) {
            next();
            RawPtr e = expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        fail(tk, "expected an expression, found '" + tk.text + "'");
    }

    // boolean expressions
    RawBoolPtr bexpr() {
        RawBoolPtr left = bconj();
        while (accept(Tok::Or)) {
            auto n = std::make_shared<RawBool>();
            n->kind = RawBool::Kind::Or;
            n->kids = {left, bconj()};
            left = n;
        }
        return left;
    }

    RawBoolPtr bconj() {
        RawBoolPtr left = bunary();
        while (accept(Tok::And)) {
            auto n = std::make_shared<RawBool>();
            n->kind = RawBool::Kind::And;
            n->kids = {left, bunary()};
            left = n;
        }
        return left;
    }

    RawBoolPtr bunary() {
        if (accept(Tok::Not)) {
            auto n = std::make_shared<RawBool>();
            n->kind = RawBool::Kind::Not;
            n->kids = {bunary()};
            return n;
        }
        if (peek().kind == Tok::True || peek().kind == Tok::False) {
            auto n = std::make_shared<RawBool>();
            n->kind = next().kind == Tok::True ? RawBool::Kind::True : RawBool::Kind::False;
            return n;
        }
        if (peek().kind == Tok::Star && (peek(1).kind == Tok::Colon)) {
            next();
            return std::make_shared<RawBool>();
        }
        if (peek().kind == Tok::LParen) {
            std::size_t save = pos_;
            try {
                return comparison();
            } catch (const ParseError&) {
                pos_ = save;
            }
            next();
            RawBoolPtr inner = bexpr();
            expect(Tok::RParen, "')'");
            return inner;
        }
        return comparison();
    }

    RawBoolPtr comparison() {
        auto n = std::make_shared<RawBool>();
        n->kind = RawBool::Kind::Cmp;
        n->lhs = expr();
        switch (peek().kind) {
        case Tok::Eq:
        case Tok::Assign: n->op = CmpOp::Eq; break;
        case Tok::Ne: n->op = CmpOp::Ne; break;
        case Tok::Lt: n->op = CmpOp::Lt; break;
        case Tok::Gt: n->op = CmpOp::Gt; break;
        case Tok::Le: n->op = CmpOp::Le; break;
        case Tok::Ge: n->op = CmpOp::Ge; break;
        default: fail(peek(), "expected a comparison operator, found '" + peek().text + "'");
        }
        next();
        n->rhs = expr();
        return n;
    }

    std::vector<Token> t_;
    std::size_t pos_ = 0;
};

// Conversion of raw trees once variables are known.
class Builder {
public:
    Builder(const std::set<std::string>& vars) : vars_(vars) {}

    PolyExpr poly(const RawPtr& n) const {
        switch (n->kind) {
        case Raw::Kind::Num: return PolyExpr(ParamExpr(n->num));
        case Raw::Kind::Ident:
            if (vars_.count(n->name))
                return PolyExpr::symbol(n->name);
            return PolyExpr(ParamExpr::parameter(n->name));
        case Raw::Kind::Add: return poly(n->l) + poly(n->r);
        case Raw::Kind::Sub: return poly(n->l) - poly(n->r);
        case Raw::Kind::Mul: return poly(n->l) * poly(n->r);
        case Raw::Kind::Neg: return -poly(n->l);
        case Raw::Kind::Pow: return poly(n->l).pow(n->exponent);
        case Raw::Kind::Div: {
            PolyExpr den = poly(n->r);
            if (!den.is_constant())
                throw ParseError(n->line, n->col, "division by an expression containing program variables");
            ParamExpr d = den.constant_term();
            if (d.is_zero())
                throw ParseError(n->line, n->col, "division by zero");
            return poly(n->l).scaled(ParamExpr(1) / d);
        }
        }
        return {};
    }

    ParamExpr constant(const RawPtr& n, const char* what) const {
        PolyExpr p = poly(n);
        if (!p.is_constant())
            throw ParseError(n->line, n->col, std::string(what) + " must not contain program variables");
        return p.constant_term();
    }

    BExpr boolean(const RawBoolPtr& b) const {
        switch (b->kind) {
        case RawBool::Kind::True: return BExpr::constant(true);
        case RawBool::Kind::False: return BExpr::constant(false);
        case RawBool::Kind::Cmp: return BExpr::compare(poly(b->lhs), b->op, poly(b->rhs));
        case RawBool::Kind::Not: return BExpr::negate(boolean(b->kids[0]));
        case RawBool::Kind::And: return BExpr::conj(boolean(b->kids[0]), boolean(b->kids[1]));
        case RawBool::Kind::Or: return BExpr::disj(boolean(b->kids[0]), boolean(b->kids[1]));
        }
        return {};
    }

    AssignRhs rhs(const RawRhs& r) const {
        if (r.is_dist) {
            DistDraw d;
            d.kind = r.dist;
            for (const auto& a : r.args)
                d.args.push_back(constant(a, "distribution arguments"));
            std::size_t want = r.dist == DistKind::Bernoulli ? 1 : 2;
            if (d.args.size() != want)
                throw ParseError(r.line, r.col, std::string(to_string(r.dist)) + " expects " + std::to_string(want) +
                                                    " argument(s), got " + std::to_string(d.args.size()));
            return d;
        }
        Categorical c;
        std::size_t omitted = 0;
        for (const auto& b : r.branches) {
            Branch br;
            br.value = poly(b.value);
            if (b.prob)
                br.prob = constant(b.prob, "probabilities");
            else
                ++omitted;
            c.branches.push_back(std::move(br));
        }
        if (omitted > 1)
            throw ParseError(r.line, r.col, "malformed probability list: more than one omitted probability");
        return c;
    }

    std::vector<Stmt> stmts(const std::vector<RawStmt>& raw) const {
        std::vector<Stmt> out;
        for (const auto& s : raw) {
            if (!s.is_if) {
                Assignment a;
                a.line = s.line;
                for (std::size_t i = 0; i < s.targets.size(); ++i)
                    a.targets.emplace_back(s.targets[i], rhs(s.rhs[i]));
                out.push_back(Stmt{std::move(a)});
                continue;
            }
            IfStmt f;
            f.line = s.line;
            for (const auto& [cond, body] : s.branches)
                f.branches.emplace_back(boolean(cond), stmts(body));
            if (s.has_else)
                f.else_body = stmts(s.else_body);
            out.push_back(Stmt{std::move(f)});
        }
        return out;
    }

private:
    const std::set<std::string>& vars_;
};

void collect_targets(const std::vector<RawStmt>& stmts, std::vector<std::string>& order, std::set<std::string>& seen) {
    for (const auto& s : stmts) {
        if (!s.is_if) {
            for (const auto& t : s.targets)
                if (seen.insert(t).second)
                    order.push_back(t);
            continue;
        }
        for (const auto& [c, body] : s.branches)
            collect_targets(body, order, seen);
        collect_targets(s.else_body, order, seen);
    }
}

void collect_idents(const RawPtr& n, std::set<std::string>& out) {
    if (!n)
        return;
    if (n->kind == Raw::Kind::Ident)
        out.insert(n->name);
    collect_idents(n->l, out);
    collect_idents(n->r, out);
}

void collect_idents(const RawBoolPtr& b, std::set<std::string>& out) {
    if (!b)
        return;
    collect_idents(b->lhs, out);
    collect_idents(b->rhs, out);
    for (const auto& k : b->kids)
        collect_idents(k, out);
}

void collect_idents(const std::vector<RawStmt>& stmts, std::set<std::string>& out) {
    for (const auto& s : stmts) {
        for (const auto& r : s.rhs) {
            for (const auto& a : r.args)
                collect_idents(a, out);
            for (const auto& b : r.branches) {
                collect_idents(b.value, out);
                collect_idents(b.prob, out);
            }
        }
        for (const auto& [c, body] : s.branches) {
            collect_idents(c, out);
            collect_idents(body, out);
        }
        collect_idents(s.else_body, out);
    }
}

}  // namespace

Program parse(std::string_view source) {
    Parser parser(tokenize(source));
    std::vector<RawStmt> init;
    std::vector<RawStmt> body;
    RawBoolPtr guard;
    parser.parse_program(init, guard, body);

    Program prog;
    std::set<std::string> seen;
    collect_targets(init, prog.variables, seen);
    collect_targets(body, prog.variables, seen);

    std::set<std::string> idents;
    collect_idents(init, idents);
    collect_idents(body, idents);
    collect_idents(guard, idents);
    for (const auto& id : idents)
        if (!seen.count(id))
            prog.parameters.insert(id);

    Builder b(seen);
    prog.init = b.stmts(init);
    prog.body = b.stmts(body);
    BExpr g = b.boolean(guard);
    if (!g.is_true()) {
        IfStmt f;
        f.line = 0;
        f.branches.emplace_back(g, std::move(prog.body));
        prog.body.clear();
        prog.body.push_back(Stmt{std::move(f)});
    }
    prog.guard = BExpr::constant(true);
    return prog;
}

Program parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

VarMonomial parse_target(std::string_view text) {
    return parse_monomial(text);
}

}  // namespace probsens
