#include "motx/parser.hpp"

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

#include "motx/errors.hpp"

namespace motx {

namespace {

// ---------------------------------------------------------------------------
// tokens

struct Token {
    enum class Kind { Int, Ident, Sym, End };
    Kind kind = Kind::End;
    std::string text;
    long long ival = 0;
    int line = 0, col = 0;
};

std::vector<Token> tokenize(const std::string& s, int lineno) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        int col = static_cast<int>(i) + 1;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            long long v = 0;
            std::size_t start = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                if (v > (LLONG_MAX - 9) / 10) throw ParseError("integer literal too large", lineno, col);
                v = v * 10 + (s[i] - '0');
                ++i;
            }
            (void)start;
            out.push_back({Token::Kind::Int, "", v, lineno, col});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
                ++i;
            out.push_back({Token::Kind::Ident, s.substr(start, i - start), 0, lineno, col});
            continue;
        }
        auto two = s.substr(i, 2);
        if (two == "=>" || two == "!=" || two == "<=" || two == ">=") {
            out.push_back({Token::Kind::Sym, two, 0, lineno, col});
            i += 2;
            continue;
        }
        static const std::string singles = "+-*^()[]{},;:=<>";
        if (singles.find(c) != std::string::npos) {
            out.push_back({Token::Kind::Sym, std::string(1, c), 0, lineno, col});
            ++i;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", lineno, col);
    }
    out.push_back({Token::Kind::End, "", 0, lineno, static_cast<int>(s.size()) + 1});
    return out;
}

// ---------------------------------------------------------------------------
// expression / formula grammar over a token stream

struct TokenStream {
    std::vector<Token> toks;
    std::size_t pos = 0;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos + ahead;
        return i < toks.size() ? toks[i] : toks.back();
    }
    const Token& next() {
        const Token& t = peek();
        if (t.kind != Token::Kind::End) ++pos;
        return t;
    }
    bool accept_sym(const std::string& s) {
        if (peek().kind == Token::Kind::Sym && peek().text == s) {
            ++pos;
            return true;
        }
        return false;
    }
    bool accept_kw(const std::string& s) {
        if (peek().kind == Token::Kind::Ident && peek().text == s) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect_sym(const std::string& s) {
        if (!accept_sym(s))
            throw ParseError("expected '" + s + "'", peek().line, peek().col);
    }
    std::string expect_ident() {
        if (peek().kind != Token::Kind::Ident)
            throw ParseError("expected identifier", peek().line, peek().col);
        return next().text;
    }
    long long expect_int() {
        bool neg = accept_sym("-");
        if (peek().kind != Token::Kind::Int)
            throw ParseError("expected integer", peek().line, peek().col);
        long long v = next().ival;
        return neg ? -v : v;
    }
    bool at_end() const { return peek().kind == Token::Kind::End; }
    void expect_end() {
        if (!at_end())
            throw ParseError("unexpected trailing '" +
                                 (peek().kind == Token::Kind::Int ? std::to_string(peek().ival)
                                                                  : peek().text) +
                                 "'",
                             peek().line, peek().col);
    }
};

const char* RESERVED[] = {"and", "or",  "not",  "exists", "forall", "in",        "mod",
                          "true", "false", "case", "when",   "otherwise", "ac",
                          "ord", "t",   "a"};

bool is_reserved(const std::string& s) {
    for (const char* r : RESERVED)
        if (s == r) return true;
    return false;
}

struct ExprParser {
    TokenStream& ts;

    ExprPtr mk(Expr e, const Token& at) {
        e.line = at.line;
        e.col = at.col;
        return std::make_shared<const Expr>(std::move(e));
    }

    FormulaPtr parse_formula() { return parse_or(); }

    FormulaPtr parse_or() {
        FormulaPtr f = parse_and();
        while (ts.accept_kw("or")) {
            Formula o;
            o.kind = Formula::Kind::Or;
            o.line = f->line;
            o.args = {f, parse_and()};
            f = std::make_shared<const Formula>(std::move(o));
        }
        return f;
    }

    FormulaPtr parse_and() {
        FormulaPtr f = parse_unary_formula();
        while (ts.accept_kw("and")) {
            Formula o;
            o.kind = Formula::Kind::And;
            o.line = f->line;
            o.args = {f, parse_unary_formula()};
            f = std::make_shared<const Formula>(std::move(o));
        }
        return f;
    }

    FormulaPtr parse_unary_formula() {
        const Token& t = ts.peek();
        if (ts.accept_kw("not")) {
            Formula o;
            o.kind = Formula::Kind::Not;
            o.line = t.line;
            o.col = t.col;
            o.args = {parse_unary_formula()};
            return std::make_shared<const Formula>(std::move(o));
        }
        if (ts.accept_kw("true")) {
            Formula o;
            o.kind = Formula::Kind::True;
            o.line = t.line;
            return std::make_shared<const Formula>(std::move(o));
        }
        if (ts.accept_kw("false")) {
            Formula o;
            o.kind = Formula::Kind::False;
            o.line = t.line;
            return std::make_shared<const Formula>(std::move(o));
        }
        if (t.kind == Token::Kind::Ident && (t.text == "exists" || t.text == "forall")) {
            ts.next();
            Formula o;
            o.kind = (t.text == "exists") ? Formula::Kind::Exists : Formula::Kind::Forall;
            o.line = t.line;
            o.col = t.col;
            ts.expect_sym("(");
            o.qvar.name = ts.expect_ident();
            if (is_reserved(o.qvar.name))
                throw ParseError("'" + o.qvar.name + "' is reserved", t.line, t.col);
            ts.expect_sym(":");
            o.qvar.sort = parse_sort();
            if (ts.accept_kw("in")) {
                ts.expect_sym("[");
                o.lo = parse_expr();
                ts.expect_sym(",");
                o.hi = parse_expr();
                ts.expect_sym("]");
            }
            ts.expect_sym(")");
            o.body = parse_unary_formula();
            return std::make_shared<const Formula>(std::move(o));
        }
        if (t.kind == Token::Kind::Sym && t.text == "(") {
            // could be a parenthesized formula or a parenthesized term that
            // begins a comparison: try the formula reading and fall back
            std::size_t save = ts.pos;
            try {
                ts.next();
                FormulaPtr f = parse_formula();
                ts.expect_sym(")");
                const Token& after = ts.peek();
                bool looks_like_term_continuation =
                    after.kind == Token::Kind::Sym &&
                    (after.text == "+" || after.text == "-" || after.text == "*" ||
                     after.text == "^" || after.text == "=" || after.text == "!=" ||
                     after.text == "<=" || after.text == "<" || after.text == ">=" ||
                     after.text == ">");
                if (!looks_like_term_continuation) return f;
            } catch (const ParseError&) {
            }
            ts.pos = save;
        }
        return parse_comparison();
    }

    FormulaPtr parse_comparison() {
        const Token& at = ts.peek();
        ExprPtr lhs = parse_expr();
        CmpOp op;
        if (ts.accept_sym("=")) op = CmpOp::Eq;
        else if (ts.accept_sym("!=")) op = CmpOp::Ne;
        else if (ts.accept_sym("<=")) op = CmpOp::Le;
        else if (ts.accept_sym("<")) op = CmpOp::Lt;
        else if (ts.accept_sym(">=")) op = CmpOp::Ge;
        else if (ts.accept_sym(">")) op = CmpOp::Gt;
        else throw ParseError("expected comparison operator", ts.peek().line, ts.peek().col);
        ExprPtr rhs = parse_expr();
        if ((op == CmpOp::Eq || op == CmpOp::Ne) && ts.accept_kw("mod")) {
            long long m = ts.expect_int();
            Formula cong;
            cong.kind = Formula::Kind::Cong;
            cong.lhs = lhs;
            cong.rhs = rhs;
            cong.modulus = m;
            cong.line = at.line;
            cong.col = at.col;
            FormulaPtr cf = std::make_shared<const Formula>(std::move(cong));
            if (op == CmpOp::Eq) return cf;
            Formula nf;
            nf.kind = Formula::Kind::Not;
            nf.args = {cf};
            nf.line = at.line;
            return std::make_shared<const Formula>(std::move(nf));
        }
        Formula f;
        f.kind = Formula::Kind::Cmp;
        f.op = op;
        f.lhs = lhs;
        f.rhs = rhs;
        f.line = at.line;
        f.col = at.col;
        return std::make_shared<const Formula>(std::move(f));
    }

    Sort parse_sort() {
        std::string s = ts.expect_ident();
        if (s == "VF") return Sort::VF;
        if (s == "RF") return Sort::RF;
        if (s == "ZZ") return Sort::ZZ;
        throw ParseError("unknown sort '" + s + "'", ts.peek().line, ts.peek().col);
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_mul();
        for (;;) {
            const Token& t = ts.peek();
            if (ts.accept_sym("+")) {
                Expr o;
                o.kind = Expr::Kind::Add;
                o.args = {e, parse_mul()};
                e = mk(std::move(o), t);
            } else if (ts.accept_sym("-")) {
                Expr o;
                o.kind = Expr::Kind::Sub;
                o.args = {e, parse_mul()};
                e = mk(std::move(o), t);
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_mul() {
        ExprPtr e = parse_unary();
        for (;;) {
            const Token& t = ts.peek();
            if (ts.accept_sym("*")) {
                Expr o;
                o.kind = Expr::Kind::Mul;
                o.args = {e, parse_unary()};
                e = mk(std::move(o), t);
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_unary() {
        const Token& t = ts.peek();
        if (ts.accept_sym("-")) {
            Expr o;
            o.kind = Expr::Kind::Neg;
            o.args = {parse_unary()};
            return mk(std::move(o), t);
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        const Token& t = ts.peek();
        if (ts.accept_sym("^")) {
            Expr o;
            o.kind = Expr::Kind::Pow;
            o.args = {base};
            o.ival = ts.expect_int();
            return mk(std::move(o), t);
        }
        return base;
    }

    ExprPtr parse_primary() {
        const Token& t = ts.peek();
        if (t.kind == Token::Kind::Int) {
            ts.next();
            Expr o;
            o.kind = Expr::Kind::IntLit;
            o.ival = t.ival;
            return mk(std::move(o), t);
        }
        if (t.kind == Token::Kind::Sym && t.text == "(") {
            ts.next();
            ExprPtr e = parse_expr();
            ts.expect_sym(")");
            return e;
        }
        if (t.kind != Token::Kind::Ident)
            throw ParseError("expected a term", t.line, t.col);
        if (t.text == "t") {
            ts.next();
            Expr o;
            o.kind = Expr::Kind::Uniformizer;
            o.sort = Sort::VF;
            return mk(std::move(o), t);
        }
        if (t.text == "ac" || t.text == "ord") {
            ts.next();
            ts.expect_sym("(");
            ExprPtr arg = parse_expr();
            ts.expect_sym(")");
            Expr o;
            o.kind = (t.text == "ac") ? Expr::Kind::Ac : Expr::Kind::Ord;
            o.args = {arg};
            return mk(std::move(o), t);
        }
        if (t.text == "case") {
            ts.next();
            ts.expect_sym("{");
            Expr o;
            o.kind = Expr::Kind::Case;
            do {
                CaseArm arm;
                if (ts.accept_kw("otherwise")) {
                    arm.guard = nullptr;
                } else {
                    if (!ts.accept_kw("when"))
                        throw ParseError("expected 'when' or 'otherwise'", ts.peek().line,
                                         ts.peek().col);
                    arm.guard = parse_formula();
                }
                ts.expect_sym("=>");
                arm.value = parse_expr();
                o.arms.push_back(std::move(arm));
            } while (ts.accept_sym(";"));
            ts.expect_sym("}");
            return mk(std::move(o), t);
        }
        if (is_reserved(t.text))
            throw ParseError("'" + t.text + "' cannot appear here", t.line, t.col);
        ts.next();
        Expr o;
        o.kind = Expr::Kind::Var;
        o.name = t.text;
        return mk(std::move(o), t);
    }
};

// ---------------------------------------------------------------------------
// sort annotation

struct Annotator {
    const std::vector<VarDecl>* scope;

    const VarDecl* find(const std::string& name) const {
        for (auto it = scope->rbegin(); it != scope->rend(); ++it)
            if (it->name == name) return &*it;
        return nullptr;
    }

    std::optional<Sort> natural(const ExprPtr& e) const {
        switch (e->kind) {
        case Expr::Kind::IntLit: return std::nullopt;
        case Expr::Kind::Uniformizer: return Sort::VF;
        case Expr::Kind::Var: {
            const VarDecl* d = find(e->name);
            if (!d) throw ParseError("undeclared variable '" + e->name + "'", e->line, e->col);
            return d->sort;
        }
        case Expr::Kind::Ac: return Sort::RF;
        case Expr::Kind::Ord:
        case Expr::Kind::Case: return Sort::ZZ;
        case Expr::Kind::Neg:
        case Expr::Kind::Pow: return natural(e->args[0]);
        default: {
            for (const auto& a : e->args) {
                auto s = natural(a);
                if (s) return s;
            }
            return std::nullopt;
        }
        }
    }

    ExprPtr annotate(const ExprPtr& e, Sort expected) {
        Expr out = *e;
        out.sort = expected;
        switch (e->kind) {
        case Expr::Kind::IntLit: break;
        case Expr::Kind::Uniformizer:
            if (expected != Sort::VF)
                throw ParseError("t is a valued-field term but sort " + sort_name(expected) +
                                     " is required",
                                 e->line, e->col);
            break;
        case Expr::Kind::Var: {
            const VarDecl* d = find(e->name);
            if (!d) throw ParseError("undeclared variable '" + e->name + "'", e->line, e->col);
            if (d->sort != expected)
                throw ParseError("variable '" + e->name + "' has sort " + sort_name(d->sort) +
                                     " but sort " + sort_name(expected) + " is required",
                                 e->line, e->col);
            break;
        }
        case Expr::Kind::Add:
        case Expr::Kind::Sub:
        case Expr::Kind::Mul:
            out.args = {annotate(e->args[0], expected), annotate(e->args[1], expected)};
            break;
        case Expr::Kind::Neg:
        case Expr::Kind::Pow: out.args = {annotate(e->args[0], expected)}; break;
        case Expr::Kind::Ac:
            if (expected != Sort::RF)
                throw ParseError("ac(...) is a residue term but sort " + sort_name(expected) +
                                     " is required",
                                 e->line, e->col);
            out.args = {annotate(e->args[0], Sort::VF)};
            break;
        case Expr::Kind::Ord:
            if (expected != Sort::ZZ)
                throw ParseError("ord(...) is an integer term but sort " + sort_name(expected) +
                                     " is required",
                                 e->line, e->col);
            out.args = {annotate(e->args[0], Sort::VF)};
            break;
        case Expr::Kind::Case:
            if (expected != Sort::ZZ)
                throw ParseError("case terms are only available at integer sort", e->line, e->col);
            for (auto& arm : out.arms) {
                if (arm.guard) arm.guard = annotate_formula(arm.guard);
                arm.value = annotate(arm.value, Sort::ZZ);
            }
            break;
        }
        return std::make_shared<const Expr>(std::move(out));
    }

    FormulaPtr annotate_formula(const FormulaPtr& f) {
        Formula out = *f;
        switch (f->kind) {
        case Formula::Kind::True:
        case Formula::Kind::False: break;
        case Formula::Kind::Cmp: {
            auto sl = natural(f->lhs);
            auto sr = natural(f->rhs);
            Sort s = sl ? *sl : (sr ? *sr : Sort::ZZ);
            if (sl && sr && *sl != *sr)
                throw ParseError("comparison between sorts " + sort_name(*sl) + " and " +
                                     sort_name(*sr),
                                 f->line, f->col);
            if (s != Sort::ZZ && f->op != CmpOp::Eq && f->op != CmpOp::Ne)
                throw ParseError("ordered comparison requires integer terms", f->line, f->col);
            out.lhs = annotate(f->lhs, s);
            out.rhs = annotate(f->rhs, s);
            break;
        }
        case Formula::Kind::Cong:
            out.lhs = annotate(f->lhs, Sort::ZZ);
            out.rhs = annotate(f->rhs, Sort::ZZ);
            break;
        case Formula::Kind::And:
        case Formula::Kind::Or:
        case Formula::Kind::Not:
            for (auto& a : out.args) a = annotate_formula(a);
            break;
        case Formula::Kind::Exists:
        case Formula::Kind::Forall: {
            if (f->lo) out.lo = annotate(f->lo, Sort::ZZ);
            if (f->hi) out.hi = annotate(f->hi, Sort::ZZ);
            std::vector<VarDecl> inner = *scope;
            inner.push_back(f->qvar);
            Annotator sub{&inner};
            out.body = sub.annotate_formula(f->body);
            break;
        }
        }
        return std::make_shared<const Formula>(std::move(out));
    }
};

ExprPtr parse_term_tokens(TokenStream& ts, const std::vector<VarDecl>& scope, Sort expected) {
    ExprParser p{ts};
    ExprPtr raw = p.parse_expr();
    Annotator a{&scope};
    return a.annotate(raw, expected);
}

FormulaPtr parse_formula_tokens(TokenStream& ts, const std::vector<VarDecl>& scope) {
    ExprParser p{ts};
    FormulaPtr raw = p.parse_formula();
    Annotator a{&scope};
    return a.annotate_formula(raw);
}

} // namespace

ExprPtr parse_term(const std::string& text, const std::vector<VarDecl>& scope, Sort expected) {
    TokenStream ts{tokenize(text, 1)};
    ExprPtr e = parse_term_tokens(ts, scope, expected);
    ts.expect_end();
    return e;
}

FormulaPtr parse_formula(const std::string& text, const std::vector<VarDecl>& scope) {
    TokenStream ts{tokenize(text, 1)};
    FormulaPtr f = parse_formula_tokens(ts, scope);
    ts.expect_end();
    return f;
}

// ---------------------------------------------------------------------------
// document parser

namespace {

std::vector<VarDecl> parse_decl_list(TokenStream& ts, bool parens) {
    std::vector<VarDecl> out;
    if (parens) ts.expect_sym("(");
    for (;;) {
        if (parens && ts.accept_sym(")")) break;
        std::string name = ts.expect_ident();
        if (is_reserved(name))
            throw ParseError("'" + name + "' is reserved and cannot be a variable name",
                             ts.peek().line, ts.peek().col);
        ts.expect_sym(":");
        ExprParser p{ts};
        VarDecl d;
        d.name = name;
        d.sort = p.parse_sort();
        out.push_back(d);
        if (ts.accept_sym(",")) continue;
        if (parens) {
            ts.expect_sym(")");
            break;
        }
        break;
    }
    return out;
}

} // namespace

ExpFunSpec parse_spec(const std::string& text, const std::string& name) {
    ExpFunSpec spec;
    spec.source_name = name;

    ExpSummand* cur = nullptr;
    MotTerm* cur_term = nullptr;
    bool in_h = false;
    bool g_open = false;
    bool seen_vars = false;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;

    auto ambient_scope = [&]() { return spec.vars; };
    auto term_scope = [&]() {
        std::vector<VarDecl> sc = spec.vars;
        if (cur_term)
            sc.insert(sc.end(), cur_term->count_vars.begin(), cur_term->count_vars.end());
        return sc;
    };
    auto osc_scope = [&]() {
        std::vector<VarDecl> sc = spec.vars;
        if (cur) sc.insert(sc.end(), cur->osc_vars.begin(), cur->osc_vars.end());
        return sc;
    };

    auto need_summand = [&](const std::string& what, int ln) -> ExpSummand& {
        if (!cur) throw ParseError(what + " outside a summand block", ln, 1);
        return *cur;
    };
    auto need_term = [&](const std::string& what, int ln) -> MotTerm& {
        if (!cur) throw ParseError(what + " outside a summand block", ln, 1);
        if (!in_h) throw ParseError(what + " outside an H block", ln, 1);
        if (!cur_term) {
            cur->h_terms.emplace_back();
            cur_term = &cur->h_terms.back();
        }
        return *cur_term;
    };

    while (std::getline(in, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        TokenStream ts{tokenize(raw, lineno)};
        if (ts.at_end()) continue;

        const Token& head = ts.peek();
        if (head.kind != Token::Kind::Ident)
            throw ParseError("expected a block keyword", lineno, head.col);
        std::string key = head.text;

        if (key == "class") {
            ts.next();
            ts.expect_sym(":");
            std::string tag = ts.expect_ident();
            if (tag == "C") spec.declared_class = SpecClass::C;
            else if (tag == "Ce") spec.declared_class = SpecClass::Ce;
            else if (tag == "Cexp") spec.declared_class = SpecClass::Cexp;
            else throw ParseError("unknown class '" + tag + "'", lineno, head.col);
            ts.expect_end();
        } else if (key == "vars") {
            ts.next();
            ts.expect_sym(":");
            if (seen_vars) throw ParseError("duplicate vars line", lineno, head.col);
            seen_vars = true;
            if (!ts.at_end()) spec.vars = parse_decl_list(ts, false);
            ts.expect_end();
        } else if (key == "set") {
            ts.next();
            std::string which = ts.expect_ident();
            if (which != "X") throw ParseError("only 'set X:' is supported", lineno, head.col);
            ts.expect_sym(":");
            auto sc = ambient_scope();
            spec.ambient = parse_formula_tokens(ts, sc);
            ts.expect_end();
        } else if (key == "summand") {
            ts.next();
            ts.expect_sym(":");
            ts.expect_end();
            spec.summands.emplace_back();
            cur = &spec.summands.back();
            cur_term = nullptr;
            in_h = false;
            g_open = false;
        } else if (key == "H") {
            ts.next();
            ts.expect_sym(":");
            ts.expect_end();
            need_summand("H", lineno);
            in_h = true;
            g_open = false;
            cur_term = nullptr;
        } else if (key == "term") {
            ts.next();
            ts.expect_sym(":");
            ts.expect_end();
            if (!cur || !in_h) throw ParseError("term outside an H block", lineno, head.col);
            cur->h_terms.emplace_back();
            cur_term = &cur->h_terms.back();
        } else if (key == "count") {
            ts.next();
            MotTerm& t = need_term("count", lineno);
            if (t.count_set) throw ParseError("duplicate count line in term", lineno, head.col);
            if (ts.peek().kind == Token::Kind::Sym && ts.peek().text == "(")
                t.count_vars = parse_decl_list(ts, true);
            ts.expect_sym(":");
            auto sc = term_scope();
            t.count_set = parse_formula_tokens(ts, sc);
            ts.expect_end();
        } else if (key == "alpha") {
            ts.next();
            ts.expect_sym(":");
            MotTerm& t = need_term("alpha", lineno);
            if (t.alpha) throw ParseError("duplicate alpha line in term", lineno, head.col);
            auto sc = ambient_scope();
            t.alpha = parse_term_tokens(ts, sc, Sort::ZZ);
            ts.expect_end();
        } else if (key == "beta") {
            ts.next();
            ts.expect_sym(":");
            MotTerm& t = need_term("beta", lineno);
            auto sc = ambient_scope();
            t.betas.push_back(parse_term_tokens(ts, sc, Sort::ZZ));
            ts.expect_end();
        } else if (key == "geom") {
            ts.next();
            ts.expect_sym(":");
            MotTerm& t = need_term("geom", lineno);
            long long a = ts.expect_int();
            if (a == 0) throw ParseError("geometric factor exponent must be nonzero", lineno, head.col);
            t.geoms.push_back(a);
            ts.expect_end();
        } else if (key == "Y") {
            ts.next();
            ExpSummand& s = need_summand("Y", lineno);
            if (s.osc_set || !s.osc_vars.empty())
                throw ParseError("duplicate Y line in summand", lineno, head.col);
            in_h = false;
            cur_term = nullptr;
            if (ts.peek().kind == Token::Kind::Sym && ts.peek().text == "(")
                s.osc_vars = parse_decl_list(ts, true);
            ts.expect_sym(":");
            auto sc = osc_scope();
            s.osc_set = parse_formula_tokens(ts, sc);
            ts.expect_end();
        } else if (key == "g") {
            ts.next();
            ts.expect_sym(":");
            ExpSummand& s = need_summand("g", lineno);
            if (!s.g.empty() || g_open)
                throw ParseError("duplicate g block in summand", lineno, head.col);
            in_h = false;
            cur_term = nullptr;
            if (ts.at_end()) {
                g_open = true; // case lines follow
            } else {
                auto sc = osc_scope();
                GCase c;
                c.value = parse_term_tokens(ts, sc, Sort::VF);
                ts.expect_end();
                s.g.push_back(std::move(c));
            }
        } else if (key == "when" || key == "otherwise") {
            ts.next();
            ExpSummand& s = need_summand(key, lineno);
            if (!g_open) throw ParseError("'" + key + "' outside an open g block", lineno, head.col);
            GCase c;
            auto sc = osc_scope();
            if (key == "when") {
                c.guard = parse_formula_tokens(ts, sc);
            }
            ts.expect_sym("=>");
            c.value = parse_term_tokens(ts, sc, Sort::VF);
            ts.expect_end();
            s.g.push_back(std::move(c));
        } else if (key == "e") {
            ts.next();
            ts.expect_sym(":");
            ExpSummand& s = need_summand("e", lineno);
            if (s.e) throw ParseError("duplicate e line in summand", lineno, head.col);
            in_h = false;
            cur_term = nullptr;
            g_open = false;
            auto sc = osc_scope();
            s.e = parse_term_tokens(ts, sc, Sort::RF);
            ts.expect_end();
        } else {
            throw ParseError("unknown block keyword '" + key + "'", lineno, head.col);
        }
    }
    if (spec.summands.empty())
        throw ParseError("document contains no summand block", lineno > 0 ? lineno : 1, 1);
    return spec;
}

ExpFunSpec parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open spec file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string base = path;
    auto slash = base.find_last_of('/');
    if (slash != std::string::npos) base = base.substr(slash + 1);
    return parse_spec(ss.str(), base);
}

} // namespace motx
