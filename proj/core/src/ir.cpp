#include "motx/ir.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <sstream>

#include "motx/errors.hpp"

namespace motx {

std::string sort_name(Sort s) {
    switch (s) {
    case Sort::VF: return "VF";
    case Sort::RF: return "RF";
    default: return "ZZ";
    }
}

// ---------------------------------------------------------------------------
// structural equality (locations ignored)

bool equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind || a->sort != b->sort) return false;
    if (a->ival != b->ival || a->name != b->name) return false;
    if (a->args.size() != b->args.size() || a->arms.size() != b->arms.size()) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!equal(a->args[i], b->args[i])) return false;
    for (std::size_t i = 0; i < a->arms.size(); ++i) {
        if (!equal(a->arms[i].guard, b->arms[i].guard)) return false;
        if (!equal(a->arms[i].value, b->arms[i].value)) return false;
    }
    return true;
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind || a->op != b->op || a->modulus != b->modulus) return false;
    if (!equal(a->lhs, b->lhs) || !equal(a->rhs, b->rhs)) return false;
    if (a->args.size() != b->args.size()) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!equal(a->args[i], b->args[i])) return false;
    if (!(a->qvar == b->qvar)) return false;
    if (!equal(a->lo, b->lo) || !equal(a->hi, b->hi)) return false;
    return equal(a->body, b->body);
}

namespace {

bool equal_terms(const MotTerm& a, const MotTerm& b) {
    if (!(a.count_vars == b.count_vars)) return false;
    if (!equal(a.count_set, b.count_set) || !equal(a.alpha, b.alpha)) return false;
    if (a.betas.size() != b.betas.size() || a.geoms != b.geoms) return false;
    for (std::size_t i = 0; i < a.betas.size(); ++i)
        if (!equal(a.betas[i], b.betas[i])) return false;
    return true;
}

} // namespace

bool equal(const ExpFunSpec& a, const ExpFunSpec& b) {
    if (!(a.vars == b.vars) || !equal(a.ambient, b.ambient)) return false;
    if (a.declared_class != b.declared_class) return false;
    if (a.summands.size() != b.summands.size()) return false;
    for (std::size_t i = 0; i < a.summands.size(); ++i) {
        const auto& sa = a.summands[i];
        const auto& sb = b.summands[i];
        if (sa.h_terms.size() != sb.h_terms.size()) return false;
        for (std::size_t j = 0; j < sa.h_terms.size(); ++j)
            if (!equal_terms(sa.h_terms[j], sb.h_terms[j])) return false;
        if (!(sa.osc_vars == sb.osc_vars) || !equal(sa.osc_set, sb.osc_set)) return false;
        if (sa.g.size() != sb.g.size()) return false;
        for (std::size_t j = 0; j < sa.g.size(); ++j) {
            if (!equal(sa.g[j].guard, sb.g[j].guard)) return false;
            if (!equal(sa.g[j].value, sb.g[j].value)) return false;
        }
        if (!equal(sa.e, sb.e)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// spec class helpers

bool ExpFunSpec::is_motivic() const {
    for (const auto& s : summands)
        if (!s.osc_vars.empty() || s.osc_set || !s.g.empty() || s.e) return false;
    return true;
}

namespace {
bool is_zero_term(const ExprPtr& e) {
    return e && e->kind == Expr::Kind::IntLit && e->ival == 0;
}
} // namespace

bool ExpFunSpec::is_ce() const {
    for (const auto& s : summands)
        for (const auto& c : s.g)
            if (!is_zero_term(c.value)) return false;
    return true;
}

MotFunSpec ExpFunSpec::as_motfun() const {
    if (!is_motivic()) throw Error("spec has oscillation parts; not a counting-sum function");
    MotFunSpec m;
    m.vars = vars;
    m.ambient = ambient;
    for (const auto& s : summands) {
        if (s.h_terms.empty()) m.terms.push_back(MotTerm{}); // empty product = 1
        for (const auto& t : s.h_terms) m.terms.push_back(t);
    }
    return m;
}

// ---------------------------------------------------------------------------
// renaming

ExprPtr rename_vars(const ExprPtr& e,
                    const std::vector<std::pair<std::string, std::string>>& map) {
    if (!e) return e;
    Expr out = *e;
    if (e->kind == Expr::Kind::Var) {
        for (const auto& [from, to] : map)
            if (e->name == from) {
                out.name = to;
                break;
            }
    }
    for (auto& a : out.args) a = rename_vars(a, map);
    for (auto& arm : out.arms) {
        arm.guard = rename_vars(arm.guard, map);
        arm.value = rename_vars(arm.value, map);
    }
    return std::make_shared<const Expr>(std::move(out));
}

FormulaPtr rename_vars(const FormulaPtr& f,
                       const std::vector<std::pair<std::string, std::string>>& map) {
    if (!f) return f;
    Formula out = *f;
    out.lhs = rename_vars(f->lhs, map);
    out.rhs = rename_vars(f->rhs, map);
    for (auto& a : out.args) a = rename_vars(a, map);
    out.lo = rename_vars(f->lo, map);
    out.hi = rename_vars(f->hi, map);
    if (f->body) {
        auto inner = map;
        inner.erase(std::remove_if(inner.begin(), inner.end(),
                                   [&](const auto& pr) { return pr.first == f->qvar.name; }),
                    inner.end());
        out.body = rename_vars(f->body, inner);
    }
    return std::make_shared<const Formula>(std::move(out));
}

// ---------------------------------------------------------------------------
// printing

namespace {

int expr_level(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul: return 2;
    case Expr::Kind::Neg: return 3;
    case Expr::Kind::Pow: return 4;
    default: return 5;
    }
}

std::string print_expr_impl(const ExprPtr& e);

std::string wrap(const ExprPtr& child, int parent_level, bool strict) {
    std::string s = print_expr_impl(child);
    int cl = expr_level(*child);
    if (cl < parent_level || (strict && cl == parent_level)) return "(" + s + ")";
    return s;
}

std::string print_formula_impl(const FormulaPtr& f);

std::string print_expr_impl(const ExprPtr& e) {
    switch (e->kind) {
    case Expr::Kind::IntLit:
        return e->ival < 0 ? "-" + std::to_string(-e->ival) : std::to_string(e->ival);
    case Expr::Kind::Uniformizer: return "t";
    case Expr::Kind::Var: return e->name;
    case Expr::Kind::Add: return wrap(e->args[0], 1, false) + " + " + wrap(e->args[1], 1, true);
    case Expr::Kind::Sub: return wrap(e->args[0], 1, false) + " - " + wrap(e->args[1], 1, true);
    case Expr::Kind::Mul: return wrap(e->args[0], 2, false) + " * " + wrap(e->args[1], 2, true);
    case Expr::Kind::Neg: return "-" + wrap(e->args[0], 3, false);
    case Expr::Kind::Pow: return wrap(e->args[0], 5, false) + "^" + std::to_string(e->ival);
    case Expr::Kind::Ac: return "ac(" + print_expr_impl(e->args[0]) + ")";
    case Expr::Kind::Ord: return "ord(" + print_expr_impl(e->args[0]) + ")";
    case Expr::Kind::Case: {
        std::ostringstream os;
        os << "case { ";
        bool first = true;
        for (const auto& arm : e->arms) {
            if (!first) os << "; ";
            first = false;
            if (arm.guard)
                os << "when " << print_formula_impl(arm.guard) << " => "
                   << print_expr_impl(arm.value);
            else
                os << "otherwise => " << print_expr_impl(arm.value);
        }
        os << " }";
        return os.str();
    }
    }
    throw Error("unknown expression kind");
}

int formula_level(const Formula& f) {
    switch (f.kind) {
    case Formula::Kind::Or: return 1;
    case Formula::Kind::And: return 2;
    default: return 3;
    }
}

std::string wrapf(const FormulaPtr& child, int parent_level, bool strict) {
    std::string s = print_formula_impl(child);
    int cl = formula_level(*child);
    if (cl < parent_level || (strict && cl == parent_level)) return "(" + s + ")";
    return s;
}

const char* cmp_name(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Le: return "<=";
    case CmpOp::Lt: return "<";
    case CmpOp::Ge: return ">=";
    default: return ">";
    }
}

std::string print_formula_impl(const FormulaPtr& f) {
    switch (f->kind) {
    case Formula::Kind::True: return "true";
    case Formula::Kind::False: return "false";
    case Formula::Kind::Cmp:
        return print_expr_impl(f->lhs) + " " + cmp_name(f->op) + " " + print_expr_impl(f->rhs);
    case Formula::Kind::Cong:
        return print_expr_impl(f->lhs) + " = " + print_expr_impl(f->rhs) + " mod " +
               std::to_string(f->modulus);
    case Formula::Kind::And: {
        std::string s = wrapf(f->args[0], 2, false);
        for (std::size_t i = 1; i < f->args.size(); ++i) s += " and " + wrapf(f->args[i], 2, true);
        return s;
    }
    case Formula::Kind::Or: {
        std::string s = wrapf(f->args[0], 1, false);
        for (std::size_t i = 1; i < f->args.size(); ++i) s += " or " + wrapf(f->args[i], 1, true);
        return s;
    }
    case Formula::Kind::Not: return "not " + wrapf(f->args[0], 3, false);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
        std::ostringstream os;
        os << (f->kind == Formula::Kind::Exists ? "exists (" : "forall (") << f->qvar.name
           << " : " << sort_name(f->qvar.sort);
        if (f->lo) os << " in [" << print_expr_impl(f->lo) << ", " << print_expr_impl(f->hi) << "]";
        os << ") (" << print_formula_impl(f->body) << ")";
        return os.str();
    }
    }
    throw Error("unknown formula kind");
}

} // namespace

std::string print_expr(const ExprPtr& e) {
    if (!e) return "0";
    return print_expr_impl(e);
}

std::string print_formula(const FormulaPtr& f) {
    if (!f) return "true";
    return print_formula_impl(f);
}

std::string print_spec(const ExpFunSpec& spec) {
    std::ostringstream os;
    if (spec.declared_class) {
        os << "class: ";
        switch (*spec.declared_class) {
        case SpecClass::C: os << "C"; break;
        case SpecClass::Ce: os << "Ce"; break;
        case SpecClass::Cexp: os << "Cexp"; break;
        }
        os << "\n";
    }
    os << "vars:";
    bool first = true;
    for (const auto& v : spec.vars) {
        os << (first ? " " : ", ") << v.name << ": " << sort_name(v.sort);
        first = false;
    }
    os << "\n";
    if (spec.ambient) os << "set X: " << print_formula(spec.ambient) << "\n";
    for (const auto& s : spec.summands) {
        os << "summand:\n";
        os << "  H:\n";
        for (const auto& t : s.h_terms) {
            os << "    term:\n";
            if (!t.count_vars.empty() || t.count_set) {
                os << "      count";
                if (!t.count_vars.empty()) {
                    os << " (";
                    for (std::size_t i = 0; i < t.count_vars.size(); ++i) {
                        if (i) os << ", ";
                        os << t.count_vars[i].name << ": " << sort_name(t.count_vars[i].sort);
                    }
                    os << ")";
                }
                os << ": " << print_formula(t.count_set) << "\n";
            }
            if (t.alpha) os << "      alpha: " << print_expr(t.alpha) << "\n";
            for (const auto& b : t.betas) os << "      beta: " << print_expr(b) << "\n";
            for (auto gexp : t.geoms) os << "      geom: " << gexp << "\n";
        }
        if (!s.osc_vars.empty() || s.osc_set) {
            os << "  Y";
            if (!s.osc_vars.empty()) {
                os << " (";
                for (std::size_t i = 0; i < s.osc_vars.size(); ++i) {
                    if (i) os << ", ";
                    os << s.osc_vars[i].name << ": " << sort_name(s.osc_vars[i].sort);
                }
                os << ")";
            }
            os << ": " << print_formula(s.osc_set) << "\n";
        }
        if (!s.g.empty()) {
            os << "  g:\n";
            for (const auto& c : s.g) {
                if (c.guard)
                    os << "    when " << print_formula(c.guard) << " => " << print_expr(c.value)
                       << "\n";
                else
                    os << "    otherwise => " << print_expr(c.value) << "\n";
            }
        }
        if (s.e) os << "  e: " << print_expr(s.e) << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// validation

bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        if (d.severity == Diagnostic::Severity::Error) return true;
    return false;
}

std::string render(const std::vector<Diagnostic>& diags) {
    std::ostringstream os;
    for (const auto& d : diags) {
        switch (d.severity) {
        case Diagnostic::Severity::Error: os << "error"; break;
        case Diagnostic::Severity::Warning: os << "warning"; break;
        case Diagnostic::Severity::Note: os << "note"; break;
        }
        if (d.line > 0) os << " (line " << d.line << ")";
        os << ": " << d.message << "\n";
    }
    return os.str();
}

namespace {

struct Scope {
    std::vector<VarDecl> vars;
    const VarDecl* find(const std::string& name) const {
        for (auto it = vars.rbegin(); it != vars.rend(); ++it)
            if (it->name == name) return &*it;
        return nullptr;
    }
};

struct Validator {
    std::vector<Diagnostic> diags;

    void error(const std::string& m, int line = 0, int col = 0) {
        diags.push_back({Diagnostic::Severity::Error, m, line, col});
    }
    void warn(const std::string& m, int line = 0, int col = 0) {
        diags.push_back({Diagnostic::Severity::Warning, m, line, col});
    }
    void note(const std::string& m, int line = 0, int col = 0) {
        diags.push_back({Diagnostic::Severity::Note, m, line, col});
    }

    // zz linearity degree: 0 constant, 1 linear, 2 anything worse
    int zz_degree(const ExprPtr& e) {
        if (!e) return 0;
        switch (e->kind) {
        case Expr::Kind::IntLit: return 0;
        case Expr::Kind::Var:
        case Expr::Kind::Ord: return 1;
        case Expr::Kind::Add:
        case Expr::Kind::Sub:
            return std::max(zz_degree(e->args[0]), zz_degree(e->args[1]));
        case Expr::Kind::Neg: return zz_degree(e->args[0]);
        case Expr::Kind::Mul: {
            int d = zz_degree(e->args[0]) + zz_degree(e->args[1]);
            return std::min(d, 2);
        }
        case Expr::Kind::Pow: {
            int d = zz_degree(e->args[0]);
            if (d == 0) return 0;
            return (e->ival <= 1) ? static_cast<int>(e->ival) * d : 2;
        }
        case Expr::Kind::Case: {
            int d = 0;
            for (const auto& arm : e->arms) d = std::max(d, zz_degree(arm.value));
            return d;
        }
        default: return 2;
        }
    }

    void check_expr(const ExprPtr& e, Sort expected, const Scope& sc) {
        if (!e) return;
        if (e->sort != expected)
            error("term has sort " + sort_name(e->sort) + " where " + sort_name(expected) +
                      " is required",
                  e->line, e->col);
        switch (e->kind) {
        case Expr::Kind::IntLit: break;
        case Expr::Kind::Uniformizer:
            if (expected != Sort::VF) error("t is a valued-field term", e->line, e->col);
            break;
        case Expr::Kind::Var: {
            const VarDecl* d = sc.find(e->name);
            if (!d)
                error("undeclared variable '" + e->name + "'", e->line, e->col);
            else if (d->sort != expected)
                error("variable '" + e->name + "' has sort " + sort_name(d->sort) + ", expected " +
                          sort_name(expected),
                      e->line, e->col);
            break;
        }
        case Expr::Kind::Add:
        case Expr::Kind::Sub:
        case Expr::Kind::Mul:
            check_expr(e->args[0], expected, sc);
            check_expr(e->args[1], expected, sc);
            break;
        case Expr::Kind::Neg: check_expr(e->args[0], expected, sc); break;
        case Expr::Kind::Pow:
            if (e->ival < 0) error("negative exponent", e->line, e->col);
            check_expr(e->args[0], expected, sc);
            break;
        case Expr::Kind::Ac:
            if (expected != Sort::RF) error("ac(...) is a residue term", e->line, e->col);
            check_expr(e->args[0], Sort::VF, sc);
            break;
        case Expr::Kind::Ord:
            if (expected != Sort::ZZ) error("ord(...) is an integer term", e->line, e->col);
            check_expr(e->args[0], Sort::VF, sc);
            break;
        case Expr::Kind::Case: {
            if (expected != Sort::ZZ)
                error("case terms are only available at integer sort", e->line, e->col);
            bool saw_otherwise = false;
            for (std::size_t i = 0; i < e->arms.size(); ++i) {
                const auto& arm = e->arms[i];
                if (!arm.guard) {
                    if (saw_otherwise) error("multiple otherwise arms", e->line, e->col);
                    if (i + 1 != e->arms.size())
                        error("otherwise must be the last case arm", e->line, e->col);
                    saw_otherwise = true;
                } else {
                    check_formula(arm.guard, sc);
                }
                check_expr(arm.value, expected, sc);
            }
            if (e->arms.empty()) error("empty case list", e->line, e->col);
            check_case_arms(e->arms, "case term", e->line);
            break;
        }
        }
        if (expected == Sort::ZZ && zz_degree(e) > 1)
            error("integer terms must be linear in variables and ord(...)", e->line, e->col);
    }

    void check_formula(const FormulaPtr& f, const Scope& sc) {
        if (!f) return;
        switch (f->kind) {
        case Formula::Kind::True:
        case Formula::Kind::False: break;
        case Formula::Kind::Cmp: {
            Sort s = f->lhs->sort;
            if (f->rhs->sort != s)
                error("comparison between sorts " + sort_name(s) + " and " +
                          sort_name(f->rhs->sort),
                      f->line, f->col);
            if (s != Sort::ZZ && f->op != CmpOp::Eq && f->op != CmpOp::Ne)
                error("ordered comparison requires integer terms", f->line, f->col);
            check_expr(f->lhs, s, sc);
            check_expr(f->rhs, s, sc);
            break;
        }
        case Formula::Kind::Cong:
            if (f->modulus < 2) error("congruence modulus must be at least 2", f->line, f->col);
            check_expr(f->lhs, Sort::ZZ, sc);
            check_expr(f->rhs, Sort::ZZ, sc);
            break;
        case Formula::Kind::And:
        case Formula::Kind::Or:
            for (const auto& a : f->args) check_formula(a, sc);
            break;
        case Formula::Kind::Not: check_formula(f->args[0], sc); break;
        case Formula::Kind::Exists:
        case Formula::Kind::Forall: {
            if (f->qvar.sort == Sort::VF)
                error("quantification over valued-field variables is not part of the term "
                      "language",
                      f->line, f->col);
            if (sc.find(f->qvar.name))
                error("quantifier shadows variable '" + f->qvar.name + "'", f->line, f->col);
            if (f->qvar.sort == Sort::ZZ) {
                if (!f->lo || !f->hi)
                    error("integer quantifier needs explicit bounds", f->line, f->col);
                check_expr(f->lo, Sort::ZZ, sc);
                check_expr(f->hi, Sort::ZZ, sc);
            } else if (f->lo || f->hi) {
                error("residue quantifier takes no bounds", f->line, f->col);
            }
            Scope inner = sc;
            inner.vars.push_back(f->qvar);
            check_formula(f->body, inner);
            break;
        }
        }
    }

    // --- static case analysis on interval guards -------------------------

    using IvSet = std::vector<std::pair<long long, long long>>; // sorted disjoint

    static IvSet iv_all() { return {{LLONG_MIN, LLONG_MAX}}; }

    static IvSet iv_normalize(IvSet v) {
        std::sort(v.begin(), v.end());
        IvSet out;
        for (auto& it : v) {
            if (it.first > it.second) continue;
            if (!out.empty() && it.first <= (out.back().second == LLONG_MAX
                                                 ? LLONG_MAX
                                                 : out.back().second + 1))
                out.back().second = std::max(out.back().second, it.second);
            else
                out.push_back(it);
        }
        return out;
    }

    static IvSet iv_intersect(const IvSet& a, const IvSet& b) {
        IvSet out;
        for (const auto& x : a)
            for (const auto& y : b) {
                long long lo = std::max(x.first, y.first);
                long long hi = std::min(x.second, y.second);
                if (lo <= hi) out.push_back({lo, hi});
            }
        return iv_normalize(out);
    }

    static IvSet iv_union(const IvSet& a, const IvSet& b) {
        IvSet out = a;
        out.insert(out.end(), b.begin(), b.end());
        return iv_normalize(out);
    }

    static IvSet iv_complement(const IvSet& a) {
        IvSet out;
        long long next = LLONG_MIN;
        bool open = true;
        for (const auto& x : a) {
            if (x.first > next) out.push_back({next, x.first - 1});
            if (x.second == LLONG_MAX) {
                open = false;
                break;
            }
            next = x.second + 1;
        }
        if (open) out.push_back({next, LLONG_MAX});
        return iv_normalize(out);
    }

    static std::optional<long long> const_value(const ExprPtr& e) {
        if (!e) return std::nullopt;
        switch (e->kind) {
        case Expr::Kind::IntLit: return e->ival;
        case Expr::Kind::Neg: {
            auto v = const_value(e->args[0]);
            return v ? std::optional<long long>(-*v) : std::nullopt;
        }
        case Expr::Kind::Add: {
            auto a = const_value(e->args[0]), b = const_value(e->args[1]);
            return (a && b) ? std::optional<long long>(*a + *b) : std::nullopt;
        }
        case Expr::Kind::Sub: {
            auto a = const_value(e->args[0]), b = const_value(e->args[1]);
            return (a && b) ? std::optional<long long>(*a - *b) : std::nullopt;
        }
        case Expr::Kind::Mul: {
            auto a = const_value(e->args[0]), b = const_value(e->args[1]);
            return (a && b) ? std::optional<long long>(*a * *b) : std::nullopt;
        }
        default: return std::nullopt;
        }
    }

    // tries to read f as a constraint on a single discriminant term; key is
    // the printed form of that term ("" until the first atom fixes it)
    std::optional<IvSet> analyze_guard(const FormulaPtr& f, std::string& key) {
        if (!f) return iv_all();
        switch (f->kind) {
        case Formula::Kind::True: return iv_all();
        case Formula::Kind::False: return IvSet{};
        case Formula::Kind::And: {
            IvSet acc = iv_all();
            for (const auto& a : f->args) {
                auto s = analyze_guard(a, key);
                if (!s) return std::nullopt;
                acc = iv_intersect(acc, *s);
            }
            return acc;
        }
        case Formula::Kind::Or: {
            IvSet acc;
            for (const auto& a : f->args) {
                auto s = analyze_guard(a, key);
                if (!s) return std::nullopt;
                acc = iv_union(acc, *s);
            }
            return acc;
        }
        case Formula::Kind::Not: {
            auto s = analyze_guard(f->args[0], key);
            if (!s) return std::nullopt;
            return iv_complement(*s);
        }
        case Formula::Kind::Cmp: {
            auto kl = const_value(f->lhs);
            auto kr = const_value(f->rhs);
            if (kl && kr) {
                bool truth;
                switch (f->op) {
                case CmpOp::Eq: truth = *kl == *kr; break;
                case CmpOp::Ne: truth = *kl != *kr; break;
                case CmpOp::Le: truth = *kl <= *kr; break;
                case CmpOp::Lt: truth = *kl < *kr; break;
                case CmpOp::Ge: truth = *kl >= *kr; break;
                default: truth = *kl > *kr; break;
                }
                return truth ? iv_all() : IvSet{};
            }
            if (!kl && !kr) return std::nullopt;
            ExprPtr d = kl ? f->rhs : f->lhs;
            long long k = kl ? *kl : *kr;
            CmpOp op = f->op;
            if (kl) { // k OP d  ->  d OP' k
                switch (op) {
                case CmpOp::Le: op = CmpOp::Ge; break;
                case CmpOp::Lt: op = CmpOp::Gt; break;
                case CmpOp::Ge: op = CmpOp::Le; break;
                case CmpOp::Gt: op = CmpOp::Lt; break;
                default: break;
                }
            }
            if (d->sort != Sort::ZZ) return std::nullopt;
            std::string dkey = print_expr(d);
            if (key.empty())
                key = dkey;
            else if (key != dkey)
                return std::nullopt;
            switch (op) {
            case CmpOp::Eq: return IvSet{{k, k}};
            case CmpOp::Ne: return iv_complement(IvSet{{k, k}});
            case CmpOp::Le: return IvSet{{LLONG_MIN, k}};
            case CmpOp::Lt:
                return k == LLONG_MIN ? IvSet{} : IvSet{{LLONG_MIN, k - 1}};
            case CmpOp::Ge: return IvSet{{k, LLONG_MAX}};
            default: return k == LLONG_MAX ? IvSet{} : IvSet{{k + 1, LLONG_MAX}};
            }
        }
        default: return std::nullopt;
        }
    }

    template <class Arm>
    void check_case_arms(const std::vector<Arm>& arms, const std::string& what, int line) {
        std::string key;
        std::vector<std::optional<IvSet>> sets;
        bool has_otherwise = false;
        for (const auto& arm : arms) {
            if (!arm.guard) {
                has_otherwise = true;
                sets.push_back(std::nullopt);
                continue;
            }
            sets.push_back(analyze_guard(arm.guard, key));
        }
        bool all_known = true;
        for (std::size_t i = 0; i < arms.size(); ++i) {
            if (!arms[i].guard) continue;
            if (!sets[i]) {
                all_known = false;
                continue;
            }
            for (std::size_t j = i + 1; j < arms.size(); ++j) {
                if (!arms[j].guard || !sets[j]) continue;
                if (!iv_intersect(*sets[i], *sets[j]).empty())
                    warn(what + ": guards " + std::to_string(i + 1) + " and " +
                             std::to_string(j + 1) + " overlap",
                         line);
            }
        }
        if (!has_otherwise) {
            if (all_known) {
                IvSet u;
                for (const auto& s : sets)
                    if (s) u = iv_union(u, *s);
                if (!(u.size() == 1 && u[0].first == LLONG_MIN && u[0].second == LLONG_MAX))
                    warn(what + ": guards do not cover all integers and there is no otherwise arm",
                         line);
            } else {
                note(what + ": coverage not statically decidable; unmatched points fail at "
                            "evaluation",
                     line);
            }
        }
    }

    void check_term(const MotTerm& t, const Scope& ambient) {
        Scope inner = ambient;
        for (const auto& v : t.count_vars) {
            if (v.sort != Sort::RF) error("counting variables must have residue sort");
            if (inner.find(v.name)) error("duplicate variable '" + v.name + "'");
            inner.vars.push_back(v);
        }
        check_formula(t.count_set, inner);
        check_expr(t.alpha, Sort::ZZ, ambient);
        for (const auto& b : t.betas) check_expr(b, Sort::ZZ, ambient);
        for (auto a : t.geoms)
            if (a == 0) error("geometric factor exponent must be nonzero");
    }

    void run(const ExpFunSpec& spec) {
        Scope ambient;
        std::set<std::string> seen;
        for (const auto& v : spec.vars) {
            if (!seen.insert(v.name).second) error("duplicate variable '" + v.name + "'");
            ambient.vars.push_back(v);
        }
        check_formula(spec.ambient, ambient);
        if (spec.summands.empty()) error("spec has no summands");
        for (const auto& s : spec.summands) {
            // an empty h_terms list is the constant coefficient 1
            for (const auto& t : s.h_terms) check_term(t, ambient);
            Scope osc = ambient;
            for (const auto& v : s.osc_vars) {
                if (v.sort != Sort::RF) error("oscillation variables must have residue sort");
                if (osc.find(v.name)) error("duplicate variable '" + v.name + "'");
                osc.vars.push_back(v);
            }
            check_formula(s.osc_set, osc);
            bool saw_otherwise = false;
            for (std::size_t i = 0; i < s.g.size(); ++i) {
                const auto& c = s.g[i];
                if (!c.guard) {
                    if (saw_otherwise) error("multiple otherwise arms in g");
                    if (i + 1 != s.g.size()) error("otherwise must be the last g case");
                    saw_otherwise = true;
                } else {
                    check_formula(c.guard, osc);
                }
                check_expr(c.value, Sort::VF, osc);
            }
            if (!s.g.empty()) check_case_arms(s.g, "g cases", 0);
            check_expr(s.e, Sort::RF, osc);
        }
        if (spec.declared_class) {
            if (*spec.declared_class == SpecClass::C && !spec.is_motivic())
                error("spec is declared C but has oscillation parts");
            if (*spec.declared_class == SpecClass::Ce && !spec.is_ce())
                error("spec is declared Ce but has a nonzero g case; not in Ce");
        }
    }
};

} // namespace

std::vector<Diagnostic> validate(const ExpFunSpec& spec) {
    Validator v;
    v.run(spec);
    return v.diags;
}

// ---------------------------------------------------------------------------
// conjugate square

namespace {

void collect_names(const FormulaPtr& f, std::set<std::string>& out);

void collect_names(const ExprPtr& e, std::set<std::string>& out) {
    if (!e) return;
    if (e->kind == Expr::Kind::Var) out.insert(e->name);
    for (const auto& a : e->args) collect_names(a, out);
    for (const auto& arm : e->arms) {
        collect_names(arm.guard, out);
        collect_names(arm.value, out);
    }
}

void collect_names(const FormulaPtr& f, std::set<std::string>& out) {
    if (!f) return;
    collect_names(f->lhs, out);
    collect_names(f->rhs, out);
    for (const auto& a : f->args) collect_names(a, out);
    collect_names(f->lo, out);
    collect_names(f->hi, out);
    if (f->body) {
        out.insert(f->qvar.name);
        collect_names(f->body, out);
    }
}

ExprPtr zero_term() {
    Expr e;
    e.kind = Expr::Kind::IntLit;
    e.ival = 0;
    e.sort = Sort::RF;
    return std::make_shared<const Expr>(std::move(e));
}

ExprPtr make_bin(Expr::Kind k, Sort s, ExprPtr a, ExprPtr b) {
    Expr e;
    e.kind = k;
    e.sort = s;
    e.args = {std::move(a), std::move(b)};
    return std::make_shared<const Expr>(std::move(e));
}

FormulaPtr make_and(FormulaPtr a, FormulaPtr b) {
    if (!a) return b;
    if (!b) return a;
    Formula f;
    f.kind = Formula::Kind::And;
    f.args = {std::move(a), std::move(b)};
    return std::make_shared<const Formula>(std::move(f));
}

} // namespace

ExpFunSpec conj_square(const ExpFunSpec& spec) {
    if (!spec.is_ce())
        throw Error("conjugate square requires all oscillation arguments g to be zero");

    std::set<std::string> used;
    for (const auto& v : spec.vars) used.insert(v.name);
    collect_names(spec.ambient, used);
    for (const auto& s : spec.summands) {
        for (const auto& v : s.osc_vars) used.insert(v.name);
        collect_names(s.osc_set, used);
        collect_names(s.e, used);
        for (const auto& t : s.h_terms) {
            for (const auto& v : t.count_vars) used.insert(v.name);
            collect_names(t.count_set, used);
            collect_names(t.alpha, used);
            for (const auto& b : t.betas) collect_names(b, used);
        }
    }
    int counter = 0;
    auto fresh = [&](const std::string& base) {
        for (;;) {
            std::string cand = base + "_q" + std::to_string(counter++);
            if (used.insert(cand).second) return cand;
        }
    };

    ExpFunSpec out;
    out.vars = spec.vars;
    out.ambient = spec.ambient;
    out.declared_class = SpecClass::Ce;
    out.source_name = spec.source_name.empty() ? "conj_square" : spec.source_name + "#conjsq";

    for (const auto& si : spec.summands) {
        for (const auto& ss : spec.summands) {
            ExpSummand sum;
            // oscillation set Y_i x Y_s' with the second copy renamed
            std::vector<std::pair<std::string, std::string>> rn;
            sum.osc_vars = si.osc_vars;
            for (const auto& v : ss.osc_vars) {
                VarDecl nv = v;
                nv.name = fresh(v.name);
                rn.push_back({v.name, nv.name});
                sum.osc_vars.push_back(nv);
            }
            sum.osc_set = make_and(si.osc_set, rename_vars(ss.osc_set, rn));
            // the coefficient is H_i * H_s (s-side counting variables renamed)
            for (const auto& ta : si.h_terms) {
                for (const auto& tb : ss.h_terms) {
                    MotTerm t;
                    t.count_vars = ta.count_vars;
                    std::vector<std::pair<std::string, std::string>> crn;
                    for (const auto& v : tb.count_vars) {
                        VarDecl nv = v;
                        nv.name = fresh(v.name);
                        crn.push_back({v.name, nv.name});
                        t.count_vars.push_back(nv);
                    }
                    t.count_set = make_and(ta.count_set, rename_vars(tb.count_set, crn));
                    if (ta.alpha && tb.alpha)
                        t.alpha = make_bin(Expr::Kind::Add, Sort::ZZ, ta.alpha, tb.alpha);
                    else
                        t.alpha = ta.alpha ? ta.alpha : tb.alpha;
                    t.betas = ta.betas;
                    t.betas.insert(t.betas.end(), tb.betas.begin(), tb.betas.end());
                    t.geoms = ta.geoms;
                    t.geoms.insert(t.geoms.end(), tb.geoms.begin(), tb.geoms.end());
                    sum.h_terms.push_back(std::move(t));
                }
            }
            // oscillation argument e_i(x, y) - e_s(x, y')
            ExprPtr ei = si.e ? si.e : zero_term();
            ExprPtr es = ss.e ? rename_vars(ss.e, rn) : zero_term();
            if (!si.e && !ss.e)
                sum.e = nullptr;
            else
                sum.e = make_bin(Expr::Kind::Sub, Sort::RF, ei, es);
            out.summands.push_back(std::move(sum));
        }
    }
    return out;
}

} // namespace motx
