#include "motx/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "motx/errors.hpp"

namespace motx {

const Value* Point::find(const std::string& name) const {
    for (const auto& kv : vals)
        if (kv.first == name) return &kv.second;
    return nullptr;
}

void Point::set(const std::string& name, Value v) {
    for (auto& kv : vals)
        if (kv.first == name) {
            kv.second = std::move(v);
            return;
        }
    vals.emplace_back(name, std::move(v));
}

std::string Point::str() const {
    std::string out;
    for (const auto& kv : vals) {
        if (!out.empty()) out += "; ";
        out += kv.first + " = ";
        if (std::holds_alternative<ValuedElem>(kv.second))
            out += std::get<ValuedElem>(kv.second).str();
        else if (std::holds_alternative<ResidueElem>(kv.second))
            out += std::get<ResidueElem>(kv.second).str();
        else
            out += std::to_string(std::get<long long>(kv.second));
    }
    return out;
}

namespace {

const Value& lookup(const Env& env, const std::string& name) {
    if (const Value* v = env.bindings.find(name)) return *v;
    throw EvalError("unbound variable '" + name + "'");
}

long long finite(const ZVal& z, const char* what) {
    if (z.inf) throw EvalError(std::string("ord of zero (infinite) used in ") + what);
    return z.v;
}

// three-way compare with inf = +infinity
int zz_cmp(const ZVal& a, const ZVal& b) {
    if (a.inf && b.inf) return 0;
    if (a.inf) return 1;
    if (b.inf) return -1;
    return a.v < b.v ? -1 : a.v > b.v ? 1 : 0;
}

} // namespace

template <class Arm>
const Arm& resolve_case(const std::vector<Arm>& arms, const Env& env,
                        const std::string& what) {
    std::size_t otherwise = arms.size();
    std::size_t first = arms.size(), second = arms.size();
    for (std::size_t i = 0; i < arms.size(); ++i) {
        if (!arms[i].guard) {
            otherwise = i;
        } else if (eval_formula(arms[i].guard, env)) {
            if (first == arms.size())
                first = i;
            else if (second == arms.size())
                second = i;
        }
    }
    if (second != arms.size())
        throw EvalError(what + " guards " + std::to_string(first + 1) + " and " +
                        std::to_string(second + 1) + " both hold at " + env.bindings.str());
    if (first != arms.size()) return arms[first];
    if (otherwise != arms.size()) return arms[otherwise];
    throw EvalError("unresolved " + what + ": no guard holds at " + env.bindings.str());
}

template const CaseArm& resolve_case<CaseArm>(const std::vector<CaseArm>&, const Env&,
                                              const std::string&);
template const GCase& resolve_case<GCase>(const std::vector<GCase>&, const Env&,
                                          const std::string&);

ValuedElem eval_vf(const ExprPtr& e, const Env& env) {
    const LocalField& F = *env.F;
    switch (e->kind) {
    case Expr::Kind::IntLit:
        return ValuedElem::from_integer(F, Integer((long)e->ival));
    case Expr::Kind::Uniformizer:
        return ValuedElem::uniformizer(F);
    case Expr::Kind::Var: {
        const Value& v = lookup(env, e->name);
        if (!std::holds_alternative<ValuedElem>(v))
            throw EvalError("variable '" + e->name + "' is not a valued-field value");
        return std::get<ValuedElem>(v);
    }
    case Expr::Kind::Add:
        return eval_vf(e->args[0], env) + eval_vf(e->args[1], env);
    case Expr::Kind::Sub:
        return eval_vf(e->args[0], env) - eval_vf(e->args[1], env);
    case Expr::Kind::Neg:
        return -eval_vf(e->args[0], env);
    case Expr::Kind::Mul:
        return eval_vf(e->args[0], env) * eval_vf(e->args[1], env);
    case Expr::Kind::Pow: {
        if (e->ival < 0) throw EvalError("negative power of a valued-field term");
        return eval_vf(e->args[0], env).pow((unsigned long)e->ival);
    }
    default:
        throw EvalError("expression is not a valued-field term");
    }
}

ResidueElem eval_rf(const ExprPtr& e, const Env& env) {
    const ResidueField& k = env.F->residue();
    switch (e->kind) {
    case Expr::Kind::IntLit: {
        long long m = e->ival % (long long)k.p();
        if (m < 0) m += k.p();
        return ResidueElem(k, (std::uint64_t)m);
    }
    case Expr::Kind::Var: {
        const Value& v = lookup(env, e->name);
        if (!std::holds_alternative<ResidueElem>(v))
            throw EvalError("variable '" + e->name + "' is not a residue value");
        return std::get<ResidueElem>(v);
    }
    case Expr::Kind::Ac:
        return eval_vf(e->args[0], env).ac();
    case Expr::Kind::Add:
        return eval_rf(e->args[0], env) + eval_rf(e->args[1], env);
    case Expr::Kind::Sub:
        return eval_rf(e->args[0], env) - eval_rf(e->args[1], env);
    case Expr::Kind::Neg:
        return -eval_rf(e->args[0], env);
    case Expr::Kind::Mul:
        return eval_rf(e->args[0], env) * eval_rf(e->args[1], env);
    case Expr::Kind::Pow: {
        if (e->ival < 0) throw EvalError("negative power of a residue term");
        return eval_rf(e->args[0], env).pow((std::uint64_t)e->ival);
    }
    default:
        throw EvalError("expression is not a residue term");
    }
}

ZVal eval_zz(const ExprPtr& e, const Env& env) {
    switch (e->kind) {
    case Expr::Kind::IntLit:
        return {false, e->ival};
    case Expr::Kind::Var: {
        const Value& v = lookup(env, e->name);
        if (!std::holds_alternative<long long>(v))
            throw EvalError("variable '" + e->name + "' is not an integer value");
        return {false, std::get<long long>(v)};
    }
    case Expr::Kind::Ord: {
        ValuedElem v = eval_vf(e->args[0], env);
        if (v.is_zero()) return {true, 0};
        return {false, v.ord()};
    }
    case Expr::Kind::Add:
        return {false, finite(eval_zz(e->args[0], env), "addition") +
                           finite(eval_zz(e->args[1], env), "addition")};
    case Expr::Kind::Sub:
        return {false, finite(eval_zz(e->args[0], env), "subtraction") -
                           finite(eval_zz(e->args[1], env), "subtraction")};
    case Expr::Kind::Neg:
        return {false, -finite(eval_zz(e->args[0], env), "negation")};
    case Expr::Kind::Mul:
        return {false, finite(eval_zz(e->args[0], env), "multiplication") *
                           finite(eval_zz(e->args[1], env), "multiplication")};
    case Expr::Kind::Pow: {
        long long b = finite(eval_zz(e->args[0], env), "power");
        if (e->ival < 0) throw EvalError("negative power of an integer term");
        long long r = 1;
        for (long long i = 0; i < e->ival; ++i) r *= b;
        return {false, r};
    }
    case Expr::Kind::Case:
        return eval_zz(resolve_case(e->arms, env, "case").value, env);
    default:
        throw EvalError("expression is not an integer term");
    }
}

bool eval_formula(const FormulaPtr& f, const Env& env) {
    switch (f->kind) {
    case Formula::Kind::True:
        return true;
    case Formula::Kind::False:
        return false;
    case Formula::Kind::Cmp: {
        Sort s = f->lhs->sort;
        if (s == Sort::VF) {
            bool eq = eval_vf(f->lhs, env) == eval_vf(f->rhs, env);
            if (f->op == CmpOp::Eq) return eq;
            if (f->op == CmpOp::Ne) return !eq;
            throw EvalError("ordered comparison of valued-field terms");
        }
        if (s == Sort::RF) {
            bool eq = eval_rf(f->lhs, env) == eval_rf(f->rhs, env);
            if (f->op == CmpOp::Eq) return eq;
            if (f->op == CmpOp::Ne) return !eq;
            throw EvalError("ordered comparison of residue terms");
        }
        int c = zz_cmp(eval_zz(f->lhs, env), eval_zz(f->rhs, env));
        switch (f->op) {
        case CmpOp::Eq: return c == 0;
        case CmpOp::Ne: return c != 0;
        case CmpOp::Le: return c <= 0;
        case CmpOp::Lt: return c < 0;
        case CmpOp::Ge: return c >= 0;
        case CmpOp::Gt: return c > 0;
        }
        return false;
    }
    case Formula::Kind::Cong: {
        long long a = finite(eval_zz(f->lhs, env), "a congruence");
        long long b = finite(eval_zz(f->rhs, env), "a congruence");
        long long m = f->modulus;
        if (m <= 0) throw EvalError("nonpositive congruence modulus");
        long long r = (a - b) % m;
        return r == 0;
    }
    case Formula::Kind::And:
        for (const auto& g : f->args)
            if (!eval_formula(g, env)) return false;
        return true;
    case Formula::Kind::Or:
        for (const auto& g : f->args)
            if (eval_formula(g, env)) return true;
        return false;
    case Formula::Kind::Not:
        return !eval_formula(f->args[0], env);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
        bool want = (f->kind == Formula::Kind::Exists);
        Env child = env;
        if (f->qvar.sort == Sort::RF) {
            const ResidueField& k = env.F->residue();
            if (k.q() > env.limits->max_enum)
                throw CapacityError("residue quantifier range exceeds max_enum");
            for (std::uint64_t i = 0; i < k.q(); ++i) {
                child.bindings.set(f->qvar.name, ResidueElem::from_index(k, i));
                if (eval_formula(f->body, child) == want) return want;
            }
            return !want;
        }
        long long lo = finite(eval_zz(f->lo, env), "a quantifier bound");
        long long hi = finite(eval_zz(f->hi, env), "a quantifier bound");
        if (hi >= lo && (std::uint64_t)(hi - lo + 1) > env.limits->max_enum)
            throw CapacityError("integer quantifier range exceeds max_enum");
        for (long long z = lo; z <= hi; ++z) {
            child.bindings.set(f->qvar.name, z);
            if (eval_formula(f->body, child) == want) return want;
        }
        return !want;
    }
    }
    return false;
}

std::vector<std::vector<ResidueElem>> enum_set(const std::vector<VarDecl>& vars,
                                               const FormulaPtr& f, const Env& env) {
    const ResidueField& k = env.F->residue();
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (total > env.limits->max_enum / std::max<std::uint64_t>(k.q(), 1))
            throw CapacityError("residue tuple enumeration exceeds max_enum (" +
                                std::to_string(env.limits->max_enum) + ")");
        total *= k.q();
    }
    if (total > env.limits->max_enum)
        throw CapacityError("residue tuple enumeration exceeds max_enum");

    std::vector<std::vector<ResidueElem>> out;
    Env child = env;
    std::vector<ResidueElem> tuple(vars.size(), ResidueElem(k));
    for (std::uint64_t rank = 0; rank < total; ++rank) {
        std::uint64_t r = rank;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            tuple[i] = ResidueElem::from_index(k, r % k.q());
            r /= k.q();
            child.bindings.set(vars[i].name, tuple[i]);
        }
        if (!f || eval_formula(f, child)) out.push_back(tuple);
    }
    return out;
}

namespace {

Rational eval_term(const MotTerm& t, const Env& env) {
    const std::uint64_t q = env.F->q();
    Rational v(1);
    if (!t.count_vars.empty() || t.count_set) {
        auto tuples = enum_set(t.count_vars, t.count_set, env);
        v = Rational((unsigned long)tuples.size());
        if (v == 0) return v;
    }
    if (t.alpha) {
        ZVal a = eval_zz(t.alpha, env);
        if (a.inf) throw EvalError("power exponent is ord of zero at " + env.bindings.str());
        v *= rational_pow(Integer((unsigned long)q), (long)a.v);
    }
    for (const auto& b : t.betas) {
        ZVal z = eval_zz(b, env);
        if (z.inf) throw EvalError("linear factor is ord of zero at " + env.bindings.str());
        v *= Rational((long)z.v);
    }
    for (long long a : t.geoms) {
        Rational ga = rational_pow(Integer((unsigned long)q), (long)a);
        if (ga == 1) throw EvalError("geometric factor with zero exponent");
        v *= Rational(1) / (Rational(1) - ga);
    }
    return v;
}

} // namespace

Rational eval_summand_h(const ExpSummand& s, const Env& env) {
    if (s.h_terms.empty()) return Rational(1); // missing H block means weight 1
    Rational total(0);
    for (const auto& t : s.h_terms) total += eval_term(t, env);
    return total;
}

Rational eval_motfun(const MotFunSpec& spec, const LocalField& F, const Point& x,
                     const Limits& lim) {
    Env env{&F, &lim, x};
    if (spec.ambient && !eval_formula(spec.ambient, env)) return Rational(0);
    Rational total(0);
    for (const auto& t : spec.terms) total += eval_term(t, env);
    return total;
}

Cyclotomic eval_expfun(const ExpFunSpec& spec, const LocalField& F, const Character& psi,
                       const Point& x, const Limits& lim) {
    if (&psi.field() != &F) throw EvalError("character belongs to a different field");
    Env env{&F, &lim, x};
    if (spec.ambient && !eval_formula(spec.ambient, env)) return Cyclotomic(0);

    const ResidueField& k = F.residue();
    Cyclotomic total(0);
    for (const auto& s : spec.summands) {
        Rational hi = eval_summand_h(s, env);
        if (hi == 0) continue;
        Cyclotomic osc(0);
        auto tuples = enum_set(s.osc_vars, s.osc_set, env);
        Env yenv = env;
        for (const auto& tup : tuples) {
            for (std::size_t i = 0; i < s.osc_vars.size(); ++i)
                yenv.bindings.set(s.osc_vars[i].name, tup[i]);
            ValuedElem g = s.g.empty() ? ValuedElem::zero(F)
                                       : eval_vf(resolve_case(s.g, yenv, "g case").value, yenv);
            ResidueElem e = s.e ? eval_rf(s.e, yenv) : ResidueElem(k);
            osc += psi(g, e);
        }
        total += hi * osc;
    }
    return total;
}

// --- fiber integration -----------------------------------------------------

namespace {

struct Cell {
    Value value;
    Rational weight;
    long level = 0;
};

std::vector<Cell> vf_cells(const LocalField& F, const VfWindow& w) {
    if (w.digits < 1 || w.digits > F.precision())
        throw EvalError("fiber digit count out of range");
    if (w.vmax < w.vmin) throw EvalError("empty valuation window");
    const ResidueField& k = F.residue();
    const std::uint64_t q = k.q();
    std::vector<Cell> cells;
    std::vector<ResidueElem> digits((std::size_t)w.digits, ResidueElem(k));
    for (long val = w.vmin; val <= w.vmax; ++val) {
        Rational weight = rational_pow(Integer((unsigned long)q), -(long)(val + w.digits));
        std::uint64_t combos = 1;
        for (int i = 1; i < w.digits; ++i) combos *= q;
        for (std::uint64_t lead = 1; lead < q; ++lead) {
            for (std::uint64_t rest = 0; rest < combos; ++rest) {
                digits[0] = ResidueElem::from_index(k, lead);
                std::uint64_t r = rest;
                for (int i = 1; i < w.digits; ++i) {
                    digits[(std::size_t)i] = ResidueElem::from_index(k, r % q);
                    r /= q;
                }
                cells.push_back({ValuedElem::from_digits(F, val, digits), weight,
                                 val - w.vmin});
            }
        }
    }
    if (w.include_tail) {
        // the remaining ball pi^{vmax+1} O as a single cell; its measure is
        // exact and its representative is the smallest-norm corner
        cells.push_back({ValuedElem::uniformizer(F, w.vmax + 1),
                         rational_pow(Integer((unsigned long)F.q()), -(long)(w.vmax + 1)),
                         w.vmax + 1 - w.vmin});
    }
    return cells;
}

std::vector<Cell> zz_cells(const ZzWindow& w) {
    if (w.hi < w.lo) throw EvalError("empty integer window");
    std::vector<Cell> cells;
    for (long long z = w.lo; z <= w.hi; ++z)
        cells.push_back({z, Rational(1), (long)std::llabs(z)});
    return cells;
}

std::vector<Cell> rf_cells(const ResidueField& k) {
    std::vector<Cell> cells;
    for (std::uint64_t i = 0; i < k.q(); ++i)
        cells.push_back({ResidueElem::from_index(k, i), Rational(1), 0});
    return cells;
}

} // namespace

IntegralResult integrate_fiber(const ExpFunSpec& spec, const LocalField& F,
                               const Character& psi, const Point& outer,
                               const EvalDomain& dom, const Limits& lim) {
    // classify every spec variable
    std::vector<std::pair<std::string, std::vector<Cell>>> axes;
    for (const auto& v : spec.vars) {
        if (outer.find(v.name)) continue;
        auto vf = std::find_if(dom.vf.begin(), dom.vf.end(),
                               [&](const auto& kv) { return kv.first == v.name; });
        auto zz = std::find_if(dom.zz.begin(), dom.zz.end(),
                               [&](const auto& kv) { return kv.first == v.name; });
        if (vf != dom.vf.end()) {
            if (v.sort != Sort::VF)
                throw EvalError("variable '" + v.name + "' is not a valued-field variable");
            axes.emplace_back(v.name, vf_cells(F, vf->second));
        } else if (zz != dom.zz.end()) {
            if (v.sort != Sort::ZZ)
                throw EvalError("variable '" + v.name + "' is not an integer variable");
            axes.emplace_back(v.name, zz_cells(zz->second));
        } else if (v.sort == Sort::RF) {
            axes.emplace_back(v.name, rf_cells(F.residue()));
        } else {
            throw EvalError("fiber variable '" + v.name + "' has no window");
        }
    }
    for (const auto& kv : dom.vf)
        if (std::none_of(spec.vars.begin(), spec.vars.end(),
                         [&](const VarDecl& v) { return v.name == kv.first; }))
            throw EvalError("window for unknown variable '" + kv.first + "'");
    for (const auto& kv : dom.zz)
        if (std::none_of(spec.vars.begin(), spec.vars.end(),
                         [&](const VarDecl& v) { return v.name == kv.first; }))
            throw EvalError("window for unknown variable '" + kv.first + "'");

    std::uint64_t total = 1;
    for (const auto& ax : axes) {
        if (ax.second.empty()) throw EvalError("empty fiber axis '" + ax.first + "'");
        if (total > lim.max_enum / ax.second.size())
            throw CapacityError("fiber cell count exceeds max_enum");
        total *= ax.second.size();
    }

    IntegralResult res;
    std::map<long, Cyclotomic> by_level;
    Point pt = outer;
    for (std::uint64_t rank = 0; rank < total; ++rank) {
        std::uint64_t r = rank;
        Rational weight(1);
        long level = 0;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            const Cell& c = axes[i].second[r % axes[i].second.size()];
            r /= axes[i].second.size();
            pt.set(axes[i].first, c.value);
            weight *= c.weight;
            level += c.level;
        }
        Cyclotomic v = eval_expfun(spec, F, psi, pt, lim);
        if (!v.is_zero()) {
            Cyclotomic wv = weight * v;
            res.exact += wv;
            by_level[level] += wv;
        }
        ++res.cells;
    }
    res.approx = res.exact.to_complex();

    // decay flag: the deepest shell must not dominate the one before it
    if (by_level.size() < 2) {
        res.tail_ok = true;
        res.note = "fewer than two contributing shells";
    } else {
        auto it = by_level.rbegin();
        double last = std::abs(it->second.to_complex());
        ++it;
        double prev = std::abs(it->second.to_complex());
        double eps = 1e-12 * (1.0 + std::abs(res.approx));
        res.tail_ok = (last < prev) || (last <= eps);
        std::ostringstream os;
        os << "deepest shells |S| = " << prev << ", " << last;
        res.note = os.str();
    }
    return res;
}

} // namespace motx
