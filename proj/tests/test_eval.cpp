#include "doctest.h"

#include <map>
#include <string>

#include "motx/errors.hpp"
#include "motx/eval.hpp"
#include "motx/parser.hpp"

using namespace motx;

namespace {

const LocalField& EQ5 = LocalField::get(FieldKind::EqualChar, 5, 1, 8);
const LocalField& MX5 = LocalField::get(FieldKind::MixedChar, 5, 1, 8);
const LocalField& EQ7 = LocalField::get(FieldKind::EqualChar, 7, 1, 8);
const LocalField& MX7 = LocalField::get(FieldKind::MixedChar, 7, 1, 8);
const LocalField& EQ9 = LocalField::get(FieldKind::EqualChar, 3, 2, 8);

ExpFunSpec fixture(const std::string& stem) {
    return parse_spec_file(std::string(MOTX_FIXTURE_DIR) + "/" + stem + ".spec");
}

Point pt_x(const LocalField& F, const std::string& lit) {
    Point p;
    p.set("x", parse_element(F, lit));
    return p;
}

// independent oracle: #square roots of u in the residue field by brute force
int sqrt_count(const ResidueField& k, const ResidueElem& u) {
    int n = 0;
    for (std::uint64_t i = 0; i < k.q(); ++i) {
        ResidueElem w = ResidueElem::from_index(k, i);
        if (w * w == u) ++n;
    }
    return n;
}

} // namespace

TEST_CASE("constant specs evaluate to their constant") {
    for (const LocalField* F : {&EQ5, &MX7, &EQ9}) {
        Character psi = standard_psi(*F);
        ExpFunSpec c3 = fixture("ce_const");
        CHECK(eval_expfun(c3, *F, psi, pt_x(*F, "1*t^0")) == Cyclotomic(3));
        // also through the counting-sum path
        CHECK(eval_motfun(c3.as_motfun(), *F, pt_x(*F, "2*t^1")) == Rational(3));
        CHECK(eval_expfun(fixture("g_one"), *F, psi, pt_x(*F, "1*t^0")) ==
              Cyclotomic(1));
    }
}

TEST_CASE("counting matches a brute-force square-root table") {
    ExpFunSpec spec = fixture("ce_count");
    MotFunSpec mot = spec.as_motfun();
    for (const LocalField* F : {&EQ5, &MX5, &EQ7, &EQ9}) {
        const ResidueField& k = F->residue();
        for (std::uint64_t i = 1; i < k.q(); ++i) {
            ResidueElem u = ResidueElem::from_index(k, i);
            Point p;
            p.set("x", ValuedElem::lift(*F, u));
            CHECK(eval_motfun(mot, *F, p) == Rational(sqrt_count(k, u)));
        }
        // outside the ambient set ord(x) = 0 the value is 0
        Point off;
        off.set("x", ValuedElem::uniformizer(*F, 1));
        CHECK(eval_motfun(mot, *F, off) == Rational(0));
    }
}

TEST_CASE("geometric factors and beta products are exact rationals") {
    // ord(x) * q^ord(x) / (1 - q^-2) at ord(x) = 2, q = 5: 2*25/(24/25) = 625/12
    ExpFunSpec spec = fixture("beta_geom");
    for (const LocalField* F : {&EQ5, &MX5}) {
        CHECK(eval_motfun(spec.as_motfun(), *F, pt_x(*F, "1*t^2")) ==
              Rational(625, 12));
        CHECK(eval_motfun(spec.as_motfun(), *F, pt_x(*F, "3*t^0")) == Rational(0));
    }
}

TEST_CASE("case terms select exactly one arm") {
    ExpFunSpec spec = fixture("zz_case"); // q^|z|
    for (const LocalField* F : {&EQ7, &MX7}) {
        for (long long z : {-3LL, 0LL, 2LL}) {
            Point p;
            p.set("z", z);
            long long a = z < 0 ? -z : z;
            Rational want(1);
            for (long long i = 0; i < a; ++i) want *= Rational(7);
            CHECK(eval_motfun(spec.as_motfun(), *F, p) == want);
        }
    }
    // overlapping guards raise EvalError at the point where both hold
    std::vector<VarDecl> scope{{"z", Sort::ZZ}};
    ExprPtr overlap = parse_term(
        "case { when z >= 0 => z; when z <= 0 => -z }", scope, Sort::ZZ);
    Env env;
    env.F = &EQ5;
    Limits lim;
    env.limits = &lim;
    env.bindings.set("z", 0LL);
    CHECK_THROWS_AS(eval_zz(overlap, env), EvalError);
    env.bindings.set("z", 3LL);
    CHECK(eval_zz(overlap, env).v == 3);
    // a gap with no otherwise arm is an error too
    ExprPtr gap = parse_term("case { when z >= 1 => z }", scope, Sort::ZZ);
    env.bindings.set("z", 0LL);
    CHECK_THROWS_AS(eval_zz(gap, env), EvalError);
}

TEST_CASE("ord of zero is infinite in formulas and an error in arithmetic") {
    Env env;
    env.F = &EQ5;
    Limits lim;
    env.limits = &lim;
    env.bindings.set("x", ValuedElem::zero(EQ5));
    std::vector<VarDecl> scope{{"x", Sort::VF}};
    // comparisons treat ord(0) as +infinity
    CHECK(eval_formula(parse_formula("ord(x) >= 100", scope), env));
    CHECK_FALSE(eval_formula(parse_formula("ord(x) <= 100", scope), env));
    CHECK(eval_formula(parse_formula("ord(x) = ord(x)", scope), env));
    CHECK_FALSE(eval_formula(parse_formula("ord(x) = 0", scope), env));
    // arithmetic cannot absorb the sentinel
    CHECK_THROWS_AS(eval_zz(parse_term("ord(x) + 1", scope, Sort::ZZ), env),
                    EvalError);
    ZVal z = eval_zz(parse_term("ord(x)", scope, Sort::ZZ), env);
    CHECK(z.inf);
    // ac(0) = 0
    CHECK(eval_rf(parse_term("ac(x)", scope, Sort::RF), env).is_zero());
}

TEST_CASE("congruence atoms reduce integer values") {
    Env env;
    env.F = &EQ5;
    Limits lim;
    env.limits = &lim;
    std::vector<VarDecl> scope{{"z", Sort::ZZ}};
    env.bindings.set("z", 7LL);
    CHECK(eval_formula(parse_formula("z = 1 mod 3", scope), env));
    CHECK_FALSE(eval_formula(parse_formula("z = 2 mod 3", scope), env));
    env.bindings.set("z", -5LL);
    CHECK(eval_formula(parse_formula("z = 1 mod 3", scope), env));
}

TEST_CASE("bounded quantifier specs evaluate as indicators") {
    ExpFunSpec spec = fixture("quant"); // even valuation in [0, 8]
    MotFunSpec mot = spec.as_motfun();
    for (long e = 0; e <= 9; ++e) {
        Point p;
        p.set("x", ValuedElem::uniformizer(EQ5, e));
        bool in = e % 2 == 0 && e <= 8;
        CHECK(eval_motfun(mot, EQ5, p) == Rational(in ? 1 : 0));
    }
}

TEST_CASE("enum_set enumerates the definable residue tuples") {
    Env env;
    env.F = &EQ7;
    Limits lim;
    env.limits = &lim;
    std::vector<VarDecl> vars{{"y", Sort::RF}};
    auto all = enum_set(vars, nullptr, env);
    CHECK(all.size() == 7);
    auto nz = enum_set(vars, parse_formula("not (y = 0)", vars), env);
    CHECK(nz.size() == 6);
    // squares of F_7: {0, 1, 2, 4}
    std::vector<VarDecl> vars2{{"y", Sort::RF}, {"w", Sort::RF}};
    auto sq = enum_set(vars2, parse_formula("w*w = y", vars2), env);
    CHECK(sq.size() == 7); // one zero pair plus two roots for each of 3 squares
    Limits tight;
    tight.max_enum = 10;
    env.limits = &tight;
    CHECK_THROWS_AS(enum_set(vars2, nullptr, env), CapacityError);
}

TEST_CASE("oscillating fixtures match hand-computed values") {
    // sum over y != 0 of e(tr(y)) is -1 in every residue field
    for (const LocalField* F : {&EQ5, &MX7, &EQ9}) {
        Character psi = standard_psi(*F);
        CHECK(eval_expfun(fixture("ce_resosc"), *F, psi, Point{}) == Cyclotomic(-1));
    }
    // the Gauss sum oracle: |sum_y e(tr(y^2))|^2 = q
    for (const LocalField* F : {&EQ5, &MX5, &EQ7, &MX7, &EQ9}) {
        Character psi = standard_psi(*F);
        Cyclotomic g = eval_expfun(fixture("gauss"), *F, psi, Point{});
        CHECK(g.abs_sq() == Cyclotomic(static_cast<long>(F->q())));
    }
    // 1 + psi(x) across the whole depth-1 family, including one member
    // that is provably nontrivial at the sample point
    ExpFunSpec pm = fixture("polar_mix");
    ValuedElem x = parse_element(EQ5, "2*t^-1");
    bool saw_nontrivial = false;
    for (const Character& psi : enumerate_characters(EQ5, 1)) {
        CHECK(eval_expfun(pm, EQ5, psi, pt_x(EQ5, "2*t^-1")) ==
              Cyclotomic(1) + psi(x));
        if (psi(x) != Cyclotomic(1)) saw_nontrivial = true;
    }
    CHECK(saw_nontrivial);
    // outside X the value is 0
    CHECK(eval_expfun(pm, EQ5, standard_psi(EQ5), pt_x(EQ5, "1*t^0")) ==
          Cyclotomic(0));
}

TEST_CASE("guarded oscillation arguments take the active arm") {
    ExpFunSpec spec = fixture("g_case");
    ValuedElem x = parse_element(EQ5, "3*t^-1");
    for (const Character& psi : enumerate_characters(EQ5, 1)) {
        // polar locus: the first arm, psi(x)
        CHECK(eval_expfun(spec, EQ5, psi, pt_x(EQ5, "3*t^-1")) == psi(x));
        // integral locus: the otherwise arm, psi(0) = 1
        CHECK(eval_expfun(spec, EQ5, psi, pt_x(EQ5, "2*t^2")) == Cyclotomic(1));
    }
}

TEST_CASE("the full fixture combines every part") {
    // (q^z + 2) * sum_{y != 0} psi(x + lift(y ac(x))) = -(q^z + 2) psi(x)
    // because the shifts y ac(x) run over all nonzero residues
    ExpFunSpec spec = fixture("full");
    for (const LocalField* F : {&EQ5, &MX5}) {
        Character psi = character_at(*F, 1, 0);
        for (long long z : {0LL, 2LL}) {
            Point p;
            p.set("x", parse_element(*F, "1*t^-1"));
            p.set("z", z);
            long long qz = 1;
            for (long long i = 0; i < z; ++i) qz *= 5;
            Cyclotomic want = Cyclotomic(-(qz + 2)) * psi(parse_element(*F, "1*t^-1"));
            CHECK(eval_expfun(spec, *F, psi, p) == want);
        }
    }
}

TEST_CASE("depth errors report the needed depth") {
    ExpFunSpec spec = fixture("polar1");
    Character psi = standard_psi(EQ5);
    try {
        eval_expfun(spec, EQ5, psi, pt_x(EQ5, "1*t^-2"));
        FAIL("expected DepthError");
    } catch (const DepthError& e) {
        CHECK(e.required_depth == 2);
    }
    CHECK(eval_expfun(spec, EQ5, character_at(EQ5, 2, 0), pt_x(EQ5, "1*t^-2"))
              .abs_sq() == Cyclotomic(1));
}

TEST_CASE("missing bindings and wrong sorts are evaluation errors") {
    ExpFunSpec spec = fixture("ce_count");
    Point empty;
    CHECK_THROWS_AS(eval_motfun(spec.as_motfun(), EQ5, empty), EvalError);
    Point wrong;
    wrong.set("x", 3LL); // ZZ binding for a VF variable
    CHECK_THROWS_AS(eval_motfun(spec.as_motfun(), EQ5, wrong), EvalError);
}

TEST_CASE("fiber integration uses measure(O) = 1") {
    // integrand 1 on O: exact volume 1 once the tail cell is included
    ExpFunSpec one = parse_spec(
        "class: C\nvars: y: VF\nset X: ord(y) >= 0\nsummand:\nH:\nbeta: 1\n",
        "vol");
    for (const LocalField* F : {&EQ5, &MX7}) {
        EvalDomain dom;
        dom.vf.push_back({"y", VfWindow{0, 4, 1, true}});
        IntegralResult r = integrate_fiber(one, *F, standard_psi(*F), Point{}, dom);
        CHECK(r.exact == Cyclotomic(1));
        CHECK(r.tail_ok);
    }
}

TEST_CASE("fiber integration reproduces the |y| moment") {
    // int_O |y| dy = sum_v q^-v (1 - 1/q) q^-v = (1 - 1/q) / (1 - q^-2) = q/(q+1)
    ExpFunSpec absy = parse_spec(
        "class: C\nvars: y: VF\nset X: ord(y) >= 0\nsummand:\nH:\nalpha: -ord(y)\n",
        "absy");
    for (const LocalField* F : {&EQ5, &EQ7}) {
        EvalDomain dom;
        dom.vf.push_back({"y", VfWindow{0, 14, 1, true}});
        IntegralResult r = integrate_fiber(absy, *F, standard_psi(*F), Point{}, dom);
        Rational q(static_cast<long>(F->q()));
        Rational want = q / (q + 1);
        Rational got = r.exact.rational_value();
        Rational err = got - want;
        if (err < 0) err = -err;
        // the integrand forces a truncated tail: q^{-2V-2}/(1+1/q) remains
        CHECK(err < Rational(1, 1000000000));
        CHECK(r.cells > 0);
    }
}

TEST_CASE("counting measure on integer fibers") {
    // sum over z in [1, 4] of q^-z at q = 5, from the motivic side
    ExpFunSpec spec = parse_spec(
        "class: C\nvars: z: ZZ\nsummand:\nH:\nalpha: -z\n", "zsum");
    EvalDomain dom;
    dom.zz.push_back({"z", ZzWindow{1, 4}});
    IntegralResult r = integrate_fiber(spec, EQ5, standard_psi(EQ5), Point{}, dom);
    CHECK(r.exact == Cyclotomic(Rational(1, 5) + Rational(1, 25) + Rational(1, 125) +
                                Rational(1, 625)));
}

TEST_CASE("residue fibers enumerate and oscillate") {
    // sum over all y: e(tr(y)) = 0
    ExpFunSpec spec = parse_spec(
        "class: Ce\nvars: y: RF\nsummand:\ne: y\n", "rsum");
    IntegralResult r = integrate_fiber(spec, EQ7, standard_psi(EQ7), Point{},
                                       EvalDomain{});
    CHECK(r.exact == Cyclotomic(0));
    CHECK(r.cells == 7);
}

TEST_CASE("conjugate square evaluates to the squared modulus") {
    // |H(psi)|^2 computed two ways: conj_square spec vs. abs_sq of the value
    ExpFunSpec pair = parse_spec(
        "class: Ce\n"
        "vars:\n"
        "summand:\n"
        "Y (y: RF): true\n"
        "e: y*y\n"
        "summand:\n"
        "Y (y: RF): not (y = 0)\n"
        "e: y\n",
        "pair");
    ExpFunSpec gauss = fixture("gauss");
    for (const LocalField* F : {&EQ5, &MX5, &EQ7, &EQ9}) {
        Character psi = standard_psi(*F);
        for (const ExpFunSpec* s : {&pair, &gauss}) {
            Cyclotomic v = eval_expfun(*s, *F, psi, Point{});
            CHECK(eval_expfun(conj_square(*s), *F, psi, Point{}) == v.abs_sq());
        }
        // the Gauss sum square is the field size itself
        CHECK(eval_expfun(conj_square(gauss), *F, psi, Point{}) ==
              Cyclotomic(Rational(static_cast<long>(F->q()))));
    }
}
