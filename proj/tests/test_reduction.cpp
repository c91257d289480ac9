#include "doctest.h"

#include <string>
#include <vector>

#include "motx/errors.hpp"
#include "motx/parser.hpp"
#include "motx/reduction.hpp"

using namespace motx;

namespace {

const LocalField& EQ5 = LocalField::get(FieldKind::EqualChar, 5, 1, 8);
const LocalField& MX5 = LocalField::get(FieldKind::MixedChar, 5, 1, 8);
const LocalField& EQ7 = LocalField::get(FieldKind::EqualChar, 7, 1, 8);
const LocalField& MX7 = LocalField::get(FieldKind::MixedChar, 7, 1, 8);

ExpFunSpec fixture(const std::string& stem) {
    return parse_spec_file(std::string(MOTX_FIXTURE_DIR) + "/" + stem + ".spec");
}

Point pt_x(const LocalField& F, const std::string& lit) {
    Point p;
    p.set("x", parse_element(F, lit));
    return p;
}

// the decomposition must reproduce the sum for every family member
void check_reconstruction(const ExpFunSpec& spec, const LocalField& F, const Point& x,
                          int depth) {
    PolarDecomposition d = polar_decompose(spec, F, x, depth);
    for (const Character& psi : enumerate_characters(F, depth)) {
        CHECK(reconstruct(d, psi) == eval_expfun(spec, F, psi, x));
    }
}

} // namespace

TEST_CASE("single oscillating term decomposes to itself") {
    for (const LocalField* F : {&EQ5, &MX5, &EQ7, &MX7}) {
        ExpFunSpec spec = fixture("polar1");
        Point x = pt_x(*F, "2*t^-1");
        PolarDecomposition d = polar_decompose(spec, *F, x, 1);
        REQUIRE(d.size() == 1);
        CHECK(d.entries[0].g == parse_element(*F, "2*t^-1"));
        CHECK(d.entries[0].h.size() == 1);
        CHECK(d.entries[0].h[0] == Cyclotomic(1));
        check_reconstruction(spec, *F, x, 1);
    }
}

TEST_CASE("integral and polar parts split into separate entries") {
    for (const LocalField* F : {&EQ5, &MX7}) {
        ExpFunSpec spec = fixture("polar_mix");
        Point x = pt_x(*F, "1*t^-1");
        PolarDecomposition d = polar_decompose(spec, *F, x, 1);
        REQUIRE(d.size() == 2);
        // one entry integral (g = 0 representative), one polar
        int zeros = 0, polars = 0;
        for (const auto& e : d.entries) {
            if (e.g.is_zero())
                ++zeros;
            else if (e.g.ord() < 0)
                ++polars;
        }
        CHECK(zeros == 1);
        CHECK(polars == 1);
        check_reconstruction(spec, *F, x, 1);
    }
}

TEST_CASE("merging a class shifts the mean into the residue factor") {
    // psi(x) + psi(x + 1) at x = t^-1 in F_5((t)): both arguments share the
    // polar class of x; the mean is x + 3 because (0 + 1)/2 = 3 mod 5, and
    // h' = psi(-3) + psi(-2) = z5^3 + z5^2 over the standard member
    ExpFunSpec spec = fixture("merge");
    Point x = pt_x(EQ5, "1*t^-1");
    PolarDecomposition d = polar_decompose(spec, EQ5, x, 1);
    REQUIRE(d.size() == 1);
    CHECK(d.entries[0].g == parse_element(EQ5, "1*t^-1 + 3*t^0"));
    Cyclotomic want = Cyclotomic::root_of_unity(5, 3) + Cyclotomic::root_of_unity(5, 2);
    CHECK(d.entries[0].h[0] == want);
    check_reconstruction(spec, EQ5, x, 1);
}

TEST_CASE("all shifted copies reconstruct across both kinds") {
    for (const LocalField* F : {&EQ5, &MX5, &EQ7, &MX7}) {
        for (const char* stem : {"merge", "polar2", "gcomb", "full"}) {
            CAPTURE(stem);
            ExpFunSpec spec = fixture(stem);
            Point x = pt_x(*F, "3*t^-1");
            x.set("z", 1LL); // used by the full fixture, ignored elsewhere
            check_reconstruction(spec, *F, x, 1);
        }
    }
}

TEST_CASE("deeper polar parts need deeper families") {
    ExpFunSpec spec = fixture("polar_depth2"); // g = x^2
    Point x = pt_x(EQ5, "1*t^-1");
    try {
        polar_decompose(spec, EQ5, x, 1);
        FAIL("expected DepthError");
    } catch (const DepthError& e) {
        CHECK(e.required_depth == 2);
    }
    PolarDecomposition d = polar_decompose(spec, EQ5, x, 2);
    CHECK(d.size() == 1);
    CHECK(d.entries[0].g == parse_element(EQ5, "1*t^-2"));
    check_reconstruction(spec, EQ5, x, 2);

    std::vector<const ExpFunSpec*> specs{&spec};
    std::vector<Point> sample{x, pt_x(EQ5, "2*t^0")};
    CHECK(required_depth(specs, EQ5, sample) == 2);
    ExpFunSpec flat = fixture("polar1");
    std::vector<const ExpFunSpec*> fspecs{&flat};
    CHECK(required_depth(fspecs, EQ5, sample) == 1);
    ExpFunSpec consts = fixture("ce_const");
    std::vector<const ExpFunSpec*> cspecs{&consts};
    CHECK(required_depth(cspecs, EQ5, sample) == 0);
}

TEST_CASE("a class of size divisible by p cannot take a mean") {
    // five shifted copies psi(x), psi(x+1), ..., psi(x+4) in F_5((t)) fall
    // into one class of size 5; the averaging step must refuse
    ExpFunSpec spec = parse_spec(
        "class: Cexp\n"
        "vars: x: VF\n"
        "set X: ord(x) <= -1\n"
        "summand:\ng: x\n"
        "summand:\ng: x + 1\n"
        "summand:\ng: x + 2\n"
        "summand:\ng: x + 3\n"
        "summand:\ng: x + 4\n",
        "mean5");
    Point x = pt_x(EQ5, "1*t^-1");
    CHECK_THROWS_WITH_AS(polar_decompose(spec, EQ5, x, 1),
                         doctest::Contains("mean shift impossible"), EvalError);
    // the same five copies over q = 7 average fine
    Point x7 = pt_x(EQ7, "1*t^-1");
    PolarDecomposition d = polar_decompose(spec, EQ7, x7, 1);
    CHECK(d.size() == 1);
    for (const Character& psi : enumerate_characters(EQ7, 1))
        CHECK(reconstruct(d, psi) == eval_expfun(spec, EQ7, psi, x7));
}

TEST_CASE("working precision limits the class decision") {
    ExpFunSpec spec = fixture("polar2"); // psi(x) + psi(2x)
    Point p;
    ValuedElem x = parse_element(EQ5, "1*t^-1");
    x.truncate_guarantee(1); // digits at exponent 0 and up unknown
    p.set("x", x);
    // classes are decided by the negative digits, which are all known here
    PolarDecomposition d = polar_decompose(spec, EQ5, p, 1);
    CHECK(d.size() == 2);
    // with an unknown negative digit the class itself is undetermined
    ValuedElem deep = parse_element(EQ5, "1*t^-2 + 1*t^-1");
    deep.truncate_guarantee(1);
    Point pd;
    pd.set("x", deep);
    ExpFunSpec one = fixture("polar1");
    CHECK_THROWS_WITH_AS(polar_decompose(one, EQ5, pd, 2),
                         doctest::Contains("working precision"), PrecisionError);
}

TEST_CASE("tilde majorant dominates the whole family") {
    for (const LocalField* F : {&EQ5, &MX5}) {
        ExpFunSpec spec = fixture("polar_mix");
        std::vector<Point> sample{pt_x(*F, "1*t^-1"), pt_x(*F, "3*t^-1"),
                                  pt_x(*F, "2*t^-1 + 1*t^0")};
        TildeResult tr = tilde_H(spec, *F, sample, 1);
        REQUIRE(tr.values.size() == sample.size());
        CHECK(tr.nprime == 2);
        CHECK(tr.n == 4);
        for (std::size_t j = 0; j < sample.size(); ++j) {
            CHECK(tr.values[j].is_real());
            for (const Character& psi : enumerate_characters(*F, 1)) {
                Cyclotomic h = eval_expfun(spec, *F, psi, sample[j]);
                // |H_psi|^2 <= tilde, exactly
                CHECK((tr.values[j] - h.abs_sq()).sign_real() >= 0);
            }
        }
    }
}

TEST_CASE("witness character reaches the guaranteed fraction") {
    ExpFunSpec spec = fixture("polar_mix");
    for (const LocalField* F : {&EQ5, &MX5, &EQ7, &MX7}) {
        Point x = pt_x(*F, "1*t^-1");
        WitnessResult w = witness_psi1(spec, *F, x, 1);
        CHECK(w.verdict);
        CHECK(w.n == 4);
        CHECK(w.tilde == Cyclotomic(4));
        // (1/N) tilde <= |H_psi1|^2, exactly
        CHECK((w.value_sq - Cyclotomic(1)).sign_real() >= 0);
        // the witness is the exact argmax over the family
        for (const Character& psi : enumerate_characters(*F, 1)) {
            Cyclotomic h = eval_expfun(spec, *F, psi, x);
            CHECK((w.value_sq - h.abs_sq()).sign_real() >= 0);
        }
        // equal characteristic contains the member with psi(x) = 1, which
        // makes |1 + psi(x)|^2 = 4 = tilde an equality case
        if (F->kind() == FieldKind::EqualChar) {
            CHECK(w.value_sq == Cyclotomic(4));
            CHECK(w.value == Cyclotomic(2));
        }
    }
}

TEST_CASE("witness on a pure character sum is exact") {
    ExpFunSpec spec = fixture("merge");
    Point x = pt_x(EQ5, "1*t^-1");
    WitnessResult w = witness_psi1(spec, EQ5, x, 1);
    // one entry, h' = z5^3 + z5^2: tilde = 1 * |h'|^2 and H_psi = psi(g') h'
    CHECK(w.n == 1);
    Cyclotomic hp =
        Cyclotomic::root_of_unity(5, 3) + Cyclotomic::root_of_unity(5, 2);
    CHECK(w.tilde == hp.abs_sq());
    CHECK(w.value_sq == hp.abs_sq());
    CHECK(w.verdict);
}

TEST_CASE("gram matrix is hermitian and reproduces pair sums") {
    ExpFunSpec a = fixture("polar1");
    ExpFunSpec b = fixture("polar_mix");
    ExpFunSpec c = fixture("gcomb");
    std::vector<const ExpFunSpec*> specs{&a, &b, &c};
    for (const LocalField* F : {&EQ5, &MX5}) {
        std::vector<Point> sample{pt_x(*F, "1*t^-1"), pt_x(*F, "4*t^-1 + 2*t^0")};
        GramResult gr = gram_tilde(specs, *F, sample, 1);
        REQUIRE(gr.values.size() == sample.size());
        for (std::size_t j = 0; j < sample.size(); ++j) {
            const auto& M = gr.values[j];
            REQUIRE(M.size() == 3);
            for (std::size_t i = 0; i < 3; ++i) {
                for (std::size_t s = 0; s < 3; ++s) {
                    CHECK(M[i][s] == M[s][i].conj());
                }
                // diagonal entries are the per-spec tilde values
                CHECK(M[i][i].is_real());
                CHECK(M[i][i].sign_real() >= 0);
            }
            // PSD via leading principal minors (3x3, exact rationals on
            // the diagonal structure may be complex; use det >= 0 checks)
            Cyclotomic m1 = M[0][0];
            Cyclotomic m2 = M[0][0] * M[1][1] - M[0][1] * M[1][0];
            Cyclotomic m3 = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                            M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                            M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
            CHECK(m1.sign_real() >= 0);
            CHECK(m2.sign_real() >= 0);
            CHECK(m3.sign_real() >= 0);
        }
        // the joint decomposition reproduces each spec for each member
        PolarDecomposition d = polar_decompose_joint(specs, *F, sample[0], 1);
        for (const Character& psi : enumerate_characters(*F, 1)) {
            for (std::size_t i = 0; i < specs.size(); ++i) {
                CHECK(reconstruct(d, psi, i) ==
                      eval_expfun(*specs[i], *F, psi, sample[0]));
            }
        }
    }
}

TEST_CASE("gram diagonal majorizes rational combinations") {
    ExpFunSpec a = fixture("polar1");
    ExpFunSpec b = fixture("polar_mix");
    std::vector<const ExpFunSpec*> specs{&a, &b};
    std::vector<Point> sample{pt_x(EQ5, "2*t^-1")};
    GramResult gr = gram_tilde(specs, EQ5, sample, 1);
    const auto& M = gr.values[0];
    for (long c0 : {-2L, 1L, 3L}) {
        for (long c1 : {1L, -1L, 2L}) {
            Cyclotomic bound = Cyclotomic(c0 * c0) * M[0][0] +
                               Cyclotomic(c0 * c1) * (M[0][1] + M[1][0]) +
                               Cyclotomic(c1 * c1) * M[1][1];
            CHECK(bound.is_real());
            for (const Character& psi : enumerate_characters(EQ5, 1)) {
                Cyclotomic h = Cyclotomic(c0) * eval_expfun(a, EQ5, psi, sample[0]) +
                               Cyclotomic(c1) * eval_expfun(b, EQ5, psi, sample[0]);
                CHECK((bound - h.abs_sq()).sign_real() >= 0);
            }
        }
    }
}

TEST_CASE("ce specs decompose to a single integral entry") {
    for (const LocalField* F : {&EQ5, &MX7}) {
        ExpFunSpec spec = fixture("gauss");
        PolarDecomposition d = polar_decompose(spec, *F, Point{}, 0);
        REQUIRE(d.size() == 1);
        CHECK(d.entries[0].g.is_zero());
        // N = 1: the sandwich is an equality for Ce inputs
        WitnessResult w = witness_psi1(spec, *F, Point{}, 0);
        CHECK(w.n == 1);
        CHECK(w.verdict);
        CHECK(w.value_sq == w.tilde);
    }
}
