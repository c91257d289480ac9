#include "doctest.h"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "motx/errors.hpp"
#include "motx/lindep.hpp"
#include "motx/parser.hpp"

using namespace motx;

namespace {

const LocalField& EQ5 = LocalField::get(FieldKind::EqualChar, 5, 1, 8);
const LocalField& EQ7 = LocalField::get(FieldKind::EqualChar, 7, 1, 8);

ExpFunSpec fixture(const std::string& stem) {
    return parse_spec_file(std::string(MOTX_FIXTURE_DIR) + "/" + stem + ".spec");
}

Point pt_x(const LocalField& F, const std::string& lit) {
    Point p;
    p.set("x", parse_element(F, lit));
    return p;
}

// brute-force rank: the rows are dependent iff every l x l minor vanishes,
// where l is the column count
bool full_rank_by_minors(const CycloMatrix& rows) {
    std::size_t l = rows[0].size();
    std::vector<std::size_t> idx(rows.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    // enumerate all l-subsets of rows
    std::vector<std::size_t> pick(l);
    std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t at,
                                                            std::size_t from) {
        if (at == l) {
            CycloMatrix m;
            for (std::size_t j : pick) m.push_back(rows[j]);
            return !det(m).is_zero();
        }
        for (std::size_t j = from; j < rows.size(); ++j) {
            pick[at] = j;
            if (rec(at + 1, j + 1)) return true;
        }
        return false;
    };
    return rec(0, 0);
}

CycloMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    CycloMatrix m(rows, std::vector<Cyclotomic>(cols));
    for (auto& r : m)
        for (auto& v : r) {
            // small rationals and roots of unity, with planted structure
            switch (rng() % 4) {
            case 0: v = Cyclotomic(static_cast<long>(rng() % 5) - 2); break;
            case 1: v = Cyclotomic::root_of_unity(3, static_cast<long long>(rng() % 3)); break;
            case 2: v = Cyclotomic(Rational(static_cast<long>(rng() % 7) - 3, 2)); break;
            default: v = Cyclotomic(0); break;
            }
        }
    return m;
}

} // namespace

TEST_CASE("determinants expand exactly") {
    CycloMatrix m1{{Cyclotomic(7)}};
    CHECK(det(m1) == Cyclotomic(7));
    CycloMatrix m2{{Cyclotomic(1), Cyclotomic(2)}, {Cyclotomic(3), Cyclotomic(4)}};
    CHECK(det(m2) == Cyclotomic(-2));
    // det of a Vandermonde-style root matrix
    Cyclotomic z = Cyclotomic::root_of_unity(5, 1);
    CycloMatrix m3{{Cyclotomic(1), Cyclotomic(1)}, {Cyclotomic(1), z}};
    CHECK(det(m3) == z - Cyclotomic(1));
    // row swap flips the sign
    CycloMatrix m4{{Cyclotomic(1), z}, {Cyclotomic(1), Cyclotomic(1)}};
    CHECK(det(m4) == Cyclotomic(1) - z);
    // singular matrix
    CycloMatrix m5{{z, z}, {z, z}};
    CHECK(det(m5).is_zero());
}

TEST_CASE("dependence_test agrees with the all-minors criterion") {
    std::mt19937_64 rng(20260814);
    for (int trial = 0; trial < 120; ++trial) {
        std::size_t cols = 1 + rng() % 3;
        std::size_t rows = cols + rng() % 3;
        CycloMatrix m = random_matrix(rng, rows, cols);
        // plant exact dependence in half the trials: last column = sum of others
        if (cols >= 2 && trial % 2 == 0) {
            for (auto& r : m) {
                r[cols - 1] = Cyclotomic(0);
                for (std::size_t i = 0; i + 1 < cols; ++i) r[cols - 1] += r[i];
            }
        }
        DependenceResult res = dependence_test(m);
        bool full = full_rank_by_minors(m);
        CAPTURE(trial);
        if (full) {
            REQUIRE(res.verdict == DepVerdict::Independent);
            REQUIRE(res.witness.size() == cols);
            CycloMatrix w;
            for (std::size_t j : res.witness) w.push_back(m[j]);
            CHECK_FALSE(det(w).is_zero());
        } else {
            REQUIRE(res.verdict == DepVerdict::Dependent);
            REQUIRE(res.kernel.size() == cols);
            bool nonzero = false;
            for (const auto& c : res.kernel)
                if (!c.is_zero()) nonzero = true;
            CHECK(nonzero);
            for (const auto& r : m) {
                Cyclotomic acc(0);
                for (std::size_t i = 0; i < cols; ++i) acc += res.kernel[i] * r[i];
                CHECK(acc.is_zero());
            }
        }
    }
}

TEST_CASE("too few rows are rejected") {
    CycloMatrix m{{Cyclotomic(1), Cyclotomic(2)}};
    CHECK_THROWS_AS(dependence_test(m), Error);
}

TEST_CASE("cube-root counting is dependent exactly when q = 1 mod 3") {
    // #cube roots of ac(x) is constantly 1 when gcd(3, q-1) = 1, and then
    // it coincides with the constant-1 fixture
    ExpFunSpec a = fixture("dep_a");
    ExpFunSpec b = fixture("dep_b");
    for (const LocalField* F : {&EQ5, &EQ7}) {
        Character psi = standard_psi(*F);
        CycloMatrix rows;
        for (std::uint64_t i = 1; i < F->q(); ++i) {
            Point p;
            p.set("x", ValuedElem::lift(*F, ResidueElem::from_index(F->residue(), i)));
            rows.push_back({eval_expfun(a, *F, psi, p), eval_expfun(b, *F, psi, p)});
        }
        DependenceResult res = dependence_test(rows);
        if (F->q() % 3 == 2) {
            REQUIRE(res.verdict == DepVerdict::Dependent);
            // kernel proportional to (1, -1)
            REQUIRE(res.kernel.size() == 2);
            CHECK(res.kernel[0] * Cyclotomic(-1) == res.kernel[1]);
        } else {
            CHECK(res.verdict == DepVerdict::Independent);
        }
    }
}

TEST_CASE("cramer recovers planted combination coefficients") {
    // G = 2 * (psi-sum of polar1) + 3 * (1 + psi-sum) = gcomb with H = (2, 3)
    ExpFunSpec h1 = fixture("polar1");
    ExpFunSpec h2 = fixture("polar_mix");
    ExpFunSpec g = fixture("gcomb"); // 3 + 5 psi(x) = 2*psi(x) + 3*(1 + psi(x))
    std::vector<const ExpFunSpec*> hs{&h1, &h2};
    // pick a member that separates the candidate points
    Character psi = standard_psi(EQ5);
    bool found = false;
    for (const Character& c : enumerate_characters(EQ5, 1)) {
        if (c(parse_element(EQ5, "1*t^-1")) != Cyclotomic(1)) {
            psi = c;
            found = true;
            break;
        }
    }
    REQUIRE(found);
    std::vector<Point> cands;
    for (int d = 1; d <= 4; ++d)
        cands.push_back(pt_x(EQ5, std::to_string(d) + "*t^-1"));
    auto w = find_witness_w(hs, EQ5, psi, cands);
    REQUIRE(w.has_value());
    REQUIRE(w->size() == 2);
    CramerResult cr = cramer_coeffs(hs, g, EQ5, psi, *w);
    CHECK_FALSE(cr.d.is_zero());
    REQUIRE(cr.c.size() == 2);
    CHECK(cr.c[0] == Cyclotomic(2));
    CHECK(cr.c[1] == Cyclotomic(3));
    // the linear identity then holds at fresh points, not just the tuple
    Point fresh = pt_x(EQ5, "4*t^-1 + 1*t^0");
    CHECK(eval_expfun(g, EQ5, psi, fresh) ==
          cr.c[0] * eval_expfun(h1, EQ5, psi, fresh) +
              cr.c[1] * eval_expfun(h2, EQ5, psi, fresh));
}

TEST_CASE("cramer refuses singular tuples") {
    ExpFunSpec h1 = fixture("polar1");
    ExpFunSpec h2 = fixture("polar1"); // identical functions: always singular
    std::vector<const ExpFunSpec*> hs{&h1, &h2};
    // depth 1 so the polar points are inside the character's domain
    Character psi = character_at(EQ5, 1, 0);
    std::vector<Point> w{pt_x(EQ5, "1*t^-1"), pt_x(EQ5, "2*t^-1")};
    ExpFunSpec g = fixture("gcomb");
    CHECK_THROWS_AS(cramer_coeffs(hs, g, EQ5, psi, w), EvalError);
    CHECK_FALSE(find_witness_w(hs, EQ5, psi, w).has_value());
}
