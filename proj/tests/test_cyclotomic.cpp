#include "doctest.h"

#include <complex>

#include "motx/cyclotomic.hpp"
#include "motx/errors.hpp"

using namespace motx;

namespace {
Cyclotomic zeta(std::uint64_t m, long long e = 1) { return Cyclotomic::root_of_unity(m, e); }
}

TEST_CASE("roots of unity normalize their order") {
    CHECK(zeta(6, 2).order() == 3);  // zeta_6^2 = zeta_3
    CHECK(zeta(8, 2).order() == 4);  // = i
    CHECK(zeta(8, 4).order() == 1);  // = -1, a rational
    CHECK(zeta(8, 4) == Cyclotomic(-1));
    CHECK(zeta(5, 0) == Cyclotomic(1));
    CHECK(zeta(5, 7) == zeta(5, 2));
    CHECK(zeta(5, -1) == zeta(5, 4));
}

TEST_CASE("full sums of roots vanish") {
    for (std::uint64_t m : {2ull, 3ull, 4ull, 5ull, 6ull, 7ull, 12ull, 30ull}) {
        Cyclotomic s(0);
        for (std::uint64_t e = 0; e < m; ++e) s += zeta(m, (long long)e);
        CHECK(s.is_zero());
    }
}

TEST_CASE("mixed-order arithmetic stays exact") {
    // 1 + zeta_5 must keep both coordinates (regression: the rational side
    // used to be collapsed during embedding and dropped from sums)
    Cyclotomic v = Cyclotomic(1) + zeta(5);
    CHECK(!v.is_rational());
    CHECK(v - zeta(5) == Cyclotomic(1));
    CHECK(v - Cyclotomic(1) == zeta(5));

    // (1 + z5 + z5^2 + z5^3 + z5^4) built with interleaved rationals
    Cyclotomic s = Cyclotomic(1);
    for (int e = 1; e <= 4; ++e) s += zeta(5, e);
    CHECK(s.is_zero());

    // cross-order: z2 * z3 = z6^... ; orders combine through the lcm
    Cyclotomic w = zeta(2) * zeta(3);
    CHECK(w == zeta(6, 5));
    CHECK((zeta(3) + zeta(4)).order() == 12);
}

TEST_CASE("products, conjugates and inverses") {
    Cyclotomic z = zeta(7);
    Cyclotomic p(1);
    for (int i = 0; i < 7; ++i) p *= z;
    CHECK(p == Cyclotomic(1));
    CHECK(z * z.conj() == Cyclotomic(1));
    CHECK(z.inverse() == z.conj());
    CHECK((Cyclotomic(2) * z).abs_sq() == Cyclotomic(4));
    CHECK_THROWS_AS(Cyclotomic(0).inverse(), EvalError);

    // |1 + z5|^2 = 2 + z5 + z5^-1 is real
    Cyclotomic a = Cyclotomic(1) + zeta(5);
    CHECK(a.abs_sq().is_real());
    CHECK(a.abs_sq() == Cyclotomic(2) + zeta(5) + zeta(5, -1));
}

TEST_CASE("rational detection and extraction") {
    Cyclotomic r = zeta(3) + zeta(3, 2); // = -1
    CHECK(r.is_rational());
    CHECK(r.rational_value() == Rational(-1));
    CHECK_THROWS_AS(zeta(3).rational_value(), EvalError);
}

TEST_CASE("sign of real values is exact") {
    CHECK(Cyclotomic(Rational(3, 2)).sign_real() == 1);
    CHECK(Cyclotomic(0).sign_real() == 0);
    // 2cos(2pi/5) = golden ratio - 1 > 0; 2cos(4pi/5) < 0
    CHECK((zeta(5) + zeta(5, -1)).sign_real() == 1);
    CHECK((zeta(5, 2) + zeta(5, -2)).sign_real() == -1);
    // an exact zero that needs the basis, not the float path
    Cyclotomic z = zeta(5) + zeta(5, 2) + zeta(5, 3) + zeta(5, 4) + Cyclotomic(1);
    CHECK(z.sign_real() == 0);
    // tiny but nonzero: |1+z7|^2 - |1+z5|^2
    Cyclotomic d = (Cyclotomic(1) + zeta(7)).abs_sq() - (Cyclotomic(1) + zeta(5)).abs_sq();
    CHECK(d.sign_real() == ((d.to_complex().real() > 0) ? 1 : -1));
}

TEST_CASE("embedding preserves values") {
    Cyclotomic z = zeta(5);
    Cyclotomic e = z.embedded(15);
    CHECK(e == z);
    CHECK((e + zeta(3)) == (z + zeta(3)));
    CHECK_THROWS_AS(z.embedded(7), Error);
}

TEST_CASE("to_complex approximates the exact value") {
    Cyclotomic g(0); // 1 + 2 z5 + 2 z5^4 = sqrt(5)
    g += Cyclotomic(1);
    g += Cyclotomic(2) * zeta(5);
    g += Cyclotomic(2) * zeta(5, 4);
    std::complex<double> v = g.to_complex();
    CHECK(std::abs(v.real() - 2.2360679774997896) < 1e-12);
    CHECK(std::abs(v.imag()) < 1e-12);
}

TEST_CASE("str renders and stays readable") {
    CHECK(Cyclotomic(Rational(-7, 3)).str() == "-7/3");
    CHECK(zeta(5).str() == "z5");
    CHECK((zeta(5, 2) - Cyclotomic(1)).str() == "z5^2 - 1");
    CHECK(Cyclotomic(0).str() == "0");
}
