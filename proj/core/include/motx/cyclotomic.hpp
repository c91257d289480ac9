#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "motx/limits.hpp"
#include "motx/rational.hpp"

namespace motx {

// An element of the cyclotomic field Q(zeta_m), stored as rational
// coordinates over the power basis 1, z, ..., z^{phi(m)-1} (reduced mod the
// m-th cyclotomic polynomial).  The order is normalized: a pure root
// zeta_m^e is built with the gcd cancelled, and any value whose reduced
// coordinates are constant collapses to order 1.  Equality embeds both
// sides into the lcm order and compares coordinates, so it is exact.
class Cyclotomic {
public:
    Cyclotomic() : order_(1), c_{Rational(0)} {}
    Cyclotomic(const Rational& r) : order_(1), c_{r} {}
    Cyclotomic(long n) : order_(1), c_{Rational(n)} {}

    // zeta_m^e (e may be any integer; reduced mod m).
    static Cyclotomic root_of_unity(std::uint64_t m, long long e,
                                    const Limits& lim = default_limits());

    std::uint64_t order() const { return order_; }
    const std::vector<Rational>& coords() const { return c_; }

    bool is_zero() const;
    bool is_rational() const { return order_ == 1; }
    Rational rational_value() const; // throws EvalError when not rational

    Cyclotomic operator+(const Cyclotomic& o) const;
    Cyclotomic operator-(const Cyclotomic& o) const;
    Cyclotomic operator-() const;
    Cyclotomic operator*(const Cyclotomic& o) const;
    Cyclotomic& operator+=(const Cyclotomic& o) { return *this = *this + o; }
    Cyclotomic& operator-=(const Cyclotomic& o) { return *this = *this - o; }
    Cyclotomic& operator*=(const Cyclotomic& o) { return *this = *this * o; }

    Cyclotomic conj() const;           // complex conjugate (z -> z^{-1})
    Cyclotomic inverse() const;        // throws EvalError on zero
    Cyclotomic abs_sq() const { return *this * conj(); }
    bool is_real() const { return *this == conj(); }

    bool operator==(const Cyclotomic& o) const;
    bool operator!=(const Cyclotomic& o) const { return !(*this == o); }

    std::complex<double> to_complex() const;

    // Exact sign of a real value (-1, 0, +1).  Decides by exact zero test
    // first, then interval arithmetic at increasing precision; throws Error
    // if the value is real but the sign resists 4096-bit evaluation.
    int sign_real() const;

    // "3/2", "z6^2 - 1/3*z6", ... with z<m> denoting a primitive m-th root.
    std::string str() const;

    // Re-express in Q(zeta_m) for a multiple m of the current order.
    Cyclotomic embedded(std::uint64_t m, const Limits& lim = default_limits()) const;

private:
    Cyclotomic(std::uint64_t order, std::vector<Rational> c);
    void normalize();
    std::uint64_t order_;
    std::vector<Rational> c_;
};

inline Cyclotomic operator*(const Rational& r, const Cyclotomic& z) {
    return Cyclotomic(r) * z;
}

} // namespace motx
