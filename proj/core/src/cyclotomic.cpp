#include "motx/cyclotomic.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "motx/errors.hpp"

namespace motx {

namespace {

// Cached data for one order m: phi(m), the cyclotomic polynomial Phi_m
// (monic, integer coefficients, low-to-high) and the indices of its
// nonzero coefficients (Phi_{p^k} is very sparse, which makes reduction
// nearly free for the orders characters produce).
struct CycloData {
    std::uint64_t m = 0;
    std::uint64_t phi = 0;
    std::vector<Integer> Phi;
    std::vector<std::size_t> Phi_nonzero; // indices < deg with Phi[i] != 0
};

std::vector<Integer> int_poly_div_exact(const std::vector<Integer>& num,
                                        const std::vector<Integer>& den) {
    // den is monic; remainder must vanish
    std::vector<Integer> r = num;
    std::vector<Integer> qout(num.size() - den.size() + 1, Integer(0));
    for (std::size_t k = num.size(); k-- >= den.size();) {
        Integer lead = r[k];
        if (lead != 0) {
            std::size_t shift = k - (den.size() - 1);
            qout[shift] = lead;
            for (std::size_t j = 0; j < den.size(); ++j) r[shift + j] -= lead * den[j];
        }
        if (k == den.size() - 1) break;
    }
    for (const auto& c : r)
        if (c != 0) throw Error("inexact cyclotomic polynomial division");
    return qout;
}

const CycloData& cyclo_data(std::uint64_t m) {
    if (m == 0) throw Error("zero cyclotomic order");
    if (m > default_limits().max_cyclo_order)
        throw CapacityError("cyclotomic order " + std::to_string(m) + " exceeds cap");
    static std::map<std::uint64_t, CycloData> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;

    // Phi_m = (x^m - 1) / prod_{d | m, d < m} Phi_d, computed recursively
    // without recursion: fill the cache upward over divisors of m.
    std::vector<std::uint64_t> divs;
    for (std::uint64_t d = 1; d * d <= m; ++d) {
        if (m % d == 0) {
            divs.push_back(d);
            if (d != m / d) divs.push_back(m / d);
        }
    }
    std::sort(divs.begin(), divs.end());
    for (std::uint64_t d : divs) {
        if (cache.count(d)) continue;
        std::vector<Integer> num(d + 1, Integer(0));
        num[0] = -1;
        num[d] = 1;
        for (std::uint64_t e : divs) {
            if (e >= d || d % e != 0) continue;
            num = int_poly_div_exact(num, cache.at(e).Phi);
        }
        CycloData cd;
        cd.m = d;
        cd.Phi = std::move(num);
        cd.phi = cd.Phi.size() - 1;
        for (std::size_t i = 0; i + 1 < cd.Phi.size(); ++i)
            if (cd.Phi[i] != 0) cd.Phi_nonzero.push_back(i);
        cache.emplace(d, std::move(cd));
    }
    return cache.at(m);
}

// In-place remainder of a rational polynomial by Phi_m (monic).
void reduce_mod_phi(std::vector<Rational>& r, const CycloData& cd) {
    const std::size_t deg = cd.phi;
    while (r.size() > deg) {
        Rational lead = std::move(r.back());
        r.pop_back();
        if (lead != 0) {
            std::size_t shift = r.size() - deg;
            for (std::size_t i : cd.Phi_nonzero) r[shift + i] -= lead * Rational(cd.Phi[i]);
        }
    }
    r.resize(deg, Rational(0));
}

std::uint64_t lcm_checked(std::uint64_t a, std::uint64_t b) {
    std::uint64_t g = std::gcd(a, b);
    std::uint64_t l = a / g;
    if (b > default_limits().max_cyclo_order / std::max<std::uint64_t>(l, 1))
        throw CapacityError("cyclotomic order overflow in lcm");
    return l * b;
}

} // namespace

Cyclotomic::Cyclotomic(std::uint64_t order, std::vector<Rational> c)
    : order_(order), c_(std::move(c)) {
    normalize();
}

void Cyclotomic::normalize() {
    if (order_ == 1) {
        if (c_.size() != 1) c_.resize(1, Rational(0));
        return;
    }
    bool constant = true;
    for (std::size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) constant = false;
    if (constant) {
        Rational v = c_.empty() ? Rational(0) : c_[0];
        order_ = 1;
        c_ = {v};
    }
}

Cyclotomic Cyclotomic::root_of_unity(std::uint64_t m, long long e, const Limits& lim) {
    if (m == 0) throw Error("zero root-of-unity order");
    if (m > lim.max_cyclo_order)
        throw CapacityError("root-of-unity order " + std::to_string(m) + " exceeds cap");
    long long r = e % static_cast<long long>(m);
    if (r < 0) r += static_cast<long long>(m);
    std::uint64_t eu = static_cast<std::uint64_t>(r);
    std::uint64_t g = std::gcd(eu, m);
    if (g == 0) g = m; // e == 0
    std::uint64_t mp = m / g, ep = (g == m) ? 0 : eu / g;
    const CycloData& cd = cyclo_data(mp);
    std::vector<Rational> c(ep + 1, Rational(0));
    c[ep] = 1;
    reduce_mod_phi(c, cd);
    return Cyclotomic(mp, std::move(c));
}

bool Cyclotomic::is_zero() const {
    for (const auto& x : c_)
        if (x != 0) return false;
    return true;
}

Rational Cyclotomic::rational_value() const {
    if (order_ != 1) throw EvalError("cyclotomic value is not rational");
    return c_[0];
}

Cyclotomic Cyclotomic::embedded(std::uint64_t m, const Limits& lim) const {
    if (m == order_) return *this;
    if (m % order_ != 0) throw Error("embedding order must be a multiple");
    if (m > lim.max_cyclo_order) throw CapacityError("embedding order exceeds cap");
    const CycloData& cd = cyclo_data(m);
    std::uint64_t stride = m / order_;
    std::vector<Rational> buf((c_.size() - 1) * stride + 1, Rational(0));
    for (std::size_t j = 0; j < c_.size(); ++j)
        if (c_[j] != 0) buf[j * stride] = c_[j];
    reduce_mod_phi(buf, cd);
    return Cyclotomic(m, std::move(buf));
}

Cyclotomic Cyclotomic::operator+(const Cyclotomic& o) const {
    std::uint64_t L = lcm_checked(order_, o.order_);
    Cyclotomic a = embedded(L), b = o.embedded(L);
    if (a.order_ != b.order_) {
        // embedding collapses rational values back to order 1, so one side
        // may sit in the constant slot of the other
        if (a.order_ == 1) std::swap(a, b);
        a.c_[0] += b.c_[0];
    } else {
        for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
    }
    a.normalize();
    return a;
}

Cyclotomic Cyclotomic::operator-(const Cyclotomic& o) const {
    return *this + (-o);
}

Cyclotomic Cyclotomic::operator-() const {
    Cyclotomic r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

Cyclotomic Cyclotomic::operator*(const Cyclotomic& o) const {
    // rational scalar fast paths
    if (order_ == 1) {
        if (c_[0] == 0) return Cyclotomic();
        Cyclotomic r = o;
        for (auto& x : r.c_) x *= c_[0];
        r.normalize();
        return r;
    }
    if (o.order_ == 1) return o * *this;

    std::uint64_t L = lcm_checked(order_, o.order_);
    Cyclotomic a = embedded(L), b = o.embedded(L);
    const CycloData& cd = cyclo_data(L);

    std::vector<std::size_t> na, nb;
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        if (a.c_[i] != 0) na.push_back(i);
    for (std::size_t i = 0; i < b.c_.size(); ++i)
        if (b.c_[i] != 0) nb.push_back(i);

    // convolution with exponents folded mod L (z^L = 1), then one reduction
    std::vector<Rational> buf(std::min<std::size_t>(2 * cd.phi - 1, L), Rational(0));
    if (buf.size() < cd.phi) buf.resize(cd.phi, Rational(0));
    for (std::size_t i : na)
        for (std::size_t j : nb) {
            std::size_t e = i + j;
            if (e >= L) e -= L;
            buf[e] += a.c_[i] * b.c_[j];
        }
    reduce_mod_phi(buf, cd);
    return Cyclotomic(L, std::move(buf));
}

Cyclotomic Cyclotomic::conj() const {
    if (order_ == 1) return *this;
    const CycloData& cd = cyclo_data(order_);
    std::vector<Rational> buf(order_, Rational(0));
    for (std::size_t j = 0; j < c_.size(); ++j) {
        if (c_[j] == 0) continue;
        std::size_t e = (j == 0) ? 0 : order_ - j;
        buf[e] += c_[j];
    }
    reduce_mod_phi(buf, cd);
    return Cyclotomic(order_, std::move(buf));
}

Cyclotomic Cyclotomic::inverse() const {
    if (is_zero()) throw EvalError("division by zero cyclotomic");
    if (order_ == 1) return Cyclotomic(Rational(1) / c_[0]);
    // extended euclid between this (as polynomial) and Phi_m over Q[x];
    // Phi_m is irreducible, so the gcd is a nonzero constant
    const CycloData& cd = cyclo_data(order_);
    using P = std::vector<Rational>;
    auto deg = [](const P& p) {
        for (std::size_t i = p.size(); i-- > 0;)
            if (p[i] != 0) return static_cast<long>(i);
        return -1L;
    };
    P r0(cd.Phi.size());
    for (std::size_t i = 0; i < cd.Phi.size(); ++i) r0[i] = Rational(cd.Phi[i]);
    P r1 = c_;
    P s0{Rational(0)}, s1{Rational(1)}; // bezout coefficients for this
    while (deg(r1) > 0) {
        // divide r0 by r1
        long d1 = deg(r1);
        P q(static_cast<std::size_t>(deg(r0) - d1 + 1), Rational(0));
        P rem = r0;
        for (long k = deg(r0); k >= d1; --k) {
            Rational coef = rem[static_cast<std::size_t>(k)] / r1[static_cast<std::size_t>(d1)];
            if (coef == 0) continue;
            q[static_cast<std::size_t>(k - d1)] = coef;
            for (long j = 0; j <= d1; ++j)
                rem[static_cast<std::size_t>(k - d1 + j)] -= coef * r1[static_cast<std::size_t>(j)];
        }
        // (r0, r1) <- (r1, rem); (s0, s1) <- (s1, s0 - q*s1)
        P qs(q.size() + s1.size() - 1, Rational(0));
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (q[i] == 0) continue;
            for (std::size_t j = 0; j < s1.size(); ++j) qs[i + j] += q[i] * s1[j];
        }
        P s2(std::max(s0.size(), qs.size()), Rational(0));
        for (std::size_t i = 0; i < s0.size(); ++i) s2[i] += s0[i];
        for (std::size_t i = 0; i < qs.size(); ++i) s2[i] -= qs[i];
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    long d = deg(r1);
    if (d != 0) throw Error("cyclotomic inverse: unexpected gcd degree");
    Rational g = r1[0];
    std::vector<Rational> res(s1.size());
    for (std::size_t i = 0; i < s1.size(); ++i) res[i] = s1[i] / g;
    reduce_mod_phi(res, cd);
    return Cyclotomic(order_, std::move(res));
}

bool Cyclotomic::operator==(const Cyclotomic& o) const {
    if (order_ == o.order_) return c_ == o.c_;
    std::uint64_t L = lcm_checked(order_, o.order_);
    return embedded(L).c_ == o.embedded(L).c_;
}

std::complex<double> Cyclotomic::to_complex() const {
    std::complex<double> acc(0.0, 0.0);
    const double tau = 6.283185307179586476925286766559;
    for (std::size_t j = 0; j < c_.size(); ++j) {
        if (c_[j] == 0) continue;
        double ang = tau * static_cast<double>(j) / static_cast<double>(order_);
        acc += to_double(c_[j]) * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return acc;
}

int Cyclotomic::sign_real() const {
    // sign of the real part; exact zero is decided by the canonical basis
    if (is_zero()) return 0;
    if (order_ == 1) return sgn(c_[0]);

    // interval evaluation of sum c_j cos(2 pi j / m) at growing precision
    Rational abs_sum(0);
    std::size_t nterms = 0;
    for (const auto& x : c_) {
        if (x == 0) continue;
        abs_sum += abs(x);
        ++nterms;
    }
    double S = to_double(abs_sum) * 1.0000001 + 1e-300;
    for (mpfr_prec_t prec = 128; prec <= 4096; prec *= 2) {
        mpfr_t acc, t, ang, pi;
        mpfr_inits2(prec, acc, t, ang, pi, static_cast<mpfr_ptr>(nullptr));
        mpfr_const_pi(pi, MPFR_RNDN);
        mpfr_set_zero(acc, 1);
        for (std::size_t j = 0; j < c_.size(); ++j) {
            if (c_[j] == 0) continue;
            mpfr_mul_ui(ang, pi, 2 * static_cast<unsigned long>(j), MPFR_RNDN);
            mpfr_div_ui(ang, ang, static_cast<unsigned long>(order_), MPFR_RNDN);
            mpfr_cos(ang, ang, MPFR_RNDN);
            mpfr_set_q(t, c_[j].get_mpq_t(), MPFR_RNDN);
            mpfr_mul(t, t, ang, MPFR_RNDN);
            mpfr_add(acc, acc, t, MPFR_RNDN);
        }
        // crude but safe error budget: every term contributes a handful of
        // correctly rounded operations, each within 2^-prec relative error
        double bound = S * static_cast<double>(nterms + 128) * std::ldexp(1.0, -static_cast<int>(prec) + 4);
        double v = mpfr_get_d(acc, MPFR_RNDN);
        mpfr_clears(acc, t, ang, pi, static_cast<mpfr_ptr>(nullptr));
        if (std::fabs(v) > bound) return v > 0 ? 1 : -1;
    }
    throw Error("sign of real cyclotomic undecidable at 4096 bits");
}

std::string Cyclotomic::str() const {
    if (order_ == 1) return to_string(c_[0]);
    std::ostringstream os;
    bool first = true;
    for (std::size_t j = c_.size(); j-- > 0;) {
        if (c_[j] == 0) continue;
        Rational v = c_[j];
        if (first) {
            if (v < 0) {
                os << '-';
                v = -v;
            }
        } else {
            os << (v < 0 ? " - " : " + ");
            if (v < 0) v = -v;
        }
        first = false;
        std::string base = "z" + std::to_string(order_);
        if (j == 0)
            os << to_string(v);
        else {
            if (v != 1) os << to_string(v) << '*';
            os << base;
            if (j > 1) os << '^' << j;
        }
    }
    if (first) os << '0';
    return os.str();
}

} // namespace motx
