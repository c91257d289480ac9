#include "motx/residue.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <sstream>

namespace motx {

namespace {

using Poly = std::vector<std::uint32_t>; // coefficients low-to-high over F_p

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mul_mod(const Poly& a, const Poly& b, const Poly& m, std::uint32_t p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = static_cast<std::uint32_t>((r[i + j] + std::uint64_t(a[i]) * b[j]) % p);
    }
    // remainder mod the monic polynomial m
    while (r.size() >= m.size()) {
        std::uint32_t lead = r.back();
        std::size_t shift = r.size() - m.size();
        if (lead != 0) {
            for (std::size_t j = 0; j < m.size(); ++j) {
                std::uint64_t sub = std::uint64_t(lead) * m[j] % p;
                r[shift + j] = static_cast<std::uint32_t>((r[shift + j] + p - sub) % p);
            }
        }
        r.pop_back();
    }
    trim(r);
    return r;
}

Poly poly_powmod(Poly base, std::uint64_t e, const Poly& m, std::uint32_t p) {
    Poly r{1};
    while (e) {
        if (e & 1) r = poly_mul_mod(r, base, m, p);
        base = poly_mul_mod(base, base, m, p);
        e >>= 1;
    }
    return r;
}

Poly poly_gcd(Poly a, Poly b, std::uint32_t p) {
    auto inv_mod_p = [p](std::uint32_t x) {
        // p is prime and small; exponentiation is plenty
        std::uint64_t r = 1, b2 = x, e = p - 2;
        while (e) {
            if (e & 1) r = r * b2 % p;
            b2 = b2 * b2 % p;
            e >>= 1;
        }
        return static_cast<std::uint32_t>(r);
    };
    trim(a);
    trim(b);
    while (!b.empty()) {
        // a mod b
        std::uint32_t binv = inv_mod_p(b.back());
        while (a.size() >= b.size()) {
            std::uint32_t lead = a.back();
            if (lead != 0) {
                std::uint64_t c = std::uint64_t(lead) * binv % p;
                std::size_t shift = a.size() - b.size();
                for (std::size_t j = 0; j < b.size(); ++j) {
                    std::uint64_t sub = c * b[j] % p;
                    a[shift + j] = static_cast<std::uint32_t>((a[shift + j] + p - sub) % p);
                }
            }
            a.pop_back();
            trim(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
    }
    return a;
}

bool is_irreducible(const Poly& m, std::uint32_t p, std::uint32_t f) {
    if (f == 1) return true;
    // x^(p^f) == x mod m, and gcd(x^(p^(f/l)) - x, m) == 1 for prime l | f
    Poly x{0, 1};
    std::uint64_t q = 1;
    for (std::uint32_t i = 0; i < f; ++i) q *= p;
    Poly xq = poly_powmod(x, q, m, p);
    if (xq != x) return false;
    for (std::uint32_t l = 2; l <= f; ++l) {
        if (f % l != 0) continue;
        bool prime = true;
        for (std::uint32_t d = 2; d * d <= l; ++d)
            if (l % d == 0) prime = false;
        if (!prime) continue;
        std::uint64_t qe = 1;
        for (std::uint32_t i = 0; i < f / l; ++i) qe *= p;
        Poly xe = poly_powmod(x, qe, m, p);
        // xe - x
        Poly diff = xe;
        diff.resize(std::max(diff.size(), x.size()), 0);
        for (std::size_t j = 0; j < x.size(); ++j)
            diff[j] = (diff[j] + p - x[j]) % p;
        trim(diff);
        Poly g = poly_gcd(diff, m, p);
        if (g.size() != 1) return false;
    }
    return true;
}

} // namespace

ResidueField::ResidueField(std::uint32_t p, std::uint32_t f) : p_(p), f_(f) {
    if (p < 2) throw Error("residue characteristic must be at least 2");
    if (f < 1 || f > 16) throw Error("residue degree out of range");
    q_ = 1;
    for (std::uint32_t i = 0; i < f; ++i) {
        q_ *= p;
        if (q_ > (1ull << 40)) throw CapacityError("residue field too large");
    }
    // smallest monic irreducible of degree f, coefficient tuples counted
    // low digit first: candidate k has constant coefficient k % p, etc.
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < f; ++i) count *= p;
    for (std::uint64_t k = 0; k < count; ++k) {
        Poly m(f + 1, 0);
        std::uint64_t t = k;
        for (std::uint32_t i = 0; i < f; ++i) {
            m[i] = static_cast<std::uint32_t>(t % p);
            t /= p;
        }
        m[f] = 1;
        if (is_irreducible(m, p, f)) {
            modulus_ = m;
            return;
        }
    }
    throw Error("no irreducible modulus found"); // unreachable for prime p
}

const ResidueField& ResidueField::get(std::uint32_t p, std::uint32_t f) {
    // small prime check up front: everything downstream assumes it
    if (p < 2) throw Error("residue characteristic must be at least 2");
    for (std::uint32_t d = 2; std::uint64_t(d) * d <= p; ++d)
        if (p % d == 0) throw Error("residue characteristic " + std::to_string(p) + " is not prime");
    static std::map<std::pair<std::uint32_t, std::uint32_t>, ResidueField> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(p, f);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, ResidueField(p, f)).first;
    return it->second;
}

ResidueElem::ResidueElem(const ResidueField& k, std::uint64_t n) : field_(&k), c_(k.f(), 0) {
    c_[0] = static_cast<std::uint32_t>(n % k.p());
}

ResidueElem ResidueElem::from_coeffs(const ResidueField& k, std::vector<std::uint32_t> coeffs) {
    if (coeffs.size() != k.f()) throw Error("coefficient vector has wrong length");
    ResidueElem e(k);
    for (std::size_t i = 0; i < coeffs.size(); ++i) e.c_[i] = coeffs[i] % k.p();
    return e;
}

std::uint64_t ResidueElem::index() const {
    const auto& k = field();
    std::uint64_t idx = 0, mult = 1;
    for (std::uint32_t i = 0; i < k.f(); ++i) {
        idx += c_[i] * mult;
        mult *= k.p();
    }
    return idx;
}

ResidueElem ResidueElem::from_index(const ResidueField& k, std::uint64_t idx) {
    if (idx >= k.q()) throw Error("residue index out of range");
    ResidueElem e(k);
    for (std::uint32_t i = 0; i < k.f(); ++i) {
        e.c_[i] = static_cast<std::uint32_t>(idx % k.p());
        idx /= k.p();
    }
    return e;
}

const ResidueField& ResidueElem::field() const {
    if (!field_) throw Error("use of default-constructed residue element");
    return *field_;
}

bool ResidueElem::is_zero() const {
    for (auto c : c_)
        if (c != 0) return false;
    return true;
}

bool ResidueElem::operator==(const ResidueElem& o) const {
    check_same(o);
    return c_ == o.c_;
}

void ResidueElem::check_same(const ResidueElem& o) const {
    if (&field() != &o.field()) throw Error("residue elements from different fields");
}

ResidueElem ResidueElem::operator+(const ResidueElem& o) const {
    check_same(o);
    ResidueElem r(*field_);
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = (c_[i] + o.c_[i]) % field_->p();
    return r;
}

ResidueElem ResidueElem::operator-(const ResidueElem& o) const {
    check_same(o);
    ResidueElem r(*field_);
    for (std::size_t i = 0; i < c_.size(); ++i)
        r.c_[i] = (c_[i] + field_->p() - o.c_[i]) % field_->p();
    return r;
}

ResidueElem ResidueElem::operator-() const {
    ResidueElem r(field());
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = (field_->p() - c_[i]) % field_->p();
    return r;
}

ResidueElem ResidueElem::operator*(const ResidueElem& o) const {
    check_same(o);
    Poly a(c_.begin(), c_.end()), b(o.c_.begin(), o.c_.end());
    trim(a);
    trim(b);
    Poly m(field_->modulus().begin(), field_->modulus().end());
    Poly prod = poly_mul_mod(a, b, m, field_->p());
    ResidueElem r(*field_);
    for (std::size_t i = 0; i < prod.size(); ++i) r.c_[i] = prod[i];
    return r;
}

ResidueElem ResidueElem::pow(std::uint64_t e) const {
    ResidueElem r(field(), 1);
    ResidueElem b = *this;
    while (e) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

ResidueElem ResidueElem::inverse() const {
    if (is_zero()) throw EvalError("division by zero in residue field");
    return pow(field().q() - 2);
}

std::uint32_t ResidueElem::trace() const {
    const auto& k = field();
    ResidueElem acc(k);
    ResidueElem x = *this;
    for (std::uint32_t i = 0; i < k.f(); ++i) {
        acc = acc + x;
        x = x.pow(k.p());
    }
    for (std::size_t i = 1; i < acc.c_.size(); ++i)
        if (acc.c_[i] != 0) throw Error("trace did not land in the prime field");
    return acc.c_[0];
}

std::string ResidueElem::str() const {
    bool needs_poly = false;
    for (std::size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) needs_poly = true;
    if (!needs_poly) return std::to_string(c_[0]);
    std::ostringstream os;
    os << '(';
    bool first = true;
    for (std::size_t i = c_.size(); i-- > 0;) {
        if (c_[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        if (i == 0)
            os << c_[i];
        else if (i == 1)
            os << (c_[i] == 1 ? "a" : std::to_string(c_[i]) + "*a");
        else
            os << (c_[i] == 1 ? "a^" + std::to_string(i)
                              : std::to_string(c_[i]) + "*a^" + std::to_string(i));
    }
    os << ')';
    return os.str();
}

ResidueElem parse_residue(const ResidueField& k, const std::string& text) {
    // accepts "7", "a", "(2*a + 1)", "(a^2 + 3)" ...
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    };
    skip_ws();
    bool parens = pos < text.size() && text[pos] == '(';
    if (parens) ++pos;
    std::vector<std::uint32_t> coeffs(k.f(), 0);
    bool any = false;
    for (;;) {
        skip_ws();
        int sign = 1;
        while (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            if (text[pos] == '-') sign = -sign;
            ++pos;
            skip_ws();
        }
        if (pos >= text.size() || text[pos] == ')') break;
        std::uint64_t coef = 1;
        bool saw_num = false;
        if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
            coef = 0;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                coef = coef * 10 + (text[pos] - '0');
                if (coef > (1ull << 40)) throw ParseError("residue coefficient too large");
                ++pos;
            }
            saw_num = true;
            skip_ws();
            if (pos < text.size() && text[pos] == '*') {
                ++pos;
                skip_ws();
            }
        }
        std::size_t deg = 0;
        if (pos < text.size() && text[pos] == 'a') {
            ++pos;
            deg = 1;
            if (pos < text.size() && text[pos] == '^') {
                ++pos;
                if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
                    throw ParseError("bad exponent in residue literal '" + text + "'");
                deg = 0;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                    deg = deg * 10 + (text[pos++] - '0');
            }
        } else if (!saw_num) {
            throw ParseError("bad residue literal '" + text + "'");
        }
        if (deg >= k.f())
            throw ParseError("degree " + std::to_string(deg) + " exceeds residue degree in '" +
                             text + "'");
        std::uint64_t c = coef % k.p();
        if (sign < 0) c = (k.p() - c) % k.p();
        coeffs[deg] = static_cast<std::uint32_t>((coeffs[deg] + c) % k.p());
        any = true;
        skip_ws();
    }
    if (parens) {
        if (pos >= text.size() || text[pos] != ')')
            throw ParseError("missing ')' in residue literal '" + text + "'");
        ++pos;
        skip_ws();
    }
    if (pos != text.size() || !any) throw ParseError("bad residue literal '" + text + "'");
    return ResidueElem::from_coeffs(k, std::move(coeffs));
}

} // namespace motx
