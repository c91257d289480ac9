#include "motx/localfield.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "motx/errors.hpp"
#include "motx/limits.hpp"

namespace motx {

namespace {

// lifted residue modulus with integer coefficients in [0, p)
std::vector<Integer> lifted_modulus(const ResidueField& k) {
    std::vector<Integer> m(k.modulus().size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = k.modulus()[i];
    return m;
}

// product of two coefficient vectors modulo (lifted modulus, p^g)
std::vector<Integer> mixed_mul(const std::vector<Integer>& A, const std::vector<Integer>& B,
                               const ResidueField& k, const Integer& pg) {
    std::size_t f = k.f();
    std::vector<Integer> prod(2 * f - 1, Integer(0));
    for (std::size_t i = 0; i < f; ++i) {
        if (A[i] == 0) continue;
        for (std::size_t j = 0; j < f; ++j) prod[i + j] += A[i] * B[j];
    }
    std::vector<Integer> mhat = lifted_modulus(k);
    for (std::size_t d = 2 * f - 2; d >= f && d < prod.size(); --d) {
        Integer lead = prod[d] % pg;
        if (lead != 0) {
            std::size_t shift = d - f;
            for (std::size_t j = 0; j < f; ++j) prod[shift + j] -= lead * mhat[j];
        }
        prod[d] = 0;
        if (d == f) break;
    }
    prod.resize(f);
    for (auto& c : prod) {
        c %= pg;
        if (c < 0) c += pg;
    }
    return prod;
}

Integer pow_int(std::uint32_t p, int e) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, static_cast<unsigned long>(e));
    return r;
}

} // namespace

LocalField::LocalField(FieldKind kind, std::uint32_t p, std::uint32_t f, int precision)
    : kind_(kind), p_(p), f_(f), precision_(precision), residue_(&ResidueField::get(p, f)) {
    if (precision < 1 || precision > default_limits().max_precision)
        throw Error("field precision out of range");
}

const LocalField& LocalField::get(FieldKind kind, std::uint32_t p, std::uint32_t f,
                                  int precision) {
    static std::map<std::tuple<int, std::uint32_t, std::uint32_t, int>, LocalField> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(static_cast<int>(kind), p, f, precision);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, LocalField(kind, p, f, precision)).first;
    return it->second;
}

std::string LocalField::str() const {
    std::ostringstream os;
    os << (kind_ == FieldKind::EqualChar ? "eq" : "mixed") << ',' << p_ << ',' << f_ << ','
       << precision_;
    return os.str();
}

ValuedElem::ValuedElem(const LocalField& F, long val, int guaranteed)
    : field_(&F), zero_(false), val_(val), guaranteed_(guaranteed) {}

Integer ValuedElem::pk() const { return pow_int(field_->p(), guaranteed_); }

const LocalField& ValuedElem::field() const {
    if (!field_) throw Error("use of default-constructed field element");
    return *field_;
}

ValuedElem ValuedElem::zero(const LocalField& F) {
    ValuedElem e;
    e.field_ = &F;
    e.zero_ = true;
    return e;
}

ValuedElem ValuedElem::from_integer(const LocalField& F, const Integer& n) {
    if (n == 0) return zero(F);
    const ResidueField& k = F.residue();
    if (F.kind() == FieldKind::EqualChar) {
        // integers land in the prime field
        Integer r = n % k.p();
        if (r < 0) r += k.p();
        if (r == 0) return zero(F);
        ValuedElem e(F, 0, F.precision());
        e.digits_.assign(F.precision(), ResidueElem(k));
        e.digits_[0] = ResidueElem(k, r.get_ui());
        return e;
    }
    Integer u = n;
    long v = 0;
    while (mpz_divisible_ui_p(u.get_mpz_t(), k.p())) {
        mpz_divexact_ui(u.get_mpz_t(), u.get_mpz_t(), k.p());
        ++v;
    }
    ValuedElem e(F, v, F.precision());
    Integer pg = e.pk();
    u %= pg;
    if (u < 0) u += pg;
    e.coeffs_.assign(k.f(), Integer(0));
    e.coeffs_[0] = u;
    return e;
}

ValuedElem ValuedElem::uniformizer(const LocalField& F, long power) {
    ValuedElem e(F, power, F.precision());
    const ResidueField& k = F.residue();
    if (F.kind() == FieldKind::EqualChar) {
        e.digits_.assign(F.precision(), ResidueElem(k));
        e.digits_[0] = ResidueElem(k, 1);
    } else {
        e.coeffs_.assign(k.f(), Integer(0));
        e.coeffs_[0] = 1;
    }
    return e;
}

ValuedElem ValuedElem::lift(const LocalField& F, const ResidueElem& v) {
    if (&v.field() != &F.residue()) throw Error("residue element from a different field");
    if (v.is_zero()) return zero(F);
    ValuedElem e(F, 0, F.precision());
    const ResidueField& k = F.residue();
    if (F.kind() == FieldKind::EqualChar) {
        e.digits_.assign(F.precision(), ResidueElem(k));
        e.digits_[0] = v;
    } else {
        e.coeffs_.assign(k.f(), Integer(0));
        for (std::size_t j = 0; j < k.f(); ++j) e.coeffs_[j] = v.coeffs()[j];
    }
    return e;
}

ValuedElem ValuedElem::from_digits(const LocalField& F, long val,
                                   const std::vector<ResidueElem>& digits) {
    if (digits.empty() || static_cast<int>(digits.size()) > F.precision())
        throw Error("digit list length must be in [1, precision]");
    const ResidueField& k = F.residue();
    // build as an exact sum of monomials so mixed-characteristic carries work
    ValuedElem acc = zero(F);
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (digits[i].is_zero()) continue;
        ValuedElem term = lift(F, digits[i]) * uniformizer(F, val + static_cast<long>(i));
        acc = acc.is_zero() ? term : acc + term;
    }
    (void)k;
    return acc;
}

long ValuedElem::ord() const {
    if (zero_) throw EvalError("ord of zero is infinite");
    return val_;
}

ResidueElem ValuedElem::ac() const {
    const ResidueField& k = field().residue();
    if (zero_) return ResidueElem(k);
    return digit_at(val_);
}

ResidueElem ValuedElem::digit_at(long e) const {
    const ResidueField& k = field().residue();
    if (zero_) return ResidueElem(k);
    if (e < val_) return ResidueElem(k);
    if (e >= val_ + guaranteed_)
        throw PrecisionError("digit at exponent " + std::to_string(e) +
                             " is beyond the guaranteed window");
    std::size_t i = static_cast<std::size_t>(e - val_);
    if (field_->kind() == FieldKind::EqualChar) return digits_[i];
    // base-p digit i of every coefficient
    Integer pe = pow_int(field_->p(), static_cast<int>(i));
    std::vector<std::uint32_t> c(k.f());
    for (std::size_t j = 0; j < k.f(); ++j) {
        Integer d = (coeffs_[j] / pe) % k.p();
        c[j] = static_cast<std::uint32_t>(d.get_ui());
    }
    return ResidueElem::from_coeffs(k, std::move(c));
}

void ValuedElem::normalize() {
    const ResidueField& k = field_->residue();
    if (field_->kind() == FieldKind::EqualChar) {
        std::size_t lead = 0;
        while (lead < digits_.size() && digits_[lead].is_zero()) ++lead;
        if (lead == digits_.size()) {
            throw PrecisionError("cancellation exhausted the guaranteed digits");
        }
        if (lead > 0) {
            digits_.erase(digits_.begin(), digits_.begin() + static_cast<long>(lead));
            val_ += static_cast<long>(lead);
            guaranteed_ -= static_cast<int>(lead);
        }
    } else {
        int strip = guaranteed_;
        for (const auto& c : coeffs_) {
            if (c == 0) continue;
            int v = 0;
            Integer u = c;
            while (v < strip && mpz_divisible_ui_p(u.get_mpz_t(), k.p())) {
                mpz_divexact_ui(u.get_mpz_t(), u.get_mpz_t(), k.p());
                ++v;
            }
            strip = std::min(strip, v);
            if (strip == 0) break;
        }
        bool all_zero = true;
        for (const auto& c : coeffs_)
            if (c != 0) all_zero = false;
        if (all_zero || strip >= guaranteed_)
            throw PrecisionError("cancellation exhausted the guaranteed digits");
        if (strip > 0) {
            Integer ps = pow_int(field_->p(), strip);
            for (auto& c : coeffs_) c /= ps;
            val_ += strip;
            guaranteed_ -= strip;
        }
    }
}

ValuedElem ValuedElem::operator+(const ValuedElem& o) const {
    if (&field() != &o.field()) throw Error("elements from different fields");
    if (zero_) return o;
    if (o.zero_) return *this;
    const ValuedElem& x = (val_ <= o.val_) ? *this : o;
    const ValuedElem& y = (val_ <= o.val_) ? o : *this;
    long a = x.val_;
    long end = std::min(x.val_ + x.guaranteed_, y.val_ + y.guaranteed_);
    int gwin = static_cast<int>(end - a);
    if (gwin <= 0) throw PrecisionError("operands share no guaranteed digits");
    ValuedElem r(field(), a, gwin);
    const ResidueField& k = field_->residue();
    if (field_->kind() == FieldKind::EqualChar) {
        r.digits_.assign(static_cast<std::size_t>(gwin), ResidueElem(k));
        for (int i = 0; i < gwin; ++i) r.digits_[static_cast<std::size_t>(i)] = x.digit_at(a + i) + y.digit_at(a + i);
    } else {
        Integer pg = r.pk();
        Integer shift = pow_int(field_->p(), static_cast<int>(y.val_ - a));
        r.coeffs_.assign(k.f(), Integer(0));
        for (std::size_t j = 0; j < k.f(); ++j) {
            Integer c = x.coeffs_[j] + shift * y.coeffs_[j];
            c %= pg;
            if (c < 0) c += pg;
            r.coeffs_[j] = c;
        }
    }
    r.normalize();
    return r;
}

ValuedElem ValuedElem::operator-() const {
    if (zero_) return *this;
    ValuedElem r = *this;
    if (field_->kind() == FieldKind::EqualChar) {
        for (auto& d : r.digits_) d = -d;
    } else {
        Integer pg = r.pk();
        for (auto& c : r.coeffs_) {
            if (c != 0) c = pg - c;
        }
    }
    return r;
}

ValuedElem ValuedElem::operator-(const ValuedElem& o) const { return *this + (-o); }

ValuedElem ValuedElem::operator*(const ValuedElem& o) const {
    if (&field() != &o.field()) throw Error("elements from different fields");
    if (zero_ || o.zero_) return zero(field());
    int g = std::min(guaranteed_, o.guaranteed_);
    ValuedElem r(field(), val_ + o.val_, g);
    const ResidueField& k = field_->residue();
    if (field_->kind() == FieldKind::EqualChar) {
        r.digits_.assign(static_cast<std::size_t>(g), ResidueElem(k));
        for (int t = 0; t < g; ++t) {
            ResidueElem s(k);
            for (int i = 0; i <= t; ++i) {
                if (i >= guaranteed_ || t - i >= o.guaranteed_) continue;
                s = s + digits_[static_cast<std::size_t>(i)] * o.digits_[static_cast<std::size_t>(t - i)];
            }
            r.digits_[static_cast<std::size_t>(t)] = s;
        }
    } else {
        Integer pg = r.pk();
        std::vector<Integer> A(k.f()), B(k.f());
        for (std::size_t j = 0; j < k.f(); ++j) {
            A[j] = coeffs_[j] % pg;
            B[j] = o.coeffs_[j] % pg;
        }
        r.coeffs_ = mixed_mul(A, B, k, pg);
    }
    // the product of units is a unit; no normalization needed
    return r;
}

ValuedElem ValuedElem::operator/(const ValuedElem& o) const {
    if (&field() != &o.field()) throw Error("elements from different fields");
    if (o.zero_) throw EvalError("division by zero field element");
    if (zero_) return zero(field());
    int g = std::min(guaranteed_, o.guaranteed_);
    const ResidueField& k = field_->residue();
    ValuedElem inv(field(), -o.val_, g);
    if (field_->kind() == FieldKind::EqualChar) {
        // power series inversion digit by digit
        std::vector<ResidueElem> b(static_cast<std::size_t>(g), ResidueElem(k));
        ResidueElem y0inv = o.digits_[0].inverse();
        b[0] = y0inv;
        for (int t = 1; t < g; ++t) {
            ResidueElem s(k);
            for (int i = 1; i <= t; ++i) {
                if (i >= o.guaranteed_) break;
                s = s + o.digits_[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(t - i)];
            }
            b[static_cast<std::size_t>(t)] = -(y0inv * s);
        }
        inv.digits_ = std::move(b);
    } else {
        // newton iteration w <- w(2 - vw) from the residue inverse
        Integer pg = inv.pk();
        std::vector<Integer> v(k.f());
        for (std::size_t j = 0; j < k.f(); ++j) v[j] = o.coeffs_[j] % pg;
        ResidueElem r0 = o.digit_at(o.val_).inverse();
        std::vector<Integer> w(k.f());
        for (std::size_t j = 0; j < k.f(); ++j) w[j] = r0.coeffs()[j];
        int covered = 1;
        while (covered < g) {
            std::vector<Integer> t = mixed_mul(v, w, k, pg);
            // 2 - t
            for (std::size_t j = 0; j < k.f(); ++j) {
                t[j] = -t[j];
                if (j == 0) t[j] += 2;
                t[j] %= pg;
                if (t[j] < 0) t[j] += pg;
            }
            w = mixed_mul(w, t, k, pg);
            covered *= 2;
        }
        std::vector<Integer> check = mixed_mul(v, w, k, pg);
        for (std::size_t j = 0; j < k.f(); ++j) {
            Integer want = (j == 0) ? 1 : 0;
            if (check[j] != want) throw Error("unit inversion failed to converge");
        }
        inv.coeffs_ = std::move(w);
    }
    return *this * inv;
}

ValuedElem ValuedElem::pow(unsigned long e) const {
    ValuedElem r = from_integer(field(), 1);
    if (e == 0) return r;
    ValuedElem b = *this;
    for (;;) {
        if (e & 1) r = (r.is_zero() || b.is_zero()) ? zero(field()) : r * b;
        e >>= 1;
        if (e == 0) break;
        b = b.is_zero() ? b : b * b;
    }
    return r;
}

void ValuedElem::truncate_guarantee(int g) {
    if (zero_ || g >= guaranteed_) return;
    if (g < 1) throw Error("guarantee must keep at least one digit");
    if (field_->kind() == FieldKind::EqualChar) {
        digits_.resize(static_cast<std::size_t>(g), ResidueElem(field_->residue()));
    } else {
        guaranteed_ = g;
        Integer pg = pk();
        for (auto& c : coeffs_) {
            c %= pg;
            if (c < 0) c += pg;
        }
        return;
    }
    guaranteed_ = g;
}

bool ValuedElem::operator==(const ValuedElem& o) const {
    if (&field() != &o.field()) throw Error("elements from different fields");
    if (zero_ || o.zero_) return zero_ == o.zero_;
    if (val_ != o.val_) return false;
    int g = std::min(guaranteed_, o.guaranteed_);
    for (int i = 0; i < g; ++i)
        if (digit_at(val_ + i) != o.digit_at(val_ + i)) return false;
    return true;
}

std::string ValuedElem::str() const {
    if (zero_) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < guaranteed_; ++i) {
        ResidueElem d = digit_at(val_ + i);
        if (d.is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << d.str() << "*t^" << (val_ + i);
    }
    os << " (mod t^" << (val_ + guaranteed_) << ")";
    return os.str();
}

std::vector<std::pair<long, std::uint64_t>> ValuedElem::polar_key() const {
    std::vector<std::pair<long, std::uint64_t>> key;
    if (zero_ || val_ >= 0) return key;
    long end = std::min<long>(0, val_ + guaranteed_);
    if (end < 0)
        throw PrecisionError("negative-exponent digits are not all guaranteed");
    for (long e = val_; e < 0; ++e) key.emplace_back(e, digit_at(e).index());
    return key;
}

ValuedElem parse_element(const LocalField& F, const std::string& text) {
    const ResidueField& k = F.residue();
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto parse_int = [&]() -> Integer {
        Integer sign = 1;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
            if (text[pos] == '-') sign = -1;
            ++pos;
        }
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
            throw ParseError("expected integer in element literal '" + text + "'");
        Integer v = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            v = v * 10 + (text[pos] - '0');
            ++pos;
        }
        return sign * v;
    };

    skip_ws();
    if (pos < text.size() && text[pos] == '0') {
        std::size_t save = pos;
        ++pos;
        skip_ws();
        if (pos == text.size()) return ValuedElem::zero(F);
        pos = save;
    }

    ValuedElem acc = ValuedElem::zero(F);
    bool any = false;
    std::optional<long> mod_cap;
    for (;;) {
        skip_ws();
        if (pos >= text.size()) break;
        if (text[pos] == '(' && text.compare(pos, 4, "(mod") == 0) {
            ++pos; // '('
            pos += 3; // 'mod'
            skip_ws();
            if (text.compare(pos, 1, "t") != 0) throw ParseError("bad mod tail in '" + text + "'");
            ++pos;
            if (pos >= text.size() || text[pos] != '^') throw ParseError("bad mod tail in '" + text + "'");
            ++pos;
            Integer n = parse_int();
            mod_cap = static_cast<long>(n.get_si());
            skip_ws();
            if (pos >= text.size() || text[pos] != ')') throw ParseError("bad mod tail in '" + text + "'");
            ++pos;
            skip_ws();
            if (pos != text.size()) throw ParseError("trailing text after mod tail in '" + text + "'");
            break;
        }
        int sign = 1;
        while (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            if (text[pos] == '-') sign = -sign;
            ++pos;
            skip_ws();
        }
        if (pos >= text.size()) throw ParseError("dangling sign in element literal '" + text + "'");
        // one term: product of integer / residue / t^e factors
        ValuedElem term = ValuedElem::from_integer(F, sign);
        bool factor_expected = true;
        while (factor_expected) {
            skip_ws();
            if (pos >= text.size()) throw ParseError("dangling '*' in element literal '" + text + "'");
            if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
                term = term * ValuedElem::from_integer(F, parse_int());
            } else if (text[pos] == '(') {
                // parenthesized residue digit such as (a^2 + 1)
                int depth = 0;
                std::size_t start = pos;
                std::size_t end = pos;
                for (; end < text.size(); ++end) {
                    if (text[end] == '(') ++depth;
                    if (text[end] == ')') {
                        --depth;
                        if (depth == 0) break;
                    }
                }
                if (depth != 0) throw ParseError("unbalanced parens in '" + text + "'");
                term = term * ValuedElem::lift(F, parse_residue(k, text.substr(start, end - start + 1)));
                pos = end + 1;
            } else if (text[pos] == 'a') {
                ++pos;
                long deg = 1;
                if (pos < text.size() && text[pos] == '^') {
                    ++pos;
                    deg = static_cast<long>(parse_int().get_si());
                }
                std::string lit = deg == 1 ? "a" : ("a^" + std::to_string(deg));
                term = term * ValuedElem::lift(F, parse_residue(k, lit));
            } else if (text[pos] == 't') {
                ++pos;
                long e = 1;
                if (pos < text.size() && text[pos] == '^') {
                    ++pos;
                    e = static_cast<long>(parse_int().get_si());
                }
                if (!term.is_zero()) term = term * ValuedElem::uniformizer(F, e);
            } else {
                throw ParseError("unexpected character '" + std::string(1, text[pos]) +
                                 "' in element literal '" + text + "'");
            }
            skip_ws();
            if (pos < text.size() && text[pos] == '*') {
                ++pos;
                factor_expected = true;
            } else {
                factor_expected = false;
            }
        }
        acc = any ? acc + term : term;
        any = true;
    }
    if (!any) throw ParseError("empty element literal '" + text + "'");
    if (mod_cap) {
        if (acc.is_zero()) return acc;
        long g = *mod_cap - acc.ord();
        if (g <= 0)
            throw ParseError("mod cap t^" + std::to_string(*mod_cap) +
                             " leaves no guaranteed digits");
        // rebuild with the truncated window
        std::vector<ResidueElem> digits;
        int keep = std::min<long>(g, acc.guaranteed());
        for (int i = 0; i < keep; ++i) digits.push_back(acc.digit_at(acc.ord() + i));
        ValuedElem out = ValuedElem::from_digits(F, acc.ord(), digits);
        if (static_cast<long>(keep) < static_cast<long>(out.guaranteed())) {
            // from_digits treats the list as exact; shrink the window honestly
            out.truncate_guarantee(keep);
        }
        return out;
    }
    return acc;
}

} // namespace motx
