#include "motx/character.hpp"

#include <string>

#include "motx/errors.hpp"

namespace motx {

namespace {

std::uint64_t family_size(const LocalField& F, int depth, const Limits& lim) {
    std::uint64_t n = 1;
    for (int i = 0; i < depth; ++i) {
        if (n > lim.max_characters / F.q())
            throw CapacityError("character family larger than the configured cap");
        n *= F.q();
    }
    return n;
}

} // namespace

Cyclotomic residue_character(const ResidueElem& v) {
    return Cyclotomic::root_of_unity(v.field().p(), v.trace());
}

Character::Character(const LocalField& F, int depth, std::uint64_t index)
    : F_(&F), depth_(depth), index_(index) {
    if (depth < 0) throw Error("character depth must be nonnegative");
    if (depth + 1 > F.precision())
        throw Error("character depth " + std::to_string(depth) +
                    " needs precision at least " + std::to_string(depth + 1));
    const ResidueField& k = F.residue();
    if (F.kind() == FieldKind::EqualChar) {
        lambda_.reserve(static_cast<std::size_t>(depth) + 1);
        lambda_.push_back(ResidueElem(k, 1));
        std::uint64_t rest = index;
        for (int i = 1; i <= depth; ++i) {
            lambda_.push_back(ResidueElem::from_index(k, rest % k.q()));
            rest /= k.q();
        }
        if (rest != 0) throw Error("character index out of range");
    } else {
        // theta_j = tr(a^j) + p * k_j with the k_j digits of the index in base p^d
        Integer pd = 1;
        for (int i = 0; i < depth; ++i) pd *= k.p();
        theta_.resize(k.f());
        Integer rest = index;
        ResidueElem gen = (k.f() == 1) ? ResidueElem(k, 1)
                                       : ResidueElem::from_coeffs(k, [&] {
                                             std::vector<std::uint32_t> c(k.f(), 0);
                                             c[1] = 1;
                                             return c;
                                         }());
        for (std::size_t j = 0; j < k.f(); ++j) {
            Integer kj = rest % pd;
            rest /= pd;
            std::uint32_t tau = gen.pow(j).trace();
            theta_[j] = Integer(tau) + Integer(k.p()) * kj;
        }
        if (rest != 0) throw Error("character index out of range");
    }
}

Character standard_psi(const LocalField& F) { return Character(F, 0, 0); }

Character character_at(const LocalField& F, int depth, std::uint64_t index, const Limits& lim) {
    std::uint64_t n = family_size(F, depth, lim);
    if (index >= n) throw Error("character index out of range");
    return Character(F, depth, index);
}

std::vector<Character> enumerate_characters(const LocalField& F, int depth, const Limits& lim) {
    std::uint64_t n = family_size(F, depth, lim);
    std::vector<Character> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(character_at(F, depth, i, lim));
    return out;
}

bool Character::operator==(const Character& o) const {
    return F_ == o.F_ && depth_ == o.depth_ && index_ == o.index_;
}

Cyclotomic Character::operator()(const ValuedElem& x) const {
    if (&x.field() != F_) throw Error("character applied to an element of another field");
    if (x.is_zero()) return Cyclotomic(1);
    long v = x.ord();
    if (v < -depth_)
        throw DepthError("argument valuation " + std::to_string(v) +
                             " is below -depth = " + std::to_string(-depth_),
                         static_cast<int>(-v));
    const ResidueField& k = F_->residue();
    if (F_->kind() == FieldKind::EqualChar) {
        ResidueElem s(k);
        for (int i = 0; i <= depth_; ++i) {
            long e = -static_cast<long>(i);
            if (e < v) break; // lower digits of x vanish
            s = s + lambda_[static_cast<std::size_t>(i)] * x.digit_at(e);
        }
        return Cyclotomic::root_of_unity(k.p(), s.trace());
    }
    // mixed: exponent sum theta_j c_j(p^d x) modulo p^{d+1}
    if (v >= 1) return Cyclotomic(1);
    Integer mod = 1;
    for (int i = 0; i <= depth_; ++i) mod *= k.p();
    int need = static_cast<int>(1 - v); // coefficients of the unit mod p^need
    if (need > x.guaranteed())
        throw PrecisionError("character needs " + std::to_string(need) +
                             " digits but only " + std::to_string(x.guaranteed()) +
                             " are guaranteed");
    Integer scale = 1; // p^{v + depth}
    for (long i = 0; i < v + depth_; ++i) scale *= k.p();
    Integer s = 0;
    for (std::size_t j = 0; j < k.f(); ++j) {
        // unit coefficient j, available via the digit expansion
        Integer cj = 0, pe = 1;
        for (int i = 0; i < need; ++i) {
            cj += Integer(x.digit_at(v + i).coeffs()[j]) * pe;
            pe *= k.p();
        }
        s += theta_[j] * cj;
    }
    s = (s * scale) % mod;
    if (s < 0) s += mod;
    return Cyclotomic::root_of_unity(mod.get_ui(), static_cast<long long>(s.get_ui()));
}

Cyclotomic Character::operator()(const ValuedElem& x, const ResidueElem& v) const {
    // evaluate on x plus the canonical unit lift of v
    ValuedElem u = ValuedElem::lift(*F_, v);
    if (u.is_zero()) return (*this)(x);
    if (x.is_zero()) return (*this)(u);
    return (*this)(x + u);
}

} // namespace motx
