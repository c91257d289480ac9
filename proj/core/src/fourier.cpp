#include "motx/fourier.hpp"

#include <numeric>

#include "motx/errors.hpp"

namespace motx {

AbelianGroup::AbelianGroup(std::vector<std::uint64_t> factors, const Limits& lim)
    : factors_(std::move(factors)) {
    if (factors_.empty()) throw Error("abelian group needs at least one factor");
    order_ = 1;
    for (auto n : factors_) {
        if (n == 0) throw Error("zero group factor");
        if (order_ > lim.max_group / n)
            throw CapacityError("group order exceeds the configured cap");
        order_ *= n;
    }
}

std::vector<std::uint64_t> AbelianGroup::element(std::uint64_t rank) const {
    if (rank >= order_) throw Error("group element rank out of range");
    std::vector<std::uint64_t> x(factors_.size());
    for (std::size_t i = factors_.size(); i-- > 0;) {
        x[i] = rank % factors_[i];
        rank /= factors_[i];
    }
    return x;
}

std::uint64_t AbelianGroup::rank_of(const std::vector<std::uint64_t>& x) const {
    if (x.size() != factors_.size()) throw Error("group element has wrong arity");
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (x[i] >= factors_[i]) throw Error("group coordinate out of range");
        r = r * factors_[i] + x[i];
    }
    return r;
}

Cyclotomic AbelianGroup::pairing(const std::vector<std::uint64_t>& theta,
                                 const std::vector<std::uint64_t>& x) const {
    Cyclotomic v(1);
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (factors_[i] == 1) continue;
        v *= Cyclotomic::root_of_unity(factors_[i],
                                       static_cast<long long>(theta[i] * x[i] % factors_[i]));
    }
    return v;
}

GroupFunction fourier_transform(const AbelianGroup& G, const GroupFunction& f) {
    if (f.values.size() != G.order()) throw Error("function size does not match group order");
    GroupFunction out;
    out.values.assign(G.order(), Cyclotomic(0));
    for (std::uint64_t t = 0; t < G.order(); ++t) {
        auto theta = G.element(t);
        Cyclotomic acc(0);
        for (std::uint64_t r = 0; r < G.order(); ++r) {
            if (f.values[r].is_zero()) continue;
            acc += f.values[r] * G.pairing(theta, G.element(r));
        }
        out.values[t] = acc;
    }
    return out;
}

namespace {

// max of |v|^2 over a list, by exact sign comparisons
Cyclotomic sup_abs_sq(const std::vector<Cyclotomic>& vals, std::uint64_t* argmax = nullptr) {
    Cyclotomic best(0);
    std::uint64_t besti = 0;
    bool have = false;
    for (std::uint64_t i = 0; i < vals.size(); ++i) {
        Cyclotomic a = vals[i].abs_sq();
        if (!have || (a - best).sign_real() > 0) {
            best = a;
            besti = i;
            have = true;
        }
    }
    if (argmax) *argmax = besti;
    return best;
}

} // namespace

NormSandwich check_norm_sandwich(const AbelianGroup& G, const GroupFunction& f) {
    GroupFunction fh = fourier_transform(G, f);
    NormSandwich s;
    s.sup_f_sq = sup_abs_sq(f.values);
    s.sup_fhat_sq = sup_abs_sq(fh.values);
    Rational g2(static_cast<long>(G.order()));
    g2 *= g2;
    s.lower_ok = (Cyclotomic(g2) * s.sup_f_sq - s.sup_fhat_sq).sign_real() >= 0;
    s.upper_ok = (s.sup_fhat_sq - s.sup_f_sq).sign_real() >= 0;
    return s;
}

bool plancherel_check(const AbelianGroup& G, const GroupFunction& f) {
    GroupFunction fh = fourier_transform(G, f);
    Cyclotomic lhs(0), rhs(0);
    for (const auto& v : f.values) lhs += v.abs_sq();
    for (const auto& v : fh.values) rhs += v.abs_sq();
    return Cyclotomic(Rational(static_cast<long>(G.order()))) * lhs == rhs;
}

std::uint64_t find_peak_character(const AbelianGroup& G, const GroupFunction& f) {
    GroupFunction fh = fourier_transform(G, f);
    std::uint64_t arg = 0;
    sup_abs_sq(fh.values, &arg);
    return arg;
}

} // namespace motx
