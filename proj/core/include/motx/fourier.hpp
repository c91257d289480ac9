#pragma once

#include <cstdint>
#include <vector>

#include "motx/cyclotomic.hpp"
#include "motx/limits.hpp"

namespace motx {

// A finite abelian group given by invariant factors n_1, ..., n_k; elements
// are index vectors (x_1, ..., x_k) with 0 <= x_i < n_i, enumerated
// lexicographically (last coordinate fastest).  Characters are indexed by
// the same tuples: chi_theta(x) = prod_i zeta_{n_i}^{theta_i x_i}.
class AbelianGroup {
public:
    explicit AbelianGroup(std::vector<std::uint64_t> factors,
                          const Limits& lim = default_limits());

    std::uint64_t order() const { return order_; }
    const std::vector<std::uint64_t>& factors() const { return factors_; }

    std::vector<std::uint64_t> element(std::uint64_t rank) const;
    std::uint64_t rank_of(const std::vector<std::uint64_t>& x) const;

    // chi_theta(x) as an exact root of unity
    Cyclotomic pairing(const std::vector<std::uint64_t>& theta,
                       const std::vector<std::uint64_t>& x) const;

private:
    std::vector<std::uint64_t> factors_;
    std::uint64_t order_;
};

// A function G -> Q(zeta) stored by element rank.
struct GroupFunction {
    std::vector<Cyclotomic> values;
};

// fhat(theta) = sum_x f(x) chi_theta(x)  (no normalization)
GroupFunction fourier_transform(const AbelianGroup& G, const GroupFunction& f);

// max |f(x)|^2 and max |fhat(chi)|^2 as exact real cyclotomics, plus the
// verdict for (1/|G|) sup|fhat| <= sup|f| <= sup|fhat|, checked exactly on
// the squares.
struct NormSandwich {
    Cyclotomic sup_f_sq;
    Cyclotomic sup_fhat_sq;
    bool lower_ok; // sup|fhat|^2 <= |G|^2 sup|f|^2
    bool upper_ok; // sup|f|^2 <= sup|fhat|^2
};
NormSandwich check_norm_sandwich(const AbelianGroup& G, const GroupFunction& f);

// |G| * sum_x |f(x)|^2 == sum_chi |fhat(chi)|^2, exactly.
bool plancherel_check(const AbelianGroup& G, const GroupFunction& f);

// Index of a character chi maximizing |fhat(chi)|; exact comparisons.
std::uint64_t find_peak_character(const AbelianGroup& G, const GroupFunction& f);

} // namespace motx
