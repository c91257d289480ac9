#pragma once

#include <cstdint>
#include <vector>

#include "motx/cyclotomic.hpp"
#include "motx/limits.hpp"
#include "motx/localfield.hpp"
#include "motx/residue.hpp"

namespace motx {

// One additive character of depth d: trivial on pi^(d+1) O, nontrivial on
// pi^d O (for d = 0: trivial on the maximal ideal, and restricting on the
// valuation ring to x -> e(tr(xbar)) with e(a) = exp(2 pi i a / p)).
//
// Equal characteristic: psi(x) = e(tr(lambda_0 d_0 + ... + lambda_d d_{-d}))
// where d_e is the digit of x at exponent e and lambda_0 = 1.
// Mixed characteristic: psi(x) = zeta_{p^{d+1}} ^ (sum_j theta_j c_j(p^d x))
// with c_j the coefficients of the unit part in the residue power basis and
// theta_j = tr(a^j) mod p.  Depth-d members differ by the free choices
// lambda_1..lambda_d (resp. theta_j mod p^{d+1} above the trace constraint),
// q^d characters in total, enumerated in a fixed order.
class Character {
public:
    const LocalField& field() const { return *F_; }
    int depth() const { return depth_; }
    std::uint64_t index() const { return index_; }

    // psi(x); requires ord(x) >= -depth, else DepthError
    Cyclotomic operator()(const ValuedElem& x) const;
    // psi(x + u) for the canonical unit lift u of the residue v; any other
    // lift gives the same value because psi is trivial on the maximal ideal
    Cyclotomic operator()(const ValuedElem& x, const ResidueElem& v) const;

    bool operator==(const Character& o) const;

private:
    friend Character standard_psi(const LocalField&);
    friend Character character_at(const LocalField&, int, std::uint64_t, const Limits&);
    Character(const LocalField& F, int depth, std::uint64_t index);

    const LocalField* F_;
    int depth_;
    std::uint64_t index_;
    std::vector<ResidueElem> lambda_; // equal char: d+1 residue weights, lambda_0 = 1
    std::vector<Integer> theta_;      // mixed char: f weights mod p^{d+1}
};

// The depth-0 base point of the family.
Character standard_psi(const LocalField& F);

// Member #index of the depth-d family, 0 <= index < q^d.
Character character_at(const LocalField& F, int depth, std::uint64_t index,
                       const Limits& lim = default_limits());

// The whole depth-d family in enumeration order (q^d members).
std::vector<Character> enumerate_characters(const LocalField& F, int depth,
                                            const Limits& lim = default_limits());

// e(tr(v)) for a residue element v: the standard character of the residue
// field composed with the trace to the prime field.
Cyclotomic residue_character(const ResidueElem& v);

} // namespace motx
