#pragma once

#include <cstdint>
#include <vector>

#include "motx/character.hpp"
#include "motx/cyclotomic.hpp"
#include "motx/eval.hpp"
#include "motx/ir.hpp"
#include "motx/localfield.hpp"

namespace motx {

// One grouped summand: a representative argument (zero, or of negative
// valuation) and the absorbed coefficient per input spec.  Every character
// of the family is constant on the group the representative generates mod
// the valuation ring, so sum(psi(g) * h[i]) over entries reproduces
// spec i at the point, for every enumerated psi.
struct PolarEntry {
    ValuedElem g;
    std::vector<Cyclotomic> h;
};

struct PolarDecomposition {
    Point x;
    int depth = 0;
    std::vector<PolarEntry> entries; // pairwise ord(g - g') < 0, all-zero h dropped
    std::size_t size() const { return entries.size(); }
};

// Groups the oscillating summands at x by the class of the g-value modulo
// the valuation ring.  Each class representative is the arithmetic mean of
// the distinct g-values in the class (requires the class size to be prime
// to p); the difference is pushed into the residue factor.  Throws
// DepthError (with the needed depth) when some g-value has valuation below
// -depth, PrecisionError when the class of a g-value is not determined at
// working precision.
PolarDecomposition polar_decompose(const ExpFunSpec& spec, const LocalField& F,
                                   const Point& x, int depth,
                                   const Limits& lim = default_limits());

// Joint decomposition with one shared entry set: entry k carries h[i] for
// spec i (0 when spec i has no mass in that class).
PolarDecomposition polar_decompose_joint(const std::vector<const ExpFunSpec*>& specs,
                                         const LocalField& F, const Point& x, int depth,
                                         const Limits& lim = default_limits());

// Smallest depth whose character family separates all polar parts occurring
// over the sample: max(0, -min ord of the g-values).
int required_depth(const std::vector<const ExpFunSpec*>& specs, const LocalField& F,
                   const std::vector<Point>& sample, const Limits& lim = default_limits());

// The squared majorant: values[j] = N' * sum |h'|^2 at sample[j], with
// N' = max entry count over the sample and N = N'^2.  Values are exact,
// real and nonnegative.
struct TildeResult {
    std::vector<Cyclotomic> values;
    std::uint64_t nprime = 0;
    std::uint64_t n = 0;
};

TildeResult tilde_H(const ExpFunSpec& spec, const LocalField& F,
                    const std::vector<Point>& sample, int depth,
                    const Limits& lim = default_limits());

// Witness character: the depth-d family member maximizing |H_psi(x)| (ties
// resolved toward the smaller enumeration index; comparisons exact).  The
// verdict asserts (1/N) * tilde(x) <= |H_psi1(x)|^2 with the per-point
// N = (entry count)^2.
struct WitnessResult {
    std::uint64_t index = 0;     // enumeration index of psi1
    Cyclotomic value;            // H_{psi1}(x)
    Cyclotomic value_sq;         // |value|^2, exact
    Cyclotomic tilde;            // N' * sum |h'|^2 at x
    std::uint64_t n = 1;         // N = N'^2 at x
    bool verdict = false;
};

WitnessResult witness_psi1(const ExpFunSpec& spec, const LocalField& F, const Point& x,
                           int depth, const Limits& lim = default_limits());

// Matrix majorant for a tuple of specs sharing one decomposition:
// values[j][i][s] = N' * sum_k h_i conj(h_s) at sample[j].  Hermitian and
// positive semidefinite; for rational c, sum c_i c_s values[i][s] equals
// N' * sum_k |sum_i c_i h_i|^2.
struct GramResult {
    std::vector<std::vector<std::vector<Cyclotomic>>> values;
    std::uint64_t nprime = 0;
    std::uint64_t n = 0;
};

GramResult gram_tilde(const std::vector<const ExpFunSpec*>& specs, const LocalField& F,
                      const std::vector<Point>& sample, int depth,
                      const Limits& lim = default_limits());

// H_psi(x) recovered from a decomposition: sum psi(g) * h[i].
Cyclotomic reconstruct(const PolarDecomposition& d, const Character& psi, std::size_t i = 0);

} // namespace motx
