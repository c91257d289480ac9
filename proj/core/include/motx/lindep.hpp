#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "motx/character.hpp"
#include "motx/cyclotomic.hpp"
#include "motx/eval.hpp"
#include "motx/ir.hpp"

namespace motx {

// rows[j][i] = f_i(z_j): sample point j, function i; entries exact
using CycloMatrix = std::vector<std::vector<Cyclotomic>>;

// Exact determinant (cofactor expansion; sizes here stay tiny).
Cyclotomic det(const CycloMatrix& m);

enum class DepVerdict { Dependent, Independent, Inconclusive };

struct DependenceResult {
    DepVerdict verdict = DepVerdict::Inconclusive;
    // Dependent: nonzero c with sum_i c_i f_i = 0 on the whole sample
    std::vector<Cyclotomic> kernel;
    // Independent: row indices z_1..z_l with det(f_i(z_j)) != 0
    std::vector<std::size_t> witness;
};

// Exact rank decision on the sample: Independent with a witness tuple when
// the greedy row extension reaches full rank, Dependent with a kernel
// vector otherwise.  Requires at least as many rows as columns.
DependenceResult dependence_test(const CycloMatrix& rows);

struct CramerResult {
    Cyclotomic d;                 // det(H_i(x_j))
    std::vector<Cyclotomic> cap;  // C_i: column i replaced by the G-values
    std::vector<Cyclotomic> c;    // c_i = C_i / d
};

// Recovers the coefficients expressing G through H_1..H_l on the tuple w
// (each w[j] already merged with the fixed y-part).  Throws EvalError when
// the determinant vanishes.
CramerResult cramer_coeffs(const std::vector<const ExpFunSpec*>& hs, const ExpFunSpec& g,
                           const LocalField& F, const Character& psi,
                           const std::vector<Point>& w,
                           const Limits& lim = default_limits());

// First point tuple (greedy row extension over the candidates) with
// det(H_i(x_j)) != 0; nullopt when the H_i are dependent on the sample.
std::optional<std::vector<Point>> find_witness_w(const std::vector<const ExpFunSpec*>& hs,
                                                 const LocalField& F, const Character& psi,
                                                 const std::vector<Point>& candidates,
                                                 const Limits& lim = default_limits());

} // namespace motx
