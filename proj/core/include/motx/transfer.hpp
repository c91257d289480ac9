#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "motx/eval.hpp"
#include "motx/ir.hpp"
#include "motx/limits.hpp"
#include "motx/localfield.hpp"
#include "motx/rational.hpp"

namespace motx {

// One prime sweep: for each p in [p_min, p_max] the pair F = F_q((t)),
// F' = Q_q (unramified, same residue field) is built at the configured
// precision, a seeded sample grid is drawn once per prime as digit-level
// profiles and instantiated in both fields, and the statement is evaluated
// over the full depth-d character family.
struct SweepConfig {
    std::uint32_t p_min = 5, p_max = 23;
    std::uint32_t f = 1;
    int precision = 8;
    int depth = 0;              // raised automatically when polar parts need more
    int samples = 8;            // grid points per prime
    long vf_vmin = 0;           // valuation window for valued-field samples
    long vf_vmax = 1;
    int vf_digits = 2;          // digits drawn per valued-field sample
    long long zz_lo = -3, zz_hi = 3;
    std::uint64_t seed = 1;     // fixes every random draw
    std::vector<std::vector<Rational>> c_vectors; // explicit coefficient tuples
    int c_random = 0;                             // extra seeded random tuples
    std::vector<std::string> y_vars;              // dependence: variables fixed per test
    int y_samples = 3;
    std::vector<std::string> profile_polys;       // factorization: extra terms profiled
    double tolerance = 1e-9;                      // float renderings only; logic is exact
    Limits limits;
};

struct ReportRow {
    std::string statement;
    std::uint32_t p = 0;
    std::string field;           // "eq", "mixed" (or "both" for summary rows)
    int depth = 0;
    std::uint64_t grid_size = 0;
    bool hypothesis_ok = true;
    std::uint64_t min_n = 0;     // minimal integer N; 0 = none exists / not applicable
    std::uint64_t violations = 0;
    std::string flags;           // semicolon-joined caveats; never fails a run
    std::string detail;          // first counterexample / note
};

struct TransferReport {
    std::string statement;
    std::vector<ReportRow> rows;
    bool ok = true;              // no statement-level violations
};

// |H_psi(x)| <= |G(x)| checked in both fields over grid x family; per-field
// rows carry the hypothesis verdict, the minimal N with |H| <= N|G| where
// G != 0, and the count of points with G = 0 but H != 0.  G must be in the
// residue-oscillation class (its value is then character-independent).
TransferReport check_bound_transfer(const ExpFunSpec& h, const ExpFunSpec& g,
                                    const SweepConfig& cfg);

// The same for every coefficient tuple c in the grid, applied to
// sum_i c_i H_i; per-c rows plus a per-prime uniform summary (max N over c).
TransferReport check_bound_transfer_lincomb(const std::vector<const ExpFunSpec*>& hs,
                                            const ExpFunSpec& g, const SweepConfig& cfg);

// Exact vanishing of sum_i c_i H_i on grid x family, in both fields;
// statement holds when the two verdicts agree.
TransferReport check_coeff_transfer(const std::vector<const ExpFunSpec*>& hs,
                                    const std::vector<Rational>& c,
                                    const SweepConfig& cfg);

// Linear (in)dependence of x -> H_i(x, y) on the sample, per (psi, y), in
// both fields; rows count verdict disagreements between the pair.
TransferReport check_dependence_transfer(const std::vector<const ExpFunSpec*>& hs,
                                         const SweepConfig& cfg);

// For specs with residue/integer variables only: exact equality of values
// across the field pair at every grid point.
TransferReport check_rf_zz_rigidity(const ExpFunSpec& h, const SweepConfig& cfg);

// Empirical factorization through the profile map x -> (ord, ac of every
// valued-field coordinate and of each configured polynomial; residue and
// integer coordinates): grid points with equal profiles must carry equal
// values.  A collision means the profile list is too coarse for this spec.
TransferReport check_factorization(const ExpFunSpec& h, const SweepConfig& cfg);

// The seeded grid machinery, exposed for the CLI and tests: profiles are
// drawn once and instantiated in both fields, so grids are matched by
// (ord, digits, RF, ZZ) data.  Enlarging `samples` keeps earlier points.
std::pair<std::vector<Point>, std::vector<Point>> matched_grids(
    const std::vector<VarDecl>& vars, const LocalField& f1, const LocalField& f2,
    const SweepConfig& cfg);
std::vector<Point> sample_grid(const std::vector<VarDecl>& vars, const LocalField& F,
                               const SweepConfig& cfg);

// Primes of [lo, hi] in order.
std::vector<std::uint32_t> primes_in(std::uint32_t lo, std::uint32_t hi);

} // namespace motx
