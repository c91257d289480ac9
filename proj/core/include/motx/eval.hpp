#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "motx/character.hpp"
#include "motx/cyclotomic.hpp"
#include "motx/ir.hpp"
#include "motx/limits.hpp"
#include "motx/localfield.hpp"

namespace motx {

// A variable binding: valued-field element, residue element or integer.
using Value = std::variant<ValuedElem, ResidueElem, long long>;

struct Point {
    std::vector<std::pair<std::string, Value>> vals;
    const Value* find(const std::string& name) const;
    void set(const std::string& name, Value v);
    std::string str() const; // "x = ...; z = 3"
};

// Integer evaluation result; inf marks ord(0).
struct ZVal {
    bool inf = false;
    long long v = 0;
};

// Environment: field + bindings.  Formula atoms compare ord(0) as +infinity;
// using it inside integer arithmetic raises EvalError.
struct Env {
    const LocalField* F = nullptr;
    const Limits* limits = nullptr;
    Point bindings;
};

ValuedElem eval_vf(const ExprPtr& e, const Env& env);
ResidueElem eval_rf(const ExprPtr& e, const Env& env);
ZVal eval_zz(const ExprPtr& e, const Env& env);
bool eval_formula(const FormulaPtr& f, const Env& env);

// All residue tuples satisfying the formula (all tuples when f is null).
// Enumerates q^|vars| candidates; respects limits.max_enum.
std::vector<std::vector<ResidueElem>> enum_set(const std::vector<VarDecl>& vars,
                                               const FormulaPtr& f, const Env& env);

// Counting-sum value at a point; points outside the ambient set give 0.
Rational eval_motfun(const MotFunSpec& spec, const LocalField& F, const Point& x,
                     const Limits& lim = default_limits());

// Full oscillating sum at a point (exact).  Points outside the ambient set
// give 0.  Throws DepthError when some g value has valuation below -depth.
Cyclotomic eval_expfun(const ExpFunSpec& spec, const LocalField& F, const Character& psi,
                       const Point& x, const Limits& lim = default_limits());

// the coefficient function H_i of one summand, evaluated at a point
Rational eval_summand_h(const ExpSummand& s, const Env& env);

// resolve a guarded case list at a point: exactly one explicit guard may
// hold; with none, the otherwise arm is taken.  Overlaps and gaps raise
// EvalError naming the arms involved.
template <class Arm>
const Arm& resolve_case(const std::vector<Arm>& arms, const Env& env,
                        const std::string& what);

// --- integration over a fiber --------------------------------------------

struct VfWindow {
    long vmin = 0;
    long vmax = 2;
    int digits = 1;        // digits enumerated per element, leading included
    bool include_tail = true; // add the ball pi^{vmax+1} O as one cell
};

struct ZzWindow {
    long long lo = 0, hi = 0;
};

// Fiber variable domains; residue variables enumerate the residue field and
// need no entry.
struct EvalDomain {
    std::vector<std::pair<std::string, VfWindow>> vf;
    std::vector<std::pair<std::string, ZzWindow>> zz;
};

struct IntegralResult {
    Cyclotomic exact;                  // cell-sum with exact weights
    std::complex<double> approx;
    bool tail_ok = true;               // decay seen on the last two shells
    std::uint64_t cells = 0;
    std::string note;
};

// Integrates the spec over the fiber variables (Haar measure on VF with
// measure(O) = 1, counting measure on RF and ZZ), holding the variables in
// `outer` fixed.  Every spec variable must be bound by exactly one of
// outer / dom / residue enumeration.
IntegralResult integrate_fiber(const ExpFunSpec& spec, const LocalField& F,
                               const Character& psi, const Point& outer,
                               const EvalDomain& dom,
                               const Limits& lim = default_limits());

} // namespace motx
