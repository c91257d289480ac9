#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace motx {

// Three-sorted language: valued field (VF), residue field (RF), value
// group / integers (ZZ).
enum class Sort { VF, RF, ZZ };

std::string sort_name(Sort s);

struct VarDecl {
    std::string name;
    Sort sort = Sort::VF;
    bool operator==(const VarDecl& o) const { return name == o.name && sort == o.sort; }
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Terms.  VF-terms are polynomials in VF variables and the uniformizer
// symbol t with integer coefficients.  RF-terms are polynomials in RF
// variables and ac(VF-term) with integer coefficients.  ZZ-terms are
// integer linear combinations of ZZ variables and ord(VF-term), plus
// case constructs (guarded integer terms).
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct CaseArm {
    FormulaPtr guard; // null guard means "otherwise"
    ExprPtr value;
};

struct Expr {
    enum class Kind { IntLit, Uniformizer, Var, Add, Sub, Neg, Mul, Pow, Ac, Ord, Case };
    Kind kind = Kind::IntLit;
    Sort sort = Sort::ZZ;
    long long ival = 0;        // IntLit value, or Pow exponent
    std::string name;          // Var
    std::vector<ExprPtr> args; // operands (Pow: single base)
    std::vector<CaseArm> arms; // Case
    int line = 0, col = 0;
};

enum class CmpOp { Eq, Ne, Le, Lt, Ge, Gt };

struct Formula {
    enum class Kind { True, False, Cmp, Cong, And, Or, Not, Exists, Forall };
    Kind kind = Kind::True;
    CmpOp op = CmpOp::Eq;        // Cmp
    ExprPtr lhs, rhs;            // Cmp / Cong
    long long modulus = 0;       // Cong: lhs = rhs mod modulus
    std::vector<FormulaPtr> args; // And / Or / Not
    VarDecl qvar;                // quantifiers
    ExprPtr lo, hi;              // ZZ quantifier bounds (inclusive); null for RF
    FormulaPtr body;
    int line = 0, col = 0;
};

// One term of a counting-sum function:
//   #Y(x, w) * q^alpha(x) * prod_j beta_j(x) * prod_l 1/(1 - q^{a_l})
struct MotTerm {
    std::vector<VarDecl> count_vars; // RF tuple w
    FormulaPtr count_set;            // defaults to true
    ExprPtr alpha;                   // ZZ-term, null means 0
    std::vector<ExprPtr> betas;      // ZZ-terms
    std::vector<long long> geoms;    // nonzero exponents a_l
};

struct MotFunSpec {
    std::vector<VarDecl> vars; // ambient variables (mixed sorts)
    FormulaPtr ambient;        // domain X, defaults to true
    std::vector<MotTerm> terms;
};

// One guarded value of an oscillation argument g.
struct GCase {
    FormulaPtr guard; // null means "otherwise"
    ExprPtr value;    // VF-term
};

// One summand H_i(x) * sum_{y in Y_i} psi(g_i(x,y) + e_i(x,y)).
struct ExpSummand {
    std::vector<MotTerm> h_terms;    // the coefficient function H_i; empty means 1
    std::vector<VarDecl> osc_vars;   // RF tuple y (may be empty)
    FormulaPtr osc_set;              // Y_i, defaults to true
    std::vector<GCase> g;            // empty means g = 0
    ExprPtr e;                       // RF-term, null means 0
};

enum class SpecClass { C, Ce, Cexp };

struct ExpFunSpec {
    std::vector<VarDecl> vars;
    FormulaPtr ambient;
    std::vector<ExpSummand> summands;
    std::optional<SpecClass> declared_class;
    std::string source_name; // file name or synthetic tag, for messages

    bool is_motivic() const;  // no oscillation parts at all
    bool is_ce() const;       // every g case value is the literal zero term
    MotFunSpec as_motfun() const; // requires is_motivic()
};

// --- structural helpers -------------------------------------------------

bool equal(const ExprPtr& a, const ExprPtr& b);
bool equal(const FormulaPtr& a, const FormulaPtr& b);
bool equal(const ExpFunSpec& a, const ExpFunSpec& b);

// capture-free renaming of free variables (used when joining summands)
ExprPtr rename_vars(const ExprPtr& e, const std::vector<std::pair<std::string, std::string>>& map);
FormulaPtr rename_vars(const FormulaPtr& f, const std::vector<std::pair<std::string, std::string>>& map);

// canonical one-line form of a term / formula (reparses to an equal tree)
std::string print_expr(const ExprPtr& e);
std::string print_formula(const FormulaPtr& f);
// full document in the block syntax accepted by parse_spec
std::string print_spec(const ExpFunSpec& spec);

// --- validation ----------------------------------------------------------

struct Diagnostic {
    enum class Severity { Error, Warning, Note };
    Severity severity = Severity::Error;
    std::string message;
    int line = 0, col = 0;
};

// Structural checks: sorts, declared/derived class agreement, nonzero
// geometric exponents, bounded quantifiers, linear ZZ-terms, case lists
// (static overlap/coverage analysis on interval guards; whatever cannot be
// decided statically is enforced pointwise at evaluation).
std::vector<Diagnostic> validate(const ExpFunSpec& spec);
bool has_errors(const std::vector<Diagnostic>& diags);
std::string render(const std::vector<Diagnostic>& diags);

// --- conjugate square ----------------------------------------------------

// For a spec with all g = 0, builds the spec of |H|^2: summand pairs (i, s)
// with oscillation sets Y_i x Y_s, coefficient H_i * H_s and argument
// e_i(x, y) - e_s(x, y').  The result has no g either.
ExpFunSpec conj_square(const ExpFunSpec& spec);

} // namespace motx
