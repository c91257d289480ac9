#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "motx/rational.hpp"
#include "motx/residue.hpp"

namespace motx {

enum class FieldKind { EqualChar, MixedChar };

// Descriptor of a truncated local field: either F_q((t)) or the unramified
// extension of Q_p with residue field F_q, both carried to a fixed number
// of uniformizer digits.  Instances are interned by (kind, p, f, precision).
class LocalField {
public:
    static const LocalField& get(FieldKind kind, std::uint32_t p, std::uint32_t f,
                                 int precision);

    FieldKind kind() const { return kind_; }
    std::uint32_t p() const { return p_; }
    std::uint32_t f() const { return f_; }
    std::uint64_t q() const { return residue_->q(); }
    int precision() const { return precision_; }
    const ResidueField& residue() const { return *residue_; }

    std::string str() const; // "eq,5,2,8" style tag used in reports

    bool operator==(const LocalField& o) const {
        return kind_ == o.kind_ && p_ == o.p_ && f_ == o.f_ && precision_ == o.precision_;
    }

private:
    LocalField(FieldKind kind, std::uint32_t p, std::uint32_t f, int precision);
    FieldKind kind_;
    std::uint32_t p_, f_;
    int precision_;
    const ResidueField* residue_;
};

// One field element known to finitely many uniformizer digits.  Zero is
// exact; a nonzero element is pi^val * u with u a unit known modulo
// pi^guaranteed (1 <= guaranteed <= field precision).  In the equal
// characteristic case the unit is a digit vector over the residue field;
// in mixed characteristic it is a polynomial in the residue generator with
// integer coefficients modulo p^guaranteed.
class ValuedElem {
public:
    ValuedElem() : field_(nullptr) {}

    static ValuedElem zero(const LocalField& F);
    static ValuedElem from_integer(const LocalField& F, const Integer& n);
    static ValuedElem uniformizer(const LocalField& F, long power = 1);
    // canonical lift of a residue element (valuation 0 unless v = 0)
    static ValuedElem lift(const LocalField& F, const ResidueElem& v);
    // element with given valuation and digit list (low digit first; the
    // first digit must be a unit); digits beyond field precision are an error
    static ValuedElem from_digits(const LocalField& F, long val,
                                  const std::vector<ResidueElem>& digits);

    const LocalField& field() const;
    bool is_zero() const { return zero_; }
    // valuation; calling on zero throws EvalError (callers test is_zero first)
    long ord() const;
    int guaranteed() const { return guaranteed_; }

    // angular component: leading digit for nonzero input, 0 for zero
    ResidueElem ac() const;
    // digit at uniformizer exponent e; exponents below ord give 0, and
    // exponents at or past ord+guaranteed throw PrecisionError
    ResidueElem digit_at(long e) const;

    ValuedElem operator+(const ValuedElem& o) const;
    ValuedElem operator-(const ValuedElem& o) const;
    ValuedElem operator-() const;
    ValuedElem operator*(const ValuedElem& o) const;
    ValuedElem operator/(const ValuedElem& o) const;
    ValuedElem pow(unsigned long e) const;

    // equality of the digit expansions on the common guaranteed window
    bool operator==(const ValuedElem& o) const;
    bool operator!=(const ValuedElem& o) const { return !(*this == o); }

    // shrink the guaranteed window (no-op on zero or wider requests)
    void truncate_guarantee(int g);

    // "2*t^-1 + 1*t^0 + 3*t^2 (mod t^8)"; zero prints "0"
    std::string str() const;

    // key identifying the class of the element modulo the valuation ring:
    // the digits at negative exponents, empty for integral elements
    std::vector<std::pair<long, std::uint64_t>> polar_key() const;

private:
    const LocalField* field_ = nullptr;
    bool zero_ = true;
    long val_ = 0;
    int guaranteed_ = 0;
    // equal characteristic: digit vector (size = guaranteed_), digits_[0] != 0
    std::vector<ResidueElem> digits_;
    // mixed characteristic: f coefficients in [0, p^guaranteed_), unit mod p
    std::vector<Integer> coeffs_;

    ValuedElem(const LocalField& F, long val, int guaranteed);
    void normalize();
    Integer pk() const; // p^guaranteed_
};

// Parses the element syntax produced by ValuedElem::str: a signed sum of
// <digit>*t^<exp> terms with an optional "(mod t^N)" tail, or "0", or a
// plain integer literal.  In mixed characteristic t denotes p.
ValuedElem parse_element(const LocalField& F, const std::string& text);

} // namespace motx
