#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "motx/errors.hpp"

namespace motx {

// The finite field F_q, q = p^f, presented as F_p[a]/(m) for the canonical
// modulus m: the lexicographically smallest monic irreducible of degree f
// (coefficient tuples compared low degree first).  Instances are interned,
// so two descriptors with the same (p, f) share one object and their
// elements are directly comparable.
class ResidueField {
public:
    // Interned accessor; builds and caches the field on first use.
    static const ResidueField& get(std::uint32_t p, std::uint32_t f);

    std::uint32_t p() const { return p_; }
    std::uint32_t f() const { return f_; }
    std::uint64_t q() const { return q_; }

    // Monic modulus, coefficients low-to-high, size f+1, top coefficient 1.
    const std::vector<std::uint32_t>& modulus() const { return modulus_; }

    bool operator==(const ResidueField& o) const { return p_ == o.p_ && f_ == o.f_; }

private:
    ResidueField(std::uint32_t p, std::uint32_t f);
    std::uint32_t p_, f_;
    std::uint64_t q_;
    std::vector<std::uint32_t> modulus_;
};

// One element of a ResidueField: a coefficient vector of length f over F_p
// in the power basis 1, a, ..., a^{f-1}.
class ResidueElem {
public:
    ResidueElem() : field_(nullptr) {}
    explicit ResidueElem(const ResidueField& k) : field_(&k), c_(k.f(), 0) {}
    ResidueElem(const ResidueField& k, std::uint64_t n); // image of the integer n

    static ResidueElem from_coeffs(const ResidueField& k, std::vector<std::uint32_t> coeffs);

    // Enumeration rank: sum of coeff[i] * p^i; from_index is its inverse.
    std::uint64_t index() const;
    static ResidueElem from_index(const ResidueField& k, std::uint64_t idx);

    const ResidueField& field() const;
    const std::vector<std::uint32_t>& coeffs() const { return c_; }

    bool is_zero() const;
    bool operator==(const ResidueElem& o) const;
    bool operator!=(const ResidueElem& o) const { return !(*this == o); }

    ResidueElem operator+(const ResidueElem& o) const;
    ResidueElem operator-(const ResidueElem& o) const;
    ResidueElem operator-() const;
    ResidueElem operator*(const ResidueElem& o) const;
    ResidueElem inverse() const; // throws EvalError on zero
    ResidueElem pow(std::uint64_t e) const;

    // Trace to the prime field, returned as an integer in [0, p).
    std::uint32_t trace() const;

    // "3", or "(a^2 + 2*a + 1)" when a higher-degree coefficient is set.
    std::string str() const;

private:
    void check_same(const ResidueElem& o) const;
    const ResidueField* field_;
    std::vector<std::uint32_t> c_;
};

// Parses what ResidueElem::str produces (integer, or polynomial in `a`).
ResidueElem parse_residue(const ResidueField& k, const std::string& text);

} // namespace motx
