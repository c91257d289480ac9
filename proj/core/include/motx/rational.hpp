#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "motx/errors.hpp"

namespace motx {

using Integer = mpz_class;
using Rational = mpq_class;

// base^e for integer base and possibly negative exponent.
inline Rational rational_pow(const Integer& base, long e) {
    if (base == 0 && e < 0) throw EvalError("0 raised to a negative power");
    Integer num;
    mpz_pow_ui(num.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e < 0 ? -e : e));
    Rational r(num);
    if (e < 0) r = 1 / r;
    return r;
}

inline std::string to_string(const Rational& r) {
    return r.get_str();
}

inline double to_double(const Rational& r) {
    return r.get_d();
}

// Parses "a" or "a/b" with optional sign; throws ParseError on anything else.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw ParseError("empty rational literal");
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        bool ok = (c >= '0' && c <= '9') || c == '/' ||
                  ((c == '-' || c == '+') && (i == 0 || text[i - 1] == '/'));
        if (!ok) throw ParseError("bad rational literal '" + text + "'");
    }
    Rational r;
    if (r.set_str(text, 10) != 0) throw ParseError("bad rational literal '" + text + "'");
    if (r.get_den() == 0) throw ParseError("zero denominator in '" + text + "'");
    r.canonicalize();
    return r;
}

} // namespace motx
