#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace vmc {

// All probability arithmetic in this library is exact. Floating point shows
// up only in Monte Carlo summaries, never in an invariant check.
using Rational = mpq_class;

inline Rational ratio(long num, long den) {
    if (den == 0) throw std::invalid_argument("ratio: zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Accepts "p/q" or a bare integer "p". Whitespace is not tolerated.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("parse_rational: empty string");
    Rational r;
    if (mpq_set_str(r.get_mpq_t(), text.c_str(), 10) != 0)
        throw std::invalid_argument("parse_rational: malformed rational '" + text + "'");
    if (mpz_sgn(mpq_denref(r.get_mpq_t())) == 0)
        throw std::invalid_argument("parse_rational: zero denominator in '" + text + "'");
    r.canonicalize();
    return r;
}

// Canonical "p/q" form; integers print without the "/1".
inline std::string to_fraction_string(const Rational& r) {
    return r.get_str();
}

// Decimal rendering for plotting columns. Round-trips are never expected of
// this form; the fraction string is the authoritative one.
inline std::string to_decimal_string(const Rational& r, int significant_digits = 12) {
    mpf_class f(0, 256);
    mpf_set_q(f.get_mpf_t(), r.get_mpq_t());
    char buf[128];
    gmp_snprintf(buf, sizeof buf, "%.*Fg", significant_digits, f.get_mpf_t());
    return std::string(buf);
}

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace vmc
