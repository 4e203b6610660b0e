#ifndef DECKLAB_RATIONAL_HPP
#define DECKLAB_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdio>
#include <string>

namespace decklab {

// Exact probabilities. Everything in the exact engine is computed with
// arbitrary-precision rationals; floating point only appears at the
// reporting boundary.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_ratio(long long num, long long den) {
    return Rational(BigInt(num), BigInt(den));
}

inline double to_double(const Rational& r) {
    return r.convert_to<double>();
}

/// "29/100"; integers render with denominator 1 as plain "0" / "1".
inline std::string to_fraction_string(const Rational& r) {
    const BigInt num = numerator(r);
    const BigInt den = denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

/// Six significant digits, the display companion of the exact value.
inline std::string to_decimal_string(const Rational& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", to_double(r));
    return buf;
}

}  // namespace decklab

#endif
