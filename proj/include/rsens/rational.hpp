#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace rsens {

// Exact arbitrary-precision rational. Every interval endpoint, proportion and
// cylinder measure in the library is one of these.
using Rational = mpq_class;
using BigInt = mpz_class;

// Parses "a/b" or "a" (optional sign, decimal digits). Throws
// std::invalid_argument on anything else, including a zero denominator.
Rational parse_rational(std::string_view text);

// Always "num/den" in lowest terms, e.g. "1/1", "-3/4".
std::string format_rational(const Rational& q);

// Exact conversion of a finite double.
Rational rational_from_double(double x);

// Natural log of a positive rational. Stays accurate when numerator or
// denominator are far outside double range.
double log_rational(const Rational& q);

// Natural log of a positive big integer.
double log_bigint(const BigInt& z);

}  // namespace rsens
