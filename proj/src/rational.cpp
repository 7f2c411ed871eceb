#include "rsens/rational.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rsens {

namespace {

bool is_integer_literal(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

BigInt parse_integer(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  return BigInt(std::string(s), 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto s = trim(text);
  const auto slash = s.find('/');
  const auto num_text = trim(s.substr(0, slash));
  if (!is_integer_literal(num_text))
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  if (slash == std::string_view::npos) return Rational(parse_integer(num_text));
  const auto den_text = trim(s.substr(slash + 1));
  if (!is_integer_literal(den_text) || den_text.front() == '-')
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  BigInt den = parse_integer(den_text);
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  Rational q(parse_integer(num_text), den);
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) {
  Rational c(q);
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
  Rational q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

double log_bigint(const BigInt& z) {
  if (z <= 0) throw std::domain_error("log of non-positive integer");
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, z.get_mpz_t());
  return std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2;
}

double log_rational(const Rational& q) {
  if (q <= 0) throw std::domain_error("log of non-positive rational");
  return log_bigint(q.get_num()) - log_bigint(q.get_den());
}

}  // namespace rsens
