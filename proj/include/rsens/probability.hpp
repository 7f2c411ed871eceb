#pragma once

#include "rsens/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rsens {

// Alphabet symbols are 1..N.
using Symbol = std::uint32_t;

// Full-support probability vector with exact rational entries summing to 1.
class ProbabilityVector {
 public:
  // Throws std::invalid_argument for empty input, a non-positive entry, or a
  // sum different from 1.
  explicit ProbabilityVector(std::vector<Rational> probabilities);

  static ProbabilityVector uniform(std::size_t n);

  // "1/3,2/3"
  static ProbabilityVector parse(std::string_view text);

  std::size_t size() const noexcept { return p_.size(); }

  // Probability of symbol s in 1..N.
  const Rational& of(Symbol s) const { return p_.at(s - 1); }
  double log_of(Symbol s) const { return log_p_.at(s - 1); }

  const std::vector<Rational>& values() const noexcept { return p_; }

  const Rational& max() const noexcept { return max_; }
  const Rational& min() const noexcept { return min_; }
  bool is_uniform() const noexcept { return max_ == min_; }

  // Maps 64 uniform bits to a symbol distributed according to the vector.
  Symbol draw(std::uint64_t bits) const noexcept;

  std::string to_string() const;

  friend bool operator==(const ProbabilityVector& a, const ProbabilityVector& b) {
    return a.p_ == b.p_;
  }

 private:
  std::vector<Rational> p_;
  std::vector<double> log_p_;
  // thresholds_[k] = floor(2^64 * (p_1 + ... + p_{k+1})) for k < N-1.
  std::vector<std::uint64_t> thresholds_;
  Rational max_;
  Rational min_;
};

}  // namespace rsens
