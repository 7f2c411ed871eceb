#pragma once

#include "rsens/probability.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace rsens {

enum class Sidedness { one_sided, two_sided };

// A point of the full shift: an infinite symbol sequence evaluated lazily.
//
// The symbol at an index is a pure function of the stream's tail seed and the
// index (plus an optional explicit window of fixed symbols), so re-querying an
// index always returns the same symbol and concurrent readers need no locking.
// Shifting produces a view onto the same stream with a different offset.
class SymbolicPoint {
 public:
  class Tail {
   public:
    static Tail random(std::uint64_t seed) noexcept { return Tail(false, seed, 0); }
    static Tail constant(Symbol s) noexcept { return Tail(true, 0, s); }

    bool is_constant() const noexcept { return constant_; }
    std::uint64_t seed() const noexcept { return seed_; }
    Symbol symbol() const noexcept { return symbol_; }

   private:
    Tail(bool constant, std::uint64_t seed, Symbol s) : constant_(constant), seed_(seed), symbol_(s) {}
    bool constant_;
    std::uint64_t seed_;
    Symbol symbol_;
  };

  // i.i.d. symbols drawn from `measure`; deterministic in `seed`.
  static SymbolicPoint sample(std::shared_ptr<const ProbabilityVector> measure, Sidedness sides,
                              std::uint64_t seed);

  // Symbols window[k] at index lo + k, `tail` everywhere else.
  static SymbolicPoint with_window(std::shared_ptr<const ProbabilityVector> measure, Sidedness sides,
                                   std::int64_t lo, std::vector<Symbol> window, Tail tail);

  static SymbolicPoint constant(std::shared_ptr<const ProbabilityVector> measure, Sidedness sides,
                                Symbol s) {
    return with_window(std::move(measure), sides, 0, {}, Tail::constant(s));
  }

  // Throws std::out_of_range for a negative index on a one-sided point.
  Symbol at(std::int64_t i) const;

  // T^n applied to this point; O(1), shares the underlying stream.
  SymbolicPoint shifted(std::int64_t n = 1) const;

  Sidedness sidedness() const noexcept;
  const ProbabilityVector& measure() const noexcept;
  const std::shared_ptr<const ProbabilityVector>& measure_ptr() const noexcept;
  std::int64_t offset() const noexcept { return offset_; }

  // Same stream and offset; implies equality of every symbol.
  bool identical_to(const SymbolicPoint& other) const noexcept {
    return stream_ == other.stream_ && offset_ == other.offset_;
  }

  std::vector<Symbol> symbols(std::int64_t lo, std::int64_t count) const;

  // Short label such as "[1 2 2 1 ...]" or "[... 2 1 . 1 1 ...]" (the '.' sits
  // before index 0).
  std::string render(int count = 12) const;

 private:
  struct Stream;
  SymbolicPoint(std::shared_ptr<const Stream> stream, std::int64_t offset)
      : stream_(std::move(stream)), offset_(offset) {}

  std::shared_ptr<const Stream> stream_;
  std::int64_t offset_ = 0;
};

}  // namespace rsens
