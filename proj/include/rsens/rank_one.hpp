#pragma once

#include "rsens/metric_system.hpp"
#include "rsens/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsens {

// T is only defined as a limit of column maps; this is raised when a point or
// interval is still on a top (or, for T^-1, bottom) level at the depth cap.
class UndefinedAtDepth : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One cutting-and-stacking step: cut every level into `cuts` sublevels with
// lengths in the given proportions, put spacers[j] spacer levels on subcolumn
// j, stack left to right.
struct Stage {
  std::uint32_t cuts = 2;
  std::vector<std::uint64_t> spacers;  // one entry per subcolumn
  std::vector<Rational> proportions;   // one entry per subcolumn; empty means uniform

  Rational proportion(std::size_t j) const {
    return proportions.empty() ? Rational(1, cuts) : proportions.at(j);
  }
  bool is_uniform() const;
  std::uint64_t spacer_total() const;

  // "r | s_0,...,s_{r-1} | p_0,...,p_{r-1}" (third part omitted when uniform).
  std::string to_string() const;
  static Stage parse(std::string_view text);

  friend bool operator==(const Stage&, const Stage&) = default;
};

// Finite prefix followed by a cycle repeated forever. An empty cycle makes the
// spec finite: only prefix.size() stages exist.
struct RankOneSpec {
  Rational initial_width = 1;
  std::vector<Stage> prefix;
  std::vector<Stage> cycle;

  bool is_finite() const noexcept { return cycle.empty(); }
  // Number of defined stages; SIZE_MAX for an infinite spec.
  std::size_t stage_count() const noexcept;
  const Stage& stage(std::size_t n) const;
  // True iff every proportion vector is uniform.
  bool measure_preserving() const;
  // min over all stages and subcolumns of p_n(j).
  Rational proportion_lower_bound() const;

  // r_n = 3, s_n = (0, 1, 0), uniform proportions, forever.
  static RankOneSpec chacon(Rational initial_width = Rational(2, 3));

  friend bool operator==(const RankOneSpec&, const RankOneSpec&) = default;
};

// Half-open [left, right).
struct RationalInterval {
  Rational left;
  Rational right;

  Rational length() const { return right - left; }
  bool contains(const Rational& x) const { return left <= x && x < right; }

  friend bool operator==(const RationalInterval&, const RationalInterval&) = default;
};

struct Column {
  std::size_t stage = 0;
  std::vector<RationalInterval> levels;

  std::size_t height() const noexcept { return levels.size(); }
};

struct SpecValidation {
  bool valid = true;
  std::vector<std::string> problems;
  bool measure_preserving = false;
  Rational total_measure;  // w_0 plus all spacers added in the first `depth` stages
  bool within_cap = true;
  bool widths_vanish = false;
  std::vector<BigInt> heights;       // h_0 .. h_depth
  std::vector<Rational> min_widths;  // smallest level of C_0 .. C_depth
  std::vector<Rational> max_widths;
};

SpecValidation validate_spec(const RankOneSpec& spec, std::size_t depth, const Rational& space_cap = 1);

// Explicit columns C_0 .. C_stages, built by literally cutting and stacking.
// Spacers are taken left to right from fresh space starting at w_0. Throws
// std::invalid_argument for an invalid spec, std::length_error past
// `max_levels` levels, and std::domain_error when spacers exceed the cap.
std::vector<Column> build_columns(const RankOneSpec& spec, std::size_t stages, const Rational& space_cap = 1,
                                  bool allow_over_cap = false, std::size_t max_levels = std::size_t{1} << 22);

struct RankOneOptions {
  std::size_t depth_cap = 64;
  Rational space_cap = 1;
  bool allow_over_cap = false;
};

// The rank-one transformation on [0, total) with Lebesgue measure normalised
// to a probability and the Euclidean metric.
//
// Columns are never materialised: per-stage summaries (heights, widths, block
// offsets, spacer positions) are computed once up to the depth cap, and any
// level I_{n,i} is recovered by walking the cutting history.
class RankOneSystem final : public MetricSystem {
 public:
  struct Location {
    std::size_t stage = 0;
    BigInt index;
    RationalInterval level;
  };

  struct Piece {
    RationalInterval interval;
    Location location;  // a level of some column containing `interval`
  };

  struct IntervalImage {
    std::vector<RationalInterval> pieces;
    Rational diameter;  // sup |T^n y - T^n y'| over the source interval
  };

  explicit RankOneSystem(RankOneSpec spec, RankOneOptions options = {});

  const RankOneSpec& spec() const noexcept { return spec_; }
  const RankOneOptions& options() const noexcept { return options_; }
  // Columns C_0 .. C_depth() are available.
  std::size_t depth() const noexcept { return stages_.size() - 1; }
  const Rational& total_measure() const noexcept { return total_; }

  const BigInt& height(std::size_t n) const { return stages_.at(n).height; }
  const Rational& min_width(std::size_t n) const { return stages_.at(n).min_width; }
  const Rational& max_width(std::size_t n) const { return stages_.at(n).max_width; }
  const Rational& top_length(std::size_t n) const { return stages_.at(n).top_length; }

  // Level I_{n,i}.
  RationalInterval level(std::size_t n, const BigInt& i) const;
  // Sublevel j of a level of C_n (n < depth()).
  RationalInterval sublevel(const RationalInterval& level, std::size_t n, std::size_t j) const;

  // The level containing x in the first column where x appears; nullopt when
  // that column lies beyond the depth. Throws std::domain_error outside [0, total).
  std::optional<Location> locate(const Rational& x) const;
  // The same point one stage deeper.
  Location refine(const Location& loc, const Rational& x) const;

  // T(x) via the column map of the first column in which x is not on the top
  // level; nullopt when no column up to depth_cap qualifies.
  std::optional<Rational> apply(const Rational& x, std::size_t depth_cap) const;
  std::optional<Rational> apply_inverse(const Rational& x, std::size_t depth_cap) const;
  // Slope of the affine branch of T through x.
  std::optional<Rational> radon_nikodym(const Rational& x, std::size_t depth_cap) const;

  // Splits [lo, hi) into pieces lying in single levels. Any part in spacers
  // deeper than the depth is returned as unresolved length.
  std::vector<Piece> decompose(const RationalInterval& interval, Rational* unresolved = nullptr) const;
  // One step of T applied to every piece, splitting pieces that sit on a top
  // level. Throws UndefinedAtDepth past depth_cap.
  std::vector<Piece> advance(const std::vector<Piece>& pieces, std::size_t depth_cap) const;

  // Exact T^n(J) for J inside a single level.
  IntervalImage transform_interval(const RationalInterval& j, std::int64_t n, std::size_t depth_cap) const;

  // lambda((x - eps, x + eps) intersected with [0, total)).
  Rational lebesgue_ball_measure(const Rational& x, const Rational& eps) const;

  // T^-1 of a union of levels of C_n. A non-bottom level pulls back to the
  // level below it. The preimage of a bottom level is listed up to stage
  // `depth_cap`; the rest lies in levels (m+1, block_start_j - 1) for m >= cap
  // with total length sum_m (1 - p_m(r-1)) top_m = top_length(depth_cap), which
  // is added to `tail_measure` once per bottom level.
  std::vector<RationalInterval> preimage_of_levels(std::size_t n, const std::vector<BigInt>& levels,
                                                   std::size_t depth_cap, Rational* tail_measure) const;

  // MetricSystem
  std::string name() const override;
  Point transform(const Point& x) const override;
  Distance distance(const Point& x, const Point& y) const override;
  BallMeasure ball_measure(const Point& x, double radius) const override;
  Point sample_point(std::uint64_t seed) const override;
  double diameter() const override;

  const Rational& as_rational(const Point& x) const;

 private:
  struct StageData {
    BigInt height;
    Rational top_length;
    Rational min_width;
    Rational max_width;
    // Cutting data for building C_{n+1}; empty for the deepest column.
    std::vector<Rational> cumulative;     // r + 1 entries, 0 .. 1
    std::vector<BigInt> block_start;      // r + 1 entries, last is h_{n+1}
    std::vector<Rational> spacer_width;   // r entries
    std::vector<Rational> spacer_start;   // r + 1 entries, last is end of fresh space
    std::vector<std::uint64_t> spacers;
  };

  std::size_t sublevel_index(const StageData& s, const Rational& fraction) const;

  RankOneSpec spec_;
  RankOneOptions options_;
  std::vector<StageData> stages_;
  Rational total_;
};

}  // namespace rsens
