#include "rsens/shift.hpp"
#include "rsens/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rsens {

// ---------------------------------------------------------------------------
// ProbabilityVector

ProbabilityVector::ProbabilityVector(std::vector<Rational> probabilities) : p_(std::move(probabilities)) {
  if (p_.empty()) throw std::invalid_argument("probability vector is empty");
  Rational total = 0;
  for (auto& q : p_) {
    q.canonicalize();
    if (q <= 0) throw std::invalid_argument("probability vector needs full support, got entry " + format_rational(q));
    total += q;
  }
  if (total != 1)
    throw std::invalid_argument("probabilities sum to " + format_rational(total) + ", not 1");

  max_ = *std::max_element(p_.begin(), p_.end());
  min_ = *std::min_element(p_.begin(), p_.end());
  log_p_.reserve(p_.size());
  for (const auto& q : p_) log_p_.push_back(log_rational(q));

  const BigInt scale = BigInt(1) << 64;
  Rational cumulative = 0;
  for (std::size_t k = 0; k + 1 < p_.size(); ++k) {
    cumulative += p_[k];
    BigInt t = (cumulative.get_num() * scale) / cumulative.get_den();
    thresholds_.push_back(t >= scale ? ~std::uint64_t{0} : static_cast<std::uint64_t>(mpz_get_ui(t.get_mpz_t())));
  }
}

ProbabilityVector ProbabilityVector::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("alphabet must be nonempty");
  return ProbabilityVector(std::vector<Rational>(n, Rational(1, static_cast<unsigned long>(n))));
}

ProbabilityVector ProbabilityVector::parse(std::string_view text) {
  std::vector<Rational> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    values.push_back(parse_rational(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return ProbabilityVector(std::move(values));
}

Symbol ProbabilityVector::draw(std::uint64_t bits) const noexcept {
  for (std::size_t k = 0; k < thresholds_.size(); ++k)
    if (bits < thresholds_[k]) return static_cast<Symbol>(k + 1);
  return static_cast<Symbol>(p_.size());
}

std::string ProbabilityVector::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < p_.size(); ++k) {
    if (k) out += ',';
    out += format_rational(p_[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SymbolicPoint

struct SymbolicPoint::Stream {
  std::shared_ptr<const ProbabilityVector> measure;
  Sidedness sides;
  std::int64_t window_lo = 0;
  std::vector<Symbol> window;
  Tail tail = Tail::random(0);

  Symbol at(std::int64_t i) const {
    if (i >= window_lo && i - window_lo < static_cast<std::int64_t>(window.size()))
      return window[static_cast<std::size_t>(i - window_lo)];
    if (tail.is_constant()) return tail.symbol();
    return measure->draw(mix64(tail.seed() + static_cast<std::uint64_t>(i) * 0xD1B54A32D192ED03ULL));
  }
};

SymbolicPoint SymbolicPoint::sample(std::shared_ptr<const ProbabilityVector> measure, Sidedness sides,
                                    std::uint64_t seed) {
  return with_window(std::move(measure), sides, 0, {}, Tail::random(mix64(seed)));
}

SymbolicPoint SymbolicPoint::with_window(std::shared_ptr<const ProbabilityVector> measure, Sidedness sides,
                                         std::int64_t lo, std::vector<Symbol> window, Tail tail) {
  if (!measure) throw std::invalid_argument("symbolic point needs a measure");
  if (sides == Sidedness::one_sided && lo < 0 && !window.empty())
    throw std::invalid_argument("one-sided window cannot start below index 0");
  const auto n = measure->size();
  for (Symbol s : window)
    if (s < 1 || s > n) throw std::invalid_argument("symbol outside alphabet");
  if (tail.is_constant() && (tail.symbol() < 1 || tail.symbol() > n))
    throw std::invalid_argument("constant tail symbol outside alphabet");
  auto stream = std::make_shared<Stream>();
  stream->measure = std::move(measure);
  stream->sides = sides;
  stream->window_lo = lo;
  stream->window = std::move(window);
  stream->tail = tail;
  return SymbolicPoint(std::move(stream), 0);
}

Symbol SymbolicPoint::at(std::int64_t i) const {
  if (stream_->sides == Sidedness::one_sided && i < 0)
    throw std::out_of_range("negative index on a one-sided point");
  return stream_->at(i + offset_);
}

SymbolicPoint SymbolicPoint::shifted(std::int64_t n) const {
  if (stream_->sides == Sidedness::one_sided && n < 0)
    throw std::invalid_argument("one-sided shift is not invertible");
  return SymbolicPoint(stream_, offset_ + n);
}

Sidedness SymbolicPoint::sidedness() const noexcept { return stream_->sides; }
const ProbabilityVector& SymbolicPoint::measure() const noexcept { return *stream_->measure; }
const std::shared_ptr<const ProbabilityVector>& SymbolicPoint::measure_ptr() const noexcept {
  return stream_->measure;
}

std::vector<Symbol> SymbolicPoint::symbols(std::int64_t lo, std::int64_t count) const {
  std::vector<Symbol> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  for (std::int64_t k = 0; k < count; ++k) out.push_back(at(lo + k));
  return out;
}

std::string SymbolicPoint::render(int count) const {
  std::ostringstream os;
  os << '[';
  if (sidedness() == Sidedness::two_sided) {
    os << "... ";
    for (int i = -count / 2; i < 0; ++i) os << at(i) << ' ';
    os << ". ";
    for (int i = 0; i < count - count / 2; ++i) os << at(i) << ' ';
  } else {
    for (int i = 0; i < count; ++i) os << at(i) << ' ';
  }
  os << "...]";
  return os.str();
}

// ---------------------------------------------------------------------------
// Cylinders and the shift metric

Rational CylinderSet::measure(const ProbabilityVector& p) const {
  // Count symbol occurrences first so the product is a handful of powers.
  std::vector<unsigned long> counts(p.size(), 0);
  for (Symbol s : symbols_) ++counts.at(s - 1);
  Rational m = 1;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (!counts[k]) continue;
    BigInt num, den;
    mpz_pow_ui(num.get_mpz_t(), p.values()[k].get_num_mpz_t(), counts[k]);
    mpz_pow_ui(den.get_mpz_t(), p.values()[k].get_den_mpz_t(), counts[k]);
    m *= Rational(num, den);
  }
  m.canonicalize();
  return m;
}

double CylinderSet::log_measure(const ProbabilityVector& p) const {
  double total = 0.0;
  for (Symbol s : symbols_) total += p.log_of(s);
  return total;
}

bool CylinderSet::contains(const SymbolicPoint& x) const {
  for (std::size_t k = 0; k < symbols_.size(); ++k)
    if (x.at(lo_ + static_cast<std::int64_t>(k)) != symbols_[k]) return false;
  return true;
}

std::optional<std::int64_t> disagreement_index(const SymbolicPoint& a, const SymbolicPoint& b,
                                               std::int64_t horizon) {
  if (a.sidedness() != b.sidedness()) throw std::invalid_argument("points of different sidedness");
  if (a.measure().size() != b.measure().size()) throw std::invalid_argument("points over different alphabets");
  if (a.identical_to(b)) return std::nullopt;
  if (a.sidedness() == Sidedness::one_sided) {
    for (std::int64_t i = 0; i <= horizon; ++i)
      if (a.at(i) != b.at(i)) return i;
  } else {
    for (std::int64_t i = 0; i <= horizon; ++i)
      if (a.at(i) != b.at(i) || a.at(-i) != b.at(-i)) return i;
  }
  return std::nullopt;
}

Rational ShiftDistance::exact() const {
  Rational d(1);
  mpz_mul_2exp(d.get_den_mpz_t(), d.get_den_mpz_t(), static_cast<mp_bitcnt_t>(exponent));
  return d;
}

ShiftDistance shift_distance(const SymbolicPoint& a, const SymbolicPoint& b, std::int64_t horizon) {
  if (a.identical_to(b)) return {0, false, true};
  const auto index = disagreement_index(a, b, horizon);
  if (!index) return {horizon, true, false};
  return {*index, false, false};
}

std::int64_t radius_window(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("ball radius must be positive");
  std::int64_t m = 0;
  while (std::ldexp(1.0, static_cast<int>(-m)) >= eps) ++m;
  return m;
}

CylinderSet ball_as_cylinder(const SymbolicPoint& x, double eps) {
  const std::int64_t m = radius_window(eps);
  if (m == 0) return CylinderSet{};
  if (x.sidedness() == Sidedness::one_sided) return CylinderSet(0, x.symbols(0, m));
  return CylinderSet(-(m - 1), x.symbols(-(m - 1), 2 * m - 1));
}

Rational cylinder_measure(const CylinderSet& c, const ProbabilityVector& p) { return c.measure(p); }

SymbolicPoint apply_shift(const SymbolicPoint& x) { return x.shifted(1); }

int separation_class(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("separation class needs 0 < delta < 1");
  int c = 0;
  while (!(std::ldexp(1.0, -c) > delta && delta >= std::ldexp(1.0, -c - 1))) ++c;
  return c;
}

// ---------------------------------------------------------------------------
// ShiftSystem

ShiftSystem::ShiftSystem(ProbabilityVector p, Sidedness sides, std::int64_t horizon)
    : p_(std::make_shared<const ProbabilityVector>(std::move(p))), sides_(sides), horizon_(horizon) {
  if (horizon_ < 1) throw std::invalid_argument("horizon must be positive");
}

std::string ShiftSystem::name() const {
  return std::string(sides_ == Sidedness::one_sided ? "one-sided" : "two-sided") + " Bernoulli shift p=(" +
         p_->to_string() + ")";
}

const SymbolicPoint& ShiftSystem::as_symbolic(const Point& x) const {
  const auto* s = std::get_if<SymbolicPoint>(&x);
  if (!s || s->sidedness() != sides_) throw std::invalid_argument("point does not belong to " + name());
  return *s;
}

Point ShiftSystem::transform(const Point& x) const { return apply_shift(as_symbolic(x)); }

Distance ShiftSystem::distance(const Point& x, const Point& y) const {
  const auto d = shift_distance(as_symbolic(x), as_symbolic(y), horizon_);
  if (d.identical) return {0.0, true};
  return {d.value(), !d.beyond_horizon};
}

BallMeasure ShiftSystem::ball_measure(const Point& x, double radius) const {
  return BallMeasure::from_exact(ball_as_cylinder(as_symbolic(x), radius).measure(*p_));
}

Point ShiftSystem::sample_point(std::uint64_t seed) const { return SymbolicPoint::sample(p_, sides_, seed); }

}  // namespace rsens
