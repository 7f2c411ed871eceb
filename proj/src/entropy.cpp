#include "rsens/entropy.hpp"

#include "rsens/random.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace rsens {

namespace {

constexpr double kZ99 = 2.5758293035489004;

long double log_probability(const Rational& p) {
  // Close to 1 the difference p - 1 is exact, so log1p keeps full precision.
  if (p > Rational(1, 2)) return std::log1p(static_cast<long double>(Rational(p - 1).get_d()));
  return static_cast<long double>(log_rational(p));
}

struct MeanAccumulator {
  long double sum = 0, sum_sq = 0;
  std::size_t count = 0;

  void add(long double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  double mean() const { return static_cast<double>(sum / static_cast<long double>(count)); }
  double half_width() const {
    if (count < 2) return 0.0;
    const long double m = sum / count;
    const long double var = std::max(0.0L, (sum_sq / count - m * m) * count / (count - 1));
    return kZ99 * static_cast<double>(std::sqrt(var / count));
  }
};

}  // namespace

std::string to_string(EntropyMethod method) {
  switch (method) {
    case EntropyMethod::analytic: return "analytic";
    case EntropyMethod::birkhoff_frequency: return "birkhoff-frequency";
    case EntropyMethod::brin_katok: return "brin-katok";
    case EntropyMethod::partition: return "partition";
  }
  return "unknown";
}

long double bernoulli_entropy(const ProbabilityVector& p) {
  long double h = 0;
  for (const auto& q : p.values()) h -= static_cast<long double>(q.get_d()) * log_probability(q);
  return h < 0 ? 0 : h;
}

EntropyEstimate analytic_entropy(const ProbabilityVector& p) {
  EntropyEstimate e;
  e.method = EntropyMethod::analytic;
  e.value = static_cast<double>(bernoulli_entropy(p));
  return e;
}

EntropyEstimate birkhoff_frequency_entropy(const ShiftSystem& system, const SymbolicPoint& sigma, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  const ProbabilityVector& p = system.measure();
  std::vector<std::int64_t> counts(p.size(), 0);
  for (std::int64_t t = 0; t < n; ++t) ++counts.at(sigma.at(t) - 1);
  long double total = 0;
  for (std::size_t k = 0; k < counts.size(); ++k)
    total -= static_cast<long double>(counts[k]) * p.log_of(static_cast<Symbol>(k + 1));
  EntropyEstimate e;
  e.method = EntropyMethod::birkhoff_frequency;
  e.horizon = n;
  e.value = static_cast<double>(total / static_cast<long double>(n));
  return e;
}

CylinderSet bowen_cylinder(const SymbolicPoint& x, double delta, std::int64_t n) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  // d <= delta iff the first disagreement index is at least c'.
  std::int64_t c = 0;
  while (std::ldexp(1.0, static_cast<int>(-c)) > delta) ++c;
  if (c == 0) return {};
  if (x.sidedness() == Sidedness::one_sided) return CylinderSet(0, x.symbols(0, n + c - 1));
  return CylinderSet(-(c - 1), x.symbols(-(c - 1), n + 2 * c - 2));
}

EntropyEstimate brin_katok_estimate(const MetricSystem& system, const Point& x, double delta, std::int64_t n,
                                    const SamplingBudget& budget) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  EntropyEstimate e;
  e.method = EntropyMethod::brin_katok;
  e.horizon = n;
  e.delta = delta;

  if (const auto* shift = dynamic_cast<const ShiftSystem*>(&system)) {
    const CylinderSet c = bowen_cylinder(shift->as_symbolic(x), delta, n);
    e.exact_measure = c.measure(shift->measure());
    e.value = -log_rational(*e.exact_measure) / static_cast<double>(n);
    if (e.value == 0) e.value = 0;  // avoid -0
    return e;
  }

  std::vector<Point> orbit{x};
  for (std::int64_t i = 1; i < n; ++i) orbit.push_back(system.transform(orbit.back()));
  std::size_t hits = 0;
  for (std::size_t k = 0; k < budget.samples; ++k) {
    Point y = system.sample_point(derive_seed(budget.seed, k));
    bool inside = true;
    for (std::int64_t i = 0; i < n && inside; ++i) {
      if (i > 0) y = system.transform(y);
      inside = system.distance(orbit[static_cast<std::size_t>(i)], y).value <= delta;
    }
    hits += inside ? 1 : 0;
  }
  e.samples = budget.samples;
  e.approximate = true;
  const double samples = static_cast<double>(budget.samples);
  if (hits == 0) {
    // 99% upper confidence bound on the measure gives a lower bound here.
    e.inconclusive = true;
    e.value = -std::log(-std::log(0.01) / samples) / static_cast<double>(n);
    e.note = "no sample fell in the Bowen ball; value is a lower bound";
    return e;
  }
  const double mu = static_cast<double>(hits) / samples;
  e.value = std::max(0.0, -std::log(mu) / static_cast<double>(n));
  e.half_width = kZ99 * std::sqrt(mu * (1 - mu) / samples) / (mu * static_cast<double>(n));
  return e;
}

PartitionSpec PartitionSpec::intervals(std::vector<Rational> cuts) {
  for (std::size_t k = 1; k < cuts.size(); ++k)
    if (!(cuts[k - 1] < cuts[k])) throw std::invalid_argument("partition cuts must increase");
  PartitionSpec s;
  s.kind = Kind::intervals;
  s.cuts = std::move(cuts);
  return s;
}

std::size_t PartitionSpec::cell_of(const Point& x) const {
  if (kind == Kind::symbol) {
    const auto* s = std::get_if<SymbolicPoint>(&x);
    if (!s) throw std::invalid_argument("symbol partition needs a shift point");
    return s->at(0) - 1;
  }
  std::size_t cell = 0;
  if (const auto* q = std::get_if<Rational>(&x)) {
    while (cell < cuts.size() && cuts[cell] <= *q) ++cell;
  } else if (const auto* d = std::get_if<double>(&x)) {
    while (cell < cuts.size() && cuts[cell].get_d() <= *d) ++cell;
  } else {
    throw std::invalid_argument("interval partition needs a real point");
  }
  return cell;
}

std::string PartitionSpec::to_string() const {
  if (kind == Kind::symbol) return "symbol";
  std::string out = "intervals:";
  for (std::size_t k = 0; k < cuts.size(); ++k) out += (k ? "," : "") + format_rational(cuts[k]);
  return out;
}

EntropyEstimate partition_entropy(const MetricSystem& system, const PartitionSpec& partition, std::int64_t n,
                                  const SamplingBudget& budget) {
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  if (budget.samples == 0) throw std::invalid_argument("sample budget must be positive");
  EntropyEstimate e;
  e.method = EntropyMethod::partition;
  e.horizon = n;
  const auto length = static_cast<long double>(n + 1);

  const auto* shift = dynamic_cast<const ShiftSystem*>(&system);
  if (shift && partition.kind == PartitionSpec::Kind::symbol) {
    const ProbabilityVector& p = shift->measure();
    const double words = std::pow(static_cast<double>(p.size()), static_cast<double>(n + 1));
    if (words <= static_cast<double>(budget.samples)) {
      // Sum mu(w) * -log mu(w) over every itinerary word.
      std::vector<Symbol> word(static_cast<std::size_t>(n + 1), 1);
      long double total = 0;
      while (true) {
        long double log_mu = 0;
        for (Symbol s : word) log_mu += p.log_of(s);
        total -= std::exp(log_mu) * log_mu;
        std::size_t k = 0;
        while (k < word.size() && word[k] == p.size()) word[k++] = 1;
        if (k == word.size()) break;
        ++word[k];
      }
      e.value = static_cast<double>(total / length);
      e.note = "exact over " + std::to_string(static_cast<std::uint64_t>(words)) + " itinerary words";
      return e;
    }
    MeanAccumulator acc;
    for (std::size_t k = 0; k < budget.samples; ++k) {
      const SymbolicPoint x = shift->as_symbolic(system.sample_point(derive_seed(budget.seed, k)));
      long double log_mu = 0;
      for (std::int64_t i = 0; i <= n; ++i) log_mu += p.log_of(x.at(i));
      acc.add(-log_mu / length);
    }
    e.value = acc.mean();
    e.samples = budget.samples;
    e.half_width = acc.half_width();
    e.approximate = true;
    e.note = "exact cylinder measures along sampled itineraries";
    return e;
  }

  // Plug-in estimate from empirical itinerary frequencies.
  std::map<std::vector<std::size_t>, std::size_t> freq;
  for (std::size_t k = 0; k < budget.samples; ++k) {
    Point x = system.sample_point(derive_seed(budget.seed, k));
    std::vector<std::size_t> itinerary;
    for (std::int64_t i = 0; i <= n; ++i) {
      if (i > 0) x = system.transform(x);
      itinerary.push_back(partition.cell_of(x));
    }
    ++freq[itinerary];
  }
  const auto total = static_cast<long double>(budget.samples);
  long double h = 0;
  std::size_t singletons = 0;
  for (const auto& [word, count] : freq) {
    const long double f = static_cast<long double>(count) / total;
    h -= f * std::log(f);
    singletons += count == 1 ? 1 : 0;
  }
  e.value = static_cast<double>(h / length);
  e.samples = budget.samples;
  e.approximate = true;
  if (singletons > 0)
    e.note = "sample-starved: " + std::to_string(singletons) + " of " + std::to_string(freq.size()) +
             " itinerary cells seen once";
  return e;
}

double symbol_partition_diameter(const ShiftSystem& system) {
  // Two points with the same 0th symbol may first differ at index 1.
  return system.measure().size() > 1 ? 0.5 : 0.0;
}

}  // namespace rsens
