#include "rsens/experiment.hpp"

#include "rsens/entropy.hpp"
#include "rsens/random.hpp"
#include "rsens/sensitivity.hpp"
#include "rsens/shift.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace rsens {

using nlohmann::json;

namespace {

// Seed streams inside one experiment.
constexpr std::uint64_t kBudgetStream = 0x6275646765740001ULL;
constexpr std::uint64_t kAuditStream = 0x6175646974000002ULL;

const ShiftSystem& need_shift(const MetricSystem& system, const std::string& what) {
  const auto* s = dynamic_cast<const ShiftSystem*>(&system);
  if (!s) throw ConfigError(what + " needs a shift system");
  return *s;
}

SensitivityParams params_of(const ExperimentParams& p) { return {p.delta->value, p.rate_a->value}; }

std::vector<double> eps_grid_of(const ExperimentParams& p) {
  if (p.eps_dyadic > 0) return dyadic_eps_grid(p.delta->value, p.eps_dyadic);
  std::vector<double> grid;
  for (const auto& e : p.eps_values) grid.push_back(e.value);
  return grid;
}

json params_json(const SensitivityParams& p) { return {{"delta", json_real(p.delta)}, {"a", json_real(p.rate_a)}}; }

json trial_row(const TrialRecord& t) {
  json r;
  r["point"] = t.point;
  if (!t.other.empty()) r["other"] = t.other;
  r["radius"] = json_real(t.radius);
  r["ball_measure"] = t.ball_measure ? json_rational(*t.ball_measure) : json_real(std::exp(t.log_ball_measure));
  r["log_ball_measure"] = json_real(t.log_ball_measure);
  r["bound"] = t.bound;
  r["sensitive_time"] = t.sensitive_time ? json(*t.sensitive_time) : json(nullptr);
  r["passed"] = t.passed;
  r["approximate"] = t.approximate;
  if (!t.note.empty()) r["note"] = t.note;
  return r;
}

json verdict_json(const SensitivityVerdict& v) {
  return {{"kind", to_string(v.kind)},
          {"params", params_json(v.params)},
          {"trials", v.trials.size()},
          {"excluded", v.excluded},
          {"pass_fraction", json_real(v.pass_fraction)},
          {"passed", v.passed},
          {"approximate", v.approximate}};
}

json witness_row(const WitnessRow& w) {
  json r{{"n", w.n},
         {"bound", w.bound},
         {"distance", json_rational(w.distance)},
         {"distance_value", json_real(w.distance.get_d())},
         {"below_delta", w.below_delta}};
  if (w.reference) r["reference_bound"] = json_rational(*w.reference);
  return r;
}

void run_check_rs(const ExperimentConfig& cfg, const MetricSystem& system, json& result, json& rows) {
  const auto params = params_of(cfg.params);
  const auto grid = eps_grid_of(cfg.params);
  const auto* product = dynamic_cast<const ProductSystem*>(&system);
  SensitivityVerdict all;
  all.kind = SensitivityKind::restricted;
  all.params = params;
  std::size_t product_le_left = 0;
  for (std::size_t i = 0; i < cfg.params.points; ++i) {
    const Point x = system.sample_point(derive_seed(cfg.params.seed, i));
    RestrictedOptions opts{cfg.params.horizon,
                           SamplingBudget{cfg.params.samples, derive_seed(cfg.params.seed ^ kBudgetStream, i)}};
    auto v = check_restricted_sensitive(system, x, params, grid, opts);
    for (std::size_t k = 0; k < v.trials.size(); ++k) {
      json row = trial_row(v.trials[k]);
      row["point_index"] = i;
      if (product) {
        const BallMeasure left = product->left().ball_measure(as_product(x).left, grid[k]);
        const auto& t = v.trials[k];
        const bool le = (left.exact && t.ball_measure) ? *t.ball_measure <= *left.exact
                                                       : t.log_ball_measure <= left.log_value + 1e-12;
        product_le_left += le ? 1 : 0;
        row["left_ball_measure"] = left.exact ? json_rational(*left.exact) : json_real(left.value());
        row["product_le_left"] = le;
      }
      rows.push_back(std::move(row));
      all.trials.push_back(std::move(v.trials[k]));
    }
  }
  all.finalize();
  result = verdict_json(all);
  result["points"] = cfg.params.points;
  result["eps_grid"] = json::array();
  for (double e : grid) result["eps_grid"].push_back(json_real(e));
  if (product) result["product_le_left"] = product_le_left == all.trials.size();
}

void run_check_rps(const ExperimentConfig& cfg, const MetricSystem& system, json& result, json& rows) {
  const auto v = check_restricted_pairwise(system, params_of(cfg.params), cfg.params.pairs, cfg.params.seed,
                                           cfg.params.horizon);
  const bool shift = dynamic_cast<const ShiftSystem*>(&system) != nullptr;
  std::size_t time_is_index = 0;
  for (const auto& t : v.trials) {
    json row = trial_row(t);
    if (shift) {
      const std::int64_t index = -std::ilogb(t.radius);
      row["disagreement_index"] = index;
      time_is_index += (t.sensitive_time && *t.sensitive_time == index) ? 1 : 0;
    }
    rows.push_back(std::move(row));
  }
  result = verdict_json(v);
  result["pairs"] = cfg.params.pairs;
  if (shift) result["time_equals_index"] = time_is_index;
}

void run_witness_rps(const ExperimentConfig& cfg, const MetricSystem& system, json& result, json& rows) {
  const auto& shift = need_shift(system, "witness-rps-failure");
  if (shift.sidedness() != Sidedness::two_sided) throw ConfigError("witness-rps-failure needs a two-sided shift");
  const SymbolicPoint sigma = shift.as_symbolic(shift.sample_point(derive_seed(cfg.params.seed, 0)));
  const auto w = witness_two_sided_failure(sigma, cfg.params.delta->value, cfg.params.rate_a->value);
  json symbols = json::array();
  for (Symbol s : w.cylinder.symbols()) symbols.push_back(s);
  result = {{"base_point", w.base_point},
            {"cylinder", {{"lo", w.cylinder.lo()}, {"symbols", symbols}}},
            {"k1", w.k1},
            {"k2", w.k2},
            {"ball_measure", json_rational(w.ball_measure)},
            {"bound", w.bound},
            {"relevant_radius", w.relevant_radius},
            {"enumerated", w.enumerated},
            {"max_distance", json_rational(w.max_distance)},
            {"verified", w.verified},
            {"params", params_json(params_of(cfg.params))}};
  for (const auto& r : w.rows) rows.push_back(witness_row(r));
}

void run_witness_rank_one(const ExperimentConfig& cfg, const MetricSystem& system, json& result, json& rows) {
  const auto* r1 = dynamic_cast<const RankOneSystem*>(&system);
  if (!r1) throw ConfigError("witness-rankone-failure needs a rank-one system");
  const auto w = witness_rank_one_failure(*r1, cfg.params.delta->value, cfg.params.rate_a->value,
                                          parse_rank_one_route(cfg.params.route));
  result = {{"route", to_string(w.route)},
            {"stage", w.stage},
            {"height", w.height.get_str()},
            {"proportion_bound", json_rational(w.proportion_bound)},
            {"inequality_lhs", json_real(w.inequality_lhs)},
            {"inequality_rhs", json_real(w.inequality_rhs)},
            {"x", json_rational(w.x)},
            {"w", json_rational(w.w)},
            {"ball_measure", json_rational(w.ball_measure)},
            {"bound", w.bound},
            {"max_diameter", json_rational(w.max_diameter)},
            {"max_diameter_value", json_real(w.max_diameter.get_d())},
            {"verified", w.verified},
            {"params", params_json(params_of(cfg.params))}};
  for (const auto& r : w.rows) rows.push_back(witness_row(r));
}

json estimate_row(const EntropyEstimate& e) {
  json r{{"method", to_string(e.method)},
         {"value", json_real(e.value)},
         {"n", e.horizon},
         {"samples", e.samples},
         {"half_width", json_real(e.half_width)},
         {"approximate", e.approximate},
         {"inconclusive", e.inconclusive}};
  if (e.method == EntropyMethod::brin_katok) r["delta"] = json_real(e.delta);
  if (!e.note.empty()) r["note"] = e.note;
  return r;
}

void run_entropy(const ExperimentConfig& cfg, const MetricSystem& system, json& result, json& rows) {
  const ExperimentParams& p = cfg.params;
  const auto* shift = dynamic_cast<const ShiftSystem*>(&system);
  std::optional<double> reference;
  if (shift) reference = static_cast<double>(bernoulli_entropy(shift->measure()));
  auto with_reference = [&](json row, double value) {
    if (reference) {
      row["analytic"] = json_real(*reference);
      row["relative_error"] = json_real(std::abs(value - *reference) / *reference);
    }
    return row;
  };
  result["method"] = p.method;
  if (reference) result["analytic"] = json_real(*reference);

  if (p.method == "analytic") {
    if (!shift) throw ConfigError("analytic entropy needs a shift system");
    rows.push_back(with_reference(estimate_row(analytic_entropy(shift->measure())), *reference));
    result["value"] = json_real(*reference);
    return;
  }
  if (p.method == "partition") {
    PartitionSpec spec;
    if (p.partition != "symbol") {
      std::vector<Rational> cuts;
      std::istringstream in(p.partition.substr(10));
      std::string item;
      while (std::getline(in, item, ',')) cuts.push_back(parse_rational(item));
      spec = PartitionSpec::intervals(std::move(cuts));
    }
    const auto e = partition_entropy(system, spec, p.n, SamplingBudget{p.samples, p.seed});
    rows.push_back(with_reference(estimate_row(e), e.value));
    result["value"] = json_real(e.value);
    result["half_width"] = json_real(e.half_width);
    result["partition"] = spec.to_string();
    if (shift && spec.kind == PartitionSpec::Kind::symbol)
      result["partition_diameter"] = json_real(symbol_partition_diameter(*shift));
    return;
  }
  double min_value = std::numeric_limits<double>::infinity(), max_value = 0;
  for (std::size_t i = 0; i < p.points; ++i) {
    const Point x = system.sample_point(derive_seed(p.seed, i));
    EntropyEstimate e;
    if (p.method == "birkhoff") {
      if (!shift) throw ConfigError("birkhoff entropy needs a shift system");
      e = birkhoff_frequency_entropy(*shift, shift->as_symbolic(x), p.n);
    } else {
      e = brin_katok_estimate(system, x, p.delta->value, p.n,
                              SamplingBudget{p.samples, derive_seed(p.seed ^ kBudgetStream, i)});
    }
    json row = with_reference(estimate_row(e), e.value);
    row["point"] = render_point(x);
    rows.push_back(std::move(row));
    min_value = std::min(min_value, e.value);
    max_value = std::max(max_value, e.value);
  }
  result["points"] = p.points;
  result["min_value"] = json_real(p.points ? min_value : 0.0);
  result["max_value"] = json_real(max_value);
}

void run_rate(const ExperimentConfig& cfg, const MetricSystem& system, json& result, json& rows) {
  const auto& shift = need_shift(system, "rate");
  const double h = static_cast<double>(bernoulli_entropy(shift.measure()));
  double worst = 0;
  bool all_within = true;
  for (std::size_t i = 0; i < cfg.params.points; ++i) {
    const SymbolicPoint sigma = shift.as_symbolic(shift.sample_point(derive_seed(cfg.params.seed, i)));
    const auto r = estimate_min_asymptotic_rate(shift, sigma, cfg.params.horizon, cfg.params.c_grid);
    const double rel = std::abs(r.reciprocal - h) / h;
    worst = std::max(worst, rel);
    all_within = all_within && rel <= cfg.params.tolerance;
    json grid = json::array(), infs = json::array();
    for (auto c : r.c_grid) grid.push_back(c);
    for (double v : r.inf_by_c) infs.push_back(json_real(v));
    rows.push_back({{"point", r.point},
                    {"horizon", r.horizon},
                    {"estimate", json_real(r.estimate)},
                    {"reciprocal", json_real(r.reciprocal)},
                    {"entropy", json_real(h)},
                    {"relative_error", json_real(rel)},
                    {"within_tolerance", rel <= cfg.params.tolerance},
                    {"c_grid", grid},
                    {"inf_by_c", infs}});
  }
  result = {{"entropy", json_real(h)},
            {"points", cfg.params.points},
            {"horizon", cfg.params.horizon},
            {"tolerance", json_real(cfg.params.tolerance)},
            {"max_relative_error", json_real(worst)},
            {"all_within_tolerance", all_within}};
}

// Earliest n at which some extension of the one-sided word `sigma` (the ball
// fixes indices 0..m-1) is more than delta away after n shifts, found by
// listing every extension on indices m .. m + c + 1 and comparing raw
// distances against delta.
std::int64_t brute_force_separation(const std::vector<Symbol>& sigma, Symbol extension_symbol, Symbol alphabet,
                                    int c, double delta) {
  const auto m = static_cast<std::int64_t>(sigma.size());
  const std::int64_t len = m + c + 2;
  std::vector<Symbol> base(sigma);
  base.resize(static_cast<std::size_t>(len), extension_symbol);
  const std::int64_t free = len - m;
  std::vector<Symbol> tau(base);
  for (std::int64_t n = 0; n <= m + c + 1; ++n) {
    std::vector<Symbol> choice(static_cast<std::size_t>(free), 1);
    while (true) {
      for (std::int64_t k = 0; k < free; ++k) tau[static_cast<std::size_t>(m + k)] = choice[static_cast<std::size_t>(k)];
      std::int64_t index = -1;
      for (std::int64_t i = 0; n + i < len; ++i)
        if (tau[static_cast<std::size_t>(n + i)] != base[static_cast<std::size_t>(n + i)]) {
          index = i;
          break;
        }
      if (index >= 0 && std::ldexp(1.0, static_cast<int>(-index)) > delta) return n;
      std::size_t k = 0;
      while (k < choice.size() && choice[k] == alphabet) choice[k++] = 1;
      if (k == choice.size()) break;
      ++choice[k];
    }
  }
  return -1;
}

void run_bound_check_shift(const ExperimentConfig& cfg, const ShiftSystem& shift, json& result, json& rows) {
  // Lower semicontinuity of the ball measure: mu B_r(y) >= mu B_{r-eta}(x)
  // whenever d(x, y) < eta < r.
  SplitMix rng(derive_seed(cfg.params.seed ^ kAuditStream, 0));
  std::size_t holds = 0, checked = 0;
  for (std::size_t t = 0; t < cfg.params.trials; ++t) {
    const SymbolicPoint x = shift.as_symbolic(shift.sample_point(derive_seed(cfg.params.seed, t)));
    const auto agree = static_cast<std::int64_t>(rng.below(13));
    const std::int64_t lo = shift.sidedness() == Sidedness::one_sided ? 0 : -(agree > 0 ? agree - 1 : 0);
    const std::int64_t count = shift.sidedness() == Sidedness::one_sided ? agree : std::max<std::int64_t>(2 * agree - 1, 0);
    const SymbolicPoint y = SymbolicPoint::with_window(shift.measure_ptr(), shift.sidedness(), lo,
                                                       x.symbols(lo, count), SymbolicPoint::Tail::random(rng.next()));
    const ShiftDistance d = shift_distance(x, y, shift.horizon());
    if (d.identical || d.beyond_horizon) continue;
    const double dv = d.value();
    const double eta = dv + (1.25 - dv) * (0.001 + 0.998 * rng.uniform());
    const double r = eta + (1.5 - eta) * (0.001 + 0.998 * rng.uniform());
    const auto lhs = shift.ball_measure(y, r);
    const auto rhs = shift.ball_measure(x, r - eta);
    const bool ok = *lhs.exact >= *rhs.exact;
    ++checked;
    holds += ok ? 1 : 0;
    rows.push_back({{"trial", t},
                    {"distance", json_real(dv)},
                    {"eta", json_real(eta)},
                    {"r", json_real(r)},
                    {"ball_y_r", json_rational(*lhs.exact)},
                    {"ball_x_r_minus_eta", json_rational(*rhs.exact)},
                    {"holds", ok}});
  }

  // Earliest positive-measure separation against brute force.
  const auto alphabet = static_cast<Symbol>(shift.measure().size());
  std::size_t max_len = 0;
  for (std::size_t words = alphabet; words <= 4096; words *= alphabet) ++max_len;
  std::size_t cases = 0, mismatches = 0;
  if (alphabet >= 2 && shift.sidedness() == Sidedness::one_sided) {
    for (std::size_t m = 0; m <= max_len; ++m) {
      std::vector<Symbol> word(m, 1);
      while (true) {
        for (int c = 0; c <= 3; ++c)
          for (double delta : {0.75 * std::ldexp(1.0, -c), std::ldexp(1.0, -(c + 1))}) {
            ++cases;
            const auto bf = brute_force_separation(word, 1, alphabet, c, delta);
            if (bf != min_separating_time_exact(static_cast<std::int64_t>(m), delta)) ++mismatches;
          }
        std::size_t k = 0;
        while (k < word.size() && word[k] == alphabet) word[k++] = 1;
        if (k == word.size()) break;
        ++word[k];
      }
    }
  }
  result = {{"semicontinuity_trials", checked},
            {"semicontinuity_holds", holds},
            {"separation_cases", cases},
            {"separation_mismatches", mismatches},
            {"separation_max_length", max_len},
            {"passed", holds == checked && mismatches == 0}};
}

void run_bound_check_rank_one(const ExperimentConfig& cfg, const RankOneSystem& sys, json& result, json& rows) {
  const std::size_t stages = std::min(cfg.params.stages, sys.depth());
  const auto columns = build_columns(sys.spec(), stages, sys.options().space_cap, sys.options().allow_over_cap);
  json heights = json::array();
  bool implicit_matches = true, disjoint = true;
  for (std::size_t n = 0; n <= stages; ++n) {
    heights.push_back(sys.height(n).get_str());
    const auto& col = columns[n].levels;
    implicit_matches = implicit_matches && BigInt(static_cast<unsigned long>(col.size())) == sys.height(n);
    for (std::size_t i = 0; i < col.size(); ++i)
      implicit_matches = implicit_matches && col[i] == sys.level(n, BigInt(static_cast<unsigned long>(i)));
    auto sorted = col;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.left < b.left; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      disjoint = disjoint && sorted[i].left >= 0 && sorted[i].right <= sys.total_measure() &&
                 sorted[i].left < sorted[i].right;
      if (i + 1 < sorted.size()) disjoint = disjoint && sorted[i].right <= sorted[i + 1].left;
    }
  }

  // lambda(T^-1 E) against lambda(E) for random unions of levels.
  SplitMix rng(derive_seed(cfg.params.seed ^ kAuditStream, 1));
  const bool preserving = sys.spec().measure_preserving();
  std::size_t equal = 0, mapped_inside = 0;
  for (std::size_t t = 0; t < cfg.params.trials; ++t) {
    const std::size_t n = rng.below(stages + 1);
    const auto& col = columns[n].levels;
    std::vector<BigInt> chosen;
    Rational lambda_e = 0;
    for (std::size_t i = 0; i < col.size(); ++i)
      if (rng.below(2) == 1 || (i + 1 == col.size() && chosen.empty())) {
        chosen.emplace_back(static_cast<unsigned long>(i));
        lambda_e += col[i].length();
      }
    Rational tail;
    const auto pre = sys.preimage_of_levels(n, chosen, sys.depth(), &tail);
    Rational lambda_pre = tail;
    bool inside = true;
    for (const auto& piece : pre) {
      lambda_pre += piece.length();
      // T of the piece's midpoint must land in E.
      const auto image = sys.apply(piece.left + piece.length() / 2, sys.depth());
      bool hit = false;
      for (const auto& i : chosen) hit = hit || (image && sys.level(n, i).contains(*image));
      inside = inside && hit;
    }
    const bool eq = lambda_pre == lambda_e;
    equal += eq ? 1 : 0;
    mapped_inside += inside ? 1 : 0;
    rows.push_back({{"trial", t},
                    {"stage", n},
                    {"levels", chosen.size()},
                    {"lambda_E", json_rational(lambda_e)},
                    {"lambda_preimage", json_rational(lambda_pre)},
                    {"equal", eq},
                    {"maps_into_E", inside}});
  }
  result = {{"stages", stages},
            {"heights", heights},
            {"total_measure", json_rational(sys.total_measure())},
            {"implicit_matches_explicit", implicit_matches},
            {"levels_disjoint", disjoint},
            {"measure_preserving", preserving},
            {"preimage_trials", cfg.params.trials},
            {"preimage_measure_equal", equal},
            {"preimage_maps_into_E", mapped_inside},
            {"passed", implicit_matches && disjoint && mapped_inside == cfg.params.trials &&
                           (!preserving || equal == cfg.params.trials)}};
}

void run_bound_check(const ExperimentConfig& cfg, const MetricSystem& system, json& result, json& rows) {
  if (const auto* s = dynamic_cast<const ShiftSystem*>(&system)) return run_bound_check_shift(cfg, *s, result, rows);
  if (const auto* r = dynamic_cast<const RankOneSystem*>(&system))
    return run_bound_check_rank_one(cfg, *r, result, rows);
  throw ConfigError("bound-check needs a shift or rank-one system");
}

json error_payload(const std::string& config_text, const std::string& kind, const std::string& message) {
  return {{"config", config_text},
          {"status", "error"},
          {"error", {{"kind", kind}, {"message", message}}},
          {"rows", json::array()}};
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

nlohmann::json json_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double rounded = std::strtod(buf, nullptr);
  return rounded == 0 ? json(0.0) : json(rounded);
}

nlohmann::json json_rational(const Rational& q) { return format_rational(q); }

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  throw ConfigError("unknown report format '" + std::string(text) + "'");
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  const std::string text = serialize_config(config);
  try {
    const SystemPtr system = config.system.build();
    json result = json::object();
    json rows = json::array();
    switch (config.kind) {
      case ExperimentKind::check_rs: run_check_rs(config, *system, result, rows); break;
      case ExperimentKind::check_rps: run_check_rps(config, *system, result, rows); break;
      case ExperimentKind::witness_rps_failure: run_witness_rps(config, *system, result, rows); break;
      case ExperimentKind::witness_rankone_failure: run_witness_rank_one(config, *system, result, rows); break;
      case ExperimentKind::entropy: run_entropy(config, *system, result, rows); break;
      case ExperimentKind::rate: run_rate(config, *system, result, rows); break;
      case ExperimentKind::bound_check: run_bound_check(config, *system, result, rows); break;
    }
    report.payload = {{"config", text},
                      {"kind", to_string(config.kind)},
                      {"system", system->name()},
                      {"seed", config.params.seed},
                      {"status", "ok"},
                      {"result", std::move(result)},
                      {"rows", std::move(rows)}};
  } catch (const ConfigError& e) {
    report.payload = error_payload(text, "config-error", e.what());
    report.exit_code = kExitConfigError;
  } catch (const UndefinedAtDepth& e) {
    report.payload = error_payload(text, "undefined-at-depth", e.what());
    report.exit_code = kExitRuntimeIncapacity;
  } catch (const std::length_error& e) {
    report.payload = error_payload(text, "runtime-incapacity", e.what());
    report.exit_code = kExitRuntimeIncapacity;
  } catch (const std::logic_error& e) {
    // invalid_argument, domain_error, out_of_range: the declaration itself is unusable.
    report.payload = error_payload(text, "config-error", e.what());
    report.exit_code = kExitConfigError;
  } catch (const std::exception& e) {
    report.payload = error_payload(text, "runtime-incapacity", e.what());
    report.exit_code = kExitRuntimeIncapacity;
  }
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ExperimentReport run_experiment_text(std::string_view config_text) {
  try {
    return run_experiment(parse_config(config_text));
  } catch (const ConfigError& e) {
    ExperimentReport r;
    r.payload = error_payload(std::string(config_text), "config-error", e.what());
    r.exit_code = kExitConfigError;
    return r;
  }
}

ExperimentReport run_experiment_text(std::string_view config_text, std::uint64_t seed) {
  ExperimentConfig cfg;
  try {
    cfg = parse_config(config_text);
  } catch (const ConfigError& e) {
    ExperimentReport r;
    r.payload = error_payload(std::string(config_text), "config-error", e.what());
    r.exit_code = kExitConfigError;
    return r;
  }
  cfg.params.seed = seed;
  return run_experiment(cfg);
}

std::string emit_report(const ExperimentReport& report, ReportFormat format) {
  if (format == ReportFormat::json) {
    json doc{{"payload", report.payload}, {"wall_time_ms", json_real(report.wall_time_ms)}};
    return doc.dump(2) + "\n";
  }
  const json rows = report.payload.contains("rows") ? report.payload["rows"] : json::array();
  std::vector<std::string> header;
  for (const auto& row : rows)
    for (const auto& [key, value] : row.items())
      if (std::find(header.begin(), header.end(), key) == header.end()) header.push_back(key);
  std::sort(header.begin(), header.end());
  std::ostringstream os;
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (k) os << ",";
      if (row.contains(header[k])) os << csv_cell(row[header[k]]);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace rsens
