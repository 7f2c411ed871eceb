#include "rsens/rank_one.hpp"

#include "rsens/random.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace rsens {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trimmed(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_count(const std::string& text) {
  const auto t = trimmed(text);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("expected a nonnegative integer, got '" + t + "'");
  return std::stoull(t);
}

RationalInterval affine_image(const RationalInterval& j, const RationalInterval& from, const RationalInterval& to) {
  const Rational slope = to.length() / from.length();
  return {to.left + (j.left - from.left) * slope, to.left + (j.right - from.left) * slope};
}

Rational affine_point(const Rational& x, const RationalInterval& from, const RationalInterval& to) {
  return to.left + (x - from.left) * (to.length() / from.length());
}

}  // namespace

// ---------------------------------------------------------------------------
// Stage / RankOneSpec

bool Stage::is_uniform() const {
  if (proportions.empty()) return true;
  for (const auto& p : proportions)
    if (p != proportions.front()) return false;
  return true;
}

std::uint64_t Stage::spacer_total() const {
  std::uint64_t total = 0;
  for (auto s : spacers) total += s;
  return total;
}

std::string Stage::to_string() const {
  std::ostringstream os;
  os << cuts << " |";
  for (std::size_t j = 0; j < spacers.size(); ++j) os << (j ? "," : " ") << spacers[j];
  if (!proportions.empty()) {
    os << " |";
    for (std::size_t j = 0; j < proportions.size(); ++j) os << (j ? "," : " ") << format_rational(proportions[j]);
  }
  return os.str();
}

Stage Stage::parse(std::string_view text) {
  const auto parts = split(text, '|');
  if (parts.size() < 2 || parts.size() > 3)
    throw std::invalid_argument("stage '" + std::string(text) + "' must read 'r | spacers [| proportions]'");
  Stage st;
  const auto r = parse_count(parts[0]);
  if (r > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("too many cuts");
  st.cuts = static_cast<std::uint32_t>(r);
  for (const auto& s : split(parts[1], ',')) st.spacers.push_back(parse_count(s));
  if (parts.size() == 3) {
    for (const auto& p : split(parts[2], ',')) st.proportions.push_back(parse_rational(p));
    bool all_uniform = st.proportions.size() == st.cuts;
    for (const auto& p : st.proportions) all_uniform = all_uniform && p == Rational(1, st.cuts);
    if (all_uniform) st.proportions.clear();
  }
  return st;
}

std::size_t RankOneSpec::stage_count() const noexcept {
  return cycle.empty() ? prefix.size() : std::numeric_limits<std::size_t>::max();
}

const Stage& RankOneSpec::stage(std::size_t n) const {
  if (n < prefix.size()) return prefix[n];
  if (cycle.empty()) throw std::out_of_range("finite rank-one spec has no stage " + std::to_string(n));
  return cycle[(n - prefix.size()) % cycle.size()];
}

bool RankOneSpec::measure_preserving() const {
  for (const auto& s : prefix)
    if (!s.is_uniform()) return false;
  for (const auto& s : cycle)
    if (!s.is_uniform()) return false;
  return true;
}

Rational RankOneSpec::proportion_lower_bound() const {
  std::optional<Rational> lo;
  auto visit = [&](const Stage& s) {
    for (std::size_t j = 0; j < s.cuts; ++j) {
      const Rational p = s.proportion(j);
      if (!lo || p < *lo) lo = p;
    }
  };
  for (const auto& s : prefix) visit(s);
  for (const auto& s : cycle) visit(s);
  if (!lo) throw std::invalid_argument("spec has no stages");
  return *lo;
}

RankOneSpec RankOneSpec::chacon(Rational initial_width) {
  RankOneSpec spec;
  spec.initial_width = std::move(initial_width);
  spec.cycle.push_back(Stage{3, {0, 1, 0}, {}});
  return spec;
}

// ---------------------------------------------------------------------------
// Validation and explicit construction

SpecValidation validate_spec(const RankOneSpec& spec, std::size_t depth, const Rational& space_cap) {
  SpecValidation report;
  auto problem = [&](std::string msg) {
    report.valid = false;
    report.problems.push_back(std::move(msg));
  };
  if (spec.initial_width <= 0) problem("initial width must be positive");
  if (spec.prefix.empty() && spec.cycle.empty()) problem("spec has no stages");
  depth = std::min(depth, spec.stage_count());

  auto check_stage = [&](const Stage& s, const std::string& where) {
    if (s.cuts < 2) problem(where + ": r = " + std::to_string(s.cuts) + " but every stage needs r >= 2");
    if (s.spacers.size() != s.cuts)
      problem(where + ": " + std::to_string(s.spacers.size()) + " spacer counts for r = " + std::to_string(s.cuts));
    if (!s.proportions.empty()) {
      if (s.proportions.size() != s.cuts)
        problem(where + ": " + std::to_string(s.proportions.size()) + " proportions for r = " + std::to_string(s.cuts));
      Rational sum = 0;
      for (const auto& p : s.proportions) {
        if (p <= 0) problem(where + ": proportion " + format_rational(p) + " is not positive");
        sum += p;
      }
      if (sum != 1) problem(where + ": proportions sum to " + format_rational(sum));
    }
  };
  for (std::size_t n = 0; n < spec.prefix.size(); ++n) check_stage(spec.prefix[n], "prefix stage " + std::to_string(n));
  for (std::size_t n = 0; n < spec.cycle.size(); ++n) check_stage(spec.cycle[n], "cycle stage " + std::to_string(n));
  report.measure_preserving = spec.measure_preserving();
  if (!report.valid) return report;

  BigInt h = 1;
  Rational top = spec.initial_width, lo = top, hi = top, total = top;
  report.heights.push_back(h);
  report.min_widths.push_back(lo);
  report.max_widths.push_back(hi);
  for (std::size_t n = 0; n < depth; ++n) {
    const Stage& s = spec.stage(n);
    Rational pmin = s.proportion(0), pmax = s.proportion(0);
    for (std::size_t j = 0; j < s.cuts; ++j) {
      const Rational p = s.proportion(j);
      pmin = std::min(pmin, p);
      pmax = std::max(pmax, p);
      total += p * top * static_cast<unsigned long>(s.spacers[j]);
    }
    h = h * s.cuts + BigInt(std::to_string(s.spacer_total()));
    lo = pmin * lo;
    hi = pmax * hi;
    top = s.proportion(s.cuts - 1) * top;
    report.heights.push_back(h);
    report.min_widths.push_back(lo);
    report.max_widths.push_back(hi);
  }
  report.total_measure = total;
  report.within_cap = total <= space_cap;
  // Every stage multiplies the widest level by at most max_j p(j) < 1, so a
  // nonempty cycle drives widths to 0; a finite spec stops shrinking.
  report.widths_vanish = !spec.is_finite();
  return report;
}

std::vector<Column> build_columns(const RankOneSpec& spec, std::size_t stages, const Rational& space_cap,
                                  bool allow_over_cap, std::size_t max_levels) {
  const auto check = validate_spec(spec, stages, space_cap);
  if (!check.valid) throw std::invalid_argument("invalid rank-one spec: " + check.problems.front());
  if (stages > spec.stage_count()) throw std::out_of_range("spec defines fewer stages than requested");

  std::vector<Column> columns;
  columns.push_back(Column{0, {RationalInterval{0, spec.initial_width}}});
  Rational cursor = spec.initial_width;
  for (std::size_t n = 0; n < stages; ++n) {
    const Stage& s = spec.stage(n);
    const Column& prev = columns.back();
    Column next{n + 1, {}};
    const Rational top_len = prev.levels.back().length();
    Rational cut = 0;
    for (std::size_t j = 0; j < s.cuts; ++j) {
      const Rational p = s.proportion(j);
      for (const auto& lvl : prev.levels) {
        const Rational len = lvl.length();
        next.levels.push_back({lvl.left + len * cut, lvl.left + len * (cut + p)});
      }
      const Rational width = p * top_len;
      for (std::uint64_t k = 0; k < s.spacers[j]; ++k) {
        next.levels.push_back({cursor, cursor + width});
        cursor += width;
      }
      if (next.levels.size() > max_levels) throw std::length_error("column exceeds the level budget");
      cut += p;
    }
    if (cursor > space_cap && !allow_over_cap)
      throw std::domain_error("spacers exceed the space cap at stage " + std::to_string(n));
    columns.push_back(std::move(next));
  }
  return columns;
}

// ---------------------------------------------------------------------------
// RankOneSystem

RankOneSystem::RankOneSystem(RankOneSpec spec, RankOneOptions options)
    : spec_(std::move(spec)), options_(std::move(options)) {
  const std::size_t depth = std::min(options_.depth_cap, spec_.stage_count());
  const auto check = validate_spec(spec_, depth, options_.space_cap);
  if (!check.valid) throw std::invalid_argument("invalid rank-one spec: " + check.problems.front());

  stages_.resize(depth + 1);
  stages_[0].height = 1;
  stages_[0].top_length = spec_.initial_width;
  stages_[0].min_width = spec_.initial_width;
  stages_[0].max_width = spec_.initial_width;
  Rational fresh = spec_.initial_width;
  for (std::size_t n = 0; n < depth; ++n) {
    const Stage& s = spec_.stage(n);
    StageData& cur = stages_[n];
    StageData& next = stages_[n + 1];
    cur.spacers = s.spacers;
    cur.cumulative.push_back(0);
    cur.block_start.push_back(0);
    cur.spacer_start.push_back(fresh);
    Rational pmin = s.proportion(0), pmax = s.proportion(0);
    for (std::size_t j = 0; j < s.cuts; ++j) {
      const Rational p = s.proportion(j);
      pmin = std::min(pmin, p);
      pmax = std::max(pmax, p);
      cur.cumulative.push_back(cur.cumulative.back() + p);
      const Rational width = p * cur.top_length;
      cur.spacer_width.push_back(width);
      fresh += width * static_cast<unsigned long>(s.spacers[j]);
      cur.spacer_start.push_back(fresh);
      cur.block_start.push_back(cur.block_start.back() + cur.height + BigInt(std::to_string(s.spacers[j])));
    }
    next.height = cur.block_start.back();
    next.top_length = s.proportion(s.cuts - 1) * cur.top_length;
    next.min_width = pmin * cur.min_width;
    next.max_width = pmax * cur.max_width;
  }

  // Total measure of the whole space, including spacers deeper than the cap.
  if (spec_.is_finite()) {
    Rational total = spec_.initial_width, top = spec_.initial_width;
    for (const auto& s : spec_.prefix) {
      for (std::size_t j = 0; j < s.cuts; ++j) total += s.proportion(j) * top * static_cast<unsigned long>(s.spacers[j]);
      top *= s.proportion(s.cuts - 1);
    }
    total_ = total;
  } else {
    Rational total = spec_.initial_width, top = spec_.initial_width;
    for (const auto& s : spec_.prefix) {
      for (std::size_t j = 0; j < s.cuts; ++j) total += s.proportion(j) * top * static_cast<unsigned long>(s.spacers[j]);
      top *= s.proportion(s.cuts - 1);
    }
    // Over one period the top length contracts by rho; the spacer mass is a
    // geometric series in rho.
    Rational period = 0, rho = 1;
    for (const auto& s : spec_.cycle) {
      for (std::size_t j = 0; j < s.cuts; ++j)
        period += s.proportion(j) * top * rho * static_cast<unsigned long>(s.spacers[j]);
      rho *= s.proportion(s.cuts - 1);
    }
    total_ = total + period / (1 - rho);
  }
  if (total_ > options_.space_cap && !options_.allow_over_cap)
    throw std::domain_error("total measure " + format_rational(total_) + " exceeds the space cap " +
                            format_rational(options_.space_cap));
}

std::size_t RankOneSystem::sublevel_index(const StageData& s, const Rational& fraction) const {
  const auto it = std::upper_bound(s.cumulative.begin(), s.cumulative.end(), fraction);
  const auto j = static_cast<std::size_t>(it - s.cumulative.begin()) - 1;
  return std::min(j, s.cumulative.size() - 2);
}

RationalInterval RankOneSystem::sublevel(const RationalInterval& lvl, std::size_t n, std::size_t j) const {
  const StageData& s = stages_.at(n);
  if (j + 1 >= s.cumulative.size()) throw std::out_of_range("no such subcolumn");
  const Rational len = lvl.length();
  return {lvl.left + len * s.cumulative[j], lvl.left + len * s.cumulative[j + 1]};
}

RationalInterval RankOneSystem::level(std::size_t n, const BigInt& index) const {
  if (n > depth()) throw std::out_of_range("column beyond the depth cap");
  if (index < 0 || index >= stages_[n].height) throw std::out_of_range("level index outside the column");
  std::vector<std::pair<std::size_t, std::size_t>> cuts;  // (stage, subcolumn), outermost first
  BigInt i = index;
  std::optional<RationalInterval> base;
  while (n > 0) {
    const StageData& s = stages_[n - 1];
    const auto it = std::upper_bound(s.block_start.begin(), s.block_start.end(), i);
    const auto j = static_cast<std::size_t>(it - s.block_start.begin()) - 1;
    BigInt local = i - s.block_start[j];
    if (local < s.height) {
      cuts.emplace_back(n - 1, j);
      i = local;
      --n;
      continue;
    }
    local -= s.height;
    const Rational k(local);
    base = RationalInterval{s.spacer_start[j] + k * s.spacer_width[j], s.spacer_start[j] + (k + 1) * s.spacer_width[j]};
    break;
  }
  RationalInterval out = base ? *base : RationalInterval{0, spec_.initial_width};
  for (auto it = cuts.rbegin(); it != cuts.rend(); ++it) out = sublevel(out, it->first, it->second);
  return out;
}

std::optional<RankOneSystem::Location> RankOneSystem::locate(const Rational& x) const {
  if (x < 0 || x >= total_) throw std::domain_error("point " + format_rational(x) + " lies outside the space");
  if (x < spec_.initial_width) return Location{0, 0, {0, spec_.initial_width}};
  for (std::size_t m = 0; m < depth(); ++m) {
    const StageData& s = stages_[m];
    if (x >= s.spacer_start.back()) continue;
    const auto it = std::upper_bound(s.spacer_start.begin(), s.spacer_start.end(), x);
    const auto j = static_cast<std::size_t>(it - s.spacer_start.begin()) - 1;
    const Rational offset = (x - s.spacer_start[j]) / s.spacer_width[j];
    const BigInt k = offset.get_num() / offset.get_den();
    const Rational kq(k);
    return Location{m + 1, s.block_start[j] + s.height + k,
                    {s.spacer_start[j] + kq * s.spacer_width[j], s.spacer_start[j] + (kq + 1) * s.spacer_width[j]}};
  }
  return std::nullopt;
}

RankOneSystem::Location RankOneSystem::refine(const Location& loc, const Rational& x) const {
  if (loc.stage >= depth()) throw UndefinedAtDepth("cannot refine beyond the depth cap");
  const StageData& s = stages_[loc.stage];
  const auto j = sublevel_index(s, (x - loc.level.left) / loc.level.length());
  return Location{loc.stage + 1, s.block_start[j] + loc.index, sublevel(loc.level, loc.stage, j)};
}

std::optional<Rational> RankOneSystem::apply(const Rational& x, std::size_t depth_cap) const {
  depth_cap = std::min(depth_cap, depth());
  auto loc = locate(x);
  if (!loc || loc->stage > depth_cap) return std::nullopt;
  while (loc->index + 1 >= stages_[loc->stage].height) {
    if (loc->stage == depth_cap) return std::nullopt;
    *loc = refine(*loc, x);
  }
  return affine_point(x, loc->level, level(loc->stage, loc->index + 1));
}

std::optional<Rational> RankOneSystem::apply_inverse(const Rational& x, std::size_t depth_cap) const {
  depth_cap = std::min(depth_cap, depth());
  auto loc = locate(x);
  if (!loc || loc->stage > depth_cap) return std::nullopt;
  while (loc->index == 0) {
    if (loc->stage == depth_cap) return std::nullopt;
    *loc = refine(*loc, x);
  }
  return affine_point(x, loc->level, level(loc->stage, loc->index - 1));
}

std::optional<Rational> RankOneSystem::radon_nikodym(const Rational& x, std::size_t depth_cap) const {
  depth_cap = std::min(depth_cap, depth());
  auto loc = locate(x);
  if (!loc || loc->stage > depth_cap) return std::nullopt;
  while (loc->index + 1 >= stages_[loc->stage].height) {
    if (loc->stage == depth_cap) return std::nullopt;
    *loc = refine(*loc, x);
  }
  return level(loc->stage, loc->index + 1).length() / loc->level.length();
}

std::vector<RankOneSystem::Piece> RankOneSystem::decompose(const RationalInterval& interval,
                                                           Rational* unresolved) const {
  const Rational lo = std::max(interval.left, Rational(0));
  const Rational hi = std::min(interval.right, total_);
  std::vector<Piece> pieces;
  if (unresolved) *unresolved = 0;
  if (lo >= hi) return pieces;
  if (lo < spec_.initial_width)
    pieces.push_back({{lo, std::min(hi, spec_.initial_width)}, Location{0, 0, {0, spec_.initial_width}}});
  for (std::size_t m = 0; m < depth(); ++m) {
    const StageData& s = stages_[m];
    if (hi <= s.spacer_start.front()) break;
    if (lo >= s.spacer_start.back()) continue;
    for (std::size_t j = 0; j < s.spacers.size(); ++j) {
      const Rational a = std::max(lo, s.spacer_start[j]);
      const Rational b = std::min(hi, s.spacer_start[j + 1]);
      if (a >= b) continue;
      const Rational first = (a - s.spacer_start[j]) / s.spacer_width[j];
      const Rational last = (b - s.spacer_start[j]) / s.spacer_width[j];
      const BigInt k0 = first.get_num() / first.get_den();
      BigInt k1 = last.get_num() / last.get_den();
      if (Rational(k1) == last) k1 -= 1;
      if (k1 - k0 > 100000) throw std::length_error("ball covers too many spacer levels");
      for (BigInt k = k0; k <= k1; ++k) {
        const Rational kq(k);
        RationalInterval lvl{s.spacer_start[j] + kq * s.spacer_width[j], s.spacer_start[j] + (kq + 1) * s.spacer_width[j]};
        pieces.push_back({{std::max(a, lvl.left), std::min(b, lvl.right)},
                          Location{m + 1, s.block_start[j] + s.height + k, lvl}});
      }
    }
  }
  const Rational resolved_end = depth() > 0 ? stages_[depth() - 1].spacer_start.back() : spec_.initial_width;
  if (unresolved && hi > resolved_end) *unresolved = hi - std::max(lo, resolved_end);
  return pieces;
}

std::vector<RankOneSystem::Piece> RankOneSystem::advance(const std::vector<Piece>& pieces,
                                                         std::size_t depth_cap) const {
  depth_cap = std::min(depth_cap, depth());
  std::vector<Piece> work(pieces.begin(), pieces.end());
  std::vector<Piece> out;
  while (!work.empty()) {
    Piece p = std::move(work.back());
    work.pop_back();
    const auto& loc = p.location;
    if (loc.index + 1 < stages_[loc.stage].height) {
      const auto next = level(loc.stage, loc.index + 1);
      out.push_back({affine_image(p.interval, loc.level, next), Location{loc.stage, loc.index + 1, next}});
      continue;
    }
    if (loc.stage >= depth_cap)
      throw UndefinedAtDepth("interval still on the top level of C_" + std::to_string(loc.stage));
    const StageData& s = stages_[loc.stage];
    for (std::size_t j = 0; j + 1 < s.cumulative.size(); ++j) {
      const auto sub = sublevel(loc.level, loc.stage, j);
      const Rational a = std::max(sub.left, p.interval.left);
      const Rational b = std::min(sub.right, p.interval.right);
      if (a < b) work.push_back({{a, b}, Location{loc.stage + 1, s.block_start[j] + loc.index, sub}});
    }
  }
  std::sort(out.begin(), out.end(), [](const Piece& a, const Piece& b) { return a.interval.left < b.interval.left; });
  return out;
}

RankOneSystem::IntervalImage RankOneSystem::transform_interval(const RationalInterval& j, std::int64_t n,
                                                                std::size_t depth_cap) const {
  if (!(j.left < j.right)) throw std::invalid_argument("interval must have positive length");
  if (n < 0) throw std::invalid_argument("negative iterate");
  const auto loc = locate(j.left);
  if (!loc) throw UndefinedAtDepth("interval lies in spacers beyond the depth cap");
  if (j.right > loc->level.right) throw std::invalid_argument("interval is not contained in a single level");
  std::vector<Piece> pieces{{j, *loc}};
  for (std::int64_t step = 0; step < n; ++step) pieces = advance(pieces, depth_cap);
  IntervalImage image;
  Rational lo = pieces.front().interval.left, hi = pieces.front().interval.right;
  for (const auto& p : pieces) {
    image.pieces.push_back(p.interval);
    lo = std::min(lo, p.interval.left);
    hi = std::max(hi, p.interval.right);
  }
  image.diameter = hi - lo;
  return image;
}

Rational RankOneSystem::lebesgue_ball_measure(const Rational& x, const Rational& eps) const {
  if (eps <= 0) throw std::invalid_argument("ball radius must be positive");
  const Rational lo = std::max(Rational(x - eps), Rational(0));
  const Rational hi = std::min(Rational(x + eps), total_);
  return hi > lo ? Rational(hi - lo) : Rational(0);
}

std::vector<RationalInterval> RankOneSystem::preimage_of_levels(std::size_t n, const std::vector<BigInt>& levels,
                                                                std::size_t depth_cap, Rational* tail_measure) const {
  depth_cap = std::min(depth_cap, depth());
  if (n > depth_cap) throw std::out_of_range("column beyond the depth cap");
  std::vector<RationalInterval> out;
  if (tail_measure) *tail_measure = 0;
  for (const auto& i : levels) {
    if (i > 0) {
      out.push_back(level(n, i - 1));
      continue;
    }
    // Bottom level: every sublevel except the leftmost sits above another
    // level one stage deeper; the leftmost stays at the bottom.
    for (std::size_t m = n; m < depth_cap; ++m) {
      const StageData& s = stages_[m];
      for (std::size_t j = 1; j < s.spacers.size(); ++j) out.push_back(level(m + 1, s.block_start[j] - 1));
    }
    if (tail_measure) *tail_measure += stages_[depth_cap].top_length;
  }
  return out;
}

std::string RankOneSystem::name() const {
  std::ostringstream os;
  os << "rank-one w0=" << format_rational(spec_.initial_width);
  if (!spec_.prefix.empty()) {
    os << " prefix=[";
    for (std::size_t n = 0; n < spec_.prefix.size(); ++n) os << (n ? "; " : "") << spec_.prefix[n].to_string();
    os << "]";
  }
  if (!spec_.cycle.empty()) {
    os << " cycle=[";
    for (std::size_t n = 0; n < spec_.cycle.size(); ++n) os << (n ? "; " : "") << spec_.cycle[n].to_string();
    os << "]";
  }
  return os.str();
}

const Rational& RankOneSystem::as_rational(const Point& x) const {
  const auto* q = std::get_if<Rational>(&x);
  if (!q) throw std::invalid_argument("point does not belong to a rank-one system");
  return *q;
}

Point RankOneSystem::transform(const Point& x) const {
  auto y = apply(as_rational(x), options_.depth_cap);
  if (!y) throw UndefinedAtDepth("T undefined at " + format_rational(as_rational(x)) + " within depth " +
                                 std::to_string(options_.depth_cap));
  return *y;
}

Distance RankOneSystem::distance(const Point& x, const Point& y) const {
  const Rational d = abs(as_rational(x) - as_rational(y));
  return {d.get_d(), true};
}

BallMeasure RankOneSystem::ball_measure(const Point& x, double radius) const {
  return BallMeasure::from_exact(lebesgue_ball_measure(as_rational(x), rational_from_double(radius)) / total_);
}

Point RankOneSystem::sample_point(std::uint64_t seed) const {
  const std::uint64_t bits = mix64(seed) >> 11;
  Rational u(BigInt(std::to_string(bits)), BigInt(1) << 53);
  u.canonicalize();
  return Rational(total_ * u);
}

double RankOneSystem::diameter() const { return total_.get_d(); }

}  // namespace rsens
