#include "rsens/config.hpp"

#include "rsens/probability.hpp"
#include "rsens/shift.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace rsens {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  double run() {
    const double v = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("bad real expression '" + std::string(text_) + "': " + why);
  }
  void skip() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  double expr() {
    double v = term();
    while (true) {
      if (accept('+'))
        v += term();
      else if (accept('-'))
        v -= term();
      else
        return v;
    }
  }
  double term() {
    double v = unary();
    while (true) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        const double d = unary();
        if (d == 0) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }
  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return primary();
  }
  double primary() {
    skip();
    if (accept('(')) {
      const double v = expr();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    if (text_.substr(pos_, 3) == "log") {
      pos_ += 3;
      if (!accept('(')) fail("log needs '('");
      const double v = expr();
      if (!accept(')')) fail("missing ')'");
      if (!(v > 0)) fail("log of a non-positive value");
      return std::log(v);
    }
    if (pos_ >= text_.size() || !(std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      fail("expected a number");
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

using Section = std::map<std::string, std::string>;

struct Document {
  std::map<std::string, Section> sections;
  std::set<std::string> visited;

  const Section& section(const std::string& name) {
    const auto it = sections.find(name);
    if (it == sections.end()) throw ConfigError("missing section [" + name + "]");
    visited.insert(name);
    return it->second;
  }
};

Document read_document(std::string_view text) {
  Document doc;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (doc.sections.count(current)) throw ConfigError("duplicate section [" + current + "]");
      doc.sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    if (current.empty()) throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    auto& sec = doc.sections[current];
    if (sec.count(key)) throw ConfigError("[" + current + "] duplicate key '" + key + "'");
    sec[key] = value;
  }
  return doc;
}

void only_keys(const Section& sec, const std::string& name, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : sec) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("[" + name + "] unknown key '" + key + "'");
  }
}

template <typename Int>
Int parse_integer(const std::string& name, const std::string& key, const std::string& value) {
  Int out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  int base = 10;
  if (value.size() > 2 && value[0] == '0' && (value[1] == 'x' || value[1] == 'X')) {
    first += 2;
    base = 16;
  }
  const auto [ptr, ec] = std::from_chars(first, last, out, base);
  if (ec != std::errc() || ptr != last || first == last)
    throw ConfigError("[" + name + "] " + key + ": '" + value + "' is not a valid integer");
  return out;
}

template <typename Fn>
auto field(const std::string& name, const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("[" + name + "] " + key + ": " + e.what());
  }
}

bool parse_bool(const std::string& name, const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("[" + name + "] " + key + ": expected true or false, got '" + v + "'");
}

std::vector<Stage> parse_stages(const std::string& name, const std::string& key, const std::string& v) {
  std::vector<Stage> out;
  if (v.empty()) return out;
  for (const auto& part : split_list(v, ';')) out.push_back(field(name, key, [&] { return Stage::parse(part); }));
  return out;
}

SystemDecl read_system(Document& doc, const std::string& name) {
  const Section& sec = doc.section(name);
  SystemDecl d;
  const auto type = sec.find("type");
  if (type == sec.end()) throw ConfigError("[" + name + "] missing key 'type'");
  const std::string& t = type->second;
  auto get = [&](const char* key) -> const std::string* {
    const auto it = sec.find(key);
    return it == sec.end() ? nullptr : &it->second;
  };
  if (const auto* v = get("sampled_balls")) d.sampled_balls = parse_integer<std::size_t>(name, "sampled_balls", *v);

  if (t == "shift") {
    d.kind = SystemDecl::Kind::shift;
    only_keys(sec, name, {"type", "p", "sides", "horizon", "sampled_balls"});
    const auto* p = get("p");
    if (!p) throw ConfigError("[" + name + "] missing key 'p'");
    d.probabilities = field(name, "p", [&] { return ProbabilityVector::parse(*p).values(); });
    if (const auto* v = get("sides")) {
      if (*v == "one" || *v == "one-sided")
        d.sides = Sidedness::one_sided;
      else if (*v == "two" || *v == "two-sided")
        d.sides = Sidedness::two_sided;
      else
        throw ConfigError("[" + name + "] sides: expected 'one' or 'two', got '" + *v + "'");
    }
    if (const auto* v = get("horizon")) d.horizon = parse_integer<std::int64_t>(name, "horizon", *v);
    if (d.horizon < 1) throw ConfigError("[" + name + "] horizon must be positive");
  } else if (t == "rank-one") {
    d.kind = SystemDecl::Kind::rank_one;
    only_keys(sec, name, {"type", "w0", "prefix", "cycle", "depth", "space_cap", "allow_over_cap", "sampled_balls"});
    if (const auto* v = get("w0")) d.spec.initial_width = field(name, "w0", [&] { return parse_rational(*v); });
    if (const auto* v = get("prefix")) d.spec.prefix = parse_stages(name, "prefix", *v);
    if (const auto* v = get("cycle")) d.spec.cycle = parse_stages(name, "cycle", *v);
    if (const auto* v = get("depth")) d.depth = parse_integer<std::size_t>(name, "depth", *v);
    if (const auto* v = get("space_cap")) d.space_cap = field(name, "space_cap", [&] { return parse_rational(*v); });
    if (const auto* v = get("allow_over_cap")) d.allow_over_cap = parse_bool(name, "allow_over_cap", *v);
    const auto check = validate_spec(d.spec, std::min<std::size_t>(d.depth, 64), d.space_cap);
    if (!check.valid) throw ConfigError("[" + name + "] " + check.problems.front());
  } else if (t == "product") {
    d.kind = SystemDecl::Kind::product;
    only_keys(sec, name, {"type", "sampled_balls"});
    d.components.push_back(read_system(doc, name + ".left"));
    d.components.push_back(read_system(doc, name + ".right"));
  } else if (t == "rotation") {
    d.kind = SystemDecl::Kind::rotation;
    only_keys(sec, name, {"type", "alpha", "sampled_balls"});
    if (const auto* v = get("alpha")) d.alpha = RealParam::parse(*v);
  } else {
    throw ConfigError("[" + name + "] unknown system type '" + t + "'");
  }
  return d;
}

std::string join_rationals(const std::vector<Rational>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + format_rational(v[k]);
  return out;
}

std::string join_stages(const std::vector<Stage>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "; " : "") + v[k].to_string();
  return out;
}

void write_system(std::ostringstream& os, const SystemDecl& d, const std::string& name) {
  os << "[" << name << "]\n";
  os << "type = " << to_string(d.kind) << "\n";
  switch (d.kind) {
    case SystemDecl::Kind::shift:
      os << "p = " << join_rationals(d.probabilities) << "\n";
      os << "sides = " << (d.sides == Sidedness::one_sided ? "one" : "two") << "\n";
      os << "horizon = " << d.horizon << "\n";
      break;
    case SystemDecl::Kind::rank_one:
      os << "w0 = " << format_rational(d.spec.initial_width) << "\n";
      os << "prefix = " << join_stages(d.spec.prefix) << "\n";
      os << "cycle = " << join_stages(d.spec.cycle) << "\n";
      os << "depth = " << d.depth << "\n";
      os << "space_cap = " << format_rational(d.space_cap) << "\n";
      os << "allow_over_cap = " << (d.allow_over_cap ? "true" : "false") << "\n";
      break;
    case SystemDecl::Kind::rotation:
      os << "alpha = " << d.alpha.text << "\n";
      break;
    case SystemDecl::Kind::product:
      break;
  }
  os << "sampled_balls = " << d.sampled_balls << "\n";
  if (d.kind == SystemDecl::Kind::product) {
    os << "\n";
    write_system(os, d.components.at(0), name + ".left");
    os << "\n";
    write_system(os, d.components.at(1), name + ".right");
  }
}

}  // namespace

double evaluate_real(std::string_view text) { return ExpressionParser(text).run(); }

RealParam RealParam::parse(std::string_view text) {
  RealParam p;
  p.text = trim(text);
  p.value = evaluate_real(p.text);
  if (!std::isfinite(p.value)) throw ConfigError("real '" + p.text + "' is not finite");
  return p;
}

std::string to_string(SystemDecl::Kind kind) {
  switch (kind) {
    case SystemDecl::Kind::shift: return "shift";
    case SystemDecl::Kind::rank_one: return "rank-one";
    case SystemDecl::Kind::product: return "product";
    case SystemDecl::Kind::rotation: return "rotation";
  }
  return "unknown";
}

SystemPtr SystemDecl::build() const {
  SystemPtr out;
  switch (kind) {
    case Kind::shift:
      out = std::make_shared<const ShiftSystem>(ProbabilityVector(probabilities), sides, horizon);
      break;
    case Kind::rank_one:
      out = std::make_shared<const RankOneSystem>(spec, RankOneOptions{depth, space_cap, allow_over_cap});
      break;
    case Kind::rotation:
      out = std::make_shared<const CircleRotation>(alpha.value);
      break;
    case Kind::product:
      if (components.size() != 2) throw std::invalid_argument("a product needs exactly two components");
      out = product_system(components[0].build(), components[1].build());
      break;
  }
  if (sampled_balls > 0) out = std::make_shared<const SampledBallSystem>(out, SamplingBudget{sampled_balls});
  return out;
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::check_rs: return "check-rs";
    case ExperimentKind::check_rps: return "check-rps";
    case ExperimentKind::witness_rps_failure: return "witness-rps-failure";
    case ExperimentKind::witness_rankone_failure: return "witness-rankone-failure";
    case ExperimentKind::entropy: return "entropy";
    case ExperimentKind::rate: return "rate";
    case ExperimentKind::bound_check: return "bound-check";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (auto k : {ExperimentKind::check_rs, ExperimentKind::check_rps, ExperimentKind::witness_rps_failure,
                 ExperimentKind::witness_rankone_failure, ExperimentKind::entropy, ExperimentKind::rate,
                 ExperimentKind::bound_check})
    if (to_string(k) == text) return k;
  throw ConfigError("unknown experiment kind '" + std::string(text) + "'");
}

ExperimentConfig parse_config(std::string_view text) {
  Document doc = read_document(text);
  ExperimentConfig cfg;
  cfg.system = read_system(doc, "system");

  const std::string name = "experiment";
  const Section& sec = doc.section(name);
  only_keys(sec, name,
            {"kind", "seed", "delta", "a", "eps", "pairs", "points", "trials", "horizon", "samples", "n", "method",
             "partition", "route", "c_grid", "tolerance", "stages"});
  auto get = [&](const char* key) -> const std::string* {
    const auto it = sec.find(key);
    return it == sec.end() ? nullptr : &it->second;
  };
  const auto* kind = get("kind");
  if (!kind) throw ConfigError("[experiment] missing key 'kind'");
  cfg.kind = parse_experiment_kind(*kind);
  const auto* seed = get("seed");
  if (!seed) throw ConfigError("[experiment] missing key 'seed'");
  ExperimentParams& p = cfg.params;
  p.seed = parse_integer<std::uint64_t>(name, "seed", *seed);

  auto positive_real = [&](const char* key) -> std::optional<RealParam> {
    const auto* v = get(key);
    if (!v) return std::nullopt;
    auto r = field(name, key, [&] { return RealParam::parse(*v); });
    if (!(r.value > 0)) throw ConfigError("[experiment] " + std::string(key) + " must be positive");
    return r;
  };
  p.delta = positive_real("delta");
  p.rate_a = positive_real("a");
  if (const auto* v = get("eps")) {
    if (v->rfind("dyadic:", 0) == 0) {
      p.eps_dyadic = parse_integer<std::size_t>(name, "eps", v->substr(7));
      if (p.eps_dyadic == 0) throw ConfigError("[experiment] eps: dyadic grid needs at least one radius");
    } else {
      p.eps_dyadic = 0;
      for (const auto& item : split_list(*v, ',')) {
        auto r = field(name, "eps", [&] { return RealParam::parse(item); });
        if (!(r.value > 0)) throw ConfigError("[experiment] eps values must be positive");
        p.eps_values.push_back(r);
      }
    }
  }
  if (const auto* v = get("pairs")) p.pairs = parse_integer<std::size_t>(name, "pairs", *v);
  if (const auto* v = get("points")) p.points = parse_integer<std::size_t>(name, "points", *v);
  if (const auto* v = get("trials")) p.trials = parse_integer<std::size_t>(name, "trials", *v);
  if (const auto* v = get("horizon")) p.horizon = parse_integer<std::int64_t>(name, "horizon", *v);
  if (const auto* v = get("samples")) p.samples = parse_integer<std::size_t>(name, "samples", *v);
  if (const auto* v = get("n")) p.n = parse_integer<std::int64_t>(name, "n", *v);
  if (const auto* v = get("stages")) p.stages = parse_integer<std::size_t>(name, "stages", *v);
  if (const auto* v = get("method")) {
    if (*v != "analytic" && *v != "birkhoff" && *v != "brin-katok" && *v != "partition")
      throw ConfigError("[experiment] method: unknown entropy method '" + *v + "'");
    p.method = *v;
  }
  if (const auto* v = get("partition")) {
    if (*v != "symbol" && v->rfind("intervals:", 0) != 0)
      throw ConfigError("[experiment] partition: expected 'symbol' or 'intervals:<cuts>'");
    if (*v != "symbol")
      for (const auto& c : split_list(v->substr(10), ','))
        field(name, "partition", [&] { return parse_rational(c); });
    p.partition = *v;
  }
  if (const auto* v = get("route")) {
    if (*v != "lower-bound" && *v != "measure-preserving")
      throw ConfigError("[experiment] route: expected 'lower-bound' or 'measure-preserving'");
    p.route = *v;
  }
  if (const auto* v = get("c_grid")) {
    if (*v != "default")
      for (const auto& item : split_list(*v, ',')) p.c_grid.push_back(parse_integer<std::int64_t>(name, "c_grid", item));
  }
  if (const auto* v = get("tolerance")) {
    p.tolerance = field(name, "tolerance", [&] { return evaluate_real(*v); });
    if (!(p.tolerance > 0)) throw ConfigError("[experiment] tolerance must be positive");
  }
  if (p.pairs == 0) throw ConfigError("[experiment] pairs must be at least 1");
  if (p.horizon < 0) throw ConfigError("[experiment] horizon must be nonnegative");

  switch (cfg.kind) {
    case ExperimentKind::check_rs:
    case ExperimentKind::check_rps:
    case ExperimentKind::witness_rps_failure:
    case ExperimentKind::witness_rankone_failure:
      if (!p.delta) throw ConfigError("[experiment] " + to_string(cfg.kind) + " needs 'delta'");
      if (!p.rate_a) throw ConfigError("[experiment] " + to_string(cfg.kind) + " needs 'a'");
      break;
    case ExperimentKind::entropy:
      if (p.method == "brin-katok" && !p.delta) throw ConfigError("[experiment] brin-katok needs 'delta'");
      break;
    default:
      break;
  }

  for (const auto& [sec_name, ignored] : doc.sections)
    if (!doc.visited.count(sec_name)) throw ConfigError("unknown or unused section [" + sec_name + "]");
  return cfg;
}

std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream os;
  write_system(os, config.system, "system");
  const ExperimentParams& p = config.params;
  os << "\n[experiment]\n";
  os << "kind = " << to_string(config.kind) << "\n";
  os << "seed = " << p.seed << "\n";
  if (p.delta) os << "delta = " << p.delta->text << "\n";
  if (p.rate_a) os << "a = " << p.rate_a->text << "\n";
  if (p.eps_dyadic > 0) {
    os << "eps = dyadic:" << p.eps_dyadic << "\n";
  } else {
    os << "eps = ";
    for (std::size_t k = 0; k < p.eps_values.size(); ++k) os << (k ? ", " : "") << p.eps_values[k].text;
    os << "\n";
  }
  os << "pairs = " << p.pairs << "\n";
  os << "points = " << p.points << "\n";
  os << "trials = " << p.trials << "\n";
  os << "horizon = " << p.horizon << "\n";
  os << "samples = " << p.samples << "\n";
  os << "n = " << p.n << "\n";
  os << "method = " << p.method << "\n";
  os << "partition = " << p.partition << "\n";
  os << "route = " << p.route << "\n";
  os << "c_grid = ";
  if (p.c_grid.empty()) os << "default";
  for (std::size_t k = 0; k < p.c_grid.size(); ++k) os << (k ? "," : "") << p.c_grid[k];
  os << "\n";
  char tol[32];
  const auto end = std::to_chars(tol, tol + sizeof tol, p.tolerance).ptr;
  os << "tolerance = " << std::string_view(tol, end - tol) << "\n";
  os << "stages = " << p.stages << "\n";
  return os.str();
}

}  // namespace rsens
