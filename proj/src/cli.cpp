#include "bergman/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

namespace bergman::cli {

namespace {

using nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;

struct KeySpec {
  const char* key;
  const char* default_value;  // nullptr: required
  const char* help;
};

const std::map<std::string, std::vector<KeySpec>>& schema() {
  static const std::map<std::string, std::vector<KeySpec>> s = {
      {"moments",
       {{"weight", nullptr, "radial weight, e.g. power:t=1 or dostanic:A=0,B=1,alpha=1"},
        {"x", "0:50", "grid a:b, a:b:step or a comma list"}}},
      {"ratio",
       {{"weight", nullptr, "radial weight"},
        {"p", nullptr, "exponent p > 1"},
        {"k", "", "ratio index (default: smallest k > (2+p)/(2-p))"},
        {"m-max", "256", "largest m of the dyadic grid"}}},
      {"ap-sweep",
       {{"weight", nullptr, "half-plane weight: zeta_pow:p0=5, remark35:p0=5, appendixA:p0=5 or one"},
        {"p", nullptr, "exponent p > 1"},
        {"grid-depth", "6", "disc family depth d: centres {0, +-2^j}, radii 2^j, |j| <= d"},
        {"tol", "1e-9", "relative accuracy of each half-disc integral"},
        {"threads", "0", "worker threads (0: hardware concurrency)"}}},
      {"kernel-check",
       {{"weight", "power:t=1", "radial weight for the reproducing and symmetry checks"},
        {"points", "100", "number of random sample pairs"}}},
      {"inflate-check",
       {{"mu", "dostanic:A=0,B=1,alpha=1", "radial base weight of the Hartogs domain"},
        {"points", "20", "number of random sample points"},
        {"policy", "", "max_terms=<n>,tail_tol=<x>,consecutive_small=<n>"}}},
      {"report", {}},
  };
  return s;
}

const std::vector<KeySpec>& common_keys() {
  static const std::vector<KeySpec> c = {{"seed", "1", "seed of the sample-point generator"},
                                         {"out", "", "output file (CSV or JSON); stdout when empty"},
                                         {"report", "", "RunReport JSON path"}};
  return c;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
  return v;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// "name:k1=v1,k2=v2" -> name and the parameter map.
std::pair<std::string, std::map<std::string, double>> split_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  std::map<std::string, double> params;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("weight '" + spec + "': expected key=value in '" + item + "'");
      const std::string k = item.substr(0, eq);
      if (params.count(k)) throw ConfigError("weight '" + spec + "': duplicate parameter '" + k + "'");
      params[k] = parse_double(k, item.substr(eq + 1));
    }
  }
  return {name, params};
}

double take(std::map<std::string, double>& params, const std::string& key, const std::string& spec,
            std::optional<double> fallback = std::nullopt) {
  auto it = params.find(key);
  if (it == params.end()) {
    if (fallback) return *fallback;
    throw ConfigError("weight '" + spec + "': missing parameter '" + key + "'");
  }
  const double v = it->second;
  params.erase(it);
  return v;
}

void reject_leftovers(const std::map<std::string, double>& params, const std::string& spec) {
  if (!params.empty()) throw ConfigError("weight '" + spec + "': unknown parameter '" + params.begin()->first + "'");
}

std::string fmt(double v) { return format_number(v); }

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& columns) {
    out_ << "# schema=" << kCsvSchema << '\n';
    row(columns);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

void emit(RunReport& rep, const std::string& text) {
  const std::string& path = rep.config.get("out");
  if (path.empty()) {
    std::cout << text;
  } else {
    write_atomic(path, text);
    rep.outputs.push_back(path);
  }
}

// Runs body, timing it; numeric failures inside a check fail that check.
void check(RunReport& rep, const std::string& name, double threshold, const std::function<double()>& body,
           bool lower_is_better = true) {
  CheckResult c;
  c.name = name;
  c.threshold = threshold;
  const auto start = std::chrono::steady_clock::now();
  try {
    c.value = body();
    c.passed = lower_is_better ? c.value <= threshold : c.value >= threshold;
  } catch (const NonConvergence&) {
    c.value = std::numeric_limits<double>::quiet_NaN();
    c.passed = false;
    rep.numeric_failure = true;
  } catch (const IllConditioned&) {
    c.value = std::numeric_limits<double>::quiet_NaN();
    c.passed = false;
    rep.numeric_failure = true;
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.checks.push_back(c);
}

Complex random_disc(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  return std::polar(r, 2.0 * kPi * u(rng));
}

Complex random_halfplane(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> x(-3.0, 3.0);
  std::uniform_real_distribution<double> y(0.05, 3.0);
  const double re = x(rng);
  return {re, y(rng)};
}

double rel_diff(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

void run_moments(RunReport& rep) {
  const auto& cfg = rep.config;
  const RadialWeight w = parse_radial_weight(cfg.get("weight"));
  const auto xs = parse_grid(cfg.get("x"));
  for (double x : xs)
    if (!(x >= 0.0)) throw ConfigError("key 'x': grid values must be >= 0");
  MomentTable table(w);
  Csv csv({"x", "phi", "log_phi", "rel_error"});
  std::size_t failed = 0;
  double oracle_err = 0.0;
  for (double x : xs) {
    try {
      const auto e = table.entry(x);
      csv.row({fmt(x), fmt(std::exp(e.log_value)), fmt(e.log_value), fmt(e.rel_error)});
      if (w.family() == WeightFamily::Power && w.log_scale() == 0.0) {
        const double oracle = phi_beta_oracle(w.t(), x);
        oracle_err = std::max(oracle_err, std::abs(std::exp(e.log_value) - oracle) / oracle);
      }
    } catch (const NonConvergence&) {
      ++failed;
      rep.numeric_failure = true;
      csv.row({fmt(x), "nan", "nan", "nan"});
    }
  }
  emit(rep, csv.str());
  check(rep, "points_failed", 0.0, [&] { return static_cast<double>(failed); });
  if (w.family() == WeightFamily::Power) check(rep, "beta_oracle_max_rel_error", 1e-10, [&] { return oracle_err; });
}

void run_ratio(RunReport& rep) {
  const auto& cfg = rep.config;
  const RadialWeight w = parse_radial_weight(cfg.get("weight"));
  const double p = cfg.number("p");
  if (!(p > 1.0)) throw ConfigError("key 'p': need p > 1");
  int k = 0;
  if (cfg.get("k").empty()) {
    if (!(p < 2.0)) throw ConfigError("key 'k': required when p >= 2");
    k = min_k(p);
  } else {
    k = cfg.integer("k");
  }
  if (k < 1) throw ConfigError("key 'k': need k >= 1");
  const int m_max = cfg.integer("m-max");
  if (m_max < 1) throw ConfigError("key 'm-max': need m-max >= 1");
  const auto grid = dyadic_grid(m_max);
  const RatioSeries s = ratio_sweep(w, p, k, grid);
  Csv csv({"m", "R", "log_R"});
  std::size_t failed = 0;
  double max_r = 0.0;
  for (const auto& pt : s.points) {
    csv.row({std::to_string(pt.m), fmt(pt.R), fmt(pt.log_R)});
    if (!pt.error.empty()) ++failed;
    else max_r = std::max(max_r, pt.R);
  }
  if (failed) rep.numeric_failure = true;
  emit(rep, csv.str());
  check(rep, "points_failed", 0.0, [&] { return static_cast<double>(failed); });
  if (p == 2.0) check(rep, "hoelder_bound_max_R", 1.0 + 1e-9, [&] { return max_r; });
}

void run_ap_sweep(RunReport& rep) {
  const auto& cfg = rep.config;
  const double p = cfg.number("p");
  if (!(p > 1.0)) throw ConfigError("key 'p': need p > 1");
  const HalfPlaneWeight mu = parse_halfplane_weight(cfg.get("weight"), p);
  const int depth = cfg.integer("grid-depth");
  if (depth < 0 || depth > 20) throw ConfigError("key 'grid-depth': need 0 <= depth <= 20");
  const double tol = cfg.number("tol");
  if (!(tol > 0.0)) throw ConfigError("key 'tol': need tol > 0");
  const int threads = cfg.integer("threads");
  if (threads < 0) throw ConfigError("key 'threads': need threads >= 0");

  const ApReport r = ap_sweep(mu, p, disc_family(depth), Tolerance{0.0, tol}, static_cast<unsigned>(threads));
  Csv csv({"x0", "R", "case", "quantity", "verdict"});
  std::size_t failed = 0;
  for (const auto& e : r.per_disc) {
    std::string q;
    std::string verdict;
    if (!e.error.empty()) {
      ++failed;
      q = "nan";
      verdict = "error";
    } else if (e.value.divergent) {
      q = "inf";
      verdict = "divergent";
    } else {
      q = fmt(e.value.value);
      verdict = "finite";
    }
    csv.row({fmt(e.disc.x0), fmt(e.disc.R), to_string(e.disc_case), q, verdict});
  }
  if (failed) rep.numeric_failure = true;
  emit(rep, csv.str());
  check(rep, "discs_failed", 0.0, [&] { return static_cast<double>(failed); });
}

void run_kernel_check(RunReport& rep) {
  const auto& cfg = rep.config;
  const RadialWeight w = parse_radial_weight(cfg.get("weight"));
  const int points = cfg.integer("points");
  if (points < 1) throw ConfigError("key 'points': need points >= 1");
  std::mt19937_64 rng(cfg.seed);
  MomentTable flat(make_power(0.0));
  MomentTable table(w);
  const auto g = HoloWeight::polynomial("z-2", {-2.0, 1.0});

  check(rep, "disc_series_vs_closed_form", 1e-10, [&] {
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
      const Complex z = random_disc(rng, 0.8);
      const Complex v = random_disc(rng, 0.8);
      worst = std::max(worst, std::abs(radial_kernel(flat, z, v).value - disc_kernel(z, v)));
    }
    return worst;
  });
  check(rep, "halfplane_transformation", 1e-10, [&] {
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
      const Complex a = random_halfplane(rng);
      const Complex b = random_halfplane(rng);
      worst = std::max(worst, rel_diff(halfplane_kernel(a, b), halfplane_kernel_closed_form(a, b)));
    }
    return worst;
  });
  check(rep, "disc_transformation_round_trip", 1e-10, [&] {
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
      const Complex z = random_disc(rng, 0.9);
      const Complex v = random_disc(rng, 0.9);
      const Complex back = inverse_cayley_derivative(z) * halfplane_kernel(inverse_cayley(z), inverse_cayley(v)) *
                           std::conj(inverse_cayley_derivative(v));
      worst = std::max(worst, rel_diff(back, disc_kernel(z, v)));
    }
    return worst;
  });
  const GramKernel k12 = build_gram_kernel(g, 12);
  check(rep, "hermitian_symmetry", 1e-10, [&] {
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
      const Complex z = random_disc(rng, 0.7);
      const Complex v = random_disc(rng, 0.7);
      worst = std::max(worst, rel_diff(radial_kernel(table, z, v).value, std::conj(radial_kernel(table, v, z).value)));
      worst = std::max(worst, rel_diff(k12(z, v), std::conj(k12(v, z))));
      const Complex a = random_halfplane(rng);
      const Complex b = random_halfplane(rng);
      worst = std::max(worst, rel_diff(halfplane_kernel(a, b), std::conj(halfplane_kernel(b, a))));
    }
    return worst;
  });
  check(rep, "diagonal_nonpositive_count", 0.0, [&] {
    int bad = 0;
    for (int i = 0; i < points; ++i) {
      const Complex z = random_disc(rng, 0.7);
      if (!(radial_kernel(table, z, z).value.real() > 0.0)) ++bad;
      if (!(k12(z, z).real() > 0.0)) ++bad;
      const Complex a = random_halfplane(rng);
      if (!(halfplane_kernel(a, a).real() > 0.0)) ++bad;
    }
    return static_cast<double>(bad);
  });
  check(rep, "reproducing_property", 1e-6, [&] {
    double worst = 0.0;
    for (Complex z : {Complex(0.5, 0.0), Complex(-0.2, 0.3), Complex(0.0, -0.45)}) {
      for (int n = 0; n <= 5; ++n) {
        const Complex got = project_numeric(table, [n](Complex t) { return std::pow(t, n); }, z);
        worst = std::max(worst, std::abs(got - std::pow(z, n)));
      }
    }
    return worst;
  });
  std::vector<Complex> grid;
  for (double r : {0.0, 0.25, 0.5})
    for (int i = 0; i < 4; ++i) grid.push_back(std::polar(r, 0.5 * kPi * i + 0.3));
  double d12 = std::numeric_limits<double>::quiet_NaN();
  check(rep, "factorization_defect_N12", 1e-2, [&] { return d12 = factorization_defect(g, k12, grid, grid); });
  double d24 = std::numeric_limits<double>::quiet_NaN();
  check(rep, "factorization_defect_N24", 1e-3,
        [&] { return d24 = factorization_defect(g, build_gram_kernel(g, 24), grid, grid); });
  check(rep, "factorization_refinement_ratio", 0.5, [&] { return d24 / d12; });
  check(rep, "operator_relation_N16", 1e-3, [&] {
    const std::vector<MonomialTerm> f{{1, 1, {1.0, 0.0}}};
    const std::vector<Complex> pts{0.0, Complex(0.3, 0.1), Complex(-0.2, 0.4), 0.5};
    return operator_relation_check(g, f, pts, 16);
  });
  check(rep, "gram_radial_diagonal", 1e-8, [&] {
    const GramKernel k = build_gram_kernel(as_disc_weight(w), 8);
    double worst = 0.0;
    for (int n = 0; n <= 8; ++n) worst = std::max(worst, std::abs(k.gram()(n, n) - 2.0 * kPi * table.value(n)));
    return worst;
  });
}

void run_inflate_check(RunReport& rep) {
  const auto& cfg = rep.config;
  const RadialWeight mu = parse_radial_weight(cfg.get("mu"));
  const int points = cfg.integer("points");
  if (points < 1) throw ConfigError("key 'points': need points >= 1");
  const TruncationPolicy policy = parse_policy(cfg.get("policy"));
  std::mt19937_64 rng(cfg.seed);
  InflationSeries series(make_domain(mu), policy);
  InflationSeries bidisc(make_domain(make_power(0.0)), policy);

  check(rep, "bidisc_product_kernel", 1e-9, [&] {
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
      const Complex z = random_disc(rng, 0.8);
      const Complex t = random_disc(rng, 0.8);
      const Complex w = random_disc(rng, 0.8);
      const Complex s = random_disc(rng, 0.8);
      worst = std::max(worst, rel_diff(hartogs_kernel(bidisc, z, w, t, s).value, disc_kernel(z, t) * disc_kernel(w, s)));
    }
    return worst;
  });
  check(rep, "slice_identity_excess_over_tail_bounds", 0.0, [&] {
    double worst = -std::numeric_limits<double>::infinity();
    MomentTable fresh(mu);
    for (int i = 0; i < points; ++i) {
      const Complex z = random_disc(rng, 0.5);
      const Complex t = random_disc(rng, 0.5);
      const KernelEvaluation h = hartogs_kernel(series, z, 0.0, t, 0.0);
      const KernelEvaluation r = radial_kernel(fresh, z, t, policy);
      const double defect = std::abs(kPi * h.value - r.value);
      const double allowed = kPi * h.tail_bound + r.tail_bound + 64.0 * 2.2e-16 * std::abs(r.value);
      worst = std::max(worst, defect - allowed);
    }
    return worst;
  });
  check(rep, "lifted_projection", 1e-5, [&] {
    double worst = 0.0;
    const std::vector<std::pair<int, int>> fs{{0, 0}, {2, 1}, {4, 2}};
    for (auto [a, b] : fs)
      for (Complex z : {Complex(0.3), Complex(0.1, -0.4)})
        worst = std::max(worst, lifted_projection_defect(series, a, b, z));
    return worst;
  });
  check(rep, "degree_selection", 1e-8, [&] {
    double worst = 0.0;
    for (int j = 0; j <= 2; ++j) {
      const auto d = degree_selection_defect(series, 3, 1, j, Complex(0.3, 0.2));
      worst = std::max({worst, d.off_degree, d.on_degree});
    }
    return worst;
  });
  auto interior = [&](Complex& z, Complex& w) {
    z = random_disc(rng, 0.6);
    w = random_disc(rng, 0.6) * std::sqrt(mu(std::abs(z)));
  };
  check(rep, "hermitian_symmetry", 1e-10, [&] {
    double worst = 0.0;
    for (int i = 0; i < std::min(points, 10); ++i) {
      Complex z, w, t, s;
      interior(z, w);
      interior(t, s);
      const Complex a = hartogs_kernel(series, z, w, t, s).value;
      const Complex b = hartogs_kernel(series, t, s, z, w).value;
      worst = std::max(worst, rel_diff(a, std::conj(b)));
    }
    return worst;
  });
  check(rep, "diagonal_nonpositive_count", 0.0, [&] {
    int bad = 0;
    for (int i = 0; i < std::min(points, 10); ++i) {
      Complex z, w;
      interior(z, w);
      if (!(hartogs_kernel(series, z, w, z, w).value.real() > 0.0)) ++bad;
    }
    return static_cast<double>(bad);
  });
  const auto g = HoloWeight::polynomial("z-2", {-2.0, 1.0});
  auto factorized = [&](int N) {
    double worst = 0.0;
    for (Complex z : {Complex(0.0), Complex(0.4), Complex(-0.2, 0.3)})
      for (Complex t : {Complex(0.1), Complex(0.0, -0.4)})
        worst = std::max(worst, factorized_hartogs_defect(g, z, 0.3, t, 0.3, N));
    return worst;
  };
  double f16 = std::numeric_limits<double>::quiet_NaN();
  double f24 = std::numeric_limits<double>::quiet_NaN();
  check(rep, "factorized_defect_N16", 1e-3, [&] { return f16 = factorized(16); });
  check(rep, "factorized_defect_N24", 1e-3, [&] { return f24 = factorized(24); });
  check(rep, "factorized_refinement_ratio", 0.5, [&] { return f24 / f16; });
}

}  // namespace

std::map<std::string, std::pair<std::string, int>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::map<std::string, std::pair<std::string, int>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (out.count(key))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    out[key] = {trim(line.substr(eq + 1)), lineno};
  }
  return out;
}

RadialWeight parse_radial_weight(const std::string& spec) {
  auto [name, params] = split_spec(spec);
  if (name == "one") {
    reject_leftovers(params, spec);
    return make_power(0.0);
  }
  if (name == "power") {
    const double t = take(params, "t", spec);
    reject_leftovers(params, spec);
    return make_power(t);
  }
  if (name == "dostanic") {
    const double A = take(params, "A", spec);
    const double B = take(params, "B", spec);
    const double alpha = take(params, "alpha", spec);
    reject_leftovers(params, spec);
    return make_dostanic(A, B, alpha);
  }
  throw ConfigError("unknown radial weight '" + spec + "'");
}

HalfPlaneWeight parse_halfplane_weight(const std::string& spec, double p) {
  auto [name, params] = split_spec(spec);
  if (name == "one") {
    reject_leftovers(params, spec);
    return HalfPlaneWeight::power_form("one", 1.0, {});
  }
  const double p0 = take(params, "p0", spec, 5.0);
  reject_leftovers(params, spec);
  if (name == "zeta_pow") return zeta_pow_weight(p0, p);
  if (name == "remark35") return remark35_weight(p0, p);
  if (name == "appendixA") return appendixA_weight(p0, p);
  throw ConfigError("unknown half-plane weight '" + spec + "'");
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError("grid '" + spec + "': expected a:b or a:b:step");
    const double a = parse_double("x", parts[0]);
    const double b = parse_double("x", parts[1]);
    const double step = parts.size() == 3 ? parse_double("x", parts[2]) : 1.0;
    if (!(step > 0.0) || !(b >= a)) throw ConfigError("grid '" + spec + "': need b >= a and step > 0");
    const auto n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
    if (n > 1000000) throw ConfigError("grid '" + spec + "': too many points");
    for (long long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
  } else {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double("x", trim(item)));
  }
  if (out.empty()) throw ConfigError("grid '" + spec + "': empty");
  return out;
}

TruncationPolicy parse_policy(const std::string& spec) {
  TruncationPolicy p;
  if (spec.empty()) return p;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("key 'policy': expected key=value in '" + item + "'");
    const std::string k = trim(item.substr(0, eq));
    const std::string v = trim(item.substr(eq + 1));
    if (k == "max_terms") p.max_terms = static_cast<std::size_t>(parse_integer("policy.max_terms", v));
    else if (k == "tail_tol") p.tail_tol = parse_double("policy.tail_tol", v);
    else if (k == "consecutive_small") p.consecutive_small = static_cast<std::size_t>(parse_integer("policy.consecutive_small", v));
    else throw ConfigError("key 'policy': unknown field '" + k + "'");
  }
  try {
    p.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("key 'policy': ") + e.what());
  }
  return p;
}

const std::string& ExperimentConfig::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

double ExperimentConfig::number(const std::string& key) const { return parse_double(key, get(key)); }

int ExperimentConfig::integer(const std::string& key) const {
  const long long v = parse_integer(key, get(key));
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError("key '" + key + "': out of range");
  return static_cast<int>(v);
}

bool RunReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

ordered_json RunReport::to_json() const {
  ordered_json j;
  j["artifact_version"] = kArtifactVersion;
  j["subcommand"] = config.subcommand;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : config.values) cfg[k] = v;
  j["config"] = cfg;
  j["seed"] = config.seed;
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks) {
    ordered_json e;
    e["name"] = c.name;
    e["value"] = std::isfinite(c.value) ? ordered_json(c.value) : ordered_json(fmt(c.value));
    e["threshold"] = c.threshold;
    e["passed"] = c.passed;
    e["seconds"] = c.seconds;
    arr.push_back(e);
  }
  j["checks"] = arr;
  j["outputs"] = outputs;
  j["passed"] = passed();
  return j;
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw ConfigError("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

RunReport run(const ExperimentConfig& config) {
  RunReport rep;
  rep.config = config;
  const std::string& sc = config.subcommand;
  try {
    if (sc == "moments") run_moments(rep);
    else if (sc == "ratio") run_ratio(rep);
    else if (sc == "ap-sweep") run_ap_sweep(rep);
    else if (sc == "kernel-check") run_kernel_check(rep);
    else if (sc == "inflate-check") run_inflate_check(rep);
    else throw ConfigError("unknown subcommand '" + sc + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  return rep;
}

ordered_json merge_reports(const std::vector<std::string>& paths) {
  ordered_json summary;
  ordered_json inputs = ordered_json::array();
  ordered_json failing = ordered_json::array();
  bool all = true;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw ConfigError("report: cannot open '" + path + "'");
    ordered_json j;
    try {
      j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("report: '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("checks") || !j["checks"].is_array() || !j.contains("passed") ||
        !j["passed"].is_boolean() || !j.contains("subcommand"))
      throw ConfigError("report: '" + path + "' is not a run report");
    const bool ok = j["passed"].get<bool>();
    all = all && ok;
    for (const auto& c : j["checks"]) {
      if (!c.is_object() || !c.contains("name") || !c.contains("passed"))
        throw ConfigError("report: '" + path + "' has a malformed check entry");
      if (!c["passed"].get<bool>()) failing.push_back(j["subcommand"].get<std::string>() + "/" + c["name"].get<std::string>());
    }
    ordered_json e;
    e["path"] = path;
    e["subcommand"] = j["subcommand"];
    e["passed"] = ok;
    e["checks"] = j["checks"].size();
    inputs.push_back(e);
  }
  summary["artifact_version"] = kArtifactVersion;
  summary["reports"] = paths.size();
  summary["verdict"] = all ? "pass" : "fail";
  summary["failing_checks"] = failing;
  summary["inputs"] = inputs;
  return summary;
}

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for weighted Bergman projections"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);

  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  std::map<std::string, std::string> config_paths;
  std::vector<std::string> report_inputs;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, keys] : schema()) {
    CLI::App* sc = app.add_subcommand(name);
    subs[name] = sc;
    sc->add_option("--config", config_paths[name], "flat key=value file; flags override it");
    auto add = [&](const KeySpec& k) { opts[name][k.key] = sc->add_option(std::string("--") + k.key, raw[name][k.key], k.help); };
    for (const auto& k : keys) add(k);
    for (const auto& k : common_keys()) add(k);
    if (name == "report") sc->add_option("inputs", report_inputs, "run report JSON files");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  std::string name;
  for (const auto& [n, sc] : subs)
    if (sc->parsed()) name = n;

  try {
    ExperimentConfig cfg;
    cfg.subcommand = name;
    std::vector<KeySpec> keys = schema().at(name);
    keys.insert(keys.end(), common_keys().begin(), common_keys().end());
    std::map<std::string, std::pair<std::string, int>> file;
    if (!config_paths[name].empty()) file = read_config_file(config_paths[name]);
    for (const auto& [k, vl] : file) {
      const bool known = std::any_of(keys.begin(), keys.end(), [&](const KeySpec& s) { return k == s.key; });
      if (!known)
        throw ConfigError(config_paths[name] + ":" + std::to_string(vl.second) + ": unknown key '" + k + "'");
    }
    for (const auto& k : keys) {
      if (opts[name][k.key]->count() > 0) cfg.values[k.key] = raw[name][k.key];
      else if (file.count(k.key)) cfg.values[k.key] = file[k.key].first;
      else if (k.default_value) cfg.values[k.key] = k.default_value;
    }
    const long long seed = parse_integer("seed", cfg.get("seed"));
    if (seed < 0) throw ConfigError("key 'seed': need seed >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);

    if (name == "report") {
      const ordered_json summary = merge_reports(report_inputs);
      const std::string text = summary.dump(2) + "\n";
      if (cfg.get("out").empty()) std::cout << text;
      else write_atomic(cfg.get("out"), text);
      return summary["verdict"] == "pass" ? kPass : kCheckFailure;
    }

    const RunReport rep = run(cfg);
    const std::string text = rep.to_json().dump(2) + "\n";
    if (!cfg.get("report").empty()) write_atomic(cfg.get("report"), text);
    else if (name == "kernel-check" || name == "inflate-check") std::cout << text;
    for (const auto& c : rep.checks)
      std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << fmt(c.value)
                << " threshold=" << fmt(c.threshold) << "\n";
    if (rep.numeric_failure) return kNumericFailure;
    return rep.passed() ? kPass : kCheckFailure;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NonConvergence& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const IllConditioned& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericFailure;
  }
}

}  // namespace bergman::cli
