#include "bergman/numerics.hpp"

#include <numbers>

namespace bergman {

void TruncationPolicy::validate() const {
  if (max_terms < 1) throw InvalidInput("TruncationPolicy: max_terms must be >= 1");
  if (!(tail_tol > 0.0)) throw InvalidInput("TruncationPolicy: tail_tol must be > 0");
  if (consecutive_small < 1) throw InvalidInput("TruncationPolicy: consecutive_small must be >= 1");
}

QuadratureResult<double> integrate_unit_interval(const std::function<double(double)>& f, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("integrate_unit_interval: tol must be > 0");

  // [0, 1/2]: geometric breakpoints resolve power singularities at 0.
  std::vector<double> lower{0.0};
  for (int k = 30; k >= 1; --k) lower.push_back(std::ldexp(1.0, -k));
  auto left = integrate(f, std::span<const double>(lower), AdaptiveOptions{{0.5 * tol, 0.0}, 4000});

  // [1/2, 1): r = 1 - exp(-u). Beyond u ~ 36.7 the point r rounds to 1, so
  // a black-box f(r) cannot be sampled closer to the endpoint.
  const double u_max = -std::log(std::numeric_limits<double>::epsilon() * 0.5);
  std::vector<double> upper{std::numbers::ln2};
  for (double u = 1.0; u < u_max; u *= 2.0) upper.push_back(u);
  upper.push_back(u_max);
  auto g = [&f](double u) {
    const double omr = std::exp(-u);
    return f(-std::expm1(-u)) * omr;
  };
  auto right = integrate(g, std::span<const double>(upper), AdaptiveOptions{{0.5 * tol, 0.0}, 4000});

  QuadratureResult<double> out;
  out.value = left.value + right.value;
  out.abs_error_estimate = left.abs_error_estimate + right.abs_error_estimate;
  out.evaluations = left.evaluations + right.evaluations;
  return out;
}

namespace {

constexpr double kMaxU = 740.0;  // exp(-u) is still a (subnormal) double here
constexpr double kNegligibleLog = 80.0;

}  // namespace

LogQuadratureResult integrate_unit_interval_log(const LogIntegrand& h, double lower, double upper, double rel_tol) {
  if (!(lower >= 0.0) || !(upper <= 1.0) || !(lower < upper))
    throw InvalidInput("integrate_unit_interval_log: need 0 <= lower < upper <= 1");
  if (!(rel_tol > 0.0)) throw InvalidInput("integrate_unit_interval_log: rel_tol must be > 0");

  LogQuadratureResult out;
  const double u_lo = -std::log1p(-lower);
  const double u_hi = upper < 1.0 ? -std::log1p(-upper) : kMaxU;

  auto log_g = [&](double u) {
    const double omr = std::exp(-u);
    LogValue v = h(-std::expm1(-u), omr);
    ++out.evaluations;
    if (v.sign == 0 || !(v.log_abs < std::numeric_limits<double>::infinity())) return LogValue{};
    v.log_abs -= u;  // dr = exp(-u) du
    return v;
  };

  // Scan grid: uniform in r over the bulk, uniform in u over the boundary layer.
  std::vector<double> grid;
  const double r_top = std::min(upper, 0.999);
  if (r_top > lower) {
    constexpr int kBulk = 400;
    for (int i = 0; i <= kBulk; ++i) grid.push_back(-std::log1p(-(lower + (r_top - lower) * i / kBulk)));
  }
  const double u_layer = std::max(u_lo, -std::log1p(-0.999));
  if (u_hi > u_layer) {
    constexpr int kLayer = 400;
    const double ratio = std::log(u_hi / u_layer);
    for (int i = 0; i <= kLayer; ++i) grid.push_back(u_layer * std::exp(ratio * i / kLayer));
  }
  grid.push_back(u_lo);
  grid.push_back(u_hi);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> values(grid.size());
  double peak = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const LogValue v = log_g(grid[i]);
    values[i] = v.sign == 0 ? -std::numeric_limits<double>::infinity() : v.log_abs;
    if (values[i] > peak) {
      peak = values[i];
      arg = i;
    }
  }
  if (!std::isfinite(peak)) return out;  // integrand vanishes on the grid

  // Golden-section refinement of the maximiser inside its grid bracket.
  double peak_u = grid[arg];
  const std::size_t bracket_lo = arg == 0 ? 0 : arg - 1;
  const std::size_t bracket_hi = std::min(arg + 1, grid.size() - 1);
  {
    double a = grid[bracket_lo];
    double b = grid[bracket_hi];
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    auto val = [&](double u) {
      const LogValue v = log_g(u);
      return v.sign == 0 ? -std::numeric_limits<double>::infinity() : v.log_abs;
    };
    double fc = val(c);
    double fd = val(d);
    for (int it = 0; it < 60 && b - a > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = val(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = val(d);
      }
    }
    const double u_star = 0.5 * (a + b);
    const double f_star = val(u_star);
    if (f_star > peak) {
      peak = f_star;
      peak_u = u_star;
    }
  }

  // Support: first and last grid points within kNegligibleLog of the peak.
  std::size_t first = bracket_lo;
  std::size_t last = bracket_hi;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i] > peak - kNegligibleLog) {
      first = std::min(first, i);
      last = std::max(last, i);
    }
  }
  const double a = grid[first == 0 ? 0 : first - 1];
  const double b = grid[std::min(last + 1, grid.size() - 1)];

  // Breakpoints at the grid points nearest to a few level crossings.
  std::vector<double> bp{a, b};
  if (peak_u > a && peak_u < b) bp.push_back(peak_u);
  for (double level : {1.0, 4.0, 12.0, 30.0, 55.0}) {
    for (std::size_t i = first; i + 1 <= last && i + 1 < grid.size(); ++i) {
      const bool crosses = (values[i] - (peak - level)) * (values[i + 1] - (peak - level)) < 0.0;
      if (crosses && grid[i + 1] > a && grid[i + 1] < b) bp.push_back(grid[i + 1]);
    }
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  auto scaled = [&](double u) {
    const LogValue v = log_g(u);
    return v.sign == 0 ? 0.0 : v.sign * std::exp(v.log_abs - peak);
  };
  const double rel = std::max(rel_tol, kToleranceFloor);
  const auto res = integrate(scaled, std::span<const double>(bp), AdaptiveOptions{{0.0, rel}, 8000});
  if (res.value == 0.0) return out;
  out.value.sign = res.value > 0.0 ? 1 : -1;
  out.value.log_abs = peak + std::log(std::abs(res.value));
  out.rel_error = res.abs_error_estimate / std::abs(res.value);
  return out;
}

double half_disc_area(const Disc& disc) { return 0.5 * std::numbers::pi * disc.R * disc.R; }

namespace {

void validate_disc(const Disc& disc) {
  if (!(disc.R > 0.0) || !std::isfinite(disc.R) || !std::isfinite(disc.x0))
    throw InvalidInput("disc: need finite x0 and R > 0");
}

// Distance from the origin to the far edge of the disc along direction theta.
double radial_extent(const Disc& disc, double theta) {
  const double c = disc.x0 * std::cos(theta);
  const double s = disc.x0 * std::sin(theta);
  const double disc_term = disc.R * disc.R - s * s;
  return std::max(0.0, c + std::sqrt(std::max(0.0, disc_term)));
}

using Rule2D = detail::GaussKronrod15;

QuadratureResult<double> polar_about_centre(const HalfPlaneFunction& f, const Disc& disc, Tolerance tol,
                                            const std::function<bool(Complex)>& keep) {
  std::size_t evals = 0;
  const Tolerance inner{0.1 * tol.abs / std::numbers::pi, 0.1 * tol.rel};
  auto outer = [&](double theta) {
    const Complex dir = std::polar(1.0, theta);
    auto radial = [&](double rho) {
      const Complex z = disc.x0 + rho * dir;
      if (keep && !keep(z)) return 0.0;
      return f(z) * rho;
    };
    const auto r = integrate<Rule2D>(radial, 0.0, disc.R, inner);
    evals += r.evaluations;
    return r.value;
  };
  auto res = integrate<Rule2D>(outer, 0.0, std::numbers::pi, tol);
  res.evaluations = evals;
  return res;
}

}  // namespace

QuadratureResult<double> integrate_half_disc(const HalfPlaneFunction& f, const Disc& disc, Tolerance tol) {
  validate_disc(disc);
  if (std::abs(disc.x0) > disc.R) return polar_about_centre(f, disc, tol, {});

  // The closed region contains the origin: shells rho in [e/2^{k+1}, e/2^k]
  // with e = radial_extent(theta).
  std::vector<double> theta_bp{0.0};
  if (std::abs(disc.x0) == disc.R) theta_bp.push_back(0.5 * std::numbers::pi);
  theta_bp.push_back(std::numbers::pi);

  QuadratureResult<double> out;
  const Tolerance inner{0.0, std::max(0.05 * tol.rel, kToleranceFloor)};
  auto shell = [&](int k, double abs_floor) {
    const double hi_scale = std::ldexp(1.0, -k);
    auto outer = [&](double theta) {
      const double extent = radial_extent(disc, theta);
      if (extent == 0.0) return 0.0;
      const Complex dir = std::polar(1.0, theta);
      auto radial = [&](double rho) { return f(rho * dir) * rho; };
      const auto r = integrate<Rule2D>(radial, 0.5 * hi_scale * extent, hi_scale * extent,
                                       Tolerance{abs_floor, inner.rel});
      out.evaluations += r.evaluations;
      return r.value;
    };
    return integrate<Rule2D>(outer, std::span<const double>(theta_bp),
                             AdaptiveOptions{{abs_floor, inner.rel}, 4000});
  };

  constexpr int kMaxShells = 60;
  constexpr int kDivergenceDepth = 40;
  std::vector<double> shells;
  std::vector<double> partial;
  double sum = 0.0;
  double err = 0.0;
  int zero_run = 0;
  for (int k = 0; k < kMaxShells; ++k) {
    const double abs_floor = std::max(tol.abs * 1e-3, 1e-300);
    const auto s = shell(k, abs_floor);
    shells.push_back(s.value);
    sum += s.value;
    err += s.abs_error_estimate;
    partial.push_back(sum);
    const double target = std::max(tol.abs, tol.rel * std::abs(sum));

    zero_run = (s.value == 0.0) ? zero_run + 1 : 0;
    if (zero_run >= 3) break;
    if (k >= 3 && shells[k - 1] != 0.0 && shells[k - 2] != 0.0 && shells[k - 3] != 0.0) {
      const double q0 = shells[k] / shells[k - 1];
      const double q1 = shells[k - 1] / shells[k - 2];
      const double q2 = shells[k - 2] / shells[k - 3];
      if (q0 > 0.0 && q0 < 0.99) {
        // Geometric tail extrapolation; exact when shells scale as a pure power.
        const double tail = shells[k] * q0 / (1.0 - q0);
        const double dq = std::max(std::abs(q0 - q1), std::abs(q1 - q2));
        const double tail_err = std::abs(shells[k]) * dq / ((1.0 - q0) * (1.0 - q0)) + 1e-3 * std::abs(tail);
        if (dq <= 1e-3 * q0 && tail_err + err <= target) {
          out.value = sum + tail;
          out.abs_error_estimate = err + tail_err;
          return out;
        }
        if (std::abs(tail) + err <= 0.1 * target) {
          out.value = sum + tail;
          out.abs_error_estimate = err + std::abs(tail);
          return out;
        }
      }
    }
    if (k >= kDivergenceDepth) {
      bool growing = true;
      for (int j = k - 2; j <= k; ++j) {
        if (!(std::abs(shells[j]) > 0.01 * std::abs(partial[j - 1]))) growing = false;
      }
      if (growing)
        throw DivergentIntegral("integrate_half_disc: shell contributions do not decay towards the origin");
    }
  }
  if (zero_run >= 3) {
    out.value = sum;
    out.abs_error_estimate = err;
    return out;
  }
  throw NonConvergence("integrate_half_disc: shell sequence did not converge");
}

QuadratureResult<double> integrate_half_disc_outside(const HalfPlaneFunction& f, const Disc& disc, double cutoff,
                                                     Tolerance tol) {
  validate_disc(disc);
  if (!(cutoff > 0.0)) return integrate_half_disc(f, disc, tol);
  if (std::abs(disc.x0) > disc.R) {
    return polar_about_centre(f, disc, tol, [cutoff](Complex z) { return std::abs(z) >= cutoff; });
  }
  std::vector<double> theta_bp{0.0};
  if (std::abs(disc.x0) == disc.R) theta_bp.push_back(0.5 * std::numbers::pi);
  theta_bp.push_back(std::numbers::pi);

  std::size_t evals = 0;
  const Tolerance inner{0.1 * tol.abs / std::numbers::pi, 0.1 * tol.rel};
  auto outer = [&](double theta) {
    const double extent = radial_extent(disc, theta);
    if (extent <= cutoff) return 0.0;
    const Complex dir = std::polar(1.0, theta);
    auto radial = [&](double rho) { return f(rho * dir) * rho; };
    std::vector<double> bp{cutoff};
    for (double r = extent; r > cutoff; r *= 0.5) bp.push_back(r);
    std::sort(bp.begin(), bp.end());
    const auto r = integrate<Rule2D>(radial, std::span<const double>(bp), AdaptiveOptions{inner, 4000});
    evals += r.evaluations;
    return r.value;
  };
  auto res = integrate<Rule2D>(outer, std::span<const double>(theta_bp), AdaptiveOptions{tol, 4000});
  res.evaluations += evals;
  return res;
}

SeriesResult sum_series(const std::function<Complex(std::size_t)>& term, const TruncationPolicy& policy) {
  policy.validate();
  SeriesResult out;
  std::size_t small = 0;
  for (std::size_t n = 0; n < policy.max_terms; ++n) {
    const Complex t = term(n);
    out.value += t;
    out.terms_used = n + 1;
    out.last_modulus = std::abs(t);
    small = out.last_modulus < policy.tail_tol ? small + 1 : 0;
    if (small >= policy.consecutive_small) return out;
  }
  if (out.last_modulus >= policy.tail_tol)
    throw NonConvergence("sum_series: max_terms reached before the terms fell below tail_tol");
  return out;
}

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(std::size_t n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (std::size_t k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
    p0 = p1;
    p1 = p2;
  }
  const double dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

GaussLegendre gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw InvalidInput("gauss_legendre: n must be >= 1");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = mid - half * x;
    gl.weights[i] = half * w;
    gl.nodes[n - 1 - i] = mid + half * x;
    gl.weights[n - 1 - i] = half * w;
  }
  return gl;
}

}  // namespace bergman
