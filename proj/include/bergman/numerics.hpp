#pragma once

// Adaptive quadrature on intervals and half discs, log-domain moment
// integration, and truncated series summation.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "bergman/errors.hpp"

namespace bergman {

using Complex = std::complex<double>;

template <class T>
struct QuadratureResult {
  T value{};
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Combined stopping target: error <= max(abs, rel * |value|).
struct Tolerance {
  double abs = 0.0;
  double rel = 0.0;
};

/// Relative accuracy below this is not requested from any integrator; the
/// roundoff floor of a panel sum is about 50 ulp of its absolute integral.
inline constexpr double kToleranceFloor = 1e-13;

struct TruncationPolicy {
  std::size_t max_terms = 4000;
  double tail_tol = 1e-17;
  std::size_t consecutive_small = 3;

  void validate() const;
};

/// Disc D(x0, R) with centre on the real axis.
struct Disc {
  double x0 = 0.0;
  double R = 1.0;
};

namespace detail {

struct GaussKronrod21 {
  static constexpr std::size_t kHalf = 11;
  static constexpr std::array<double, kHalf> x = {
      0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
      0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
      0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
      0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
      0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
      0.0};
  static constexpr std::array<double, kHalf> wk = {
      0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
      0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
      0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
      0.123491976262065851077600525262578, 0.134709217311473325928054001771707,
      0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
      0.149445554002916905664936468389821};
  // Gauss weights attached to the odd-indexed Kronrod nodes; the centre is
  // not a Gauss node of the 10-point rule.
  static constexpr std::array<double, kHalf> wg = {
      0.0, 0.066671344308688137593568809893332, 0.0, 0.149451349150580593145776339657697,
      0.0, 0.219086362515982043995534934228163, 0.0, 0.269266719309996355091226921569469,
      0.0, 0.295524224714752870173892994651338, 0.0};
};

struct GaussKronrod15 {
  static constexpr std::size_t kHalf = 8;
  static constexpr std::array<double, kHalf> x = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.0};
  static constexpr std::array<double, kHalf> wk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, kHalf> wg = {
      0.0, 0.129484966168869693270611432679082, 0.0, 0.279705391489276667901467771423780,
      0.0, 0.381830050505118944950369775488975, 0.0, 0.417959183673469387755102040816327};
};

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
  bool splittable;
};

// One Kronrod panel with the QUADPACK error heuristic.
template <class Rule, class F>
auto kronrod_panel(F& f, double a, double b, std::size_t& evaluations) {
  using T = std::invoke_result_t<F&, double>;
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<T, 2 * Rule::kHalf - 1> fv{};
  T kronrod{};
  T gauss{};
  std::size_t idx = 0;
  for (std::size_t i = 0; i + 1 < Rule::kHalf; ++i) {
    const T lo = f(centre - half * Rule::x[i]);
    const T hi = f(centre + half * Rule::x[i]);
    fv[idx++] = lo;
    fv[idx++] = hi;
    kronrod += Rule::wk[i] * (lo + hi);
    gauss += Rule::wg[i] * (lo + hi);
  }
  const T mid = f(centre);
  fv[idx++] = mid;
  kronrod += Rule::wk[Rule::kHalf - 1] * mid;
  gauss += Rule::wg[Rule::kHalf - 1] * mid;
  evaluations += 2 * Rule::kHalf - 1;

  const T mean = 0.5 * kronrod;
  double resabs = 0.0;
  double resasc = 0.0;
  idx = 0;
  for (std::size_t i = 0; i + 1 < Rule::kHalf; ++i) {
    resabs += Rule::wk[i] * (std::abs(fv[idx]) + std::abs(fv[idx + 1]));
    resasc += Rule::wk[i] * (std::abs(fv[idx] - mean) + std::abs(fv[idx + 1] - mean));
    idx += 2;
  }
  resabs += Rule::wk[Rule::kHalf - 1] * std::abs(fv[idx]);
  resasc += Rule::wk[Rule::kHalf - 1] * std::abs(fv[idx] - mean);
  resabs *= std::abs(half);
  resasc *= std::abs(half);

  double err = std::abs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  struct Out {
    T value;
    double error;
    double resabs;
  };
  return Out{kronrod * half, err, resabs};
}

}  // namespace detail

struct AdaptiveOptions {
  Tolerance tol{1e-12, 1e-12};
  std::size_t max_panels = 4000;
};

/// Globally adaptive Gauss-Kronrod integration over the breakpoint partition
/// [bp0, bp1] U [bp1, bp2] U ... . The panel with the largest error estimate is
/// bisected until the summed estimate meets the tolerance.
template <class Rule = detail::GaussKronrod21, class F>
auto integrate(F&& f, std::span<const double> breakpoints, const AdaptiveOptions& options)
    -> QuadratureResult<std::invoke_result_t<F&, double>> {
  using T = std::invoke_result_t<F&, double>;
  if (breakpoints.size() < 2) throw InvalidInput("integrate: need at least two breakpoints");
  if (!(options.tol.abs >= 0.0) || !(options.tol.rel >= 0.0) ||
      (options.tol.abs == 0.0 && options.tol.rel == 0.0))
    throw InvalidInput("integrate: tolerance must be positive");

  QuadratureResult<T> out;
  std::vector<detail::Panel<T>> panels;
  auto by_error = [&panels](std::size_t i, std::size_t j) { return panels[i].error < panels[j].error; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_error)> queue(by_error);

  double total_error = 0.0;
  double total_abs = 0.0;
  T total{};
  auto push = [&](double a, double b) {
    auto p = detail::kronrod_panel<Rule>(f, a, b, out.evaluations);
    const double width = std::abs(b - a);
    const bool splittable = width > 64.0 * std::numeric_limits<double>::epsilon() *
                                        std::max({std::abs(a), std::abs(b), 1e-300});
    panels.push_back({a, b, p.value, p.error, splittable});
    queue.push(panels.size() - 1);
    total_error += p.error;
    total_abs += p.resabs;
    total += p.value;
  };
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] != breakpoints[i]) push(breakpoints[i], breakpoints[i + 1]);
  }
  if (panels.empty()) return out;

  const double floor_rel = 50.0 * std::numeric_limits<double>::epsilon();
  while (true) {
    const double target = std::max({options.tol.abs, options.tol.rel * std::abs(total), floor_rel * total_abs});
    if (total_error <= target) break;
    const std::size_t worst = queue.top();
    if (panels.size() >= options.max_panels || !panels[worst].splittable) {
      throw NonConvergence("integrate: refinement budget exhausted (error estimate " +
                           std::to_string(total_error) + ", target " + std::to_string(target) + ")");
    }
    queue.pop();
    const auto old = panels[worst];
    panels[worst].error = 0.0;
    panels[worst].value = T{};
    total_error -= old.error;
    total -= old.value;
    const double mid = 0.5 * (old.a + old.b);
    push(old.a, mid);
    push(mid, old.b);
    if (total_error < 0.0) total_error = 0.0;
  }

  std::sort(panels.begin(), panels.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  T sum{};
  double err = 0.0;
  for (const auto& p : panels) {
    sum += p.value;
    err += p.error;
  }
  out.value = sum;
  out.abs_error_estimate = err;
  return out;
}

template <class Rule = detail::GaussKronrod21, class F>
auto integrate(F&& f, double a, double b, Tolerance tol) {
  const std::array<double, 2> bp{a, b};
  return integrate<Rule>(std::forward<F>(f), std::span<const double>(bp), AdaptiveOptions{tol, 4000});
}

/// Integral over [0, 1] of a real integrand that may have an integrable power
/// singularity at 0 or vanish to infinite order at 1. The upper half of the
/// interval is integrated in the variable u = -log(1 - r).
QuadratureResult<double> integrate_unit_interval(const std::function<double(double)>& f, double tol);

/// Signed value held as sign * exp(log_abs).
struct LogValue {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

struct LogQuadratureResult {
  LogValue value;
  double rel_error = 0.0;
  std::size_t evaluations = 0;
};

/// Integrand given in log form at the point r, with 1 - r supplied separately
/// so that weights can be evaluated without cancellation near r = 1.
using LogIntegrand = std::function<LogValue(double r, double one_minus_r)>;

/// Integral over [lower, upper] (subset of [0, 1]) of a possibly sharply
/// peaked integrand whose magnitude may under- or overflow doubles. The
/// integrand is rescaled by its maximum on a scan grid and integrated in
/// u = -log(1 - r) with breakpoints at the level crossings around the peak.
LogQuadratureResult integrate_unit_interval_log(const LogIntegrand& h, double lower, double upper, double rel_tol);

using HalfPlaneFunction = std::function<double(Complex)>;

/// Area of D(x0, R) intersected with the upper half-plane.
double half_disc_area(const Disc& disc);

/// Integral of f over D(x0, R) n {Im > 0}. When the closed region contains
/// the origin, the integral is split into polar shells about the origin that
/// halve in radius; a non-decaying shell sequence is reported as
/// DivergentIntegral.
QuadratureResult<double> integrate_half_disc(const HalfPlaneFunction& f, const Disc& disc, Tolerance tol);

/// Same region with the ball |zeta| < cutoff removed.
QuadratureResult<double> integrate_half_disc_outside(const HalfPlaneFunction& f, const Disc& disc, double cutoff,
                                                     Tolerance tol);

struct SeriesResult {
  Complex value{};
  std::size_t terms_used = 0;
  double last_modulus = 0.0;
};

/// Sums term(0) + term(1) + ... until `consecutive_small` successive terms
/// have modulus below tail_tol.
SeriesResult sum_series(const std::function<Complex(std::size_t)>& term, const TruncationPolicy& policy);

/// Gauss-Legendre nodes and weights mapped to [a, b].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(std::size_t n, double a = 0.0, double b = 1.0);

}  // namespace bergman
