#include "bergman/weights.hpp"

#include <charconv>
#include <numbers>

#include "bergman/jet.hpp"

namespace bergman {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

using WeightJet = Jet<double, kAnalyticDerivativeOrder>;

double falling_factorial(double t, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= t - i;
  return out;
}

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

// (1 - r^2)^t = (1 - r)^t (1 + r)^t differentiated by Leibniz' rule with the
// factor (1 - r)^{t - n} pulled out, so the bracket stays O(1) up to r = 1.
LogValue power_log_derivative(double t, int n, double r, double omr) {
  double bracket = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    bracket += binomial(n, k) * sign * falling_factorial(t, k) * falling_factorial(t, n - k) *
               std::pow(omr, n - k) * std::pow(1.0 + r, t - (n - k));
  }
  if (bracket == 0.0) return {};
  return {(t - n) * std::log(omr) + std::log(std::abs(bracket)), bracket > 0.0 ? 1 : -1};
}

// Beyond this value of B / s^alpha the weight is below exp(-700) and only the
// leading term of lambda^(n) = lambda * (h')^n + ... is kept.
constexpr double kDostanicJetLimit = 700.0;

LogValue dostanic_log_derivative(double A, double B, double alpha, int n, double r, double omr) {
  const double s0 = omr * (2.0 - omr);
  const double log_lambda = A * std::log(s0) - B * std::pow(s0, -alpha);
  if (n == 0) return {log_lambda, 1};
  // h' = -2r (A / s + alpha B s^{-alpha-1}) < 0, summed in log form.
  auto leading = [&]() -> LogValue {
    if (!(r > 0.0) || !std::isfinite(log_lambda)) return {};
    const double log_dh = std::log(2.0 * r) + std::log(alpha * B) - (alpha + 1.0) * std::log(s0) +
                          std::log1p(A * std::pow(s0, alpha) / (alpha * B));
    return {log_lambda + n * log_dh, n % 2 == 1 ? -1 : 1};
  };
  if (B * std::pow(s0, -alpha) > kDostanicJetLimit) return leading();

  WeightJet s;
  s.c[0] = s0;
  s.c[1] = -2.0 * r;
  s.c[2] = -1.0;
  WeightJet h = A * log(s) - B * pow(s, -alpha);
  h.c[0] = 0.0;
  const double d = exp(h).derivative(static_cast<std::size_t>(n));
  if (!std::isfinite(d)) return leading();
  if (d == 0.0) return {};
  return {log_lambda + std::log(std::abs(d)), d > 0.0 ? 1 : -1};
}

}  // namespace

RadialWeight RadialWeight::power(double t) {
  if (!(t > -1.0) || !std::isfinite(t)) throw InvalidInput("power weight: need t > -1");
  RadialWeight w;
  w.family_ = WeightFamily::Power;
  w.p0_ = t;
  w.max_order_ = kAnalyticDerivativeOrder;
  w.finish_construction();
  return w;
}

RadialWeight RadialWeight::dostanic(double A, double B, double alpha) {
  if (!(A >= 0.0) || !(B > 0.0) || !(alpha > 0.0) || !std::isfinite(A) || !std::isfinite(B) ||
      !std::isfinite(alpha))
    throw InvalidInput("dostanic weight: need A >= 0, B > 0, alpha > 0");
  RadialWeight w;
  w.family_ = WeightFamily::Dostanic;
  w.p0_ = A;
  w.p1_ = B;
  w.p2_ = alpha;
  w.max_order_ = kAnalyticDerivativeOrder;
  w.finish_construction();
  return w;
}

RadialWeight RadialWeight::custom(std::string id, std::function<double(double)> evaluator,
                                  int derivative_order_supported) {
  if (!evaluator) throw InvalidInput("custom weight: empty evaluator");
  if (derivative_order_supported < 0) throw InvalidInput("custom weight: negative derivative order");
  RadialWeight w;
  w.family_ = WeightFamily::Custom;
  w.custom_ = std::move(evaluator);
  w.id_ = std::move(id);
  w.max_order_ = derivative_order_supported;
  w.finish_construction();
  return w;
}

void RadialWeight::finish_construction() {
  switch (family_) {
    case WeightFamily::Power:
      id_ = "power:t=" + format_number(p0_);
      break;
    case WeightFamily::Dostanic:
      id_ = "dostanic:A=" + format_number(p0_) + ",B=" + format_number(p1_) + ",alpha=" + format_number(p2_);
      break;
    case WeightFamily::Custom: {
      for (int i = 0; i <= 1000; ++i) {
        const double v = custom_(i / 1000.0);
        if (!(v >= 0.0)) throw InvalidInput("custom weight '" + id_ + "' is negative or NaN at a sample radius");
      }
      QuadratureResult<double> mass;
      try {
        mass = integrate_unit_interval([this](double r) { return r * custom_(r); }, 1e-10);
      } catch (const NonConvergence&) {
        throw InvalidInput("custom weight '" + id_ + "': integral of r * lambda(r) did not converge");
      }
      if (!(mass.value > 0.0) || !std::isfinite(mass.value))
        throw InvalidInput("custom weight '" + id_ + "': integral of r * lambda(r) is not in (0, inf)");
      break;
    }
  }
}

double RadialWeight::operator()(double r) const {
  if (family_ == WeightFamily::Custom) return std::exp(log_scale_) * custom_(r);
  return log_value(r, 1.0 - r).value();
}

LogValue RadialWeight::log_value(double r, double one_minus_r) const {
  LogValue out;
  switch (family_) {
    case WeightFamily::Power: {
      if (one_minus_r <= 0.0) {
        if (p0_ == 0.0) return {log_scale_, 1};
        if (p0_ > 0.0) return {};
        return {std::numeric_limits<double>::infinity(), 1};
      }
      const double s = one_minus_r * (2.0 - one_minus_r);
      out = {p0_ * std::log(s), 1};
      break;
    }
    case WeightFamily::Dostanic: {
      if (one_minus_r <= 0.0) return {};
      const double s = one_minus_r * (2.0 - one_minus_r);
      out = {p0_ * std::log(s) - p1_ * std::pow(s, -p2_), 1};
      if (!std::isfinite(out.log_abs)) return {};
      break;
    }
    case WeightFamily::Custom: {
      const double v = custom_(r);
      if (v <= 0.0) return {};
      out = {std::log(v), 1};
      break;
    }
  }
  out.log_abs += log_scale_;
  return out;
}

double RadialWeight::derivative(int n, double r) const {
  if (n < 0) throw InvalidInput("derivative: negative order");
  if (n == 0) return (*this)(r);
  if (family_ == WeightFamily::Custom) {
    return std::exp(log_scale_) * finite_difference_derivative(custom_, n, r);
  }
  if (n > kAnalyticDerivativeOrder) throw InvalidInput("derivative: order above the analytic limit");
  const LogValue v = log_psi(n, r, 1.0 - r);
  return (n % 2 == 0 ? 1.0 : -1.0) * v.value();
}

LogValue RadialWeight::log_psi(int n, double r, double one_minus_r) const {
  if (n < 0 || n > kAnalyticDerivativeOrder) throw InvalidInput("log_psi: order out of range");
  if (n == 0) return log_value(r, one_minus_r);
  LogValue v;
  switch (family_) {
    case WeightFamily::Power:
      if (one_minus_r <= 0.0) return {};
      v = power_log_derivative(p0_, n, r, one_minus_r);
      break;
    case WeightFamily::Dostanic:
      if (one_minus_r <= 0.0) return {};
      v = dostanic_log_derivative(p0_, p1_, p2_, n, r, one_minus_r);
      break;
    case WeightFamily::Custom: {
      const double d = finite_difference_derivative(custom_, n, r);
      if (d == 0.0 || !std::isfinite(d)) return {};
      v = {std::log(std::abs(d)), d > 0.0 ? 1 : -1};
      break;
    }
  }
  if (v.sign == 0) return v;
  v.log_abs += log_scale_;
  if (n % 2 == 1) v.sign = -v.sign;
  return v;
}

RadialWeight RadialWeight::pow(double k) const {
  if (!(k > 0.0)) throw InvalidInput("RadialWeight::pow: need k > 0");
  RadialWeight w;
  switch (family_) {
    case WeightFamily::Power:
      w = power(k * p0_);
      break;
    case WeightFamily::Dostanic:
      w = dostanic(k * p0_, k * p1_, p2_);
      break;
    case WeightFamily::Custom: {
      auto f = custom_;
      w = custom("(" + id_ + ")^" + format_number(k), [f, k](double r) { return std::pow(f(r), k); }, max_order_);
      break;
    }
  }
  w.log_scale_ = k * log_scale_;
  if (log_scale_ != 0.0) w.id_ = id_ + "^" + format_number(k);
  return w;
}

RadialWeight RadialWeight::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("RadialWeight::scaled: need c > 0");
  RadialWeight w = *this;
  w.log_scale_ += std::log(c);
  w.id_ = format_number(c) + "*" + id_;
  return w;
}

RadialWeight make_power(double t) { return RadialWeight::power(t); }
RadialWeight make_dostanic(double A, double B, double alpha) { return RadialWeight::dostanic(A, B, alpha); }

double numeric_derivative(const RadialWeight& w, int n, double r) {
  if (n < 0 || n > w.derivative_order_supported())
    throw InvalidInput("numeric_derivative: order " + std::to_string(n) + " exceeds the supported order " +
                       std::to_string(w.derivative_order_supported()));
  if (!(r >= kDerivativeBand) || !(r <= 1.0 - kDerivativeBand))
    throw InvalidInput("numeric_derivative: r outside [1e-3, 1 - 1e-3]");
  return w.derivative(n, r);
}

double finite_difference_derivative(const std::function<double(double)>& f, int n, double r) {
  if (n < 0) throw InvalidInput("finite_difference_derivative: negative order");
  if (n == 0) return f(r);
  // Stencil r + (n/2 - k) h, k = 0..n, kept inside (0, 1); the step shrinks
  // with the distance to the nearer endpoint where the derivatives grow.
  const double room = std::min(r, 1.0 - r);
  const double h0 = 0.5 * room / (0.5 * n + 1.0);
  auto central = [&](double h) {
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      acc += sign * binomial(n, k) * f(r + (0.5 * n - k) * h);
    }
    return acc / std::pow(h, n);
  };
  // Richardson extrapolation on the even error expansion: O(h^2) -> O(h^8).
  constexpr int kLevels = 4;
  std::array<double, kLevels> d{};
  for (int i = 0; i < kLevels; ++i) d[i] = central(h0 / std::ldexp(1.0, i));
  double factor = 4.0;
  for (int level = 1; level < kLevels; ++level) {
    for (int i = kLevels - 1; i >= level; --i) d[i] = (factor * d[i] - d[i - 1]) / (factor - 1.0);
    factor *= 4.0;
  }
  return d[kLevels - 1];
}

SignOnsetReport sign_onset(const RadialWeight& w, int n) {
  if (n < 0 || n > w.derivative_order_supported())
    throw InvalidInput("sign_onset: order exceeds the supported derivative order");
  SignOnsetReport rep;
  rep.n = n;
  constexpr std::size_t kGrid = 1000;
  rep.certified_grid = kGrid;
  if (n == 0) return rep;  // lambda >= 0 everywhere

  std::vector<double> r(kGrid);
  std::vector<double> psi(kGrid);
  double scale = 0.0;
  for (std::size_t i = 0; i < kGrid; ++i) {
    r[i] = kDerivativeBand + (1.0 - 2.0 * kDerivativeBand) * static_cast<double>(i) / (kGrid - 1);
    psi[i] = (n % 2 == 0 ? 1.0 : -1.0) * w.derivative(n, r[i]);
    scale = std::max(scale, std::abs(psi[i]));
  }
  const double floor = -1e-12 * scale;
  std::optional<std::size_t> last_bad;
  for (std::size_t i = 0; i < kGrid; ++i) {
    if (psi[i] < floor) last_bad = i;
  }
  if (!last_bad) return rep;
  if (*last_bad + 1 >= kGrid)
    throw NotFound("sign_onset: psi_" + std::to_string(n) + " is negative at the top of the scan");
  rep.a_n = r[*last_bad + 1];
  return rep;
}

HoloWeight HoloWeight::make(std::string id, std::function<Complex(Complex)> g) {
  if (!g) throw InvalidInput("HoloWeight: empty function");
  constexpr int kGrid = 50;
  constexpr double kRadius = 1.0 - 1e-3;
  for (int i = 0; i <= kGrid; ++i) {
    const double rho = kRadius * i / kGrid;
    for (int j = 0; j < kGrid; ++j) {
      const Complex v = g(std::polar(rho, 2.0 * std::numbers::pi * j / kGrid));
      if (!(std::abs(v) > 0.0) || !std::isfinite(std::abs(v)))
        throw InvalidInput("HoloWeight '" + id + "': g vanishes or is not finite on the sample grid");
    }
  }
  // A zero strictly between grid points still shows up as a non-zero
  // winding number of g along the outer sample circle.
  constexpr int kCircle = 8192;
  double winding = 0.0;
  Complex prev = g(Complex(kRadius, 0.0));
  for (int j = 1; j <= kCircle; ++j) {
    const Complex cur = g(std::polar(kRadius, 2.0 * std::numbers::pi * j / kCircle));
    winding += std::arg(cur / prev);
    prev = cur;
  }
  if (std::abs(winding) > std::numbers::pi)
    throw InvalidInput("HoloWeight '" + id + "': g has a zero inside the disc");
  HoloWeight w;
  w.id_ = std::move(id);
  w.g_ = std::move(g);
  return w;
}

HoloWeight HoloWeight::polynomial(std::string id, std::vector<Complex> coefficients) {
  if (coefficients.empty()) throw InvalidInput("HoloWeight::polynomial: no coefficients");
  auto c = coefficients;
  HoloWeight w = make(std::move(id), [c](Complex z) {
    Complex acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
  });
  w.coefficients_ = std::move(coefficients);
  return w;
}

HoloWeight HoloWeight::pow(int k) const {
  if (k < 1) throw InvalidInput("HoloWeight::pow: need k >= 1");
  if (k == 1) return *this;
  const std::string id = "(" + id_ + ")^" + std::to_string(k);
  if (coefficients_) {
    std::vector<Complex> acc{1.0};
    for (int i = 0; i < k; ++i) {
      std::vector<Complex> next(acc.size() + coefficients_->size() - 1);
      for (std::size_t a = 0; a < acc.size(); ++a)
        for (std::size_t b = 0; b < coefficients_->size(); ++b) next[a + b] += acc[a] * (*coefficients_)[b];
      acc = std::move(next);
    }
    return polynomial(id, std::move(acc));
  }
  auto g = g_;
  HoloWeight w;
  w.id_ = id;
  w.g_ = [g, k](Complex z) { return std::pow(g(z), k); };
  return w;
}

DiscWeight as_disc_weight(const RadialWeight& w) {
  return {w.id(), [w](Complex z) { return w(std::abs(z)); }};
}

DiscWeight as_disc_weight(const HoloWeight& w) {
  return {"|" + w.id() + "|^2", [w](Complex z) { return w(z); }};
}

HalfPlaneWeight HalfPlaneWeight::power_form(std::string id, double scale, std::vector<PowerFactor> factors) {
  if (!(scale > 0.0)) throw InvalidInput("HalfPlaneWeight: scale must be positive");
  HalfPlaneWeight w;
  w.id_ = std::move(id);
  w.scale_ = scale;
  w.factors_ = std::move(factors);
  return w;
}

HalfPlaneWeight HalfPlaneWeight::generic(std::string id, std::function<double(Complex)> evaluator) {
  if (!evaluator) throw InvalidInput("HalfPlaneWeight: empty evaluator");
  HalfPlaneWeight w;
  w.id_ = std::move(id);
  w.generic_ = std::move(evaluator);
  return w;
}

HalfPlaneWeight HalfPlaneWeight::from_holomorphic(std::string id, std::function<Complex(Complex)> F, double p) {
  if (!F) throw InvalidInput("HalfPlaneWeight: empty F");
  auto w = generic(std::move(id), [F, p](Complex z) { return std::pow(std::abs(F(z)), 2.0 - p); });
  w.F_ = std::move(F);
  w.p_ = p;
  return w;
}

double HalfPlaneWeight::operator()(Complex zeta) const {
  if (generic_) return generic_(zeta);
  double v = scale_;
  for (const auto& f : factors_) v *= std::pow(std::abs(zeta - f.centre), f.exponent);
  return v;
}

HalfPlaneWeight HalfPlaneWeight::power(double q) const {
  const std::string id = "(" + id_ + ")^" + format_number(q);
  if (!generic_) {
    auto factors = factors_;
    for (auto& f : factors) f.exponent *= q;
    return power_form(id, std::pow(scale_, q), std::move(factors));
  }
  auto g = generic_;
  return generic(id, [g, q](Complex z) { return std::pow(g(z), q); });
}

HalfPlaneWeight HalfPlaneWeight::with_holomorphic(std::function<Complex(Complex)> F, double p) const {
  HalfPlaneWeight w = *this;
  w.F_ = std::move(F);
  w.p_ = p;
  return w;
}

namespace {
const Complex kI{0.0, 1.0};
}

Complex cayley(Complex zeta) {
  if (!(zeta.imag() > 0.0)) throw InvalidInput("cayley: argument must lie in the upper half-plane");
  return (kI - zeta) / (kI + zeta);
}

Complex cayley_boundary(Complex zeta) {
  if (!(zeta.imag() >= 0.0) || zeta == -kI) throw InvalidInput("cayley_boundary: argument outside the closed half-plane");
  return (kI - zeta) / (kI + zeta);
}

Complex cayley_derivative(Complex zeta) {
  if (!(zeta.imag() > 0.0)) throw InvalidInput("cayley_derivative: argument must lie in the upper half-plane");
  const Complex d = kI + zeta;
  return -2.0 * kI / (d * d);
}

Complex inverse_cayley(Complex z) {
  if (!(std::abs(z) < 1.0)) throw InvalidInput("inverse_cayley: argument must lie in the unit disc");
  return kI * (1.0 - z) / (1.0 + z);
}

Complex inverse_cayley_derivative(Complex z) {
  if (!(std::abs(z) < 1.0)) throw InvalidInput("inverse_cayley_derivative: argument must lie in the unit disc");
  const Complex d = 1.0 + z;
  return -2.0 * kI / (d * d);
}

DiscWeight transport_weight(const HalfPlaneWeight& weight) {
  const auto& F = weight.holomorphic();
  if (!F) throw InvalidInput("transport_weight: weight '" + weight.id() + "' carries no holomorphic F");
  return {"transport(" + weight.id() + ")", [F](Complex z) {
            return std::norm(F(inverse_cayley(z)) * inverse_cayley_derivative(z));
          }};
}

namespace {
double p0_exponent(double p0) {
  if (!(p0 > 2.0) || !std::isfinite(p0)) throw InvalidInput("need p0 > 2");
  return 2.0 / (p0 - 2.0);
}
}  // namespace

std::function<Complex(Complex)> remark35_holomorphic(double p0) {
  const double q = p0_exponent(p0);
  return [q](Complex zeta) {
    const Complex d = kI + zeta;
    return -2.0 * kI / (d * d) * std::pow(-2.0 * zeta / d, q);
  };
}

HalfPlaneWeight remark35_weight(double p0, double p) {
  const double q = p0_exponent(p0);
  const double e = 2.0 - p;
  auto w = HalfPlaneWeight::power_form("remark35:p0=" + format_number(p0) + ",p=" + format_number(p),
                                       std::pow(2.0, (1.0 + q) * e),
                                       {{Complex(0.0, 0.0), q * e}, {-kI, (-2.0 - q) * e}});
  return w.with_holomorphic(remark35_holomorphic(p0), p);
}

HalfPlaneWeight zeta_pow_weight(double p0, double p) {
  const double q = p0_exponent(p0);
  auto w = HalfPlaneWeight::power_form("zeta_pow:p0=" + format_number(p0) + ",p=" + format_number(p), 1.0,
                                       {{Complex(0.0, 0.0), q * (2.0 - p)}});
  return w.with_holomorphic([q](Complex zeta) { return std::pow(zeta, q); }, p);
}

HoloWeight boundary_zero_weight(double p0) {
  const double q = p0_exponent(p0);
  return HoloWeight::make("(1-z)^" + format_number(q), [q](Complex z) { return std::pow(1.0 - z, q); });
}

}  // namespace bergman
