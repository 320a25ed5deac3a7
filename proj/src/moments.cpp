#include "bergman/moments.hpp"

#include <algorithm>

namespace bergman {

namespace {

double log_radius(double r, double one_minus_r) { return one_minus_r < 0.5 ? std::log1p(-one_minus_r) : std::log(r); }

// int_lower^upper r^{power} f(r) dr with f supplied in log form.
template <class LogF>
LogQuadratureResult moment_integral(double power, double lower, double upper, LogF&& log_f) {
  auto h = [&](double r, double omr) -> LogValue {
    if (r <= 0.0) return power > 0.0 ? LogValue{} : log_f(r, omr);
    LogValue v = log_f(r, omr);
    if (v.sign == 0) return v;
    v.log_abs += power * log_radius(r, omr);
    return v;
  };
  return integrate_unit_interval_log(h, lower, upper, kMomentRelTol);
}

}  // namespace

double log_phi(const RadialWeight& w, double x, double* rel_error) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("phi: need finite x >= 0");
  const auto res =
      moment_integral(2.0 * x + 1.0, 0.0, 1.0, [&w](double r, double omr) { return w.log_value(r, omr); });
  if (res.value.sign != 1) throw NonConvergence("phi: moment integral is not positive for " + w.id());
  if (rel_error) *rel_error = res.rel_error;
  return res.value.log_abs;
}

double phi(const RadialWeight& w, double x, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("phi: tol must be > 0");
  double rel = 0.0;
  const double v = std::exp(log_phi(w, x, &rel));
  if (rel * v > std::max(tol, kMomentRelTol * v) * 10.0)
    throw NonConvergence("phi: error estimate above the requested tolerance");
  return v;
}

double phi_beta_oracle(double t, double x) {
  if (!(t > -1.0) || !(x >= 0.0)) throw InvalidInput("phi_beta_oracle: need t > -1 and x >= 0");
  return 0.5 * std::exp(std::lgamma(x + 1.0) + std::lgamma(t + 1.0) - std::lgamma(x + t + 2.0));
}

MomentTable::MomentTable(RadialWeight weight) : weight_(std::move(weight)) {}

MomentTable::Entry MomentTable::entry(double x) const {
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(x); it != cache_.end()) return it->second;
  Entry e{};
  e.log_value = log_phi(weight_, x, &e.rel_error);
  cache_.emplace(x, e);
  return e;
}

double MomentTable::abs_error(double x) const {
  const Entry e = entry(x);
  return e.rel_error * std::exp(e.log_value);
}

std::vector<std::pair<double, MomentTable::Entry>> MomentTable::entries() const {
  std::lock_guard lock(mutex_);
  return {cache_.begin(), cache_.end()};
}

MomentLadder::MomentLadder(RadialWeight weight, int n, double a_n) : weight_(std::move(weight)), n_(n), a_n_(a_n) {
  if (n < 0 || n > weight_.derivative_order_supported()) throw InvalidInput("MomentLadder: unsupported order");
  if (!(a_n >= 0.0) || !(a_n < 1.0)) throw InvalidInput("MomentLadder: need 0 <= a_n < 1");
}

LogValue MomentLadder::integrate_psi(double x, double lower, double upper) const {
  if (!(x >= 0.0)) throw InvalidInput("MomentLadder: need x >= 0");
  const auto res = moment_integral(2.0 * x + 1.0 + n_, lower, upper,
                                   [this](double r, double omr) { return weight_.log_psi(n_, r, omr); });
  return res.value;
}

LogValue MomentLadder::log_phi_n(double x) const { return integrate_psi(x, 0.0, 1.0); }

double MomentLadder::log_phi_n_tilde(double x) const {
  const LogValue v = integrate_psi(x, a_n_, 1.0);
  if (v.sign != 1) throw NonConvergence("MomentLadder: truncated moment is not positive");
  return v.log_abs;
}

LogValue MomentLadder::log_head(double x) const {
  if (a_n_ == 0.0) return {};
  return integrate_psi(x, 0.0, a_n_);
}

double MomentLadder::log_product(double x) const {
  double s = 0.0;
  for (int j = 2; j <= n_ + 1; ++j) s += std::log(2.0 * x + j);
  return s;
}

double MomentLadder::theta_n(double x) const { return log_product(x) - log_phi_n_tilde(x); }

MomentLadder build_ladder(const RadialWeight& w, int n) {
  const SignOnsetReport rep = sign_onset(w, n);
  return MomentLadder(w, n, rep.a_n);
}

double check_tail_ratio(const MomentLadder& ladder, double x) {
  if (!(x >= 0.0)) throw InvalidInput("check_tail_ratio: need x >= 0");
  const LogValue head = ladder.log_head(x);
  if (head.sign == 0) return 0.0;
  return std::exp(head.log_abs - ladder.log_phi_n_tilde(x));
}

double log_convexity_defect(const MomentTable& table, std::span<const double> xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] >= 0.0)) throw InvalidInput("log_convexity_defect: grid must be >= 0");
    if (i > 0 && !(xs[i] > xs[i - 1])) throw InvalidInput("log_convexity_defect: grid must be strictly increasing");
  }
  if (xs.size() < 3) return 0.0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 2 < xs.size(); ++i) {
    const double lo = xs[i];
    const double mid = xs[i + 1];
    const double hi = xs[i + 2];
    const double t = (hi - mid) / (hi - lo);
    const double gap =
        2.0 * (t * table.log_value(lo) + (1.0 - t) * table.log_value(hi) - table.log_value(mid));
    worst = std::max(worst, -std::expm1(gap));
  }
  return worst;
}

double log_convexity_defect(const RadialWeight& w, std::span<const double> xs) {
  MomentTable table(w);
  return log_convexity_defect(table, xs);
}

double theta_second_derivative_estimate(const MomentLadder& ladder, double x) {
  const int n = ladder.n();
  if (!(x - 0.5 >= 0.0) || !(x / (2.0 * x + 1.0 + n) >= 1.0 / (2.0 * std::sqrt(2.0))))
    throw InvalidInput("theta_second_derivative_estimate: need x / (2x + 1 + n) >= 1 / (2 sqrt 2)");
  constexpr double h = 0.5;
  const double second = (ladder.theta_n(x + h) - 2.0 * ladder.theta_n(x) + ladder.theta_n(x - h)) / (h * h);
  return -x * x * second;
}

}  // namespace bergman
