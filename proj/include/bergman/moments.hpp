#pragma once

// Moment function Phi(x) = int_0^1 r^{2x+1} lambda(r) dr of a radial weight
// and the integration-by-parts ladder built from it.

#include <map>
#include <memory>
#include <mutex>
#include <span>

#include "bergman/weights.hpp"

namespace bergman {

/// Relative accuracy requested from the log-domain integrator for moments.
inline constexpr double kMomentRelTol = 1e-13;

/// log Phi(x); rel_error receives the quadrature error estimate if given.
double log_phi(const RadialWeight& w, double x, double* rel_error = nullptr);

/// Phi(x) with |result - Phi(x)| <= tol (or 1e-13 relative, whichever is
/// larger). Values below the double range come back as 0; use log_phi.
double phi(const RadialWeight& w, double x, double tol = 1e-14);

/// 0.5 * B(x + 1, t + 1), the moment of (1 - r^2)^t, via lgamma.
double phi_beta_oracle(double t, double x);

/// Lazily filled cache of log Phi for one weight. Entries are independent
/// of evaluation order, so a filled table is the same however it was built.
class MomentTable {
 public:
  struct Entry {
    double log_value;
    double rel_error;
  };

  explicit MomentTable(RadialWeight weight);

  const RadialWeight& weight() const { return weight_; }
  const std::string& weight_id() const { return weight_.id(); }

  Entry entry(double x) const;
  double log_value(double x) const { return entry(x).log_value; }
  double value(double x) const { return std::exp(entry(x).log_value); }
  /// Absolute error estimate of value(x).
  double abs_error(double x) const;

  /// Snapshot of all cached entries, sorted by x.
  std::vector<std::pair<double, Entry>> entries() const;

 private:
  RadialWeight weight_;
  mutable std::mutex mutex_;
  mutable std::map<double, Entry> cache_;
};

/// Ladder of order n: psi_n = (-1)^n lambda^(n),
/// Phi_n(x) = int_0^1 r^{2x+1+n} psi_n dr, tilde Phi_n the same over (a_n, 1),
/// Theta_n = tilde Phi_n / prod_{j=2}^{n+1} (2x + j), theta_n = -log Theta_n.
class MomentLadder {
 public:
  MomentLadder(RadialWeight weight, int n, double a_n);

  int n() const { return n_; }
  double a_n() const { return a_n_; }
  const RadialWeight& weight() const { return weight_; }

  /// Phi_n(x) in log form (it may be negative for small x).
  LogValue log_phi_n(double x) const;
  double phi_n(double x) const { return log_phi_n(x).value(); }
  double log_phi_n_tilde(double x) const;
  double phi_n_tilde(double x) const { return std::exp(log_phi_n_tilde(x)); }
  /// int_0^{a_n} r^{2x+1+n} psi_n dr, zero when a_n = 0.
  LogValue log_head(double x) const;
  double theta_n(double x) const;
  /// sum_{j=2}^{n+1} log(2x + j).
  double log_product(double x) const;

 private:
  LogValue integrate_psi(double x, double lower, double upper) const;

  RadialWeight weight_;
  int n_;
  double a_n_;
};

/// Ladder with a_n taken from sign_onset (NotFound propagates).
MomentLadder build_ladder(const RadialWeight& w, int n);

/// |Phi_n(x) / tilde Phi_n(x) - 1|, computed from the head integral directly.
double check_tail_ratio(const MomentLadder& ladder, double x);

/// Largest log-convexity defect over adjacent triples lo < mid < hi of xs:
/// 1 - (Phi(lo)^t Phi(hi)^{1-t} / Phi(mid))^2 with t = (hi - mid) / (hi - lo).
/// On uniform grids this is (Phi(mid)^2 - Phi(lo) Phi(hi)) / Phi(mid)^2.
double log_convexity_defect(const MomentTable& table, std::span<const double> xs);
double log_convexity_defect(const RadialWeight& w, std::span<const double> xs);

/// -x^2 theta_n''(x) by central differences with step 0.5. Requires
/// x / (2x + 1 + n) >= 1 / (2 sqrt 2).
double theta_second_derivative_estimate(const MomentLadder& ladder, double x);

}  // namespace bergman
