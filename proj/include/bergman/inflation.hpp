#pragma once

// Hartogs domains {(z, w) : z in D, |w|^2 < mu(z)} and the inflation series
// B[(z,w),(t,s)] = (1 / 2 pi) sum_m (2m + 2) w^m K_m(z, t) conj(s)^m, where
// K_m is the weighted kernel of mu^{m+1}.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>

#include "bergman/kernels.hpp"

namespace bergman {

class HartogsDomain {
 public:
  const std::string& id() const { return id_; }
  double mu(Complex z) const { return mu_(z); }
  bool contains(Complex z, Complex w) const { return std::abs(z) < 1.0 && std::norm(w) < mu_(z); }
  const std::optional<RadialWeight>& radial() const { return radial_; }
  const std::optional<HoloWeight>& holomorphic() const { return holo_; }

  friend HartogsDomain make_domain(RadialWeight mu);
  friend HartogsDomain make_domain(HoloWeight mu);

 private:
  std::string id_;
  std::function<double(Complex)> mu_;
  std::optional<RadialWeight> radial_;
  std::optional<HoloWeight> holo_;
};

/// mu = 1 (Power(0)) gives the bidisc.
HartogsDomain make_domain(RadialWeight mu);
/// mu = |g|^2, e.g. boundary_zero_weight(p0) for |w|^2 < |z - 1|^{4/(p0-2)}.
HartogsDomain make_domain(HoloWeight mu);

/// Inflation series over a radial base weight. Moment tables of mu^{m+1}
/// are built on first use and shared by later evaluations.
class InflationSeries {
 public:
  explicit InflationSeries(HartogsDomain domain, TruncationPolicy policy = {});

  const HartogsDomain& domain() const { return domain_; }
  const TruncationPolicy& policy() const { return policy_; }
  /// Moments of mu^e.
  const MomentTable& table(double e) const;
  /// K_m(z, t), the kernel of mu^{m+1}.
  KernelEvaluation K(int m, Complex z, Complex t) const;

 private:
  HartogsDomain domain_;
  TruncationPolicy policy_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::unique_ptr<MomentTable>> tables_;
};

/// Outer terms stop once (2m + 2) |w conj(s)|^m sqrt(K_m(z,z) K_m(t,t)) / (2 pi)
/// stays below tail_tol for consecutive_small terms. The tail bound adds the
/// inner tails and a geometric estimate of the outer remainder.
KernelEvaluation hartogs_kernel(const InflationSeries& series, Complex z, Complex w, Complex t, Complex s);

/// |pi B[(z,0),(t,0)] - B_mu(z,t)|, the second term from a fresh moment table.
double slice_identity_defect(const InflationSeries& series, Complex z, Complex t);

/// |B F(z, 0) - B_mu f(z)| for F(z, w) = f(z) = z^a conj(z)^b. The left side
/// integrates the slice kernel against pi mu(t) f(t) (the s-average over
/// |s|^2 < mu(t) of a function anti-holomorphic in s), the right side is the
/// monomial projection.
double lifted_projection_defect(const InflationSeries& series, int a, int b, Complex z);

struct DegreeSelection {
  /// max over k != j of the coefficient of w^k in B(z^a conj(z)^b w^j)(z, .).
  double off_degree = 0.0;
  /// |coefficient of w^j - B_{mu^{j+1}}(z^a conj(z)^b)(z)|.
  double on_degree = 0.0;
};

/// The s-integral over |s| < sqrt(mu(t)) uses a trapezoid rule in arg s;
/// orders k in [0, j + kmax_extra] are inspected.
DegreeSelection degree_selection_defect(const InflationSeries& series, int a, int b, int j, Complex z,
                                        int kmax_extra = 4);

/// Largest m with a Gram kernel in the factorized check; larger m use
/// B_1 / (g(z)^{m+1} conj(g(t))^{m+1}).
inline constexpr int kFactorizedGramOrders = 8;

/// |B[(z,w),(t,s)] - B_omega(z,t) B_1(w / g(z), s / g(t))| for omega = |g|^2,
/// left side from Gram kernels of degree N.
double factorized_hartogs_defect(const HoloWeight& g, Complex z, Complex w, Complex t, Complex s, int N);

}  // namespace bergman
