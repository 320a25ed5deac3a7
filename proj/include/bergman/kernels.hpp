#pragma once

// Bergman kernels of the disc and the upper half-plane, radial-series
// kernels, and finite-rank Gram kernels for non-radial weights.

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "bergman/moments.hpp"

namespace bergman {

struct KernelEvaluation {
  Complex value{};
  std::size_t terms_used = 0;
  double tail_bound = 0.0;
};

/// Default refusal radius of series kernels.
inline constexpr double kMaxKernelModulus = 0.95;

/// 1 / (pi (1 - z conj(w))^2).
Complex disc_kernel(Complex z, Complex w);

/// sum_n (z conj(w))^n / (2 pi Phi(n)), terms formed in log domain. The tail
/// bound is t_last q / (1 - q) with q the larger of |z conj(w)| and the last
/// observed term ratio.
KernelEvaluation radial_kernel(const MomentTable& table, Complex z, Complex w, const TruncationPolicy& policy = {},
                               double max_modulus = kMaxKernelModulus);
KernelEvaluation radial_kernel(const RadialWeight& wt, Complex z, Complex w, const TruncationPolicy& policy = {},
                               double max_modulus = kMaxKernelModulus);

/// P_1(zeta, nu) = phi'(zeta) B_1(phi(zeta), phi(nu)) conj(phi'(nu)).
Complex halfplane_kernel(Complex zeta, Complex nu);
/// -1 / (pi (zeta - conj(nu))^2), the closed form used as a cross-check.
Complex halfplane_kernel_closed_form(Complex zeta, Complex nu);

/// Condition number above which Gram builds fail.
inline constexpr double kMaxGramCondition = 1e12;

/// M(p, q) = int_D z^p conj(z)^q mu dA for 0 <= p <= P, 0 <= q <= Q.
/// Analytic for polynomial HoloWeights; radial weights use the moment table;
/// otherwise Gauss-Legendre in r times a trapezoid rule in theta, doubled
/// until the relative change is below tol.
Eigen::MatrixXcd mixed_moments(const DiscWeight& mu, int P, int Q, double tol = 1e-12);
Eigen::MatrixXcd mixed_moments(const HoloWeight& mu, int P, int Q, double tol = 1e-12);
Eigen::MatrixXcd mixed_moments(const RadialWeight& mu, int P, int Q);

/// Reproducing kernel of span{1, z, ..., z^N} in L^2(mu):
/// K_N(z, w) = v(w)^H G^{-1} v(z), G_{mn} = <z^m, z^n>_mu.
class GramKernel {
 public:
  /// Jacobi-scales G, factors it by LLT and throws IllConditioned when the
  /// scaled condition number exceeds kMaxGramCondition or the factorization fails.
  GramKernel(std::string weight_id, Eigen::MatrixXcd gram);

  const std::string& weight_id() const { return weight_id_; }
  int degree() const { return static_cast<int>(gram_.rows()) - 1; }
  const Eigen::MatrixXcd& gram() const { return gram_; }
  /// Condition number of the Jacobi-scaled Gram matrix.
  double condition_number() const { return condition_; }

  Complex operator()(Complex z, Complex w) const;
  /// Coefficients c of the projection sum_k c_k z^k given b_n = <f, z^n>_mu.
  Eigen::VectorXcd project_coefficients(const Eigen::VectorXcd& b) const;

 private:
  Eigen::VectorXcd whitened(Complex z) const;

  std::string weight_id_;
  Eigen::MatrixXcd gram_;
  Eigen::VectorXd scale_;
  Eigen::LLT<Eigen::MatrixXcd> llt_;
  double condition_ = 0.0;
};

inline constexpr int kMaxGramDegree = 40;

GramKernel build_gram_kernel(const DiscWeight& mu, int N, double tol = 1e-12);
GramKernel build_gram_kernel(const HoloWeight& mu, int N, double tol = 1e-12);
GramKernel build_gram_kernel(const RadialWeight& mu, int N);

/// c z^a conj(z)^b.
struct MonomialTerm {
  int a = 0;
  int b = 0;
  Complex c{1.0, 0.0};
};

/// max over points of |g(z) (B_omega f)(z) - (B_1(f g))(z)| with omega = |g|^2,
/// B_omega from the degree-N Gram kernel. g must be a polynomial HoloWeight.
double operator_relation_check(const HoloWeight& g, std::span<const MonomialTerm> f, std::span<const Complex> points,
                               int N);

/// max over pairs of |g(z) K_N(z, w) conj(g(w)) - B_1(z, w)|.
double factorization_defect(const HoloWeight& g, const GramKernel& K, std::span<const Complex> zs,
                            std::span<const Complex> ws);

/// int_D B_mu(z, w) f(w) mu(w) dA(w), evaluated as sum_n z^n <f, w^n>_mu / (2 pi Phi(n))
/// with the inner products by adaptive quadrature in r and a trapezoid rule in theta.
Complex project_numeric(const MomentTable& table, const std::function<Complex(Complex)>& f, Complex z,
                        const TruncationPolicy& policy = {});
Complex project_numeric(const RadialWeight& wt, const std::function<Complex(Complex)>& f, Complex z,
                        const TruncationPolicy& policy = {});

}  // namespace bergman
