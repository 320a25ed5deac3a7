#pragma once

// Weight families on the unit disc and the upper half-plane, and the Cayley
// transform between the two domains.

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bergman/numerics.hpp"

namespace bergman {

enum class WeightFamily { Power, Dostanic, Custom };

/// Radial weight lambda(r) on [0, 1], optionally multiplied by exp(log_scale).
class RadialWeight {
 public:
  /// (1 - r^2)^t, t > -1.
  static RadialWeight power(double t);
  /// (1 - r^2)^A exp(-B / (1 - r^2)^alpha) with A >= 0, B > 0, alpha > 0.
  static RadialWeight dostanic(double A, double B, double alpha);
  /// Arbitrary non-negative evaluator; derivatives by finite differences.
  static RadialWeight custom(std::string id, std::function<double(double)> evaluator,
                             int derivative_order_supported = 6);

  WeightFamily family() const { return family_; }
  const std::string& id() const { return id_; }
  double t() const { return p0_; }
  double A() const { return p0_; }
  double B() const { return p1_; }
  double alpha() const { return p2_; }
  double log_scale() const { return log_scale_; }
  int derivative_order_supported() const { return max_order_; }

  double operator()(double r) const;
  /// log lambda(r) with 1 - r passed separately to avoid cancellation.
  LogValue log_value(double r, double one_minus_r) const;

  /// lambda^(n)(r); analytic for Power and Dostanic, finite differences for
  /// Custom. No range checks beyond 0 < r < 1.
  double derivative(int n, double r) const;
  /// psi_n(r) = (-1)^n lambda^(n)(r) in log form, usable up to r -> 1.
  LogValue log_psi(int n, double r, double one_minus_r) const;

  /// lambda^k; closed under the Power and Dostanic families.
  RadialWeight pow(double k) const;
  /// c * lambda for c > 0.
  RadialWeight scaled(double c) const;

 private:
  RadialWeight() = default;
  void finish_construction();

  WeightFamily family_ = WeightFamily::Custom;
  double p0_ = 0.0;
  double p1_ = 0.0;
  double p2_ = 0.0;
  double log_scale_ = 0.0;
  int max_order_ = 6;
  std::string id_;
  std::function<double(double)> custom_;
};

RadialWeight make_power(double t);
RadialWeight make_dostanic(double A, double B, double alpha);

/// Safe band for derivative evaluation: r in [kDerivativeBand, 1 - kDerivativeBand].
inline constexpr double kDerivativeBand = 1e-3;
/// Highest derivative order with exact (jet) evaluation for closed-form weights.
inline constexpr int kAnalyticDerivativeOrder = 12;

/// lambda^(n)(r) with the domain checks of the public interface.
double numeric_derivative(const RadialWeight& w, int n, double r);

/// Richardson-extrapolated central difference of order n of the evaluator,
/// independent of any analytic derivative.
double finite_difference_derivative(const std::function<double(double)>& f, int n, double r);

struct SignOnsetReport {
  int n = 0;
  double a_n = 0.0;
  std::size_t certified_grid = 0;
};

/// Smallest point a_n of a 1000-point scan of [delta, 1 - delta] beyond which
/// psi_n is non-negative on every sampled point. a_n = 0 when the whole scan
/// passes.
SignOnsetReport sign_onset(const RadialWeight& w, int n);

/// omega(z) = |g(z)|^2 for g holomorphic and zero-free on the disc.
class HoloWeight {
 public:
  /// Checks g != 0 on a 50 x 50 polar grid of |z| <= 1 - 1e-3.
  static HoloWeight make(std::string id, std::function<Complex(Complex)> g);
  /// Polynomial g with coefficients c[0] + c[1] z + ...; enables exact Gram entries.
  static HoloWeight polynomial(std::string id, std::vector<Complex> coefficients);

  const std::string& id() const { return id_; }
  Complex g(Complex z) const { return g_(z); }
  double operator()(Complex z) const { return std::norm(g_(z)); }
  const std::optional<std::vector<Complex>>& coefficients() const { return coefficients_; }

  /// g^k, so that the weight becomes |g|^{2k}.
  HoloWeight pow(int k) const;

 private:
  HoloWeight() = default;
  std::string id_;
  std::function<Complex(Complex)> g_;
  std::optional<std::vector<Complex>> coefficients_;
};

/// Generic weight on the disc.
struct DiscWeight {
  std::string id;
  std::function<double(Complex)> evaluate;

  double operator()(Complex z) const { return evaluate(z); }
};

DiscWeight as_disc_weight(const RadialWeight& w);
DiscWeight as_disc_weight(const HoloWeight& w);

/// |zeta - centre|^exponent.
struct PowerFactor {
  Complex centre;
  double exponent = 0.0;
};

/// Weight on the upper half-plane. Either a power form
/// scale * prod |zeta - c_j|^{e_j}, or a generic evaluator. A holomorphic F
/// may be attached when the weight is |F|^{2 - p}.
class HalfPlaneWeight {
 public:
  static HalfPlaneWeight power_form(std::string id, double scale, std::vector<PowerFactor> factors);
  static HalfPlaneWeight generic(std::string id, std::function<double(Complex)> evaluator);
  /// |F|^{2 - p} as a generic evaluator carrying F.
  static HalfPlaneWeight from_holomorphic(std::string id, std::function<Complex(Complex)> F, double p);

  const std::string& id() const { return id_; }
  bool is_power_form() const { return !generic_; }
  double scale() const { return scale_; }
  const std::vector<PowerFactor>& factors() const { return factors_; }
  const std::function<Complex(Complex)>& holomorphic() const { return F_; }
  std::optional<double> exponent_context() const { return p_; }

  double operator()(Complex zeta) const;
  /// mu^q, formed by exponent arithmetic for power forms.
  HalfPlaneWeight power(double q) const;

  HalfPlaneWeight with_holomorphic(std::function<Complex(Complex)> F, double p) const;

 private:
  HalfPlaneWeight() = default;
  std::string id_;
  double scale_ = 1.0;
  std::vector<PowerFactor> factors_;
  std::function<double(Complex)> generic_;
  std::function<Complex(Complex)> F_;
  std::optional<double> p_;
};

/// phi(zeta) = (i - zeta) / (i + zeta), upper half-plane to disc.
Complex cayley(Complex zeta);
/// Accepts the closed half-plane minus {-i}; boundary points map to the circle.
Complex cayley_boundary(Complex zeta);
Complex cayley_derivative(Complex zeta);
/// psi(z) = i (1 - z) / (1 + z), disc to upper half-plane.
Complex inverse_cayley(Complex z);
Complex inverse_cayley_derivative(Complex z);

/// omega(z) = |F(psi(z)) psi'(z)|^2 for a half-plane weight carrying F.
DiscWeight transport_weight(const HalfPlaneWeight& weight);

/// F(zeta) = -2i / (i + zeta)^2 * (-2 zeta / (i + zeta))^q with q = 2 / (p0 - 2);
/// p0 = 5 transports to |z - 1|^{4/3}.
std::function<Complex(Complex)> remark35_holomorphic(double p0 = 5.0);
/// |F|^{2 - p} for the function above, in power form:
/// 2^{(1+q)(2-p)} |zeta|^{q(2-p)} |zeta + i|^{(-2-q)(2-p)}.
HalfPlaneWeight remark35_weight(double p0, double p);
/// F(zeta) = zeta^{2 / (p0 - 2)}; mu = |F|^{2 - p} = |zeta|^{2(2-p)/(p0-2)}.
HalfPlaneWeight zeta_pow_weight(double p0, double p);

/// g(z) = (1 - z)^{2 / (p0 - 2)}, so |g|^2 = |z - 1|^{4 / (p0 - 2)}.
HoloWeight boundary_zero_weight(double p0);

/// Shortest round-trip decimal form, used in weight identifiers.
std::string format_number(double v);

}  // namespace bergman
