#include "bergman/inflation.hpp"

#include <numbers>

#include "bergman/projector.hpp"

namespace bergman {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

HartogsDomain make_domain(RadialWeight mu) {
  HartogsDomain d;
  d.id_ = mu.id();
  d.mu_ = [mu](Complex z) { return std::abs(z) < 1.0 ? mu(std::abs(z)) : 0.0; };
  d.radial_ = std::move(mu);
  return d;
}

HartogsDomain make_domain(HoloWeight mu) {
  HartogsDomain d;
  d.id_ = "|" + mu.id() + "|^2";
  d.mu_ = [mu](Complex z) { return std::abs(z) < 1.0 ? mu(z) : 0.0; };
  d.holo_ = std::move(mu);
  return d;
}

InflationSeries::InflationSeries(HartogsDomain domain, TruncationPolicy policy)
    : domain_(std::move(domain)), policy_(policy) {
  policy_.validate();
  if (!domain_.radial()) throw InvalidInput("InflationSeries: the base weight must be radial");
}

const MomentTable& InflationSeries::table(double e) const {
  if (!(e > 0.0)) throw InvalidInput("InflationSeries::table: need a positive exponent");
  std::lock_guard lock(mutex_);
  auto& slot = tables_[e];
  if (!slot) slot = std::make_unique<MomentTable>(domain_.radial()->pow(e));
  return *slot;
}

KernelEvaluation InflationSeries::K(int m, Complex z, Complex t) const {
  if (m < 0) throw InvalidInput("InflationSeries::K: need m >= 0");
  return radial_kernel(table(m + 1.0), z, t, policy_);
}

KernelEvaluation hartogs_kernel(const InflationSeries& series, Complex z, Complex w, Complex t, Complex s) {
  const auto& dom = series.domain();
  if (!dom.contains(z, w) || !dom.contains(t, s)) throw InvalidInput("hartogs_kernel: point outside the domain");
  const TruncationPolicy& policy = series.policy();
  const Complex x = w * std::conj(s);
  const double ax = std::abs(x);

  KernelEvaluation out;
  std::size_t small = 0;
  double prev_bound = 0.0;
  Complex xm = 1.0;
  double axm = 1.0;
  for (std::size_t m = 0; m < policy.max_terms; ++m) {
    const int mi = static_cast<int>(m);
    const double c = (2.0 * mi + 2.0) / (2.0 * kPi);
    const KernelEvaluation k = series.K(mi, z, t);
    out.value += c * xm * k.value;
    out.tail_bound += c * axm * k.tail_bound;
    out.terms_used = m + 1;
    if (ax == 0.0) return out;

    const double kzz = series.K(mi, z, z).value.real();
    const double ktt = z == t ? kzz : series.K(mi, t, t).value.real();
    // |K_m(z,t)| <= sqrt(K_m(z,z) K_m(t,t)).
    const double bound = c * axm * std::sqrt(kzz * ktt);
    small = bound < policy.tail_tol ? small + 1 : 0;
    if (small >= policy.consecutive_small) {
      const double q = prev_bound > 0.0 ? bound / prev_bound : 0.0;
      if (!(q < 1.0)) throw NonConvergence("hartogs_kernel: outer terms are not decaying");
      out.tail_bound += bound * q / (1.0 - q);
      return out;
    }
    prev_bound = bound;
    xm *= x;
    axm *= ax;
  }
  throw NonConvergence("hartogs_kernel: outer series did not reach tail_tol; points too close to the boundary in w");
}

double slice_identity_defect(const InflationSeries& series, Complex z, Complex t) {
  const KernelEvaluation lhs = hartogs_kernel(series, z, 0.0, t, 0.0);
  MomentTable fresh(*series.domain().radial());
  const KernelEvaluation rhs = radial_kernel(fresh, z, t, series.policy());
  return std::abs(kPi * lhs.value - rhs.value);
}

double lifted_projection_defect(const InflationSeries& series, int a, int b, Complex z) {
  if (a < 0 || b < 0) throw InvalidInput("lifted_projection_defect: exponents must be >= 0");
  const MomentTable& mu = series.table(1.0);
  auto f = [a, b](Complex t) { return std::pow(t, a) * std::pow(std::conj(t), b); };
  // B[(z,0),(t,0)] = K_0(z,t) / pi, weighted by the s-disc area pi mu(t):
  // the two factors of pi cancel and the integral is the K_0 projection.
  const Complex lhs = project_numeric(mu, f, z, series.policy());
  const MonomialProjection pm = project_monomial(mu, a, b);
  const Complex rhs = pm.coefficient * std::pow(z, pm.degree);
  return std::abs(lhs - rhs);
}

DegreeSelection degree_selection_defect(const InflationSeries& series, int a, int b, int j, Complex z,
                                        int kmax_extra) {
  if (a < 0 || b < 0 || j < 0 || kmax_extra < 0) throw InvalidInput("degree_selection_defect: negative order");
  if (!(std::abs(z) < 1.0)) throw InvalidInput("degree_selection_defect: need |z| < 1");
  constexpr int kAngles = 64;
  DegreeSelection out;
  for (int k = 0; k <= j + kmax_extra; ++k) {
    // int_0^{2 pi} e^{i (j - k) phi} dphi by the trapezoid rule.
    Complex ang = 0.0;
    for (int l = 0; l < kAngles; ++l) ang += std::polar(1.0, (j - k) * 2.0 * kPi * l / kAngles);
    ang *= 2.0 * kPi / kAngles;
    // int_{|s| < rho} conj(s)^k s^j dA = ang rho^{k+j+2} / (k + j + 2) with rho^2 = mu(t); the
    // t-integral against K_k(z, t) t^a conj(t)^b leaves Phi_{mu^{(k+j+2)/2}}(a) / Phi_{mu^{k+1}}(a - b).
    Complex coef = 0.0;
    if (a >= b) {
      const double e = 0.5 * (k + j + 2);
      const double log_ratio = series.table(e).log_value(a) - series.table(k + 1.0).log_value(a - b);
      coef = (2.0 * k + 2.0) / (2.0 * kPi) * ang / static_cast<double>(k + j + 2) * std::exp(log_ratio) *
             std::pow(z, a - b);
    }
    if (k == j) {
      Complex want = 0.0;
      if (a >= b) {
        const MonomialProjection pm = project_monomial(series.table(j + 1.0), a, b);
        want = pm.coefficient * std::pow(z, pm.degree);
      }
      out.on_degree = std::abs(coef - want);
    } else {
      out.off_degree = std::max(out.off_degree, std::abs(coef));
    }
  }
  return out;
}

double factorized_hartogs_defect(const HoloWeight& g, Complex z, Complex w, Complex t, Complex s, int N) {
  const Complex gz = g.g(z);
  const Complex gt = g.g(t);
  const Complex u = w / gz;
  const Complex v = s / gt;
  if (!(std::abs(u) < 0.95) || !(std::abs(v) < 0.95))
    throw InvalidInput("factorized_hartogs_defect: need |w / g(z)|, |s / g(t)| < 0.95");
  const Complex b1 = disc_kernel(z, t);
  const Complex x = w * std::conj(s);

  Complex lhs = 0.0;
  Complex xm = 1.0;
  for (int m = 0; m < 4000; ++m) {
    Complex km;
    if (m <= kFactorizedGramOrders) {
      km = build_gram_kernel(g.pow(m + 1), N)(z, t);
    } else {
      km = b1 / std::pow(gz * std::conj(gt), m + 1);
    }
    const Complex term = (2.0 * m + 2.0) / (2.0 * kPi) * xm * km;
    lhs += term;
    if (x == 0.0) break;
    if (m > kFactorizedGramOrders && std::abs(term) < 1e-17 * std::max(1.0, std::abs(lhs))) break;
    xm *= x;
  }
  const Complex rhs = b1 / (gz * std::conj(gt)) * disc_kernel(u, v);
  return std::abs(lhs - rhs);
}

}  // namespace bergman
