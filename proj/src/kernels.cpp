#include "bergman/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numbers>

namespace bergman {

namespace {

constexpr double kPi = std::numbers::pi;

void check_modulus(Complex z, double max_modulus, const char* what) {
  if (!(std::abs(z) <= max_modulus)) throw InvalidInput(std::string(what) + ": point outside the allowed radius");
}

Complex poly_eval(const std::vector<Complex>& c, Complex z) {
  Complex v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + *it;
  return v;
}

Eigen::VectorXcd monomials(Complex z, int N) {
  Eigen::VectorXcd v(N + 1);
  Complex p = 1.0;
  for (int n = 0; n <= N; ++n) {
    v(n) = p;
    p *= z;
  }
  return v;
}

// M(p, q) from samples of mu on a polar tensor grid.
Eigen::MatrixXcd polar_grid_moments(const DiscWeight& mu, int P, int Q, std::size_t nr, std::size_t nt) {
  const GaussLegendre gl = gauss_legendre(nr, 0.0, 1.0);
  const int dmin = -Q;
  const int dmax = P;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(P + 1, Q + 1);
  std::vector<Complex> unit(nt);
  for (std::size_t k = 0; k < nt; ++k) unit[k] = std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / nt);
  std::vector<double> samples(nt);
  std::vector<Complex> c(dmax - dmin + 1);
  for (std::size_t i = 0; i < nr; ++i) {
    const double r = gl.nodes[i];
    for (std::size_t k = 0; k < nt; ++k) samples[k] = mu(r * unit[k]);
    for (int d = dmin; d <= dmax; ++d) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < nt; ++k) {
        const std::size_t idx = static_cast<std::size_t>((static_cast<long>(d) * static_cast<long>(k)) %
                                                         static_cast<long>(nt) + static_cast<long>(nt)) % nt;
        acc += samples[k] * unit[idx];
      }
      c[d - dmin] = acc * (2.0 * kPi / static_cast<double>(nt));
    }
    for (int p = 0; p <= P; ++p) {
      for (int q = 0; q <= Q; ++q) M(p, q) += gl.weights[i] * std::pow(r, p + q + 1) * c[p - q - dmin];
    }
  }
  return M;
}

void check_degrees(int P, int Q) {
  if (P < 0 || Q < 0 || P > 4 * kMaxGramDegree || Q > 4 * kMaxGramDegree)
    throw InvalidInput("mixed_moments: degrees out of range");
}

}  // namespace

Complex disc_kernel(Complex z, Complex w) {
  const Complex x = z * std::conj(w);
  if (!(std::abs(x) < 1.0)) throw InvalidInput("disc_kernel: need |z conj(w)| < 1");
  const Complex d = 1.0 - x;
  return 1.0 / (kPi * d * d);
}

KernelEvaluation radial_kernel(const MomentTable& table, Complex z, Complex w, const TruncationPolicy& policy,
                               double max_modulus) {
  policy.validate();
  if (!(max_modulus > 0.0) || !(max_modulus < 1.0)) throw InvalidInput("radial_kernel: need 0 < max_modulus < 1");
  check_modulus(z, max_modulus, "radial_kernel");
  check_modulus(w, max_modulus, "radial_kernel");
  const Complex x = z * std::conj(w);
  const double ax = std::abs(x);
  const double log_ax = ax > 0.0 ? std::log(ax) : 0.0;
  const double arg = std::arg(x);
  const double log_2pi = std::log(2.0 * kPi);

  KernelEvaluation out;
  std::size_t small = 0;
  double prev = 0.0;
  double last = 0.0;
  double q_obs = 0.0;
  for (std::size_t n = 0; n < policy.max_terms; ++n) {
    Complex t = 0.0;
    if (n == 0 || ax > 0.0) {
      const double lm = static_cast<double>(n) * log_ax - log_2pi - table.log_value(static_cast<double>(n));
      t = std::polar(std::exp(lm), static_cast<double>(n) * arg);
    }
    out.value += t;
    out.terms_used = n + 1;
    last = std::abs(t);
    if (n > 0 && prev > 0.0) q_obs = last / prev;
    prev = last;
    small = last < policy.tail_tol ? small + 1 : 0;
    if (small >= policy.consecutive_small) {
      const double q = std::max(ax, q_obs);
      if (!(q < 1.0)) throw NonConvergence("radial_kernel: terms are not decaying geometrically");
      out.tail_bound = last * q / (1.0 - q);
      return out;
    }
  }
  throw NonConvergence("radial_kernel: max_terms reached before the terms fell below tail_tol");
}

KernelEvaluation radial_kernel(const RadialWeight& wt, Complex z, Complex w, const TruncationPolicy& policy,
                               double max_modulus) {
  MomentTable table(wt);
  return radial_kernel(table, z, w, policy, max_modulus);
}

Complex halfplane_kernel(Complex zeta, Complex nu) {
  if (!(zeta.imag() > 0.0) || !(nu.imag() > 0.0)) throw InvalidInput("halfplane_kernel: need Im > 0");
  return cayley_derivative(zeta) * disc_kernel(cayley(zeta), cayley(nu)) * std::conj(cayley_derivative(nu));
}

Complex halfplane_kernel_closed_form(Complex zeta, Complex nu) {
  if (!(zeta.imag() > 0.0) || !(nu.imag() > 0.0)) throw InvalidInput("halfplane_kernel: need Im > 0");
  const Complex d = zeta - std::conj(nu);
  return -1.0 / (kPi * d * d);
}

Eigen::MatrixXcd mixed_moments(const DiscWeight& mu, int P, int Q, double tol) {
  check_degrees(P, Q);
  if (!(tol > 0.0)) throw InvalidInput("mixed_moments: tol must be > 0");
  std::size_t nr = 32;
  std::size_t nt = 64;
  while (nt < static_cast<std::size_t>(2 * (P + Q) + 16)) nt *= 2;
  Eigen::MatrixXcd prev = polar_grid_moments(mu, P, Q, nr, nt);
  for (int level = 0; level < 5; ++level) {
    nr *= 2;
    nt *= 2;
    Eigen::MatrixXcd cur = polar_grid_moments(mu, P, Q, nr, nt);
    const double change = (cur - prev).cwiseAbs().maxCoeff();
    const double scale = cur.cwiseAbs().maxCoeff();
    if (change <= std::max(tol, kToleranceFloor) * scale) return cur;
    prev = std::move(cur);
  }
  throw NonConvergence("mixed_moments: polar grid refinement did not converge for " + mu.id);
}

Eigen::MatrixXcd mixed_moments(const HoloWeight& mu, int P, int Q, double tol) {
  check_degrees(P, Q);
  if (!mu.coefficients()) return mixed_moments(as_disc_weight(mu), P, Q, tol);
  const auto& g = *mu.coefficients();
  const int d = static_cast<int>(g.size()) - 1;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(P + 1, Q + 1);
  // int_D z^{p+j} conj(z)^{q+k} dA = pi / (p + j + 1) when p + j = q + k.
  for (int p = 0; p <= P; ++p) {
    for (int q = 0; q <= Q; ++q) {
      Complex acc = 0.0;
      for (int j = 0; j <= d; ++j) {
        const int k = p + j - q;
        if (k < 0 || k > d) continue;
        acc += g[j] * std::conj(g[k]) * (kPi / (p + j + 1));
      }
      M(p, q) = acc;
    }
  }
  return M;
}

Eigen::MatrixXcd mixed_moments(const RadialWeight& mu, int P, int Q) {
  check_degrees(P, Q);
  MomentTable table(mu);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(P + 1, Q + 1);
  for (int n = 0; n <= std::min(P, Q); ++n) M(n, n) = 2.0 * kPi * table.value(n);
  return M;
}

GramKernel::GramKernel(std::string weight_id, Eigen::MatrixXcd gram) : weight_id_(std::move(weight_id)) {
  if (gram.rows() != gram.cols() || gram.rows() == 0) throw InvalidInput("GramKernel: need a non-empty square matrix");
  gram_ = 0.5 * (gram + gram.adjoint());
  const Eigen::Index n = gram_.rows();
  scale_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = gram_(i, i).real();
    if (!(d > 0.0)) throw IllConditioned("GramKernel: non-positive diagonal entry", std::numeric_limits<double>::infinity());
    scale_(i) = 1.0 / std::sqrt(d);
  }
  const Eigen::MatrixXcd scaled = scale_.asDiagonal() * gram_ * scale_.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(scaled, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(condition_ <= kMaxGramCondition))
    throw IllConditioned("GramKernel: condition number of " + weight_id_ + " exceeds the limit", condition_);
  llt_.compute(scaled);
  if (llt_.info() != Eigen::Success)
    throw IllConditioned("GramKernel: Cholesky factorization failed", std::numeric_limits<double>::infinity());
}

Eigen::VectorXcd GramKernel::whitened(Complex z) const {
  Eigen::VectorXcd v = scale_.asDiagonal() * monomials(z, degree());
  llt_.matrixL().solveInPlace(v);
  return v;
}

Complex GramKernel::operator()(Complex z, Complex w) const { return whitened(w).dot(whitened(z)); }

Eigen::VectorXcd GramKernel::project_coefficients(const Eigen::VectorXcd& b) const {
  if (b.size() != gram_.rows()) throw InvalidInput("GramKernel: coefficient vector has the wrong length");
  const Eigen::VectorXcd rhs = scale_.asDiagonal() * b.conjugate();
  const Eigen::VectorXcd x = scale_.asDiagonal() * llt_.solve(rhs);
  return x.conjugate();
}

namespace {

void check_gram_degree(int N) {
  if (N < 0 || N > kMaxGramDegree) throw InvalidInput("build_gram_kernel: need 0 <= N <= 40");
}

}  // namespace

GramKernel build_gram_kernel(const DiscWeight& mu, int N, double tol) {
  check_gram_degree(N);
  return GramKernel(mu.id, mixed_moments(mu, N, N, tol));
}

GramKernel build_gram_kernel(const HoloWeight& mu, int N, double tol) {
  check_gram_degree(N);
  return GramKernel(mu.id(), mixed_moments(mu, N, N, tol));
}

GramKernel build_gram_kernel(const RadialWeight& mu, int N) {
  check_gram_degree(N);
  return GramKernel(mu.id(), mixed_moments(mu, N, N));
}

double operator_relation_check(const HoloWeight& g, std::span<const MonomialTerm> f, std::span<const Complex> points,
                               int N) {
  if (!g.coefficients()) throw InvalidInput("operator_relation_check: g must be a polynomial");
  check_gram_degree(N);
  int max_a = 0;
  int max_b = 0;
  for (const auto& t : f) {
    if (t.a < 0 || t.b < 0 || 2 * t.a > N || 2 * t.b > N)
      throw InvalidInput("operator_relation_check: need exponents <= N / 2");
    max_a = std::max(max_a, t.a);
    max_b = std::max(max_b, t.b);
  }
  for (Complex z : points) check_modulus(z, 1.0 - 1e-12, "operator_relation_check");

  const GramKernel K = build_gram_kernel(g, N);
  const Eigen::MatrixXcd M = mixed_moments(g, max_a, max_b + N);
  // b_n = <f, z^n>_omega = sum c_ab M(a, b + n).
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(N + 1);
  for (int n = 0; n <= N; ++n) {
    for (const auto& t : f) b(n) += t.c * M(t.a, t.b + n);
  }
  const Eigen::VectorXcd coef = K.project_coefficients(b);

  const auto& gc = *g.coefficients();
  double worst = 0.0;
  for (Complex z : points) {
    const Complex lhs = poly_eval(gc, z) * coef.cwiseProduct(monomials(z, N)).sum();
    // B_1(z^P conj(z)^Q) = (P - Q + 1) / (P + 1) z^{P - Q} for P >= Q.
    Complex rhs = 0.0;
    for (const auto& t : f) {
      for (std::size_t j = 0; j < gc.size(); ++j) {
        const int P = t.a + static_cast<int>(j);
        if (P < t.b) continue;
        rhs += t.c * gc[j] * (static_cast<double>(P - t.b + 1) / (P + 1)) * std::pow(z, P - t.b);
      }
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double factorization_defect(const HoloWeight& g, const GramKernel& K, std::span<const Complex> zs,
                            std::span<const Complex> ws) {
  double worst = 0.0;
  for (Complex z : zs) {
    for (Complex w : ws) {
      const Complex lhs = g.g(z) * K(z, w) * std::conj(g.g(w));
      worst = std::max(worst, std::abs(lhs - disc_kernel(z, w)));
    }
  }
  return worst;
}

Complex project_numeric(const MomentTable& table, const std::function<Complex(Complex)>& f, Complex z,
                        const TruncationPolicy& policy) {
  policy.validate();
  if (!(std::abs(z) < 1.0)) throw InvalidInput("project_numeric: need |z| < 1");
  const RadialWeight& wt = table.weight();
  std::vector<double> bp{0.0};
  for (int k = 1; k <= 30; ++k) bp.push_back(1.0 - std::ldexp(1.0, -k));
  bp.push_back(1.0);

  const double az = std::abs(z);
  double f_max = 0.0;
  Complex sum = 0.0;
  std::size_t small = 0;
  for (std::size_t n = 0; n < policy.max_terms; ++n) {
    const std::size_t nt = std::max<std::size_t>(64, 4 * (n + 1));
    std::vector<Complex> rot(nt);
    for (std::size_t k = 0; k < nt; ++k) rot[k] = std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / nt);
    // <f, w^n>_mu = int_0^1 r^{n+1} lambda(r) int_0^{2 pi} f(r e^{i theta}) e^{-i n theta} dtheta dr.
    auto radial = [&](double r) -> Complex {
      const double lam = wt(r);
      if (lam == 0.0 || r == 0.0) return 0.0;
      Complex acc = 0.0;
      for (std::size_t k = 0; k < nt; ++k) {
        const Complex v = f(r * rot[k]);
        f_max = std::max(f_max, std::abs(v));
        acc += v * std::conj(rot[(n * k) % nt]);
      }
      return acc * (2.0 * kPi / static_cast<double>(nt)) * std::pow(r, static_cast<double>(n) + 1.0) * lam;
    };
    const double norm = 2.0 * kPi * table.value(static_cast<double>(n));
    const auto b = integrate<detail::GaussKronrod21>(radial, std::span<const double>(bp),
                                                     AdaptiveOptions{{1e-13 * norm, 1e-11}, 4000});
    const Complex term = std::pow(z, static_cast<int>(n)) * b.value / norm;
    sum += term;
    // A priori bound on the term from |<f, w^n>| <= 2 pi f_max Phi(n / 2).
    const double bound =
        n == 0 ? std::abs(term)
               : std::pow(az, static_cast<double>(n)) * f_max *
                     std::exp(table.log_value(0.5 * static_cast<double>(n)) - table.log_value(static_cast<double>(n)));
    small = bound < policy.tail_tol ? small + 1 : 0;
    if (n > 0 && small >= policy.consecutive_small) return sum;
  }
  throw NonConvergence("project_numeric: max_terms reached");
}

Complex project_numeric(const RadialWeight& wt, const std::function<Complex(Complex)>& f, Complex z,
                        const TruncationPolicy& policy) {
  MomentTable table(wt);
  return project_numeric(table, f, z, policy);
}

}  // namespace bergman
