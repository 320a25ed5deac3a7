#pragma once

// Monomial projections, monomial L^p norms and the blow-up ratio
// R_k(m) = ||B(z^{km} zbar^m)||_p^p / ||z^{km} zbar^m||_p^p for radial weights.

#include <span>
#include <string>
#include <vector>

#include "bergman/moments.hpp"

namespace bergman {

struct MonomialProjection {
  double coefficient = 0.0;
  int degree = 0;
};

/// B(z^a zbar^b) = Phi(a) / Phi(a - b) z^{a - b} for a >= b, and 0 otherwise.
MonomialProjection project_monomial(const MomentTable& table, int a, int b);
MonomialProjection project_monomial(const RadialWeight& w, int a, int b);

/// log ||z^a zbar^b||_p^p = log(2 pi Phi(p (a + b) / 2)).
double log_lp_norm_monomial(const MomentTable& table, int a, int b, double p);
double lp_norm_monomial(const MomentTable& table, int a, int b, double p);
double lp_norm_monomial(const RadialWeight& w, int a, int b, double p);

/// Smallest integer strictly greater than (2 + p) / (2 - p), for 1 < p < 2.
int min_k(double p);

/// log R_k(m) from four moments:
/// p log(Phi(km) / Phi((k-1)m)) + log Phi(p/2 (k-1) m) - log Phi(p/2 (k+1) m).
double log_ratio(const MomentTable& table, double p, int k, int m);
double ratio(const MomentTable& table, double p, int k, int m);
double ratio(const RadialWeight& w, double p, int k, int m);

struct RatioPoint {
  int m = 0;
  double R = 0.0;
  double log_R = 0.0;
  /// Empty when the point was computed; otherwise the failure message.
  std::string error;
};

struct RatioSeries {
  std::string weight_id;
  double p = 0.0;
  int k = 0;
  std::vector<RatioPoint> points;
};

/// Pointwise ratio over m_grid in the given order; a failing point is
/// recorded and the sweep continues.
RatioSeries ratio_sweep(const MomentTable& table, double p, int k, std::span<const int> m_grid);
RatioSeries ratio_sweep(const RadialWeight& w, double p, int k, std::span<const int> m_grid);

/// {1, 2, 4, ..., 2^j <= m_max}.
std::vector<int> dyadic_grid(int m_max);

}  // namespace bergman
