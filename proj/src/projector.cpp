#include "bergman/projector.hpp"

#include <numbers>

namespace bergman {

namespace {

void check_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput("need 1 < p < infinity");
}

}  // namespace

MonomialProjection project_monomial(const MomentTable& table, int a, int b) {
  if (a < 0 || b < 0) throw InvalidInput("project_monomial: exponents must be >= 0");
  if (a < b) return {0.0, 0};
  if (b == 0) return {1.0, a};
  return {std::exp(table.log_value(a) - table.log_value(a - b)), a - b};
}

MonomialProjection project_monomial(const RadialWeight& w, int a, int b) {
  MomentTable table(w);
  return project_monomial(table, a, b);
}

double log_lp_norm_monomial(const MomentTable& table, int a, int b, double p) {
  check_p(p);
  if (a < 0 || b < 0) throw InvalidInput("lp_norm_monomial: exponents must be >= 0");
  return std::log(2.0 * std::numbers::pi) + table.log_value(0.5 * p * (a + b));
}

double lp_norm_monomial(const MomentTable& table, int a, int b, double p) {
  return std::exp(log_lp_norm_monomial(table, a, b, p));
}

double lp_norm_monomial(const RadialWeight& w, int a, int b, double p) {
  MomentTable table(w);
  return lp_norm_monomial(table, a, b, p);
}

int min_k(double p) {
  if (!(p > 1.0) || !(p < 2.0)) throw InvalidInput("min_k: need 1 < p < 2");
  const double bound = (2.0 + p) / (2.0 - p);
  // Decimal p such as 1.9 is not exact in binary; an integer bound must not
  // round down to the integer below.
  const double nearest = std::round(bound);
  if (std::abs(bound - nearest) <= 1e-9 * nearest) return static_cast<int>(nearest) + 1;
  return static_cast<int>(std::floor(bound)) + 1;
}

double log_ratio(const MomentTable& table, double p, int k, int m) {
  check_p(p);
  if (k < 1 || m < 1) throw InvalidInput("ratio: need k >= 1 and m >= 1");
  const double km = static_cast<double>(k) * m;
  const double k1m = static_cast<double>(k - 1) * m;
  return p * (table.log_value(km) - table.log_value(k1m)) + table.log_value(0.5 * p * k1m) -
         table.log_value(0.5 * p * (k + 1) * static_cast<double>(m));
}

double ratio(const MomentTable& table, double p, int k, int m) { return std::exp(log_ratio(table, p, k, m)); }

double ratio(const RadialWeight& w, double p, int k, int m) {
  MomentTable table(w);
  return ratio(table, p, k, m);
}

RatioSeries ratio_sweep(const MomentTable& table, double p, int k, std::span<const int> m_grid) {
  check_p(p);
  RatioSeries out;
  out.weight_id = table.weight_id();
  out.p = p;
  out.k = k;
  for (int m : m_grid) {
    RatioPoint pt;
    pt.m = m;
    try {
      pt.log_R = log_ratio(table, p, k, m);
      pt.R = std::exp(pt.log_R);
    } catch (const Error& e) {
      pt.R = std::numeric_limits<double>::quiet_NaN();
      pt.log_R = std::numeric_limits<double>::quiet_NaN();
      pt.error = e.what();
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

RatioSeries ratio_sweep(const RadialWeight& w, double p, int k, std::span<const int> m_grid) {
  MomentTable table(w);
  return ratio_sweep(table, p, k, m_grid);
}

std::vector<int> dyadic_grid(int m_max) {
  if (m_max < 1) throw InvalidInput("dyadic_grid: need m_max >= 1");
  std::vector<int> out;
  for (long m = 1; m <= m_max; m *= 2) out.push_back(static_cast<int>(m));
  return out;
}

}  // namespace bergman
