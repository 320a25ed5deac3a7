#include "bergman/bekolle.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace bergman {

namespace {

bool in_closed_half_disc(Complex c, const Disc& d) {
  return c.imag() >= 0.0 && std::abs(c - Complex(d.x0, 0.0)) <= d.R;
}

// A factor |zeta - c|^e with c in the closed region and e <= -2 makes the
// integral infinite.
bool diverges_by_exponent(const HalfPlaneWeight& w, const Disc& d) {
  if (!w.is_power_form()) return false;
  for (const auto& f : w.factors()) {
    if (f.exponent <= -2.0 && in_closed_half_disc(f.centre, d)) return true;
  }
  return false;
}

}  // namespace

ApValue ap_quantity(const HalfPlaneWeight& mu, double p, const Disc& d, Tolerance tol) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput("ap_quantity: need p > 1");
  if (!(d.R > 0.0) || !std::isfinite(d.R) || !std::isfinite(d.x0)) throw InvalidInput("ap_quantity: need R > 0");
  const HalfPlaneWeight dual = mu.power(1.0 / (1.0 - p));
  if (diverges_by_exponent(mu, d) || diverges_by_exponent(dual, d)) return {true, 0.0, 0.0};

  QuadratureResult<double> i1;
  QuadratureResult<double> i2;
  try {
    i1 = integrate_half_disc([&mu](Complex z) { return mu(z); }, d, tol);
    i2 = integrate_half_disc([&dual](Complex z) { return dual(z); }, d, tol);
  } catch (const DivergentIntegral&) {
    return {true, 0.0, 0.0};
  }
  if (!(i1.value > 0.0) || !(i2.value > 0.0) || !std::isfinite(i1.value) || !std::isfinite(i2.value))
    throw NonConvergence("ap_quantity: non-positive or non-finite integral");

  const double log_q = -p * std::log(half_disc_area(d)) + std::log(i1.value) + (p - 1.0) * std::log(i2.value);
  ApValue out;
  out.value = std::exp(log_q);
  const double rel = i1.abs_error_estimate / i1.value + (p - 1.0) * i2.abs_error_estimate / i2.value;
  out.error = rel * out.value;
  return out;
}

DiscCase case_classifier(const Disc& d) {
  if (std::abs(d.x0) < 3.0 * d.R) return d.R < 2.0 ? DiscCase::Case1 : DiscCase::Case2;
  return DiscCase::Case3;
}

const char* to_string(DiscCase c) {
  switch (c) {
    case DiscCase::Case1: return "Case1";
    case DiscCase::Case2: return "Case2";
    case DiscCase::Case3: return "Case3";
  }
  return "";
}

std::vector<Disc> disc_family(int depth) {
  if (depth < 0 || depth > 60) throw InvalidInput("disc_family: need 0 <= depth <= 60");
  std::vector<double> centres{0.0};
  for (int j = -depth; j <= depth; ++j) {
    centres.push_back(std::ldexp(1.0, j));
    centres.push_back(-std::ldexp(1.0, j));
  }
  std::sort(centres.begin(), centres.end());
  std::vector<Disc> out;
  for (int j = -depth; j <= depth; ++j) {
    for (double c : centres) out.push_back({c, std::ldexp(1.0, j)});
  }
  return out;
}

ApReport ap_sweep(const HalfPlaneWeight& mu, double p, const std::vector<Disc>& discs, Tolerance tol,
                  unsigned threads) {
  if (!(p > 1.0)) throw InvalidInput("ap_sweep: need p > 1");
  ApReport rep;
  rep.weight_id = mu.id();
  rep.p = p;
  rep.per_disc.resize(discs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < discs.size(); i = next++) {
      ApEntry& e = rep.per_disc[i];
      e.disc = discs[i];
      e.disc_case = case_classifier(discs[i]);
      try {
        e.value = ap_quantity(mu, p, discs[i], tol);
      } catch (const Error& err) {
        e.error = err.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(discs.size(), 1)));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  for (const auto& e : rep.per_disc) {
    if (!e.error.empty()) continue;
    if (e.value.divergent) {
      rep.divergent = true;
      continue;
    }
    if (!rep.argmax || e.value.value > rep.supremum) {
      rep.supremum = e.value.value;
      rep.argmax = e.disc;
    }
  }
  return rep;
}

HalfPlaneWeight appendixA_weight(double p0, double p) {
  if (!(p0 > 2.0) || !std::isfinite(p0)) throw InvalidInput("appendixA_weight: need p0 > 2");
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidInput("appendixA_weight: need p > 1");
  const double e0 = (4.0 - 2.0 * p) / (p0 - 2.0);
  const double e1 = (2.0 * p - 4.0) * (p0 - 1.0) / (p0 - 2.0);
  return HalfPlaneWeight::power_form("appendixA:p0=" + format_number(p0) + ",p=" + format_number(p), 1.0,
                                     {{Complex(0.0, 0.0), e0}, {Complex(0.0, -1.0), e1}});
}

}  // namespace bergman
