#pragma once

// The A_p^+ quantity |D n H|^{-p} (int mu) (int mu^{1/(1-p)})^{p-1} over
// half-discs D n H centred on the real axis, and sweeps over disc families.

#include <optional>
#include <string>
#include <vector>

#include "bergman/weights.hpp"

namespace bergman {

struct ApValue {
  bool divergent = false;
  double value = 0.0;
  /// Absolute error estimate of value; 0 when divergent.
  double error = 0.0;
};

/// Default accuracy of the two half-disc integrals.
inline constexpr Tolerance kApTolerance{0.0, 1e-9};

/// Throws NonConvergence on numeric failure; a divergent integral is a
/// result, not an error. Power-form weights with a factor centred in the
/// closed half-disc whose exponent (or conjugate exponent) is <= -2 are
/// declared divergent without quadrature.
ApValue ap_quantity(const HalfPlaneWeight& mu, double p, const Disc& d, Tolerance tol = kApTolerance);

enum class DiscCase { Case1, Case2, Case3 };

/// Case1: |x0| < 3R and R < 2; Case2: |x0| < 3R and R >= 2; Case3 otherwise.
DiscCase case_classifier(const Disc& d);
const char* to_string(DiscCase c);

/// Centres {0, +-2^j}, radii {2^j}, j in [-depth, depth]; ordered by radius,
/// then centre.
std::vector<Disc> disc_family(int depth);

struct ApEntry {
  Disc disc;
  DiscCase disc_case = DiscCase::Case1;
  ApValue value;
  /// Non-empty when the evaluation failed numerically.
  std::string error;
};

struct ApReport {
  std::string weight_id;
  double p = 0.0;
  std::vector<ApEntry> per_disc;
  bool divergent = false;
  /// Maximum over finite entries; meaningful when some entry is finite.
  double supremum = 0.0;
  std::optional<Disc> argmax;
};

/// Evaluates every disc (in parallel over `threads`, 0 = hardware) and
/// reduces deterministically in the order of `discs`.
ApReport ap_sweep(const HalfPlaneWeight& mu, double p, const std::vector<Disc>& discs, Tolerance tol = kApTolerance,
                  unsigned threads = 0);

/// |zeta|^{(4-2p)/(p0-2)} |zeta + i|^{(2p-4)(p0-1)/(p0-2)}, the comparable
/// form of |F|^{2-p} for the boundary-zero example.
HalfPlaneWeight appendixA_weight(double p0, double p);

}  // namespace bergman
