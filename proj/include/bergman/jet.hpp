#pragma once

// Truncated Taylor series ("jets") for exact derivatives of the closed-form
// weights. Coefficient k holds f^(k)(x0) / k!.

#include <array>
#include <cmath>
#include <cstddef>

namespace bergman {

template <class Scalar, std::size_t Order>
struct Jet {
  std::array<Scalar, Order + 1> c{};

  static Jet constant(Scalar v) {
    Jet j;
    j.c[0] = v;
    return j;
  }
  /// The identity function expanded at x0.
  static Jet variable(Scalar x0) {
    Jet j;
    j.c[0] = x0;
    if constexpr (Order >= 1) j.c[1] = Scalar(1);
    return j;
  }

  /// k-th derivative at the expansion point.
  Scalar derivative(std::size_t k) const {
    Scalar fact(1);
    for (std::size_t i = 2; i <= k; ++i) fact *= Scalar(i);
    return c[k] * fact;
  }

  Jet& operator+=(const Jet& o) {
    for (std::size_t k = 0; k <= Order; ++k) c[k] += o.c[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t k = 0; k <= Order; ++k) c[k] -= o.c[k];
    return *this;
  }
  Jet& operator*=(Scalar s) {
    for (auto& v : c) v *= s;
    return *this;
  }
};

template <class S, std::size_t N>
Jet<S, N> operator+(Jet<S, N> a, const Jet<S, N>& b) {
  return a += b;
}
template <class S, std::size_t N>
Jet<S, N> operator-(Jet<S, N> a, const Jet<S, N>& b) {
  return a -= b;
}
template <class S, std::size_t N>
Jet<S, N> operator*(Jet<S, N> a, S s) {
  return a *= s;
}
template <class S, std::size_t N>
Jet<S, N> operator*(S s, Jet<S, N> a) {
  return a *= s;
}
template <class S, std::size_t N>
Jet<S, N> operator+(Jet<S, N> a, S s) {
  a.c[0] += s;
  return a;
}
template <class S, std::size_t N>
Jet<S, N> operator+(S s, Jet<S, N> a) {
  a.c[0] += s;
  return a;
}

template <class S, std::size_t N>
Jet<S, N> operator*(const Jet<S, N>& a, const Jet<S, N>& b) {
  Jet<S, N> out;
  for (std::size_t k = 0; k <= N; ++k) {
    S acc(0);
    for (std::size_t j = 0; j <= k; ++j) acc += a.c[j] * b.c[k - j];
    out.c[k] = acc;
  }
  return out;
}

template <class S, std::size_t N>
Jet<S, N> exp(const Jet<S, N>& a) {
  Jet<S, N> b;
  using std::exp;
  b.c[0] = exp(a.c[0]);
  for (std::size_t k = 1; k <= N; ++k) {
    S acc(0);
    for (std::size_t j = 1; j <= k; ++j) acc += S(j) * a.c[j] * b.c[k - j];
    b.c[k] = acc / S(k);
  }
  return b;
}

template <class S, std::size_t N>
Jet<S, N> log(const Jet<S, N>& a) {
  Jet<S, N> b;
  using std::log;
  b.c[0] = log(a.c[0]);
  for (std::size_t k = 1; k <= N; ++k) {
    S acc(0);
    for (std::size_t j = 1; j < k; ++j) acc += S(j) * b.c[j] * a.c[k - j];
    b.c[k] = (a.c[k] - acc / S(k)) / a.c[0];
  }
  return b;
}

/// a^t for real t; requires a.c[0] > 0 unless t is a non-negative integer.
template <class S, std::size_t N>
Jet<S, N> pow(const Jet<S, N>& a, S t) {
  Jet<S, N> b;
  using std::pow;
  b.c[0] = pow(a.c[0], t);
  for (std::size_t k = 1; k <= N; ++k) {
    S acc(0);
    for (std::size_t j = 1; j <= k; ++j) acc += (t * S(j) - S(k - j)) * a.c[j] * b.c[k - j];
    b.c[k] = acc / (S(k) * a.c[0]);
  }
  return b;
}

}  // namespace bergman
