#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "pmelab/params.hpp"

namespace pme {

/// Pochhammer symbol (rising factorial): (s)_0 = 1, (s)_j = s(s+1)...(s+j-1).
inline double pochhammer(double s, int j) {
  if (j < 0) throw std::invalid_argument("pochhammer: j >= 0 required");
  double v = 1.0;
  for (int i = 0; i < j; ++i) v *= s + i;
  return v;
}

inline bool near_nonpositive_integer(double c, double tol = 1e-12) {
  const double r = std::round(c);
  return r <= 0.0 && std::abs(c - r) <= tol;
}

/// Parameters of the Gauss series F(a,b;c;z); c must not be a non-positive
/// integer (checked to 1e-12 of the nearest integer).
struct HypParams {
  double a, b, c;
  HypParams(double a_, double b_, double c_) : a(a_), b(b_), c(c_) {
    if (near_nonpositive_integer(c))
      throw std::domain_error("HypParams: c must not be a non-positive integer");
  }
};

/// Terminating hypergeometric polynomial F(-k, b; c; z), evaluated by the
/// exact recursive term ratio t_{j+1} = t_j (j-k)(b+j) / ((c+j)(j+1)) z.
inline double hyp_poly(int k, double b, double c, double z) {
  if (k < 0) throw std::invalid_argument("hyp_poly: k >= 0 required");
  if (near_nonpositive_integer(c))
    throw std::domain_error("hyp_poly: c must not be a non-positive integer");
  double sum = 1.0, term = 1.0;
  for (int j = 0; j < k; ++j) {
    term *= (static_cast<double>(j) - k) * (b + j) / ((c + j) * (j + 1.0)) * z;
    sum += term;
  }
  return sum;
}

/// Gauss series F(a,b;c;z) for |z| < 1. Truncation: the last included term
/// is <= tol * |partial sum| for at least 3 consecutive terms.
inline double hyp_series(const HypParams& p, double z, double tol = 1e-15) {
  if (!(std::abs(z) < 1.0))
    throw std::domain_error("hyp_series: |z| < 1 required");
  if (!(tol > 0.0)) throw std::invalid_argument("hyp_series: tol > 0 required");
  double sum = 1.0, term = 1.0;
  int below = 0;
  constexpr std::int64_t kMaxTerms = 1000000;
  for (std::int64_t j = 0; j < kMaxTerms; ++j) {
    term *= (p.a + j) * (p.b + j) / ((p.c + j) * (j + 1.0)) * z;
    sum += term;
    if (std::abs(term) <= tol * std::abs(sum)) {
      if (++below >= 3) return sum;
    } else {
      below = 0;
    }
  }
  throw NumericalError("hyp_series: no convergence within 1e6 terms");
}

namespace detail {
// Polynomial route when a or b is a non-positive integer, series otherwise.
inline double hyp_eval(double a, double b, double c, double z) {
  if (near_nonpositive_integer(a))
    return hyp_poly(static_cast<int>(std::lround(-a)), b, c, z);
  if (near_nonpositive_integer(b))
    return hyp_poly(static_cast<int>(std::lround(-b)), a, c, z);
  return hyp_series(HypParams(a, b, c), z);
}
}  // namespace detail

/// d/dz F(a,b;c;z) = (ab/c) F(a+1,b+1;c+1;z).
inline double hyp_derivative(const HypParams& p, double z) {
  if (p.a == 0.0 || p.b == 0.0) return 0.0;
  return p.a * p.b / p.c * detail::hyp_eval(p.a + 1.0, p.b + 1.0, p.c + 1.0, z);
}

}  // namespace pme
