#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "pmelab/params.hpp"

namespace pme {

namespace detail {

// Unnormalized associated Legendre P_l^m(x) without Condon-Shortley phase.
inline double assoc_legendre_plain(int l, int m, double x) {
  double pmm = 1.0;
  if (m > 0) {
    const double somx2 = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    double fact = 1.0;
    for (int i = 1; i <= m; ++i) {
      pmm *= fact * somx2;
      fact += 2.0;
    }
  }
  if (l == m) return pmm;
  double pmmp1 = x * (2.0 * m + 1.0) * pmm;
  if (l == m + 1) return pmmp1;
  double pll = 0.0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pll = ((2.0 * ll - 1.0) * x * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pll;
}

// Orthonormal real spherical harmonic on S^2; m in [-l, l].
inline double real_sph_harmonic_3d(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  const double norm =
      std::sqrt((2.0 * l + 1.0) / (4.0 * M_PI) *
                std::exp(std::lgamma(l - am + 1.0) - std::lgamma(l + am + 1.0)));
  const double plm = assoc_legendre_plain(l, am, std::cos(theta));
  if (m == 0) return norm * plm;
  const double sq2 = std::sqrt(2.0);
  if (m > 0) return sq2 * norm * plm * std::cos(am * phi);
  return sq2 * norm * plm * std::sin(am * phi);
}

}  // namespace detail

/// Real orthonormal spherical harmonic Y_{ln} on S^{N-1}, N in {1,2,3}.
/// Conventions: N=1: Y_{l1}(+-1) = (+-1)^l; N=2: 1/sqrt(2 pi) for l=0 and
/// {cos(l theta), sin(l theta)}/sqrt(pi) (n=1,2) for l>=1; N=3: standard
/// real harmonics, n = 1..2l+1 enumerating m = -l..l.
/// `unit` is a point of S^{N-1} given by its Cartesian coordinates.
inline double spherical_harmonic(int dim, int ell, int n, std::span<const double> unit) {
  if (ell < 0) throw std::invalid_argument("spherical_harmonic: ell >= 0");
  if (dim == 1) {
    if (ell > 1)
      throw std::invalid_argument("spherical_harmonic: N=1 has ell in {0,1}");
    if (n != 1) throw std::invalid_argument("spherical_harmonic: n=1 for N=1");
    const double w = unit[0] >= 0.0 ? 1.0 : -1.0;
    return ell == 0 ? 1.0 : w;
  }
  if (dim == 2) {
    const double theta = std::atan2(unit[1], unit[0]);
    if (ell == 0) {
      if (n != 1) throw std::invalid_argument("spherical_harmonic: n=1 for ell=0");
      return 1.0 / std::sqrt(2.0 * M_PI);
    }
    if (n == 1) return std::cos(ell * theta) / std::sqrt(M_PI);
    if (n == 2) return std::sin(ell * theta) / std::sqrt(M_PI);
    throw std::invalid_argument("spherical_harmonic: n in {1,2} for N=2, ell>=1");
  }
  if (dim == 3) {
    if (n < 1 || n > 2 * ell + 1)
      throw std::invalid_argument("spherical_harmonic: n in [1, 2l+1] for N=3");
    const int m = n - 1 - ell;
    const double theta = std::acos(std::clamp(unit[2], -1.0, 1.0));
    const double phi = std::atan2(unit[1], unit[0]);
    return detail::real_sph_harmonic_3d(ell, m, theta, phi);
  }
  throw std::invalid_argument(
      "spherical_harmonic: evaluation unsupported for N >= 4 (counting via "
      "multiplicity only)");
}

}  // namespace pme
