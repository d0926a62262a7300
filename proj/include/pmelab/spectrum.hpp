#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pmelab/harmonics.hpp"
#include "pmelab/hypergeo.hpp"
#include "pmelab/params.hpp"
#include "pmelab/polynomial.hpp"
#include "pmelab/profile.hpp"

namespace pme {

/// Index (ell, k, n) of an eigenpair; n enumerates the degree-ell harmonic
/// eigenspace, n in [1, N_ell].
struct ModeIndex {
  int ell = 0;
  int k = 0;
  int n = 1;
};

struct SpectrumEntry {
  int ell;
  int k;
  double lambda;
  std::int64_t multiplicity;
  int degree;  // polynomial degree of the eigenfunction, ell + 2k
};

inline void validate_mode(const Parameters& p, int ell, int k) {
  if (ell < 0 || k < 0)
    throw std::domain_error("mode: ell, k must be nonnegative");
  if (ell == 0 && k == 0)
    throw std::domain_error("mode: (0,0) is excluded (constants)");
  if (p.dim == 1 && ell > 1)
    throw std::domain_error("mode: N=1 admits only ell in {0,1}");
}

/// lambda_{lk} = l + 2k + 2k (k + l + N/2 - 1)(m - 1).
inline double eigenvalue(const Parameters& p, int ell, int k) {
  validate_mode(p, ell, k);
  return ell + 2.0 * k +
         2.0 * k * (k + ell + 0.5 * p.dim - 1.0) * (p.m - 1.0);
}

/// Eigenvalue of -Laplace_{S^{N-1}} on degree-ell harmonics.
inline double sphere_eigenvalue(int dim, int ell) {
  return static_cast<double>(ell) * (ell + dim - 2);
}

/// Dimension N_ell of the degree-ell harmonic eigenspace:
/// N_ell = (N+l-3)! (N+2l-2) / (l! (N-2)!) with N_0 = 1, and N_ell = 1 for
/// ell = N = 1. Exact integer arithmetic; throws on 64-bit overflow.
inline std::int64_t multiplicity(const Parameters& p, int ell) {
  if (ell < 0) throw std::domain_error("multiplicity: ell >= 0 required");
  if (p.dim == 1) {
    if (ell > 1) throw std::domain_error("multiplicity: N=1 has ell in {0,1}");
    return 1;
  }
  if (ell == 0) return 1;
  // N_ell = C(N+l-3, l-1) * (N+2l-2) / l
  unsigned __int128 binom = 1;
  const int top = p.dim + ell - 3;
  for (int j = 1; j <= ell - 1; ++j) {
    binom = binom * static_cast<unsigned>(top - (ell - 1) + j);
    binom /= static_cast<unsigned>(j);
    if (binom > (static_cast<unsigned __int128>(1) << 100))
      throw std::overflow_error("multiplicity: exceeds 64-bit range");
  }
  unsigned __int128 num = binom * static_cast<unsigned>(p.dim + 2 * ell - 2);
  num /= static_cast<unsigned>(ell);
  if (num > static_cast<unsigned __int128>(INT64_MAX))
    throw std::overflow_error("multiplicity: exceeds 64-bit range");
  return static_cast<std::int64_t>(num);
}

/// Radial eigenfunction f_{lk}(r) = r^l F(-k, 1/(m-1)+l+N/2-1+k; l+N/2; r^2)
/// as an exact polynomial in r (degree l+2k). Normalized so that the
/// hypergeometric factor equals 1 at r=0.
inline Polynomial radial_eigenfunction(const Parameters& p, int ell, int k) {
  validate_mode(p, ell, k);
  const double b = 1.0 / (p.m - 1.0) + ell + 0.5 * p.dim - 1.0 + k;
  const double c = ell + 0.5 * p.dim;
  std::vector<double> coeff(ell + 2 * k + 1, 0.0);
  double term = 1.0;
  coeff[ell] = term;
  for (int j = 0; j < k; ++j) {
    term *= (static_cast<double>(j) - k) * (b + j) / ((c + j) * (j + 1.0));
    coeff[ell + 2 * (j + 1)] = term;
  }
  return Polynomial(std::move(coeff));
}

struct OdeResidual {
  double value;  // left-hand side of the radial eigenvalue ODE
  double scale;  // sum of the magnitudes of its three terms
};

/// Left side of the radial eigenvalue equation at r in (0,1):
/// f'' + ((N-1)/r - 2/(m-1) r/(1-r^2)) f'
///     + (2 lambda /((m-1)(1-r^2)) - mu_l / r^2) f.
/// Exact polynomial derivatives.
inline OdeResidual ode_residual_terms(const Parameters& p, int ell, double lambda,
                                      const Polynomial& f, double r) {
  if (!(r > 0.0 && r < 1.0))
    throw std::domain_error("ode_residual: r in (0,1) required");
  const double mu = sphere_eigenvalue(p.dim, ell);
  const double one_m = 1.0 - r * r;
  const Polynomial df = f.derivative();
  const Polynomial d2f = df.derivative();
  const double t1 = d2f(r);
  const double t2 = ((p.dim - 1.0) / r - 2.0 / (p.m - 1.0) * r / one_m) * df(r);
  const double t3 =
      (2.0 * lambda / ((p.m - 1.0) * one_m) - mu / (r * r)) * f(r);
  return {t1 + t2 + t3, std::abs(t1) + std::abs(t2) + std::abs(t3)};
}

inline double ode_residual(const Parameters& p, int ell, double lambda,
                           const Polynomial& f, double r) {
  return ode_residual_terms(p, ell, lambda, f, r).value;
}

/// psi_{lnk}(x) = f_{lk}(|x|) Y_{ln}(x/|x|). At x=0 this is 0 for l>=1 and
/// the l=0 value otherwise. N in {1,2,3}.
inline double full_eigenfunction(const Parameters& p, const ModeIndex& mode,
                                 std::span<const double> x) {
  validate_mode(p, mode.ell, mode.k);
  if (p.dim > 3)
    throw std::invalid_argument(
        "full_eigenfunction: N >= 4 unsupported (use multiplicity for counting)");
  if (static_cast<int>(x.size()) != p.dim)
    throw std::invalid_argument("full_eigenfunction: point dimension mismatch");
  const std::int64_t nl = multiplicity(p, mode.ell);
  if (mode.n < 1 || mode.n > nl)
    throw std::domain_error("full_eigenfunction: n out of range");
  const double r = std::sqrt(norm2(x));
  const Polynomial f = radial_eigenfunction(p, mode.ell, mode.k);
  if (r == 0.0) {
    if (mode.ell >= 1) return 0.0;
    std::vector<double> north(p.dim, 0.0);
    north.back() = 1.0;
    return f(0.0) * spherical_harmonic(p.dim, 0, 1, north);
  }
  std::vector<double> unit(x.begin(), x.end());
  for (double& v : unit) v /= r;
  return f(r) * spherical_harmonic(p.dim, mode.ell, mode.n, unit);
}

/// Radial part of the delta-rho eigenfunction,
/// (lambda_{lk}/m) rho_*(r)^{2-m} f_{lk}(r); the power of (1-r^2) is taken
/// directly so the m>2 endpoint follows IEEE pow (0, 1, or +inf).
inline double delta_rho_eigenfunction(const Parameters& p, int ell, int k, double r) {
  validate_mode(p, ell, k);
  if (r < 0.0 || r > 1.0)
    throw std::domain_error("delta_rho_eigenfunction: r in [0,1] required");
  const double lambda = eigenvalue(p, ell, k);
  const Polynomial f = radial_eigenfunction(p, ell, k);
  const double base = p.profile_coefficient() * (1.0 - r * r);
  const double w = std::pow(base, p.dual_weight_exponent());
  return lambda / p.m * w * f(r);
}

/// All modes with ell <= ell_max, k <= k_max (excluding (0,0)), sorted by
/// ascending eigenvalue with (ell, k) lexicographic tie-break.
inline std::vector<SpectrumEntry> spectrum_table(const Parameters& p, int ell_max,
                                                 int k_max) {
  if (ell_max < 0 || k_max < 0)
    throw std::invalid_argument("spectrum_table: limits must be >= 0");
  std::vector<SpectrumEntry> out;
  const int lmax = p.dim == 1 ? std::min(ell_max, 1) : ell_max;
  for (int ell = 0; ell <= lmax; ++ell)
    for (int k = 0; k <= k_max; ++k) {
      if (ell == 0 && k == 0) continue;
      out.push_back(SpectrumEntry{ell, k, eigenvalue(p, ell, k),
                                  multiplicity(p, ell), ell + 2 * k});
    }
  std::sort(out.begin(), out.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return std::pair(a.ell, a.k) < std::pair(b.ell, b.k);
  });
  return out;
}

/// Solve lambda_{mode1}(m) = lambda_{mode2}(m) for m > 1. The eigenvalues
/// are affine in m, so the crossing is closed-form; none if the levels are
/// parallel or the solution has m <= 1.
inline std::optional<double> level_crossing(int dim, std::pair<int, int> mode1,
                                            std::pair<int, int> mode2) {
  auto valid = [&](std::pair<int, int> mk) {
    if (mk.first < 0 || mk.second < 0 || (mk.first == 0 && mk.second == 0))
      throw std::domain_error("level_crossing: invalid mode");
    if (dim == 1 && mk.first > 1)
      throw std::domain_error("level_crossing: N=1 admits only ell in {0,1}");
  };
  valid(mode1);
  valid(mode2);
  if (mode1 == mode2) throw std::domain_error("level_crossing: modes must differ");
  auto affine = [&](std::pair<int, int> mk) {
    const double a = mk.first + 2.0 * mk.second;
    const double b = 2.0 * mk.second * (mk.second + mk.first + 0.5 * dim - 1.0);
    return std::pair(a, b);  // lambda(m) = a + b (m-1)
  };
  const auto [a1, b1] = affine(mode1);
  const auto [a2, b2] = affine(mode2);
  if (b1 == b2) return std::nullopt;
  const double mm1 = (a2 - a1) / (b1 - b2);
  if (!(mm1 > 0.0)) return std::nullopt;
  return 1.0 + mm1;
}

}  // namespace pme
