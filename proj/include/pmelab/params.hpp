#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace pme {

/// Parameters of the confined porous medium problem: exponent m > 1,
/// space dimension N >= 1 and the derived self-similar exponent
/// alpha = 1/(N(m-1)+2). The optional mass is carried along for callers
/// that fix the Barenblatt constant by total mass instead of by L.
struct Parameters {
  double m;
  int dim;
  double alpha;
  std::optional<double> mass;

  Parameters(double m_, int dim_, std::optional<double> mass_ = std::nullopt)
      : m(m_), dim(dim_), mass(mass_) {
    if (!(m > 1.0))
      throw std::invalid_argument("Parameters: exponent m must be > 1");
    if (dim < 1)
      throw std::invalid_argument("Parameters: dimension must be >= 1");
    if (mass && !(*mass > 0.0))
      throw std::invalid_argument("Parameters: mass must be positive");
    alpha = 1.0 / (dim * (m - 1.0) + 2.0);
  }

  // (m-1)/(2m), the prefactor of (1-r^2) in rho_*^{m-1}.
  double profile_coefficient() const { return (m - 1.0) / (2.0 * m); }

  // rho_*(0) = ((m-1)/(2m))^{1/(m-1)}.
  double center_density() const {
    return std::pow(profile_coefficient(), 1.0 / (m - 1.0));
  }

  // Exponent of (1-r^2) in rho_*.
  double weight_exponent() const { return 1.0 / (m - 1.0); }

  // Exponent of (1-r^2) in rho_*^{2-m}; always > -1 for m > 1.
  double dual_weight_exponent() const { return (2.0 - m) / (m - 1.0); }
};

/// Surface measure of the unit sphere S^{N-1}: 2 pi^{N/2} / Gamma(N/2).
/// For N=1 this is 2 (the two-point sphere {-1,+1}).
inline double sphere_area(int dim) {
  if (dim < 1) throw std::invalid_argument("sphere_area: dim >= 1 required");
  return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

/// Errors from iterative or conditioning-sensitive numerics. CLI maps
/// these to exit code 2, validation errors to exit code 1.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pme
