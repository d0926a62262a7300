#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "pmelab/field.hpp"
#include "pmelab/params.hpp"
#include "pmelab/quadrature.hpp"
#include "pmelab/spline.hpp"

namespace pme {

/// Normalized stationary Barenblatt profile,
/// rho_*(r) = [ (m-1)/(2m) (1-r^2)_+ ]^{1/(m-1)}, supported on the unit ball.
inline double barenblatt_density(const Parameters& p, double r) {
  if (r < 0.0) throw std::domain_error("barenblatt_density: r >= 0 required");
  const double s = 1.0 - r * r;
  if (s <= 0.0) return 0.0;
  return std::pow(p.profile_coefficient() * s, p.weight_exponent());
}

/// Total mass of the normalized profile over R^N, via the Beta function.
inline double barenblatt_mass(const Parameters& p) {
  const double a = 0.5 * p.dim;
  const double b = p.m / (p.m - 1.0);
  const double beta = std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  return sphere_area(p.dim) * p.center_density() * 0.5 * beta;
}

inline double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

/// Source-type self-similar solution in original variables,
/// rho_*(t,x) = t^{-N a} ( L - a(m-1)/(2m) |x|^2 t^{-2a} )_+^{1/(m-1)}.
inline double selfsimilar_density(const Parameters& p, double L, double t,
                                  std::span<const double> x) {
  if (!(t > 0.0)) throw std::domain_error("selfsimilar_density: t > 0 required");
  if (!(L > 0.0)) throw std::invalid_argument("selfsimilar_density: L > 0 required");
  const double a = p.alpha;
  const double inner =
      L - a * (p.m - 1.0) / (2.0 * p.m) * norm2(x) / std::pow(t, 2.0 * a);
  if (inner <= 0.0) return 0.0;
  return std::pow(t, -p.dim * a) * std::pow(inner, p.weight_exponent());
}

/// Change of variables between the original and confined equations:
/// x = beta t^alpha x_hat, t_hat = alpha ln t,
/// rho = (alpha beta^2)^{1/(m-1)} t^{-alpha N} rho_hat,
/// with beta = sqrt(2 m L / (alpha (m-1))).
struct Rescaling {
  Parameters params;
  double L;
  double beta;

  Rescaling(const Parameters& p, double L_) : params(p), L(L_) {
    if (!(L > 0.0)) throw std::invalid_argument("Rescaling: L > 0 required");
    beta = std::sqrt(2.0 * params.m * L / (params.alpha * (params.m - 1.0)));
  }

  double density_scale() const {
    return std::pow(params.alpha * beta * beta, 1.0 / (params.m - 1.0));
  }

  struct Confined {
    double t_hat;
    std::vector<double> x_hat;
    double rho_hat;
  };
  struct Original {
    double t;
    std::vector<double> x;
    double rho;
  };

  Confined forward(double t, std::span<const double> x, double rho) const {
    if (!(t > 0.0)) throw std::domain_error("Rescaling::forward: t > 0 required");
    Confined out;
    out.t_hat = params.alpha * std::log(t);
    const double s = beta * std::pow(t, params.alpha);
    out.x_hat.assign(x.begin(), x.end());
    for (double& v : out.x_hat) v /= s;
    out.rho_hat = rho / density_scale() * std::pow(t, params.alpha * params.dim);
    return out;
  }

  Original inverse(double t_hat, std::span<const double> x_hat, double rho_hat) const {
    Original out;
    out.t = std::exp(t_hat / params.alpha);
    const double s = beta * std::pow(out.t, params.alpha);
    out.x.assign(x_hat.begin(), x_hat.end());
    for (double& v : out.x) v *= s;
    out.rho = rho_hat * density_scale() * std::pow(out.t, -params.alpha * params.dim);
    return out;
  }
};

namespace detail {

// Integrate F(x, u(x), u'(x)) over the positive set of the spline u within
// one cell, grading toward a support edge found by bisection. The measure
// weight is part of F.
template <class F>
double integrate_cell_positive(const CubicSpline& u, double a, double b, F&& f,
                               const QuadratureRule& ref) {
  const double ua = u(a), ub = u(b);
  auto g = [&](double x) { return f(x); };
  if (ua <= 0.0 && ub <= 0.0) return 0.0;
  if (ua > 0.0 && ub > 0.0) return mapped_rule(ref, a, b).apply(g);
  // one sign change: bisect for the edge
  double lo = a, hi = b;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((u(mid) > 0.0) == (ua > 0.0)) lo = mid;
    else hi = mid;
    if (hi - lo < 1e-15 * (b - a)) break;
  }
  const double root = 0.5 * (lo + hi);
  if (ua > 0.0) {
    // positive part [a, root], singular behavior at the right end
    return integrate_graded_right(g, a, root);
  }
  // positive part [root, b], singular at the left end: mirror it
  auto gm = [&](double x) { return f(root + b - x); };
  return integrate_graded_right(gm, root, b);
}

struct FieldGeometry {
  bool axis;       // N=1 field over an interval containing negative x
  int dim;
  double measure(double x) const {
    if (axis) return 1.0;
    return sphere_area(dim) * std::pow(std::abs(x), dim - 1);
  }
};

inline FieldGeometry geometry(const Parameters& p, const RadialField& f) {
  const bool axis = f.is_axis();
  if (axis && p.dim != 1)
    throw std::invalid_argument("axis fields are only meaningful for N=1");
  return FieldGeometry{axis, p.dim};
}

// Spline of u = rho^{m-1}, the Lipschitz quantity behind a degenerate
// density. Interpolating u rather than rho keeps Barenblatt-type data exact.
inline CubicSpline pressure_spline(const Parameters& p, const RadialField& f) {
  std::vector<double> u(f.values.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = std::pow(f.values[i], p.m - 1.0);
  return CubicSpline(f.grid, u);
}

}  // namespace detail

/// Entropy E(rho) = 1/(m-1) int rho^m dx + 1/2 int |x|^2 rho dx,
/// with the N-dimensional radial measure (axis measure for N=1 interval
/// fields, and even reflection for N=1 radial fields).
inline double entropy(const Parameters& p, const RadialField& rho) {
  if (rho.kind != FieldKind::density)
    throw std::domain_error("entropy: density field required");
  const auto geo = detail::geometry(p, rho);
  const CubicSpline u = detail::pressure_spline(p, rho);
  const double inv = 1.0 / (p.m - 1.0);
  const QuadratureRule ref = gauss_legendre(7);

  auto integrand = [&](double x) {
    const double uu = std::max(u(x), 0.0);
    if (uu == 0.0) return 0.0;
    const double rhov = std::pow(uu, inv);
    const double rhom = std::pow(uu, p.m * inv);
    return (inv * rhom + 0.5 * x * x * rhov) * geo.measure(x);
  };

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < rho.grid.size(); ++i)
    total += detail::integrate_cell_positive(u, rho.grid[i], rho.grid[i + 1],
                                             integrand, ref);
  return total;
}

/// Dissipation D(rho) = int rho |grad( |x|^2/2 + m/(m-1) rho^{m-1} )|^2 dx.
/// The gradient of the pressure part is the spline derivative of rho^{m-1};
/// the rho factor suppresses the support edge.
inline double dissipation(const Parameters& p, const RadialField& rho) {
  if (rho.kind != FieldKind::density)
    throw std::domain_error("dissipation: density field required");
  const auto geo = detail::geometry(p, rho);
  const CubicSpline u = detail::pressure_spline(p, rho);
  const double inv = 1.0 / (p.m - 1.0);
  const double mfac = p.m * inv;
  const QuadratureRule ref = gauss_legendre(7);

  auto integrand = [&](double x) {
    const double uu = std::max(u(x), 0.0);
    if (uu == 0.0) return 0.0;
    const double rhov = std::pow(uu, inv);
    const double slope = x + mfac * u.deriv(x);
    return rhov * slope * slope * geo.measure(x);
  };

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < rho.grid.size(); ++i)
    total += detail::integrate_cell_positive(u, rho.grid[i], rho.grid[i + 1],
                                             integrand, ref);
  return total;
}

/// Sample the Barenblatt profile on [0, r_max], nodes graded toward the
/// support edge r=1 (grading g >= 1: r = 1-(1-xi)^g for xi in [0,1]).
inline RadialField sample_barenblatt(const Parameters& p, int n, double r_max = 1.0,
                                     double grading = 2.0) {
  if (n < 2) throw std::invalid_argument("sample_barenblatt: n >= 2");
  std::vector<double> grid(n), vals(n);
  for (int i = 0; i < n; ++i) {
    const double xi = static_cast<double>(i) / (n - 1);
    double r = (1.0 - std::pow(1.0 - xi, grading)) * r_max;
    if (i == n - 1) r = r_max;
    grid[i] = r;
    vals[i] = barenblatt_density(p, r);
  }
  return RadialField(std::move(grid), std::move(vals), FieldKind::density);
}

}  // namespace pme
