#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pmelab/eigensolver.hpp"
#include "pmelab/fem.hpp"
#include "pmelab/field.hpp"
#include "pmelab/params.hpp"
#include "pmelab/polynomial.hpp"
#include "pmelab/quadrature.hpp"
#include "pmelab/spline.hpp"

namespace pme {

/// Weak solve of the weighted Poisson problem of the metric tensor:
/// -div(rho_* grad psi) = u in B_1, rho_* grad psi . nu = 0 on the boundary
/// (natural condition), restricted to the degree-ell harmonic sector. For
/// ell = 0 the source must have zero mean and the solution is fixed by
/// rho_*^{2-m}-weighted mean zero. The source is a callable on (0,1);
/// integrable endpoint growth (delta-rho data for m > 2) is fine.
inline RadialField poisson_solve(const Parameters& p, int ell,
                                 const std::function<double(double)>& u,
                                 int elements = 128, int degree = 3) {
  const RadialGrid grid = RadialGrid::graded(elements, degree);
  const DiscreteForms forms = assemble_forms(p, ell, grid);
  const Eigen::MatrixXd K = forms.A / p.m;  // drop the m factor of the Hessian form

  const Eigen::VectorXd F = assemble_load(p, ell, grid, u);

  const int n = static_cast<int>(K.rows());
  Eigen::VectorXd psi(n);
  if (ell == 0) {
    // compatibility: int u r^{N-1} dr = sum of load entries
    const double total = F.sum();
    const double unorm = std::sqrt(integrate_graded_right(
        [&](double r) { return u(r) * u(r) * std::pow(r, p.dim - 1); }, 0.0, 1.0));
    if (std::abs(total) > 1e-10 * std::max(unorm, 1e-300))
      throw std::domain_error(
          "poisson_solve: incompatible source (nonzero mean for ell=0)");
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::MatrixXd Z = detail::complement_basis(ones);
    const Eigen::MatrixXd Kr = Z.transpose() * K * Z;
    Eigen::LLT<Eigen::MatrixXd> llt(Kr);
    if (llt.info() != Eigen::Success)
      throw NumericalError("poisson_solve: singular reduced system");
    psi = Z * llt.solve(Z.transpose() * F);
    // fix constants: rho_*^{2-m}-weighted mean zero
    const double shift = ones.dot(forms.B * psi) / ones.dot(forms.B * ones);
    psi.array() -= shift;
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
      throw NumericalError("poisson_solve: stiffness matrix not positive definite");
    psi = llt.solve(F);
  }

  std::vector<double> out_grid, out_vals;
  if (ell >= 1) {
    out_grid.push_back(0.0);
    out_vals.push_back(0.0);
  }
  out_grid.insert(out_grid.end(), forms.dof_r.begin(), forms.dof_r.end());
  out_vals.insert(out_vals.end(), psi.data(), psi.data() + n);
  return RadialField(std::move(out_grid), std::move(out_vals), FieldKind::potential);
}

/// Sampled-source overload: cubic-spline reconstruction of the samples.
inline RadialField poisson_solve(const Parameters& p, int ell, const RadialField& u,
                                 int elements = 128, int degree = 3) {
  const CubicSpline us(u.grid, u.values);
  return poisson_solve(p, ell, [&](double r) { return us(r); }, elements, degree);
}

/// delta-rho from a potential by differentiation (the inverse direction of
/// poisson_solve): delta_rho = -(r^{N-1} rho_* psi')' / r^{N-1}
///                             + mu_l rho_* psi / r^2.
/// Polynomial overload: exact calculus; psi must belong to the ell-sector
/// (vanishing like r^ell at the origin).
inline double apply_L_inverse_at(const Parameters& p, int ell, const Polynomial& psi,
                                 double r) {
  const double mu = sphere_eigenvalue(p.dim, ell);
  const Polynomial dpsi = psi.derivative();
  const Polynomial d2psi = dpsi.derivative();
  // q = psi'' + (N-1) psi'/r - mu psi / r^2, combined so the division is exact
  const Polynomial s =
      Polynomial::monomial(1) * dpsi * (p.dim - 1.0) - psi * mu;
  const Polynomial q = d2psi + s.shift_down(2);
  const double e1 = p.weight_exponent();
  const double ca = std::pow(p.profile_coefficient(), e1);
  const double onem = 1.0 - r * r;
  const double rho = onem <= 0.0 ? 0.0 : ca * std::pow(onem, e1);
  const double drho =
      onem <= 0.0 ? 0.0 : -2.0 * e1 * ca * r * std::pow(onem, e1 - 1.0);
  return -rho * q(r) - drho * dpsi(r);
}

inline RadialField apply_L_inverse(const Parameters& p, int ell, const Polynomial& psi,
                                   const std::vector<double>& grid) {
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    vals[i] = apply_L_inverse_at(p, ell, psi, grid[i]);
  return RadialField(grid, std::move(vals), FieldKind::potential);
}

/// Grid overload: centered differences on the sample grid (one-sided
/// quadratic extrapolation at the ends).
inline RadialField apply_L_inverse(const Parameters& p, int ell,
                                   const RadialField& psi) {
  const auto& x = psi.grid;
  const auto& y = psi.values;
  const std::size_t n = x.size();
  if (n < 4) throw std::invalid_argument("apply_L_inverse: need >= 4 samples");
  const double mu = sphere_eigenvalue(p.dim, ell);
  const double e1 = p.weight_exponent();
  const double ca = std::pow(p.profile_coefficient(), e1);

  std::vector<double> vals(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = x[i] - x[i - 1], hr = x[i + 1] - x[i];
    const double d1 = (y[i + 1] * hl * hl - y[i - 1] * hr * hr +
                       y[i] * (hr * hr - hl * hl)) /
                      (hl * hr * (hl + hr));
    const double d2 =
        2.0 * (y[i - 1] * hr + y[i + 1] * hl - y[i] * (hl + hr)) /
        (hl * hr * (hl + hr));
    const double r = x[i];
    const double onem = 1.0 - r * r;
    const double rho = onem <= 0.0 ? 0.0 : ca * std::pow(onem, e1);
    const double drho =
        onem <= 0.0 ? 0.0 : -2.0 * e1 * ca * r * std::pow(onem, e1 - 1.0);
    const double sing = r == 0.0 ? 0.0 : (p.dim - 1.0) / r * d1 - mu / (r * r) * y[i];
    vals[i] = -rho * (d2 + sing) - drho * d1;
  }
  // quadratic extrapolation to the ends
  auto extrap = [&](std::size_t i0, std::size_t i1, std::size_t i2, double xt) {
    const double l0 = (xt - x[i1]) * (xt - x[i2]) / ((x[i0] - x[i1]) * (x[i0] - x[i2]));
    const double l1 = (xt - x[i0]) * (xt - x[i2]) / ((x[i1] - x[i0]) * (x[i1] - x[i2]));
    const double l2 = (xt - x[i0]) * (xt - x[i1]) / ((x[i2] - x[i0]) * (x[i2] - x[i1]));
    return l0 * vals[i0] + l1 * vals[i1] + l2 * vals[i2];
  };
  vals[0] = extrap(1, 2, 3, x[0]);
  vals[n - 1] = extrap(n - 4, n - 3, n - 2, x[n - 1]);
  return RadialField(x, std::move(vals), FieldKind::potential);
}

struct HardyReport {
  double lhs;
  double rhs;
  double ratio;
};

namespace detail {

// N-dimensional integral of w(r) g(r) over B_1 where w = (1-r^2)^{expo}:
// Gauss-Jacobi in r absorbing (1-r)^{expo}; the analytic (1+r)^{expo}
// factor rides along.
template <class G>
double weighted_ball_integral(const Parameters& p, double expo, G&& g, int n = 48) {
  const QuadratureRule rule = jacobi_rule_on(n, expo, 0.0, 0.0, 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = rule.nodes[i];
    s += rule.weights[i] * std::pow(1.0 + r, expo) * std::pow(r, p.dim - 1) * g(r);
  }
  return sphere_area(p.dim) * s;
}

}  // namespace detail

/// Hardy-Poincare ratio: lhs = inf_c int rho_*^{p-m} (psi-c)^2 dx evaluated
/// at the optimal c, rhs = int rho_* |grad psi|^2 dx. Requires p > 1 and
/// p + m >= 3; psi must not be constant.
inline HardyReport hardy_poincare_ratio(const Parameters& par, double p,
                                        const Polynomial& psi) {
  if (!(p > 1.0) || !(p + par.m >= 3.0))
    throw std::invalid_argument("hardy_poincare_ratio: need p > 1 and p + m >= 3");
  const double ep = (p - par.m) / (par.m - 1.0);
  const double cp = std::pow(par.profile_coefficient(), ep);
  const double e1 = par.weight_exponent();
  const double ca = std::pow(par.profile_coefficient(), e1);
  const Polynomial dpsi = psi.derivative();

  const double i0 = cp * detail::weighted_ball_integral(par, ep, [](double) { return 1.0; });
  const double i1 =
      cp * detail::weighted_ball_integral(par, ep, [&](double r) { return psi(r); });
  const double c = i1 / i0;
  const double lhs = cp * detail::weighted_ball_integral(par, ep, [&](double r) {
    const double d = psi(r) - c;
    return d * d;
  });
  const double rhs = ca * detail::weighted_ball_integral(par, e1, [&](double r) {
    const double d = dpsi(r);
    return d * d;
  });
  if (!(rhs > 0.0))
    throw std::domain_error("hardy_poincare_ratio: psi is constant (zero gradient)");
  return {lhs, rhs, lhs / rhs};
}

/// Grid overload: spline reconstruction, composite quadrature with geometric
/// refinement into the boundary weight.
inline HardyReport hardy_poincare_ratio(const Parameters& par, double p,
                                        const RadialField& psi) {
  if (!(p > 1.0) || !(p + par.m >= 3.0))
    throw std::invalid_argument("hardy_poincare_ratio: need p > 1 and p + m >= 3");
  const CubicSpline s(psi.grid, psi.values);
  const double ep = (p - par.m) / (par.m - 1.0);
  const double cp = std::pow(par.profile_coefficient(), ep);
  const double e1 = par.weight_exponent();
  const double ca = std::pow(par.profile_coefficient(), e1);
  const double omega = sphere_area(par.dim);
  const double a = std::max(0.0, psi.grid.front());
  const double b = std::min(1.0, psi.grid.back());

  auto ball = [&](auto&& g) {
    return omega * integrate_graded_right(g, a, b, 7, 52);
  };
  auto wp = [&](double r) {
    return cp * std::pow(std::max(1.0 - r * r, 0.0), ep) * std::pow(r, par.dim - 1);
  };
  const double i0 = ball([&](double r) { return wp(r); });
  const double i1 = ball([&](double r) { return wp(r) * s(r); });
  const double c = i1 / i0;
  const double lhs = ball([&](double r) {
    const double d = s(r) - c;
    return wp(r) * d * d;
  });
  const double rhs = ball([&](double r) {
    const double d = s.deriv(r);
    return ca * std::pow(std::max(1.0 - r * r, 0.0), e1) * std::pow(r, par.dim - 1) * d * d;
  });
  if (!(rhs > 0.0))
    throw std::domain_error("hardy_poincare_ratio: psi is constant (zero gradient)");
  return {lhs, rhs, lhs / rhs};
}

struct GapReport {
  double gnorm;       // int rho_* (psi'^2 + mu psi^2/r^2) dx
  double hess_value;  // m int rho_*^{m-2} div(rho_* grad psi)^2 dx
};

/// Sharp spectral gap data: gnorm <= hess_value for every admissible psi,
/// with equality exactly on the translation mode (ell=1, k=0).
inline GapReport spectral_gap_check(const Parameters& p, const Polynomial& psi,
                                    int ell) {
  const double mu = sphere_eigenvalue(p.dim, ell);
  const double e1 = p.weight_exponent();
  const double e2 = p.dual_weight_exponent();
  const double ca = std::pow(p.profile_coefficient(), e1);
  const double cb = std::pow(p.profile_coefficient(), e2);
  const Polynomial dpsi = psi.derivative();
  const Polynomial d2psi = dpsi.derivative();

  const double gnorm = ca * detail::weighted_ball_integral(p, e1, [&](double r) {
    const double d = dpsi(r);
    const double bulk = mu == 0.0 ? 0.0 : mu * psi(r) * psi(r) / (r * r);
    return d * d + bulk;
  });
  // H psi = -(m-1)/2 (1-r^2) (psi'' + (N-1)psi'/r - mu psi/r^2) + r psi'
  auto Hpsi = [&](double r) {
    const double lap = d2psi(r) + (p.dim - 1.0) / r * dpsi(r) -
                       (mu == 0.0 ? 0.0 : mu * psi(r) / (r * r));
    return -0.5 * (p.m - 1.0) * (1.0 - r * r) * lap + r * dpsi(r);
  };
  const double hess = cb / p.m * detail::weighted_ball_integral(p, e2, [&](double r) {
    const double h = Hpsi(r);
    return h * h;
  });
  return {gnorm, hess};
}

}  // namespace pme
