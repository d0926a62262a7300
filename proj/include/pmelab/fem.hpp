#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pmelab/params.hpp"
#include "pmelab/quadrature.hpp"
#include "pmelab/spectrum.hpp"

namespace pme {

/// Mesh of [0,1] for the radial operator: element boundaries, element
/// degree p, and the grading exponent of the node map 1-(1-xi)^g that
/// clusters elements at the free boundary r=1.
struct RadialGrid {
  std::vector<double> nodes;
  int degree = 1;
  double grading = 1.0;

  static RadialGrid graded(int elements, int degree, double grading = 2.0) {
    if (elements < 4) throw std::invalid_argument("RadialGrid: at least 4 elements");
    if (degree < 1) throw std::invalid_argument("RadialGrid: degree >= 1");
    if (grading < 1.0) throw std::invalid_argument("RadialGrid: grading >= 1");
    RadialGrid g;
    g.degree = degree;
    g.grading = grading;
    g.nodes.resize(elements + 1);
    for (int i = 0; i <= elements; ++i) {
      const double xi = static_cast<double>(i) / elements;
      g.nodes[i] = 1.0 - std::pow(1.0 - xi, grading);
    }
    g.nodes.front() = 0.0;
    g.nodes.back() = 1.0;
    return g;
  }

  int elements() const { return static_cast<int>(nodes.size()) - 1; }
  int n_nodes() const { return elements() * degree + 1; }
};

namespace detail {

// Reference element nodes on [0,1] (Chebyshev-Lobatto; includes endpoints).
inline std::vector<double> reference_nodes(int p) {
  std::vector<double> t(p + 1);
  for (int j = 0; j <= p; ++j) t[j] = 0.5 * (1.0 - std::cos(M_PI * j / p));
  t.front() = 0.0;
  t.back() = 1.0;
  return t;
}

// Lagrange basis phi_j and derivative at reference coordinate x.
inline void lagrange_eval(const std::vector<double>& t, double x,
                          std::vector<double>& phi, std::vector<double>& dphi) {
  const int n = static_cast<int>(t.size());
  phi.assign(n, 0.0);
  dphi.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double v = 1.0;
    for (int i = 0; i < n; ++i)
      if (i != j) v *= (x - t[i]) / (t[j] - t[i]);
    phi[j] = v;
    double d = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      double w = 1.0 / (t[j] - t[k]);
      for (int i = 0; i < n; ++i)
        if (i != j && i != k) w *= (x - t[i]) / (t[j] - t[i]);
      d += w;
    }
    dphi[j] = d;
  }
}

}  // namespace detail

/// Assembled quadratic forms of the radial operator on the FE basis:
/// A(f,g) = m int rho_* (f'g' + mu_l f g / r^2) r^{N-1} dr   (Hessian form)
/// B(f,g) = int rho_*^{2-m} f g r^{N-1} dr                   (weighted L^2)
/// For l >= 1 the basis excludes the node at r=0 (essential condition);
/// the boundary condition at r=1 is natural. The endpoint weights are
/// handled by Gauss-Jacobi rules on the last element.
struct DiscreteForms {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Parameters params;
  int ell;
  RadialGrid grid;
  std::vector<double> dof_r;  // radial position of each retained DOF
};

inline DiscreteForms assemble_forms(const Parameters& p, int ell,
                                    const RadialGrid& grid) {
  if (ell < 0) throw std::domain_error("assemble_forms: ell >= 0 required");
  if (p.dim == 1 && ell > 1)
    throw std::domain_error("assemble_forms: N=1 admits only ell in {0,1}");
  const int pdeg = grid.degree;
  const int nel = grid.elements();
  const int n_nodes = grid.n_nodes();
  const bool drop_origin = ell >= 1;
  const int ndof = n_nodes - (drop_origin ? 1 : 0);

  const double mu = sphere_eigenvalue(p.dim, ell);
  const double e1 = p.weight_exponent();
  const double e2 = p.dual_weight_exponent();
  const double c1 = p.profile_coefficient();           // rho_* prefactor^(m-1)
  const double ca = std::pow(c1, e1);                  // rho_* = ca (1-r^2)^{e1}
  const double cb = std::pow(c1, e2);                  // rho_*^{2-m} = cb (1-r^2)^{e2}

  DiscreteForms forms{Eigen::MatrixXd::Zero(ndof, ndof),
                      Eigen::MatrixXd::Zero(ndof, ndof), p, ell, grid, {}};

  const std::vector<double> tref = detail::reference_nodes(pdeg);
  forms.dof_r.resize(ndof);
  for (int e = 0; e < nel; ++e) {
    const double a = grid.nodes[e], b = grid.nodes[e + 1];
    for (int j = 0; j <= pdeg; ++j) {
      const int g = e * pdeg + j;
      const int d = g - (drop_origin ? 1 : 0);
      if (d >= 0 && d < ndof) forms.dof_r[d] = a + (b - a) * tref[j];
    }
  }

  std::vector<double> phi, dphi;
  auto accumulate = [&](int e, const QuadratureRule& rule, bool into_A,
                        bool into_B, double smooth_a, double smooth_b,
                        bool jacobi_weighted) {
    const double a = grid.nodes[e], b = grid.nodes[e + 1];
    const double h = b - a;
    const int nb = pdeg + 1;
    Eigen::MatrixXd lA = Eigen::MatrixXd::Zero(nb, nb);
    Eigen::MatrixXd lB = Eigen::MatrixXd::Zero(nb, nb);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double r = rule.nodes[q];
      const double w = rule.weights[q];
      detail::lagrange_eval(tref, (r - a) / h, phi, dphi);
      const double rpow = std::pow(r, p.dim - 1);
      double wa = 0.0, wb = 0.0;
      if (jacobi_weighted) {
        // (1-r)^{e} inside the rule; remaining smooth factor (1+r)^{e}
        wa = smooth_a * std::pow(1.0 + r, e1);
        wb = smooth_b * std::pow(1.0 + r, e2);
      } else {
        const double s = 1.0 - r * r;
        wa = ca * std::pow(s, e1);
        wb = cb * std::pow(s, e2);
      }
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j <= i; ++j) {
          if (into_A) {
            const double grad = (dphi[i] / h) * (dphi[j] / h);
            const double bulk = mu == 0.0 ? 0.0 : mu * phi[i] * phi[j] / (r * r);
            lA(i, j) += w * p.m * wa * (grad + bulk) * rpow;
          }
          if (into_B) lB(i, j) += w * wb * phi[i] * phi[j] * rpow;
        }
    }
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j <= i; ++j) {
        const int gi = e * pdeg + i - (drop_origin ? 1 : 0);
        const int gj = e * pdeg + j - (drop_origin ? 1 : 0);
        if (gi < 0 || gj < 0) continue;
        if (into_A) {
          forms.A(gi, gj) += lA(i, j);
          if (gi != gj) forms.A(gj, gi) += lA(i, j);
        }
        if (into_B) {
          forms.B(gi, gj) += lB(i, j);
          if (gi != gj) forms.B(gj, gi) += lB(i, j);
        }
      }
  };

  for (int e = 0; e < nel; ++e) {
    const double a = grid.nodes[e], b = grid.nodes[e + 1];
    const bool last = (e == nel - 1);
    if (last) {
      // separate endpoint-weighted rules for the two forms
      const int q = pdeg + 6;
      accumulate(e, jacobi_rule_on(q, e1, 0.0, a, b), true, false, ca, 0.0, true);
      accumulate(e, jacobi_rule_on(q, e2, 0.0, a, b), false, true, 0.0, cb, true);
    } else {
      // the mu/r^2 integrand is polynomial here since basis functions on the
      // first element vanish at r=0; extra orders cover it
      const int q = (e == 0 && ell >= 1) ? pdeg + 7 : pdeg + 3;
      accumulate(e, mapped_rule(gauss_legendre(q), a, b), true, true, 0.0, 0.0,
                 false);
    }
  }

  // B must be s.p.d.; fail loudly if quadrature or mesh broke it.
  Eigen::LLT<Eigen::MatrixXd> llt(forms.B);
  if (llt.info() != Eigen::Success)
    throw NumericalError("assemble_forms: weighted mass matrix not positive definite");
  return forms;
}

/// Load vector F_i = int f(r) phi_i r^{N-1} dr on the same basis, with a
/// geometrically refined tail on the last element (data such as delta-rho
/// carries an integrable endpoint singularity).
inline Eigen::VectorXd assemble_load(const Parameters& p, int ell, const RadialGrid& grid,
                                     const std::function<double(double)>& f) {
  const int pdeg = grid.degree;
  const int nel = grid.elements();
  const bool drop_origin = ell >= 1;
  const int ndof = grid.n_nodes() - (drop_origin ? 1 : 0);
  Eigen::VectorXd F = Eigen::VectorXd::Zero(ndof);
  const std::vector<double> tref = detail::reference_nodes(pdeg);
  std::vector<double> phi, dphi;

  auto add_panel = [&](int e, double a, double b) {
    const double ea = grid.nodes[e], eb = grid.nodes[e + 1];
    const QuadratureRule rule = mapped_rule(gauss_legendre(pdeg + 4), a, b);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double r = rule.nodes[q];
      detail::lagrange_eval(tref, (r - ea) / (eb - ea), phi, dphi);
      const double v = rule.weights[q] * f(r) * std::pow(r, p.dim - 1);
      for (int i = 0; i <= pdeg; ++i) {
        const int gi = e * pdeg + i - (drop_origin ? 1 : 0);
        if (gi >= 0) F(gi) += v * phi[i];
      }
    }
  };

  for (int e = 0; e < nel; ++e) {
    const double a = grid.nodes[e], b = grid.nodes[e + 1];
    if (e == nel - 1) {
      double left = a, len = (b - a) * 0.5;
      for (int lev = 0; lev < 40; ++lev) {
        const double right = (lev == 39) ? b : left + len;
        add_panel(e, left, right);
        left = right;
        len *= 0.5;
      }
    } else {
      add_panel(e, a, b);
    }
  }
  return F;
}

/// Nodal interpolant of a function on the retained DOFs.
inline Eigen::VectorXd interpolate_nodal(const DiscreteForms& forms,
                                         const std::function<double(double)>& f) {
  Eigen::VectorXd v(forms.dof_r.size());
  for (std::size_t i = 0; i < forms.dof_r.size(); ++i) v(i) = f(forms.dof_r[i]);
  return v;
}

}  // namespace pme
