#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pmelab/params.hpp"

namespace pme {

/// Nodes and weights of a quadrature rule on a reference or mapped interval.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  template <class F>
  double apply(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// Gauss-Jacobi rule on (-1,1) for the weight (1-x)^alpha (1+x)^beta,
/// computed by Golub-Welsch from the three-term recurrence of the Jacobi
/// polynomials. alpha, beta > -1. alpha = beta = 0 gives Gauss-Legendre.
inline QuadratureRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: need n >= 1");
  if (alpha <= -1.0 || beta <= -1.0)
    throw std::invalid_argument("gauss_jacobi: exponents must be > -1");

  const double ab = alpha + beta;
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
  diag[0] = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
    diag[k] = (beta * beta - alpha * alpha) / den;
  }
  for (int k = 1; k < n; ++k) {
    double b2;
    if (k == 1) {
      b2 = 4.0 * (alpha + 1.0) * (beta + 1.0) /
           ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
    } else {
      const double t = 2.0 * k + ab;
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
           (t * t * (t + 1.0) * (t - 1.0));
    }
    sub[k - 1] = std::sqrt(b2);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw NumericalError("gauss_jacobi: tridiagonal eigensolve failed");

  // mu0 = integral of the weight over (-1,1).
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) +
                              std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                              std::lgamma(ab + 2.0));
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()[i];
    const double v = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v * v;
  }
  return rule;
}

inline QuadratureRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

/// Map a reference rule on (-1,1) to the interval [a,b] for plain integrals
/// of f: sum w f(x) ~ int_a^b f.
inline QuadratureRule mapped_rule(const QuadratureRule& ref, double a, double b) {
  QuadratureRule r;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  r.nodes.resize(ref.nodes.size());
  r.weights.resize(ref.nodes.size());
  for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
    r.nodes[i] = mid + half * ref.nodes[i];
    r.weights[i] = half * ref.weights[i];
  }
  return r;
}

/// Rule on [a,b] absorbing the endpoint weight (b-x)^alpha (x-a)^beta:
/// sum w_i g(x_i) ~ int_a^b (b-x)^alpha (x-a)^beta g(x) dx.
inline QuadratureRule jacobi_rule_on(int n, double alpha, double beta, double a,
                                     double b) {
  QuadratureRule ref = gauss_jacobi(n, alpha, beta);
  QuadratureRule r;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  const double scale = std::pow(half, alpha + beta + 1.0);
  r.nodes.resize(ref.nodes.size());
  r.weights.resize(ref.nodes.size());
  for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
    r.nodes[i] = mid + half * ref.nodes[i];
    r.weights[i] = scale * ref.weights[i];
  }
  return r;
}

/// Composite Gauss-Legendre over [a,b] with geometric grading toward the
/// right endpoint; used for integrands with an (integrable) endpoint
/// singularity at b whose exponent is not known in closed form.
template <class F>
double integrate_graded_right(F&& f, double a, double b, int points = 7,
                              int levels = 48) {
  if (!(b > a)) return 0.0;
  const QuadratureRule ref = gauss_legendre(points);
  double total = 0.0;
  double left = a;
  double len = (b - a) * 0.5;
  for (int lev = 0; lev < levels; ++lev) {
    const double right = (lev == levels - 1) ? b : left + len;
    total += mapped_rule(ref, left, right).apply(f);
    left = right;
    len *= 0.5;
    if (left >= b) break;
  }
  return total;
}

}  // namespace pme
