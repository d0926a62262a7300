#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pmelab/fem.hpp"
#include "pmelab/params.hpp"
#include "pmelab/spectrum.hpp"

namespace pme {

/// Ascending generalized eigenpairs A v = lambda B v; the columns of
/// `vectors` are B-orthonormal.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  std::vector<double> dof_r;
};

namespace detail {

// Orthonormal basis of the complement of w (Householder reflector columns).
inline Eigen::MatrixXd complement_basis(const Eigen::VectorXd& w) {
  const int n = static_cast<int>(w.size());
  Eigen::VectorXd u = w;
  const double nw = w.norm();
  u(0) += (w(0) >= 0.0 ? nw : -nw);
  const double un2 = u.squaredNorm();
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  if (un2 > 0.0) H -= (2.0 / un2) * (u * u.transpose());
  return H.rightCols(n - 1);
}

}  // namespace detail

/// Reduce A v = lambda B v to a standard symmetric problem via the Cholesky
/// factor of B and solve with a dense symmetric eigensolver. For l = 0 the
/// constant kernel of A is deflated first by restricting to the
/// B-orthogonal complement of the constant vector.
inline EigenPairs solve_generalized(const DiscreteForms& forms, int count) {
  const int n = static_cast<int>(forms.A.rows());
  if (count < 1 || count > n - (forms.ell == 0 ? 1 : 0))
    throw std::invalid_argument("solve_generalized: count out of range");

  Eigen::MatrixXd A = forms.A, B = forms.B;
  Eigen::MatrixXd Z;  // deflation basis (identity when absent)
  if (forms.ell == 0) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    Z = detail::complement_basis(forms.B * ones);
    A = Z.transpose() * forms.A * Z;
    B = Z.transpose() * forms.B * Z;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success)
    throw NumericalError(
        "solve_generalized: Cholesky of the weighted mass matrix failed "
        "(ill-conditioned basis?)");

  Eigen::MatrixXd half = llt.matrixL().solve(A);
  Eigen::MatrixXd C = llt.matrixL().solve(half.transpose()).transpose();
  C = 0.5 * (C + C.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success)
    throw NumericalError("solve_generalized: symmetric eigensolver failed");

  EigenPairs out;
  out.values = es.eigenvalues().head(count);
  out.vectors.resize(n, count);
  out.dof_r = forms.dof_r;
  for (int j = 0; j < count; ++j) {
    Eigen::VectorXd v = llt.matrixU().solve(es.eigenvectors().col(j));
    if (forms.ell == 0) v = (Z * v).eval();
    // sign convention: largest-magnitude entry positive
    int imax = 0;
    for (int i = 1; i < v.size(); ++i)
      if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
    if (v(imax) < 0.0) v = -v;
    out.vectors.col(j) = v;
  }
  return out;
}

struct ComparisonRow {
  int k;
  double lambda_closed;
  double lambda_numeric;
  double rel_error;
};

/// Side-by-side closed-form vs discretized spectrum, with a convergence
/// flag from one uniform mesh refinement.
struct SpectrumComparison {
  int ell;
  int elements;
  int degree;
  std::vector<ComparisonRow> rows;
  bool converged;
  double max_rel_error;
  double refined_max_rel_error;
};

inline SpectrumComparison numerical_spectrum(const Parameters& p, int ell,
                                             int elements, int degree, int count) {
  auto run = [&](int nel) {
    const RadialGrid grid = RadialGrid::graded(nel, degree);
    const DiscreteForms forms = assemble_forms(p, ell, grid);
    const int ndof = static_cast<int>(forms.A.rows());
    if (2 * count > ndof)
      throw std::invalid_argument("numerical_spectrum: count exceeds basis size/2");
    return solve_generalized(forms, count);
  };

  const EigenPairs base = run(elements);
  const EigenPairs fine = run(2 * elements);

  SpectrumComparison cmp{ell, elements, degree, {}, false, 0.0, 0.0};
  for (int i = 0; i < count; ++i) {
    const int k = (ell == 0) ? i + 1 : i;
    const double closed = eigenvalue(p, ell, k);
    const double numeric = base.values(i);
    const double rel = std::abs(numeric - closed) / std::abs(closed);
    cmp.rows.push_back({k, closed, numeric, rel});
    cmp.max_rel_error = std::max(cmp.max_rel_error, rel);
    const double rel_fine = std::abs(fine.values(i) - closed) / std::abs(closed);
    cmp.refined_max_rel_error = std::max(cmp.refined_max_rel_error, rel_fine);
  }
  cmp.converged = cmp.refined_max_rel_error <= 0.5 * cmp.max_rel_error ||
                  cmp.refined_max_rel_error <= 1e-12;
  return cmp;
}

}  // namespace pme
