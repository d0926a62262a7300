#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "pmelab/eigensolver.hpp"
#include "pmelab/fem.hpp"
#include "pmelab/spectrum.hpp"

using namespace pme;

TEST_CASE("solve_generalized on a hand 2x2 case") {
  DiscreteForms forms{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2),
                      Parameters(2.0, 1), 1, RadialGrid::graded(4, 1), {0.5, 1.0}};
  forms.A(0, 0) = 2.0;
  forms.A(1, 1) = 6.0;
  const EigenPairs pairs = solve_generalized(forms, 2);
  REQUIRE(pairs.values(0) == Catch::Approx(2.0));
  REQUIRE(pairs.values(1) == Catch::Approx(6.0));

  // a singular B is a conditioning error
  forms.B(1, 1) = 0.0;
  REQUIRE_THROWS_AS(solve_generalized(forms, 1), NumericalError);
}

TEST_CASE("assembled forms: symmetry, constant kernel, positivity") {
  const Parameters p(2.0, 2);
  const RadialGrid grid = RadialGrid::graded(16, 3);
  const DiscreteForms f0 = assemble_forms(p, 0, grid);
  REQUIRE((f0.A - f0.A.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  REQUIRE((f0.B - f0.B.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  // constants span the kernel of A for ell = 0
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(f0.A.rows());
  const double scale = f0.A.cwiseAbs().maxCoeff();
  REQUIRE((f0.A * ones).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  // B positive definite (Cholesky succeeded at assembly); A PSD: smallest
  // eigenvalue of the deflated pencil is positive
  const EigenPairs pairs = solve_generalized(f0, 3);
  REQUIRE(pairs.values(0) > 0.0);

  const DiscreteForms f1 = assemble_forms(p, 1, grid);
  REQUIRE((f1.A - f1.A.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  // essential condition at the origin removed one DOF
  REQUIRE(f1.A.rows() == f0.A.rows() - 1);
}

TEST_CASE("Rayleigh quotient of the interpolated closed-form eigenfunction") {
  const Parameters p(2.0, 1);
  const RadialGrid grid = RadialGrid::graded(64, 3);
  const DiscreteForms forms = assemble_forms(p, 1, grid);
  const Polynomial f11 = radial_eigenfunction(p, 1, 1);
  const Eigen::VectorXd v =
      interpolate_nodal(forms, [&](double r) { return f11(r); });
  const double rayleigh = v.dot(forms.A * v) / v.dot(forms.B * v);
  REQUIRE(rayleigh == Catch::Approx(eigenvalue(p, 1, 1)).epsilon(1e-3));
}

TEST_CASE("generalized eigenpairs: residual, B-orthonormality, eigenvector shape") {
  const Parameters p(2.0, 1);
  const DiscreteForms forms = assemble_forms(p, 1, RadialGrid::graded(48, 3));
  const int count = 3;
  const EigenPairs pairs = solve_generalized(forms, count);

  for (int j = 0; j < count; ++j) {
    const Eigen::VectorXd av = forms.A * pairs.vectors.col(j);
    const Eigen::VectorXd bv = forms.B * pairs.vectors.col(j);
    REQUIRE((av - pairs.values(j) * bv).norm() <= 1e-8 * bv.norm() * pairs.values(j));
  }
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j) {
      const double g = pairs.vectors.col(i).dot(forms.B * pairs.vectors.col(j));
      REQUIRE(g == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-10));
    }

  // discrete eigenvector tracks the closed form in L2(B) after
  // B-normalization and the positive-peak sign convention
  const Polynomial f10 = radial_eigenfunction(p, 1, 0);
  Eigen::VectorXd v = interpolate_nodal(forms, [&](double r) { return f10(r); });
  v /= std::sqrt(v.dot(forms.B * v));
  int imax = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
  if (v(imax) < 0.0) v = -v;
  const Eigen::VectorXd diff = v - pairs.vectors.col(0);
  REQUIRE(std::sqrt(diff.dot(forms.B * diff)) <= 1e-2);
}

TEST_CASE("numerical spectrum matches Theorem-level closed forms") {
  // acceptance sweeps all four (m,N); keep one light pair here
  const Parameters p(1.5, 2);
  const SpectrumComparison cmp = numerical_spectrum(p, 0, 128, 3, 4);
  REQUIRE(cmp.rows.size() == 4);
  for (const auto& row : cmp.rows) {
    REQUIRE(row.k >= 1);  // ell = 0 excludes the constant mode (0,0)
    REQUIRE(row.lambda_closed > 0.0);
    REQUIRE(row.rel_error <= 1e-3);
  }
  REQUIRE(cmp.max_rel_error <= 1e-3);

  // visible-error regime: refinement reduces the error at least 2x
  const SpectrumComparison coarse = numerical_spectrum(p, 2, 16, 3, 4);
  REQUIRE(coarse.converged);
  REQUIRE(coarse.refined_max_rel_error <=
          std::max(0.5 * coarse.max_rel_error, 1e-12));
}

TEST_CASE("count validation") {
  const Parameters p(2.0, 1);
  const DiscreteForms forms = assemble_forms(p, 1, RadialGrid::graded(4, 1));
  REQUIRE_THROWS_AS(solve_generalized(forms, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(solve_generalized(forms, 100), std::invalid_argument);
  REQUIRE_THROWS_AS(numerical_spectrum(p, 1, 4, 1, 100), std::invalid_argument);
}
