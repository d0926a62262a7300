#include <catch2/catch_amalgamated.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "pmelab/profile.hpp"

using namespace pme;

TEST_CASE("Parameters validation and derived constants") {
  REQUIRE_THROWS_AS(Parameters(1.0, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(Parameters(0.5, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(Parameters(2.0, 0), std::invalid_argument);
  const Parameters p(2.0, 3);
  REQUIRE(std::abs(p.alpha - 1.0 / (3.0 * 1.0 + 2.0)) <= 1e-15);
}

TEST_CASE("Barenblatt profile values") {
  REQUIRE(barenblatt_density(Parameters(2.0, 1), 0.0) == Catch::Approx(0.25));
  for (double m : {1.3, 2.0, 3.5, 7.0}) {
    REQUIRE(barenblatt_density(Parameters(m, 2), 1.0) == 0.0);
    REQUIRE(barenblatt_density(Parameters(m, 2), 1.7) == 0.0);
    REQUIRE(barenblatt_density(Parameters(m, 2), 0.999) > 0.0);
  }
  REQUIRE(barenblatt_density(Parameters(3.0, 2), 0.6) ==
          Catch::Approx(std::sqrt(0.64 / 3.0)).epsilon(1e-12));
  REQUIRE_THROWS_AS(barenblatt_density(Parameters(2.0, 1), -0.1), std::domain_error);
}

TEST_CASE("normalization identity (2m/(m-1)) rho^{m-1} + r^2 = 1 on the support") {
  for (double m : {1.2, 1.5, 2.0, 3.0, 6.0}) {
    const Parameters p(m, 2);
    for (int i = 0; i <= 50; ++i) {
      const double r = i / 50.0;
      const double lhs = 2.0 * m / (m - 1.0) *
                             std::pow(barenblatt_density(p, r), m - 1.0) +
                         r * r;
      REQUIRE(lhs == Catch::Approx(1.0).margin(1e-14));
    }
  }
}

TEST_CASE("self-similar solution values and support") {
  const Parameters p(2.0, 1);
  const std::vector<double> origin{0.0};
  REQUIRE(selfsimilar_density(p, 1.0, 1.0, origin) == Catch::Approx(1.0));
  // outside the support: |x|^2 >= 2 m L t^{2a} / (a (m-1))
  const double t = 2.0, L = 1.0;
  const double edge2 = 2.0 * p.m * L * std::pow(t, 2.0 * p.alpha) / (p.alpha * (p.m - 1.0));
  const std::vector<double> out{std::sqrt(edge2) * 1.0001};
  REQUIRE(selfsimilar_density(p, L, t, out) == 0.0);
  REQUIRE_THROWS_AS(selfsimilar_density(p, L, 0.0, origin), std::domain_error);
}

TEST_CASE("self-similar mass is conserved in t (quadrature oracle)") {
  for (auto [m, N] : {std::pair{2.0, 1}, {1.5, 2}}) {
    const Parameters p(m, N);
    const double L = 0.7;
    boost::math::quadrature::tanh_sinh<double> ts;
    auto mass_at = [&](double t) {
      const double R =
          std::sqrt(2.0 * p.m * L * std::pow(t, 2.0 * p.alpha) / (p.alpha * (p.m - 1.0)));
      return ts.integrate(
          [&](double r) {
            std::vector<double> x(N, 0.0);
            x[0] = r;
            return selfsimilar_density(p, L, t, x) * sphere_area(N) *
                   std::pow(r, N - 1);
          },
          0.0, R);
    };
    const double m1 = mass_at(1.0), m2 = mass_at(2.0), m4 = mass_at(4.0);
    REQUIRE(m2 == Catch::Approx(m1).epsilon(1e-8));
    REQUIRE(m4 == Catch::Approx(m1).epsilon(1e-8));
  }
}

TEST_CASE("rescaling between original and confined variables") {
  const Parameters p(2.3, 2);
  const Rescaling resc(p, 0.9);
  const std::vector<double> x{0.4, -0.2};

  auto fwd = resc.forward(1.0, x, 0.7);
  REQUIRE(fwd.t_hat == 0.0);
  REQUIRE(fwd.x_hat[0] == Catch::Approx(x[0] / resc.beta));
  REQUIRE(fwd.x_hat[1] == Catch::Approx(x[1] / resc.beta));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  for (int i = 0; i < 25; ++i) {
    const double t = unif(rng), rho = unif(rng);
    const std::vector<double> pt{unif(rng), -unif(rng)};
    const auto mid = resc.forward(t, pt, rho);
    const auto back = resc.inverse(mid.t_hat, mid.x_hat, mid.rho_hat);
    REQUIRE(back.t == Catch::Approx(t).epsilon(1e-12));
    REQUIRE(back.x[0] == Catch::Approx(pt[0]).epsilon(1e-12));
    REQUIRE(back.x[1] == Catch::Approx(pt[1]).epsilon(1e-12));
    REQUIRE(back.rho == Catch::Approx(rho).epsilon(1e-12));
  }
}

TEST_CASE("self-similar solution maps forward onto the Barenblatt profile") {
  for (auto [m, N] : {std::pair{2.0, 1}, {1.7, 3}}) {
    const Parameters p(m, N);
    const double L = 1.3;
    const Rescaling resc(p, L);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(0.05, 1.5);
    for (int i = 0; i < 20; ++i) {
      const double t = unif(rng);
      std::vector<double> x(N, 0.0);
      x[0] = 0.4 * unif(rng);
      const double rho = selfsimilar_density(p, L, t, x);
      const auto hat = resc.forward(t, x, rho);
      const double r_hat = std::sqrt(norm2(hat.x_hat));
      REQUIRE(hat.rho_hat ==
              Catch::Approx(barenblatt_density(p, r_hat)).margin(1e-12));
    }
  }
}

TEST_CASE("entropy of the Barenblatt profile vs adaptive quadrature oracle") {
  const Parameters p(2.0, 1);
  const RadialField f = sample_barenblatt(p, 2000);
  const double got = entropy(p, f);

  boost::math::quadrature::tanh_sinh<double> ts;
  const double expect = ts.integrate(
      [&](double r) {
        const double rho = barenblatt_density(p, r);
        return 2.0 * (std::pow(rho, p.m) / (p.m - 1.0) + 0.5 * r * r * rho);
      },
      0.0, 1.0);
  REQUIRE(got == Catch::Approx(expect).epsilon(1e-8));
}

TEST_CASE("entropy is minimized by the stationary profile") {
  for (auto [m, N] : {std::pair{2.0, 1}, {1.6, 2}}) {
    const Parameters p(m, N);
    const RadialField base = sample_barenblatt(p, 1500);
    // mass-preserving 10% dilation
    const double a = 1.1;
    std::vector<double> grid, vals;
    for (int i = 0; i < 1500; ++i) {
      const double xi = i / 1499.0;
      const double r = (1.0 - std::pow(1.0 - xi, 2.0)) * a;
      grid.push_back(r);
      vals.push_back(barenblatt_density(p, r / a) / std::pow(a, N));
    }
    const RadialField dilated(grid, vals, FieldKind::density);
    REQUIRE(entropy(p, base) < entropy(p, dilated));
  }
  const Parameters p(2.0, 1);
  RadialField zero({0.0, 0.5, 1.0}, {0.0, 0.0, 0.0}, FieldKind::density);
  REQUIRE(entropy(p, zero) == 0.0);
}

TEST_CASE("dissipation vanishes on the stationary profile and is nonnegative") {
  for (auto [m, N] : {std::pair{2.0, 1}, {1.5, 2}, {3.0, 3}}) {
    const Parameters p(m, N);
    const RadialField f = sample_barenblatt(p, 2000);
    const double d = dissipation(p, f);
    REQUIRE(d >= 0.0);
    REQUIRE(d <= 1e-8);
  }
  // generic field: nonnegative
  const Parameters p(2.0, 2);
  std::vector<double> g, v;
  for (int i = 0; i <= 400; ++i) {
    g.push_back(i / 400.0 * 1.2);
    v.push_back(std::max(0.0, 0.3 - 0.2 * g.back() * g.back()));
  }
  REQUIRE(dissipation(p, RadialField(g, v, FieldKind::density)) >= 0.0);
}

TEST_CASE("dissipation of a translated profile vs central-difference oracle") {
  const Parameters p(2.0, 1);
  const double shift = 0.1;
  // implementation input: axis field
  std::vector<double> grid, vals;
  const int n = 10000;
  for (int i = 0; i <= n; ++i) {
    const double x = -1.2 + 2.6 * i / n;
    grid.push_back(x);
    vals.push_back(barenblatt_density(p, std::abs(x - shift)));
  }
  const double got = dissipation(p, RadialField(grid, vals, FieldKind::density));

  // oracle: fine uniform grid, central differences, trapezoid
  const int no = 200000;
  const double h = 2.6 / no;
  std::vector<double> phi(no + 1), rho(no + 1);
  for (int i = 0; i <= no; ++i) {
    const double x = -1.2 + h * i;
    rho[i] = barenblatt_density(p, std::abs(x - shift));
    phi[i] = 0.5 * x * x + p.m / (p.m - 1.0) * std::pow(rho[i], p.m - 1.0);
  }
  double oracle = 0.0;
  std::vector<double> integrand(no + 1, 0.0);
  for (int i = 1; i < no; ++i) {
    const double g = (phi[i + 1] - phi[i - 1]) / (2.0 * h);
    integrand[i] = rho[i] * g * g;
  }
  for (int i = 0; i < no; ++i) oracle += 0.5 * (integrand[i] + integrand[i + 1]) * h;

  REQUIRE(got > 0.0);
  REQUIRE(got == Catch::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("field validation rejects bad input") {
  REQUIRE_THROWS_AS(RadialField({0.0, 0.1}, {1.0, -0.2}, FieldKind::density),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(RadialField({0.2, 0.1}, {1.0, 0.2}, FieldKind::density),
                    std::invalid_argument);
  const Parameters p(2.0, 1);
  RadialField pot({0.0, 0.5, 1.0}, {0.1, 0.2, 0.3}, FieldKind::potential);
  REQUIRE_THROWS_AS(entropy(p, pot), std::domain_error);
  REQUIRE_THROWS_AS(dissipation(p, pot), std::domain_error);
}

TEST_CASE("closed-form Barenblatt mass matches quadrature") {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (auto [m, N] : {std::pair{2.0, 1}, {1.5, 2}, {3.0, 3}}) {
    const Parameters p(m, N);
    const double quad = ts.integrate(
        [&](double r) {
          return barenblatt_density(p, r) * sphere_area(N) * std::pow(r, N - 1);
        },
        0.0, 1.0);
    REQUIRE(barenblatt_mass(p) == Catch::Approx(quad).epsilon(1e-10));
  }
}
