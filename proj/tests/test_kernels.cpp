#include <cmath>

#include "doctest.h"

#include "gffpin/kernels.hpp"
#include "gffpin/lattice.hpp"

using namespace gffpin;

TEST_CASE("free heat kernel") {
  // e^{-4} I_0(2)^2
  CHECK(heat_kernel_free({0, 0}, {0, 0}, 1.0) == doctest::Approx(0.09517738508487993).epsilon(1e-12));
  CHECK(heat_kernel_free({3, -2}, {1, 4}, 0.7) == doctest::Approx(heat_kernel_free({1, 4}, {3, -2}, 0.7)));
  CHECK(heat_kernel_free({0, 0}, {0, 0}, 1e-8) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK_THROWS_AS(heat_kernel_free({0, 0}, {0, 0}, 0.0), DomainError);
  // Each 1D kernel is a probability distribution.
  for (double t : {0.1, 1.0, 10.0}) {
    const auto p = heat_kernel_1d_table(t, 200);
    double s = p[0];
    for (int n = 1; n <= 200; ++n) s += 2.0 * p[n];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[3] == doctest::Approx(heat_kernel_1d(3, t)).epsilon(1e-12));
  }
}

TEST_CASE("Chapman-Kolmogorov for the free kernel") {
  const double s = 0.4, t = 0.7;
  const int R = 30;
  for (Site y : {Site{0, 0}, Site{2, 1}, Site{-3, 0}}) {
    double sum = 0.0;
    for (int a = -R; a <= R; ++a)
      for (int b = -R; b <= R; ++b) sum += heat_kernel_free({0, 0}, {a, b}, s) * heat_kernel_free({a, b}, y, t);
    CHECK(sum == doctest::Approx(heat_kernel_free({0, 0}, y, s + t)).epsilon(1e-6));
  }
}

TEST_CASE("Dirichlet heat kernel") {
  const BoxGeometry g2(2);
  for (double t : {0.1, 1.0, 3.0})
    CHECK(heat_kernel_dirichlet(g2, {1, 1}, {1, 1}, t) == doctest::Approx(std::exp(-4.0 * t)).epsilon(1e-13));
  const SpectralBasis b(12);
  // Eigenvalues increase in (0,4) and the basis is orthonormal.
  for (int i = 1; i < b.modes(); ++i) CHECK(b.lambda(i) < b.lambda(i + 1));
  CHECK(b.lambda(1) > 0.0);
  CHECK(b.lambda(b.modes()) < 4.0);
  const Eigen::MatrixXd I = b.S().transpose() * b.S();
  CHECK((I - Eigen::MatrixXd::Identity(b.modes(), b.modes())).cwiseAbs().maxCoeff() < 1e-12);
  for (int N : {4, 12, 33}) {
    const BoxGeometry g(N);
    const SpectralBasis bn(N);
    for (double t : {0.05, 0.5, 5.0, 50.0}) {
      CHECK(heat_kernel_dirichlet(bn, {0, 3}, {2, 2}, t) == 0.0);
      for (Site x : {Site{1, 1}, Site{N / 2, N / 2}, Site{1, N / 2}}) {
        const double pd = heat_kernel_dirichlet(bn, x, x, t);
        CHECK(pd >= 0.0);
        CHECK(pd <= heat_kernel_free(x, x, t) + 1e-14);
        const Site y{N / 2 - 1, N / 2 + 1};
        CHECK(heat_kernel_dirichlet(bn, x, y, t) == doctest::Approx(heat_kernel_dirichlet(bn, y, x, t)));
      }
    }
    CHECK(heat_kernel_dirichlet(g, {1, 2}, {2, 1}, 0.3) ==
          doctest::Approx(heat_kernel_dirichlet(bn, {1, 2}, {2, 1}, 0.3)));
  }
}

TEST_CASE("infinite-volume massive Green function, two routes") {
  const double g1 = green_massive_infinite({0, 0}, 1.0);
  CHECK(g1 == doctest::Approx(green_massive_infinite_time({0, 0}, 1.0)).epsilon(1e-8));
  for (Site x : {Site{1, 0}, Site{3, 2}, Site{0, 7}})
    for (double m : {0.5, 0.05}) {
      CHECK(std::abs(green_massive_infinite(x, m) - green_massive_infinite_time(x, m)) < 1e-8);
      CHECK(green_massive_infinite(x, m) == doctest::Approx(green_massive_infinite({-x.x1, -x.x2}, m)));
      CHECK(green_massive_infinite(x, m) == doctest::Approx(green_massive_infinite({x.x2, x.x1}, m)));
    }
  CHECK_THROWS_AS(green_massive_infinite({0, 0}, 0.0), DomainError);
  for (double m : {1e-1, 1e-2, 1e-3, 1e-4})
    CHECK(std::abs(green_massive_infinite({0, 0}, m) + std::log(m) / (2 * kPi)) < 2.0);
  const Eigen::MatrixXd T = green_massive_offset_table(5, 0.2);
  CHECK(T(2, 3) == doctest::Approx(green_massive_infinite({2, 3}, 0.2)).epsilon(1e-8));
  CHECK(T(3, 2) == doctest::Approx(T(2, 3)));
}

TEST_CASE("Dirichlet Green function: spectral sum against direct solve") {
  const BoxGeometry g2(2);
  const std::vector<int> c{g2.index(1, 1)};
  CHECK(green_dirichlet(g2, 0.0, c)(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(green_dirichlet(g2, 0.7, c)(0, 0) == doctest::Approx(1.0 / (4.0 + 0.49)).epsilon(1e-14));
  for (int N : {6, 15}) {
    const BoxGeometry g(N);
    for (double m : {0.0, 0.3}) {
      const auto& sites = g.interior_sites();
      const GreenTable a = green_dirichlet(g, m, sites);
      const GreenTable b = green_dirichlet_solve(g, m, sites);
      CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((a.values - a.values.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.values);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      for (std::size_t col : {std::size_t{0}, sites.size() / 2})
        CHECK(dirichlet_column_residual(g, a, col) < 1e-9);
      const SpectralBasis sb(N);
      const Site x = g.site(sites[3]), y = g.site(sites[sites.size() - 2]);
      CHECK(green_dirichlet_diag(sb, m, x) == doctest::Approx(a(3, 3)).epsilon(1e-12));
      CHECK(green_dirichlet_entry(sb, m, x, y) == doctest::Approx(a(3, sites.size() - 2)).epsilon(1e-12));
    }
    // Vanishes on the boundary.
    const std::vector<int> mixed{g.index(0, 2), g.index(2, 2)};
    const GreenTable t = green_dirichlet(g, 0.1, mixed);
    CHECK(t(0, 0) == 0.0);
    CHECK(t(0, 1) == 0.0);
  }
}

TEST_CASE("potential kernel") {
  CHECK(potential_kernel({0, 0}) == 0.0);
  CHECK(potential_kernel({1, 0}) == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(potential_kernel({0, 1}) == doctest::Approx(0.25).epsilon(1e-8));
  // (1/2 pi) log|x| + const, const = (2 gamma + log 8) / (4 pi) for this normalisation.
  const double c = (2 * 0.5772156649015329 + std::log(8.0)) / (4 * kPi);
  for (Site x : {Site{4, 0}, Site{10, 7}, Site{64, 0}, Site{300, 200}}) {
    const double r = std::hypot(x.x1, x.x2);
    CHECK(std::abs(potential_kernel(x) - std::log(r) / (2 * kPi) - c) < 0.01 / r);
  }
}

TEST_CASE("f(m)") {
  CHECK(f_of_m(0.5) == doctest::Approx(f_of_m_tensor(0.5)).epsilon(1e-9));
  CHECK(std::abs(f_of_m(0.05) - f_of_m_tensor(0.05)) < 1e-9);
  double prev = 0.0;
  for (double m : {1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0}) {
    const double f = f_of_m(m);
    CHECK(f > prev);
    prev = f;
  }
  CHECK(f_of_m(1e-6) < 1e-11);
  for (double m : {1e-1, 1e-2, 1e-3})
    CHECK(std::abs(f_of_m(m) - m * m * std::abs(std::log(m)) / (4 * kPi)) < 0.2 * m * m);
  CHECK_THROWS_AS(f_of_m(0.0), DomainError);
  CHECK_THROWS_AS(f_of_m(1.5), DomainError);
}

TEST_CASE("scale time grid with unit slices") {
  for (double m : {1e-8, 1e-10, 1e-12, 1e-14}) {
    const ScaleTimeGrid grid = scale_time_grid(m);
    REQUIRE(grid.k >= 3);
    CHECK(std::isinf(grid.t[0]));
    CHECK(grid.t[grid.k] == 0.0);
    for (int i = 1; i < grid.k; ++i) {
      CHECK(grid.t[i] < grid.t[i - 1]);
      CHECK(grid.slice_integral(i) == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(std::abs(std::log(grid.t[i]) - 4 * kPi * (grid.k - i)) <= 10.0);
    }
    const double last = grid.slice_integral(grid.k);
    CHECK(last >= 1.0 - 1e-8);
    CHECK(last < 2.0);
    double tot = 0.0;
    for (int i = 1; i <= grid.k; ++i) tot += grid.slice_integral(i);
    CHECK(tot == doctest::Approx(grid.g00).epsilon(1e-8));
  }
  for (double m : {1e-2, 1e-3, 1e-4, 1e-5}) CHECK(std::abs(scale_count(m) + std::log(m) / (2 * kPi)) <= 2.0);
  CHECK_THROWS_AS(scale_time_grid(0.3), DomainError);
  // A chosen unit yields exactly the requested count.
  for (int k : {1, 3, 5}) {
    const double unit = unit_for_scale_count(0.01, k);
    CHECK(scale_count(0.01, unit) == k);
  }
  CHECK(green_tail(0.1, 0.0) == doctest::Approx(green_massive_infinite({0, 0}, 0.1)).epsilon(1e-8));
  CHECK(slice_weight(2.0, 0.0, INFINITY) == doctest::Approx(0.5));
}

TEST_CASE("covariance slices sum to the Dirichlet Green function") {
  const BoxGeometry g(16);
  const double m = 0.05;
  const ScaleTimeGrid grid = scale_time_grid(m, unit_for_scale_count(m, 4), 3);
  const auto& sites = g.interior_sites();
  const GreenTable G = green_dirichlet(g, m, sites);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(sites.size(), sites.size());
  for (int i = 1; i <= grid.k; ++i) {
    const GreenTable Q = covariance_slice(g, grid, i, sites);
    CHECK((Q.values - Q.values.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q.values);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    sum += Q.values;
  }
  CHECK((sum - G.values).cwiseAbs().maxCoeff() < 1e-7);
  CHECK_THROWS_AS(covariance_slice(g, grid, 0, sites), IndexError);
  CHECK_THROWS_AS(covariance_slice(g, grid, grid.k + 1, sites), IndexError);

  const auto [Q1, Q2] = covariance_split(g, 0.0, std::pow(std::log(16.0), 8), sites);
  const GreenTable G0 = green_dirichlet(g, 0.0, sites);
  CHECK((Q1.values + Q2.values - G0.values).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("free massive Green table matches pointwise values") {
  const BoxGeometry g(6);
  const std::vector<int> sites{g.index(0, 0), g.index(3, 2), g.index(6, 5)};
  const GreenTable t = green_massive_table(g, 0.4, sites);
  CHECK(t(0, 1) == doctest::Approx(green_massive_infinite({3, 2}, 0.4)).epsilon(1e-8));
  CHECK(t(1, 2) == doctest::Approx(green_massive_infinite({3, 3}, 0.4)).epsilon(1e-8));
  CHECK(t(2, 2) == doctest::Approx(green_massive_infinite({0, 0}, 0.4)).epsilon(1e-8));
}
