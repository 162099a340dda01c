#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "hyplab/eigen2d.hpp"
#include "hyplab/radial.hpp"
#include "support.hpp"

using namespace hyplab;

TEST_CASE("grid nodes are exactly the lattice points inside the ball") {
  const double r = 0.5, h = 0.01;
  const double s = std::tanh(r / 2);
  const DiskGrid g(StarDomain::ball(r), h);
  std::size_t count = 0;
  const int m = static_cast<int>(s / h) + 2;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j)
      if (std::hypot(i * h, j * h) < s) ++count;
  CHECK(g.size() == count);
  CHECK(g.index(0, 0) >= 0);
  CHECK(g.index(m, 0) == -1);
}

TEST_CASE("cut arms end on the boundary") {
  const StarDomain d = StarDomain::fourier(0.6, {0.0, 0.05}, {0.02});
  const DiskGrid g(d, 0.01);
  const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
  std::size_t cut = 0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto& nd = g.nodes()[n];
    CHECK(nd.weight == doctest::Approx(std::pow(conformal_factor(nd.x), 2)));
    for (int a = 0; a < 4; ++a) {
      const double f = nd.arm[a];
      CHECK(f > 0.0);
      CHECK(f <= 1.0);
      if (g.neighbour(n, static_cast<Arm>(a)) >= 0) {
        CHECK(f == 1.0);
        continue;
      }
      ++cut;
      const DiskPoint b{nd.x.x1 + f * g.h() * dx[a], nd.x.x2 + f * g.h() * dy[a]};
      const PolarPoint p = disk_to_polar(b);
      CHECK(p.r == doctest::Approx(d.rho(p.theta)).epsilon(1e-9));
    }
  }
  CHECK(cut > 0);
}

TEST_CASE("grid limits") {
  CHECK(thrown([] { DiskGrid(StarDomain::ball(4.0), 0.01); }) == "domain-too-large");
  CHECK(thrown([] { DiskGrid(StarDomain::ball(0.5), 0.2); }) == "invalid-argument");
  CHECK(thrown([] { DiskGrid(StarDomain::ball(0.5), 1e-5); }) == "invalid-argument");
}

TEST_CASE("iterative eigenpairs agree with a dense solve on a small grid") {
  auto grid = std::make_shared<const DiskGrid>(StarDomain::fourier(0.5, {0.0, 0.04}, {}), 0.04);
  const Operator op = assemble(*grid);
  const Eigen::MatrixXd a = Eigen::MatrixXd(op.a);
  const Eigen::MatrixXd winv_a = op.w.cwiseInverse().asDiagonal() * a;
  Eigen::EigenSolver<Eigen::MatrixXd> es(winv_a);
  std::vector<double> ev;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    CHECK(std::abs(es.eigenvalues()[i].imag()) < 1e-8 * std::abs(es.eigenvalues()[i].real()));
    CHECK(es.eigenvalues()[i].real() > 0.0);
    ev.push_back(es.eigenvalues()[i].real());
  }
  std::sort(ev.begin(), ev.end());
  const EigenSolution sol = solve_eigs(grid, op, 2);
  CHECK(sol.mu_values[0] == doctest::Approx(ev[0]).epsilon(1e-9));
  CHECK(sol.mu_values[1] == doctest::Approx(ev[1]).epsilon(1e-9));
  CHECK(sol.residuals[0] < 1e-8);
  CHECK(sol.residuals[1] < 1e-8);
}

TEST_CASE("first eigenvector is positive with an interior maximum") {
  const EigenSolution sol = solve_domain(StarDomain::fourier(0.5, {0.0, 0.03}, {0.02}), 0.01, 1);
  const Eigen::VectorXd& v = sol.eigenvectors[0];
  CHECK(v.minCoeff() > 0.0);
  Eigen::Index imax;
  CHECK(v.maxCoeff(&imax) == doctest::Approx(1.0));
  const auto& nd = sol.grid->nodes()[static_cast<std::size_t>(imax)];
  for (double f : nd.arm) CHECK(f == 1.0);
}

TEST_CASE("second order convergence on a ball") {
  const double r = 0.5;
  const double exact = radial::mu_ball(2, r, 0, 1).mu;
  const double e1 = std::abs(solve_domain(StarDomain::ball(r), 0.02, 1).mu_values[0] - exact);
  const double e2 = std::abs(solve_domain(StarDomain::ball(r), 0.01, 1).mu_values[0] - exact);
  const double e3 = std::abs(solve_domain(StarDomain::ball(r), 0.005, 1).mu_values[0] - exact);
  MESSAGE("errors " << e1 << " " << e2 << " " << e3);
  CHECK(std::log2(e1 / e3) / 2.0 >= 1.8);
  CHECK(e3 < 1e-3 * exact);
}

TEST_CASE("domain monotonicity") {
  const double h = 0.01;
  const double small = solve_domain(StarDomain::ball(0.4), h, 1).mu_values[0];
  const double large = solve_domain(StarDomain::ball(0.5), h, 1).mu_values[0];
  CHECK(small > large);
  // Ball of radius 0.9 sits inside 1 + 0.05 cos 2 theta.
  const double inner = solve_domain(StarDomain::ball(0.9), h, 1).mu_values[0];
  const double outer = solve_domain(StarDomain::fourier(1.0, {0.0, 0.05}, {}), h, 1).mu_values[0];
  CHECK(inner > outer);
}

TEST_CASE("similar domains: eigenvalue decreases with a0") {
  double prev = 1e300;
  for (double a0 : {0.3, 0.45, 0.6}) {
    const double mu = solve_domain(StarDomain::fourier(a0, {0.0, 0.05 * a0}, {}), 0.01, 1).mu_values[0];
    CHECK(mu < prev);
    prev = mu;
  }
}

TEST_CASE("ball spectrum: mu2 is the doubly degenerate l=1 mode") {
  const EigenSolution sol = solve_domain(StarDomain::ball(0.5), 0.01, 2);
  const double m1 = radial::mu_ball(2, 0.5, 0, 1).mu, m2 = radial::mu_ball(2, 0.5, 1, 1).mu;
  CHECK(sol.mu_values[0] == doctest::Approx(m1).epsilon(2e-3));
  CHECK(sol.mu_values[1] == doctest::Approx(m2).epsilon(2e-3));
  CHECK(sol.mu_values[1] > sol.mu_values[0]);
}

TEST_CASE("gap report") {
  const GapReport g = gap_domain(StarDomain::ball(0.5), 0.01);
  CHECK(g.gap > 0.0);
  CHECK(g.diameter == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(g.reference_scale == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-8));
  CHECK(richardson(1.0, 2.0) == doctest::Approx(7.0 / 3.0));
}

TEST_CASE("solver argument errors") {
  auto grid = std::make_shared<const DiskGrid>(StarDomain::ball(0.5), 0.05);
  const Operator op = assemble(*grid);
  CHECK(thrown([&] { solve_eigs(grid, op, 3); }) == "invalid-argument");
  EigenSolveOptions tight;
  tight.max_iterations = 1;
  CHECK(thrown([&] { solve_eigs(grid, op, 1, tight); }) == "no-convergence");
}

TEST_CASE("node count matches the Euclidean disk area") {
  const double h = 0.01, s = std::tanh(0.5);
  const DiskGrid g = build_grid(StarDomain::ball(1.0), h);
  const double expected = std::numbers::pi * s * s / (h * h);
  CHECK(std::abs(static_cast<double>(g.size()) - expected) <= 0.05 * expected);
  CHECK(thrown([] { build_grid(StarDomain::ball(20.0), 0.01); }) == "domain-too-large");
}

TEST_CASE("assembled operator: interior rows and weights") {
  const DiskGrid g(StarDomain::ball(0.5), 0.02);
  const Operator op = assemble(g);
  const double h2 = g.h() * g.h();
  CHECK(op.w.minCoeff() >= 4.0);
  const int c = g.index(0, 0);
  CHECK(op.a.coeff(c, c) == doctest::Approx(4.0 / h2));
  for (int q : {g.index(1, 0), g.index(-1, 0), g.index(0, 1), g.index(0, -1)}) {
    CHECK(op.a.coeff(c, q) == doctest::Approx(-1.0 / h2));
  }
  Eigen::SparseMatrix<double> row = op.a.row(c);
  CHECK(row.nonZeros() == 5);
}

TEST_CASE("operator is positive definite on a small grid") {
  const DiskGrid g(StarDomain::ball(0.4), 0.05);
  CHECK(g.size() >= 40);
  CHECK(g.size() <= 60);
  const Eigen::MatrixXd a = Eigen::MatrixXd(assemble(g).a);
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  double smallest = 1e300;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) smallest = std::min(smallest, es.eigenvalues()[i].real());
  CHECK(smallest > 0.0);
}

TEST_CASE("small ball approaches the flat Bessel limit") {
  const double j01 = 2.404825557695773;
  const EigenSolution sol = solve_domain(StarDomain::ball(0.1), 0.002, 1);
  CHECK(sol.mu_values[0] == doctest::Approx(j01 * j01 / 0.01).epsilon(1e-2));
}
