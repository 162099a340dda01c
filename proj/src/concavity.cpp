#include "hyplab/concavity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hyplab/error.hpp"

namespace hyplab {

double Sym2::min_eigenvalue() const {
  const double mean = 0.5 * (a11 + a22);
  const double dev = std::hypot(0.5 * (a11 - a22), a12);
  return mean - dev;
}

double Sym2::max_eigenvalue() const {
  const double mean = 0.5 * (a11 + a22);
  const double dev = std::hypot(0.5 * (a11 - a22), a12);
  return mean + dev;
}

double LocalDerivatives::gradient_norm() const { return std::hypot(g1, g2); }

std::optional<LocalDerivatives> covariant_derivatives(const DiskGrid& grid,
                                                      std::span<const double> field,
                                                      std::size_t node) {
  const auto& nd = grid.nodes()[node];
  int idx[3][3];
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      const int q = grid.index(nd.i + di, nd.j + dj);
      if (q < 0) return std::nullopt;
      idx[dj + 1][di + 1] = q;
    }
  }
  auto f = [&](int di, int dj) { return field[static_cast<std::size_t>(idx[dj + 1][di + 1])]; };
  const double h = grid.h();
  const double f0 = f(0, 0);
  const std::array<double, 2> d1{(f(1, 0) - f(-1, 0)) / (2.0 * h), (f(0, 1) - f(0, -1)) / (2.0 * h)};
  const double f11 = (f(1, 0) - 2.0 * f0 + f(-1, 0)) / (h * h);
  const double f22 = (f(0, 1) - 2.0 * f0 + f(0, -1)) / (h * h);
  const double f12 = (f(1, 1) - f(-1, 1) - f(1, -1) + f(-1, -1)) / (4.0 * h * h);
  const double d2[2][2] = {{f11, f12}, {f12, f22}};

  const Christoffel gam = christoffel(nd.x);
  const double lam = conformal_factor(nd.x);
  double cov[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      cov[i][j] = d2[i][j] - gam[0][i][j] * d1[0] - gam[1][i][j] * d1[1];
    }
  }
  LocalDerivatives out;
  out.g1 = d1[0] / lam;
  out.g2 = d1[1] / lam;
  const double lam2 = lam * lam;
  out.hessian = {cov[0][0] / lam2, 0.5 * (cov[0][1] + cov[1][0]) / lam2, cov[1][1] / lam2};
  out.laplacian = (f11 + f22) / lam2;
  return out;
}

double default_delta(const DiskGrid& grid, double multiplier) {
  const double s = std::tanh(0.5 * grid.domain().max_rho(4096));
  return multiplier * grid.h() * 2.0 / (1.0 - s * s);
}

namespace {

struct Evaluation {
  std::vector<ConcavityPoint> points;
  std::vector<Sym2> hess_u;
  double mu1 = 0.0;
};

/// Nodes of the filtered interior with their derivatives of u = -log v.
Evaluation evaluate(const EigenSolution& solution, double delta, double v_floor) {
  if (!solution.grid || solution.eigenvectors.empty()) {
    throw Error("invalid-argument", "concavity needs a converged eigen solution");
  }
  if (!(v_floor > 0.0 && v_floor < 1.0)) throw Error("invalid-argument", "v_floor must be in (0, 1)");
  const DiskGrid& grid = *solution.grid;
  if (!(delta >= default_delta(grid, 3.0) * (1.0 - 1e-12))) {
    throw Error("invalid-argument", "boundary margin delta must be at least 3 grid cells");
  }
  const Eigen::VectorXd& v = solution.eigenvectors.front();
  const double vmax = v.maxCoeff();

  // Dense boundary samples; hyperbolic distance is monotone in the argument
  // z = |p - q|^2 / ((1 - |p|^2)(1 - |q|^2)), so we minimise z first.
  constexpr std::size_t kBoundary = 2048;
  std::vector<DiskPoint> bnd(kBoundary);
  std::vector<double> bnd_conf(kBoundary);
  for (std::size_t b = 0; b < kBoundary; ++b) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(b) / kBoundary;
    bnd[b] = polar_to_disk({grid.domain().rho(th), th});
    bnd_conf[b] = 1.0 - bnd[b].norm_sq();
  }
  const double cosh_delta = std::cosh(delta);
  const double z_min = 0.5 * (cosh_delta - 1.0);

  std::vector<double> u(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    u[p] = v[static_cast<Eigen::Index>(p)] > 0.0 ? -std::log(v[static_cast<Eigen::Index>(p)])
                                                 : std::numeric_limits<double>::infinity();
  }

  Evaluation ev;
  ev.mu1 = solution.mu_values.front();
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double vp = v[static_cast<Eigen::Index>(p)];
    if (!(vp >= v_floor * vmax)) continue;
    const DiskPoint x = grid.nodes()[p].x;
    const double cx = 1.0 - x.norm_sq();
    bool far = true;
    for (std::size_t b = 0; b < kBoundary && far; ++b) {
      const double dx = x.x1 - bnd[b].x1;
      const double dy = x.x2 - bnd[b].x2;
      if ((dx * dx + dy * dy) / (cx * bnd_conf[b]) < z_min) far = false;
    }
    if (!far) continue;
    const auto d = covariant_derivatives(grid, u, p);
    if (!d) continue;
    if (!std::isfinite(d->hessian.a11) || !std::isfinite(d->hessian.a22) ||
        !std::isfinite(d->hessian.a12) || !std::isfinite(d->g1) || !std::isfinite(d->g2)) {
      throw Error("non-finite", "log v derivatives are not finite above the floor");
    }
    ConcavityPoint cp;
    cp.x = x;
    cp.v = vp;
    cp.w = d->gradient_norm();
    cp.hess_log_v = {-d->hessian.a11, -d->hessian.a12, -d->hessian.a22};
    cp.pde_residual = d->laplacian - ev.mu1 - cp.w * cp.w;
    const double trace_lambda = d->hessian.trace() - 2.0 * cp.w;
    cp.trace_residual = trace_lambda - (ev.mu1 + cp.w * cp.w - 2.0 * cp.w);
    ev.points.push_back(cp);
    ev.hess_u.push_back(d->hessian);
  }
  if (ev.points.empty()) throw Error("empty-interior", "boundary filter removed every node");
  return ev;
}

}  // namespace

ConcavityField concavity_field(const EigenSolution& solution, double lambda, double delta,
                               double v_floor) {
  if (!(lambda >= 0.0)) throw Error("invalid-argument", "lambda must be non-negative");
  Evaluation ev = evaluate(solution, delta, v_floor);
  ConcavityField field;
  field.lambda = lambda;
  field.mu1 = ev.mu1;
  field.delta = delta;
  field.v_floor = v_floor;
  field.min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ev.points.size(); ++k) {
    auto& cp = ev.points[k];
    const Sym2& hu = ev.hess_u[k];
    const Sym2 m{hu.a11 - lambda * cp.w, hu.a12, hu.a22 - lambda * cp.w};
    cp.min_eig_local = m.min_eigenvalue();
    if (cp.min_eig_local < field.min_eig) {
      field.min_eig = cp.min_eig_local;
      field.min_location = cp.x;
    }
    field.lambda_trace_residual = std::max(field.lambda_trace_residual, std::abs(cp.trace_residual));
  }
  field.points = std::move(ev.points);
  return field;
}

ResidualReport pde_residual(const EigenSolution& solution, double delta, double v_floor) {
  const Evaluation ev = evaluate(solution, delta, v_floor);
  ResidualReport rep;
  rep.points = ev.points.size();
  for (const auto& cp : ev.points) {
    rep.pde_residual_sup = std::max(rep.pde_residual_sup, std::abs(cp.pde_residual));
    rep.trace_residual_sup = std::max(rep.trace_residual_sup, std::abs(cp.trace_residual));
  }
  rep.c_star_flag = ev.mu1 >= 10.0 * 2 * 2;
  return rep;
}

double boundary_criterion(const StarDomain& domain, double lambda, std::size_t n_samples) {
  return curve_geometry(domain, n_samples).min_kappa() - lambda;
}

}  // namespace hyplab
