#include "hyplab/eigen2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "hyplab/error.hpp"

namespace hyplab {

namespace {

/// Negative inside the domain, positive outside (Euclidean disk units).
double level(const StarDomain& domain, DiskPoint p) {
  const double s = std::sqrt(p.norm_sq());
  if (s == 0.0) return -std::tanh(0.5 * domain.a0());
  const double theta = std::atan2(p.x2, p.x1);
  return s - std::tanh(0.5 * domain.rho(theta));
}

double cut_fraction(const StarDomain& domain, DiskPoint from, double dx, double dy) {
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (level(domain, {from.x1 + mid * dx, from.x2 + mid * dy}) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

constexpr std::array<std::array<int, 2>, 4> kArmOffset{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

}  // namespace

DiskGrid::DiskGrid(const StarDomain& domain, double h) : domain_(domain), h_(h) {
  if (!(h >= 1e-4 && h <= 0.05)) throw Error("invalid-argument", "grid spacing must be in [1e-4, 0.05]");
  const double s_max = std::tanh(0.5 * domain.max_rho(4096));
  if (s_max > kMaxDiskRadius) {
    throw Error("domain-too-large", "boundary exceeds disk radius 0.95 (tanh(rho/2) = " +
                                        std::to_string(s_max) + ")");
  }
  half_ = static_cast<int>(std::ceil(s_max / h)) + 1;
  const int width = 2 * half_ + 1;
  lookup_.assign(static_cast<std::size_t>(width) * width, -1);

  for (int j = -half_; j <= half_; ++j) {
    for (int i = -half_; i <= half_; ++i) {
      const DiskPoint p{i * h, j * h};
      if (!contains(p)) continue;
      GridNode node;
      node.i = i;
      node.j = j;
      node.x = p;
      const double lam = 2.0 / (1.0 - p.norm_sq());
      node.weight = lam * lam;
      lookup_[static_cast<std::size_t>(j + half_) * width + (i + half_)] =
          static_cast<std::int32_t>(nodes_.size());
      nodes_.push_back(node);
    }
  }
  if (nodes_.empty()) throw Error("empty-grid", "no interior grid nodes");

  for (auto& node : nodes_) {
    for (int a = 0; a < 4; ++a) {
      const int ni = node.i + kArmOffset[a][0];
      const int nj = node.j + kArmOffset[a][1];
      if (index(ni, nj) >= 0) continue;
      node.arm[a] = cut_fraction(domain_, node.x, kArmOffset[a][0] * h, kArmOffset[a][1] * h);
    }
  }
}

int DiskGrid::index(int i, int j) const {
  if (std::abs(i) > half_ || std::abs(j) > half_) return -1;
  const int width = 2 * half_ + 1;
  return lookup_[static_cast<std::size_t>(j + half_) * width + (i + half_)];
}

int DiskGrid::neighbour(std::size_t node, Arm arm) const {
  const auto& nd = nodes_[node];
  if (nd.arm[arm] < 1.0) return -1;
  return index(nd.i + kArmOffset[arm][0], nd.j + kArmOffset[arm][1]);
}

bool DiskGrid::contains(DiskPoint p) const { return level(domain_, p) < 0.0; }

DiskGrid build_grid(const StarDomain& domain, double h) { return DiskGrid(domain, h); }

Operator assemble(const DiskGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(grid.size() * 5);
  Operator op;
  op.w.resize(n);
  const double h = grid.h();
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto& node = grid.nodes()[p];
    const auto row = static_cast<Eigen::Index>(p);
    op.w[row] = node.weight;
    double diag = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      const Arm plus = axis == 0 ? kEast : kNorth;
      const Arm minus = axis == 0 ? kWest : kSouth;
      const double hp = node.arm[plus] * h;
      const double hm = node.arm[minus] * h;
      diag += 2.0 / (hp * hm);
      if (const int q = grid.neighbour(p, plus); q >= 0) {
        trips.emplace_back(row, q, -2.0 / (hp * (hp + hm)));
      }
      if (const int q = grid.neighbour(p, minus); q >= 0) {
        trips.emplace_back(row, q, -2.0 / (hm * (hp + hm)));
      }
    }
    trips.emplace_back(row, row, diag);
  }
  op.a.resize(n, n);
  op.a.setFromTriplets(trips.begin(), trips.end());
  op.a.makeCompressed();
  return op;
}

namespace {

double w_dot(const Eigen::VectorXd& w, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return (w.array() * x.array() * y.array()).sum();
}

/// Modified Gram-Schmidt (twice) in the W inner product.
void w_orthonormalise(const Eigen::VectorXd& w, Eigen::MatrixXd& x) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      for (Eigen::Index d = 0; d < c; ++d) {
        x.col(c) -= w_dot(w, x.col(d), x.col(c)) * x.col(d);
      }
      const double nrm = std::sqrt(w_dot(w, x.col(c), x.col(c)));
      if (!(nrm > 0.0)) throw Error("no-convergence", "block iteration lost rank");
      x.col(c) /= nrm;
    }
  }
}

double pair_residual(const Operator& op, const Eigen::VectorXd& v, double mu) {
  const Eigen::VectorXd wv = (op.w.array() * v.array()).matrix();
  return (op.a * v - mu * wv).norm() / wv.norm();
}

}  // namespace

EigenSolution solve_eigs(std::shared_ptr<const DiskGrid> grid, const Operator& op, int k,
                         const EigenSolveOptions& opts) {
  if (k != 1 && k != 2) throw Error("invalid-argument", "k must be 1 or 2");
  const Eigen::Index n = op.a.rows();
  const int block = std::min<int>(static_cast<int>(n), k + 3);

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(op.a);
  if (lu.info() != Eigen::Success) throw Error("no-convergence", "factorisation of A failed");

  // Deterministic start block: constant, linear and quadratic modes.
  Eigen::MatrixXd x(n, block);
  const auto& nodes = grid->nodes();
  for (Eigen::Index p = 0; p < n; ++p) {
    const auto& q = nodes[static_cast<std::size_t>(p)].x;
    const double basis[] = {1.0, q.x1 + 0.3 * q.x2, q.x2 - 0.2 * q.x1,
                            q.x1 * q.x1 - q.x2 * q.x2, q.x1 * q.x2};
    for (int c = 0; c < block; ++c) x(p, c) = basis[c % 5] + 1e-3 * std::sin(1.0 + 7.0 * p + c);
  }
  w_orthonormalise(op.w, x);

  EigenSolution sol;
  sol.grid = std::move(grid);
  std::vector<double> mu(static_cast<std::size_t>(k), 0.0);
  Eigen::MatrixXd ritz;
  int it = 0;
  bool converged = false;
  for (; it < opts.max_iterations && !converged; ++it) {
    Eigen::MatrixXd y(n, block);
    for (int c = 0; c < block; ++c) y.col(c) = lu.solve((op.w.array() * x.col(c).array()).matrix());

    // Rayleigh-Ritz for K = A^{-1} W on span(x) in the W inner product.
    Eigen::MatrixXd hmat(block, block);
    for (int r = 0; r < block; ++r) {
      for (int c = 0; c < block; ++c) hmat(r, c) = w_dot(op.w, x.col(r), y.col(c));
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(hmat);
    std::vector<int> order(block);
    for (int c = 0; c < block; ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return es.eigenvalues()[a].real() > es.eigenvalues()[b].real();
    });

    converged = it > 0;
    for (int e = 0; e < k; ++e) {
      const double theta = es.eigenvalues()[order[e]].real();
      const double next = 1.0 / theta;
      if (std::abs(next - mu[e]) > opts.rel_tol * std::abs(next)) converged = false;
      mu[e] = next;
    }
    ritz.resize(n, k);
    for (int e = 0; e < k; ++e) {
      ritz.col(e) = x * es.eigenvectors().col(order[e]).real();
      if (converged && pair_residual(op, ritz.col(e), mu[e]) > opts.residual_tol) converged = false;
    }
    x = y;
    w_orthonormalise(op.w, x);
  }
  if (!converged) throw Error("no-convergence", "block inverse iteration did not converge");

  sol.mu_values = mu;
  for (int e = 0; e < k; ++e) {
    Eigen::VectorXd v = ritz.col(e);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    v /= v[arg];
    const double res = pair_residual(op, v, mu[e]);
    sol.eigenvectors.push_back(std::move(v));
    sol.iterations.push_back(it);
    sol.residuals.push_back(res);
  }
  if (k == 2 && sol.mu_values[1] - sol.mu_values[0] < 1e-10 * sol.mu_values[0]) {
    sol.degenerate_pair = true;
  }
  return sol;
}

EigenSolution solve_domain(const StarDomain& domain, double h, int k,
                           const EigenSolveOptions& opts) {
  auto grid = std::make_shared<const DiskGrid>(domain, h);
  const Operator op = assemble(*grid);
  return solve_eigs(std::move(grid), op, k, opts);
}

GapReport gap_domain(const StarDomain& domain, double h) {
  const EigenSolution sol = solve_domain(domain, h, 2);
  GapReport g;
  g.mu1 = sol.mu_values[0];
  g.mu2 = sol.mu_values[1];
  g.gap = g.mu2 - g.mu1;
  g.diameter = diameter(domain);
  g.reference_scale = std::numbers::pi * std::numbers::pi / (g.diameter * g.diameter);
  return g;
}

}  // namespace hyplab
