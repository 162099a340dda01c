#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "hyplab/hypgeom.hpp"
#include "hyplab/star_domain.hpp"

namespace hyplab {

/// Arm directions of the 5-point stencil.
enum Arm : int { kEast = 0, kWest = 1, kNorth = 2, kSouth = 3 };

struct GridNode {
  int i = 0;  // x1 = i h
  int j = 0;  // x2 = j h
  DiskPoint x;
  /// Arm lengths as fractions of h; < 1 where the arm is cut by the boundary.
  std::array<double, 4> arm{1.0, 1.0, 1.0, 1.0};
  double weight = 4.0;  // conformal factor squared
};

/// Embedded-boundary Cartesian grid on the Poincare disk covering a star
/// domain. Node (i, j) sits at (i h, j h).
class DiskGrid {
 public:
  static constexpr double kMaxDiskRadius = 0.95;

  DiskGrid(const StarDomain& domain, double h);

  double h() const { return h_; }
  const StarDomain& domain() const { return domain_; }
  const std::vector<GridNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  /// Index of the interior node at (i, j), or -1.
  int index(int i, int j) const;
  /// Neighbour index along an arm, or -1 when the arm is cut.
  int neighbour(std::size_t node, Arm arm) const;

  /// True when the disk point lies strictly inside the domain.
  bool contains(DiskPoint p) const;

 private:
  StarDomain domain_;
  double h_;
  int half_;
  std::vector<GridNode> nodes_;
  std::vector<std::int32_t> lookup_;
};

DiskGrid build_grid(const StarDomain& domain, double h);

/// Generalised problem A v = mu W v: A is minus the Shortley-Weller
/// Laplacian with zero Dirichlet data eliminated, W = diag(conformal^2).
struct Operator {
  Eigen::SparseMatrix<double> a;
  Eigen::VectorXd w;
};

Operator assemble(const DiskGrid& grid);

struct EigenSolveOptions {
  double rel_tol = 1e-10;
  /// Required ||A v - mu W v|| / ||W v|| for every returned pair.
  double residual_tol = 1e-8;
  int max_iterations = 10000;
};

struct EigenSolution {
  std::shared_ptr<const DiskGrid> grid;
  std::vector<double> mu_values;
  /// Nodal eigenvectors, max-norm 1; the first is positive.
  std::vector<Eigen::VectorXd> eigenvectors;
  std::vector<int> iterations;
  std::vector<double> residuals;  // ||A v - mu W v|| / ||W v||
  bool degenerate_pair = false;
};

EigenSolution solve_eigs(std::shared_ptr<const DiskGrid> grid, const Operator& op, int k,
                         const EigenSolveOptions& opts = {});

/// Convenience: grid + assembly + solve.
EigenSolution solve_domain(const StarDomain& domain, double h, int k,
                           const EigenSolveOptions& opts = {});

struct GapReport {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double gap = 0.0;
  double diameter = 0.0;
  double reference_scale = 0.0;  // pi^2 / D^2
};

GapReport gap_domain(const StarDomain& domain, double h);

/// (4 f(h/2) - f(h)) / 3 for a second-order quantity.
inline double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

}  // namespace hyplab
