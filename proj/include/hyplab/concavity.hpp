#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hyplab/eigen2d.hpp"

namespace hyplab {

/// Symmetric 2x2 matrix in the orthonormal frame e_i = d_i / conformal.
struct Sym2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  double trace() const { return a11 + a22; }
  double min_eigenvalue() const;
  double max_eigenvalue() const;
};

/// Gradient and covariant Hessian of a nodal field, orthonormal frame.
struct LocalDerivatives {
  double g1 = 0.0;
  double g2 = 0.0;
  Sym2 hessian;
  /// Euclidean Laplacian divided by conformal^2 (the hyperbolic Laplacian).
  double laplacian = 0.0;

  double gradient_norm() const;
};

/// Centred second-order differences on the 9-point neighbourhood of `node`
/// plus the Christoffel correction; nullopt when a neighbour is missing.
std::optional<LocalDerivatives> covariant_derivatives(const DiskGrid& grid,
                                                      std::span<const double> field,
                                                      std::size_t node);

struct ConcavityPoint {
  DiskPoint x;
  double v = 0.0;
  double w = 0.0;            // |grad u|, u = -log v
  Sym2 hess_log_v;           // covariant Hessian of log v
  double min_eig_local = 0.0;
  double pde_residual = 0.0;  // Delta u - mu1 - w^2
  double trace_residual = 0.0;  // tr(Hess u - w I) - (mu1 + w^2 - 2 w)
};

/// Pointwise check of -Hess(log v) - lambda |grad log v| I >= 0.
struct ConcavityField {
  double lambda = 0.0;
  double mu1 = 0.0;
  double delta = 0.0;
  double v_floor = 0.0;
  std::vector<ConcavityPoint> points;
  double min_eig = 0.0;
  DiskPoint min_location;
  double lambda_trace_residual = 0.0;

  /// min_eig >= -tolerance * mu1.
  bool numerically_psd(double tolerance = 1e-2) const { return min_eig >= -tolerance * mu1; }
};

struct ResidualReport {
  double pde_residual_sup = 0.0;
  double trace_residual_sup = 0.0;
  std::size_t points = 0;
  bool c_star_flag = false;  // mu1 >= 10 n^2 with n = 2
};

/// Boundary-layer width in hyperbolic length equal to `multiplier` grid
/// cells at the outermost boundary point.
double default_delta(const DiskGrid& grid, double multiplier = 5.0);

ConcavityField concavity_field(const EigenSolution& solution, double lambda, double delta,
                               double v_floor = 1e-3);

ResidualReport pde_residual(const EigenSolution& solution, double delta, double v_floor = 1e-3);

/// min kappa - lambda over the boundary.
double boundary_criterion(const StarDomain& domain, double lambda, std::size_t n_samples = 1024);

}  // namespace hyplab
