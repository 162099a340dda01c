#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "hyplab/star_domain.hpp"

namespace hyplab {

/// Point of the Poincare disk model of H^2 (curvature -1).
struct DiskPoint {
  double x1 = 0.0;
  double x2 = 0.0;

  double norm_sq() const { return x1 * x1 + x2 * x2; }
};

/// Geodesic polar coordinates about the origin: r is hyperbolic distance.
struct PolarPoint {
  double r = 0.0;
  double theta = 0.0;
};

/// Christoffel symbols Gamma^k_{ij}, indexed [k][i][j] with 0-based indices.
using Christoffel = std::array<std::array<std::array<double, 2>, 2>, 2>;

/// Conformal factor 2 / (1 - |x|^2) of the disk metric.
double conformal_factor(DiskPoint p);

DiskPoint polar_to_disk(PolarPoint p);
PolarPoint disk_to_polar(DiskPoint p);

Christoffel christoffel(DiskPoint p);

double hyperbolic_distance(DiskPoint p, DiskPoint q);

/// Differential geometry of a polar radial-graph curve r = rho(theta) in
/// the metric dr^2 + sinh^2 r dtheta^2, sampled on a uniform theta grid.
struct CurveGeometry {
  std::vector<double> theta;
  std::vector<double> rho;
  std::vector<double> rho_p;
  std::vector<double> rho_pp;
  std::vector<double> kappa;        // geodesic curvature
  std::vector<double> kappa_shift;  // kappa - 1
  std::vector<double> support;      // <sinh r d_r, nu>
  std::vector<double> cosh_r;

  double min_kappa() const;
};

/// Geodesic curvature of the graph r = rho(theta) at one point.
double graph_curvature(double rho, double rho_p, double rho_pp);

/// Derivatives taken analytically from the Fourier coefficients.
CurveGeometry curve_geometry(const StarDomain& domain, std::size_t n_samples);

/// Derivatives taken spectrally from uniform samples of rho.
CurveGeometry curve_geometry(std::span<const double> rho);

/// min kappa - 1; non-negative iff the domain is horo-convex.
double horo_convexity_margin(const StarDomain& domain, std::size_t n_samples = 1024);

/// Max pairwise hyperbolic distance between boundary samples.
double diameter(const StarDomain& domain, std::size_t n_samples = 256);

}  // namespace hyplab
