#include "hyplab/hypgeom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hyplab/error.hpp"
#include "hyplab/spectral.hpp"

namespace hyplab {

namespace {

void require_inside(DiskPoint p) {
  if (!(p.norm_sq() < 1.0)) throw Error("outside-model", "point outside model");
}

}  // namespace

double conformal_factor(DiskPoint p) {
  require_inside(p);
  return 2.0 / (1.0 - p.norm_sq());
}

DiskPoint polar_to_disk(PolarPoint p) {
  if (!(p.r >= 0.0)) throw Error("invalid-point", "polar radius must be non-negative");
  const double s = std::tanh(0.5 * p.r);
  return {s * std::cos(p.theta), s * std::sin(p.theta)};
}

PolarPoint disk_to_polar(DiskPoint p) {
  require_inside(p);
  const double s = std::sqrt(p.norm_sq());
  double theta = std::atan2(p.x2, p.x1);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  return {2.0 * std::atanh(s), theta};
}

Christoffel christoffel(DiskPoint p) {
  const double lam = conformal_factor(p);
  // d_i log(lambda) = lambda x_i
  const std::array<double, 2> ds{lam * p.x1, lam * p.x2};
  Christoffel g{};
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        g[k][i][j] = (i == k ? ds[j] : 0.0) + (j == k ? ds[i] : 0.0) - (i == j ? ds[k] : 0.0);
      }
    }
  }
  return g;
}

double hyperbolic_distance(DiskPoint p, DiskPoint q) {
  require_inside(p);
  require_inside(q);
  const double dx = p.x1 - q.x1;
  const double dy = p.x2 - q.x2;
  const double num = 2.0 * (dx * dx + dy * dy);
  const double den = (1.0 - p.norm_sq()) * (1.0 - q.norm_sq());
  // acosh(1 + z) written via log1p for accuracy at small separations
  const double z = num / den;
  return std::log1p(z + std::sqrt(z * (z + 2.0)));
}

double CurveGeometry::min_kappa() const { return *std::min_element(kappa.begin(), kappa.end()); }

double graph_curvature(double rho, double rho_p, double rho_pp) {
  const double f = std::sinh(rho);
  const double fp = std::cosh(rho);
  const double len2 = rho_p * rho_p + f * f;
  return (f * f * fp + 2.0 * fp * rho_p * rho_p - f * rho_pp) / (len2 * std::sqrt(len2));
}

namespace {

void fill_derived(CurveGeometry& g) {
  const std::size_t n = g.rho.size();
  g.kappa.resize(n);
  g.kappa_shift.resize(n);
  g.support.resize(n);
  g.cosh_r.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double r = g.rho[j];
    const double sh = std::sinh(r);
    const double len = std::sqrt(g.rho_p[j] * g.rho_p[j] + sh * sh);
    g.kappa[j] = graph_curvature(r, g.rho_p[j], g.rho_pp[j]);
    g.kappa_shift[j] = g.kappa[j] - 1.0;
    g.support[j] = sh * sh / len;
    g.cosh_r[j] = std::cosh(r);
  }
}

void check_samples(std::span<const double> rho) {
  if (rho.size() < 16) throw Error("invalid-argument", "curve_geometry needs >= 16 samples");
  for (double r : rho) {
    if (!(r > 0.0)) throw Error("invalid-domain", "rho must be positive at every sample");
  }
}

}  // namespace

CurveGeometry curve_geometry(const StarDomain& domain, std::size_t n_samples) {
  if (n_samples < 16) throw Error("invalid-argument", "curve_geometry needs >= 16 samples");
  CurveGeometry g;
  g.theta.resize(n_samples);
  g.rho.resize(n_samples);
  g.rho_p.resize(n_samples);
  g.rho_pp.resize(n_samples);
  const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(n_samples);
  for (std::size_t j = 0; j < n_samples; ++j) {
    const double th = static_cast<double>(j) * dtheta;
    g.theta[j] = th;
    g.rho[j] = domain.rho(th);
    g.rho_p[j] = domain.rho_p(th);
    g.rho_pp[j] = domain.rho_pp(th);
  }
  check_samples(g.rho);
  fill_derived(g);
  return g;
}

CurveGeometry curve_geometry(std::span<const double> rho) {
  check_samples(rho);
  const std::size_t n = rho.size();
  CurveGeometry g;
  g.theta.resize(n);
  g.rho.assign(rho.begin(), rho.end());
  g.rho_p.resize(n);
  g.rho_pp.resize(n);
  const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) g.theta[j] = static_cast<double>(j) * dtheta;
  PeriodicDifferentiator diff(n);
  diff.differentiate(g.rho, g.rho_p, g.rho_pp);
  fill_derived(g);
  return g;
}

double horo_convexity_margin(const StarDomain& domain, std::size_t n_samples) {
  return curve_geometry(domain, n_samples).min_kappa() - 1.0;
}

double diameter(const StarDomain& domain, std::size_t n_samples) {
  const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(n_samples);
  std::vector<DiskPoint> pts(n_samples);
  for (std::size_t j = 0; j < n_samples; ++j) {
    const double th = static_cast<double>(j) * dtheta;
    pts[j] = polar_to_disk({domain.rho(th), th});
  }
  double best = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t j = i + 1; j < n_samples; ++j) {
      best = std::max(best, hyperbolic_distance(pts[i], pts[j]));
    }
  }
  return best;
}

}  // namespace hyplab
