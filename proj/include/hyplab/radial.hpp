#pragma once

#include <vector>

namespace hyplab::radial {

/// Integration controls for the radial shooting solver. Steps are graded
/// near the singular origin (dt = min(max_step, grading * t)) and uniform
/// elsewhere.
struct ShootingOptions {
  double t0 = 1e-6;
  int uniform_steps = 4000;
  double grading = 0.02;
  /// Bisection stops when the bracket is this small relative to mu.
  double mu_rel_tol = 1e-15;
  /// Required |v(r)| relative to max |v|.
  double residual_tol = 1e-10;
};

/// Radial Dirichlet eigenpair of the geodesic ball B_r in H^n with angular
/// index l (mode v(t) Y_l).
struct RadialEigenResult {
  int n = 0;
  double r = 0.0;
  int l = 0;
  int k = 0;
  double mu = 0.0;
  std::vector<double> t_samples;
  std::vector<double> v_samples;
  double residual = 0.0;
};

/// phi = (log v)' of the first eigenfunction and the two concavity margins.
struct PhiProfile {
  int n = 0;
  double r = 0.0;
  double mu1 = 0.0;
  std::vector<double> t_samples;
  std::vector<double> phi;
  std::vector<double> phi_p;
  double margin_sb3 = 0.0;  // sup (coth t - 1) phi
  double margin_sb4 = 0.0;  // sup phi' - phi
};

struct BallConcavityReport {
  int n = 0;
  double r = 0.0;
  double mu1 = 0.0;
  double margin_sb3 = 0.0;
  double margin_sb4 = 0.0;
  bool strictly_super_log_concave = false;
};

struct BallGapReport {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double gap = 0.0;
  double diameter = 0.0;
  double reference_scale = 0.0;  // pi^2 / D^2
  int mu2_angular_index = 0;
};

/// k-th Dirichlet eigenvalue with angular index l, by bisection on mu.
RadialEigenResult mu_ball(int n, double r, int l, int k, const ShootingOptions& opts = {});

/// Value at t = r of the regular solution for a trial mu; exposed for tests.
double shoot(int n, double r, int l, double mu, const ShootingOptions& opts = {});

/// Closed form of the first eigenvalue of B_r in H^3: 1 + pi^2 / r^2.
double mu1_h3_closed_form(double r);
/// Closed-form first eigenfunction sin(pi t / r) / sinh t in H^3.
double v_h3(double r, double t);
/// Phi' and Phi'' for Phi = log v_h3, with series near t = 0.
double h3_log_derivative(double r, double t);
double h3_log_second_derivative(double r, double t);
/// sup over (0, r) of Phi'' - Phi' for the H^3 closed form.
double h3_margin_sb4(double r);

PhiProfile phi_profile(int n, double r, int grid_points = 8192,
                       const ShootingOptions& opts = {});

BallConcavityReport ball_concavity(int n, double r, const ShootingOptions& opts = {});

/// Threshold radius in H^3 where the first eigenfunction stops being super
/// log-concave; bisection on the closed form to absolute tolerance `tol`.
double find_c0_h3(double tol = 1e-4);

/// Largest r <= r_max whose first eigenfunction is strictly super
/// log-concave; r_max if no sign change of margin_sb4 is found.
double find_r0(int n, double r_max, double tol = 1e-5, const ShootingOptions& opts = {});

/// 2 / (A + sqrt(A^2 - 4 mu1)) - 1 / (B + sqrt(B^2 + mu1)) with
/// A = 1 + (n-1) coth t1, B = (n-1) / (2 sinh^2 t1).
double lemma_margin(int n, double mu1, double t1);

BallGapReport gap_ball(int n, double r, const ShootingOptions& opts = {});

}  // namespace hyplab::radial
