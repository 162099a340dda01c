#include "hyplab/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "hyplab/error.hpp"

namespace hyplab::radial {

namespace {

constexpr double kPi = std::numbers::pi;

void check_ball_args(int n, double r) {
  if (n < 2) throw Error("invalid-argument", "dimension n must be >= 2");
  if (!(r > 0.0) || !std::isfinite(r)) throw Error("invalid-argument", "radius must be positive");
}

using State = std::array<double, 2>;  // (v, v')

/// v'' + (n-1) coth(t) v' - l(l+n-2)/sinh^2(t) v + mu v = 0
struct RadialOde {
  int n;
  int l;
  double mu;

  State operator()(double t, const State& y) const {
    const double sh = std::sinh(t);
    const double ang = static_cast<double>(l * (l + n - 2));
    const double acc = -(n - 1) * (std::cosh(t) / sh) * y[1] + ang / (sh * sh) * y[0] - mu * y[0];
    return {y[1], acc};
  }
};

/// Frobenius launch at t0: v = t^l (1 + c t^2).
State taylor_start(int n, int l, double mu, double t0) {
  const double ang = static_cast<double>(l * (l + n - 2));
  const double c = -(mu + ((n - 1) * l + ang) / 3.0) / (2.0 * (2 * l + n));
  const double tl = std::pow(t0, l);
  const double v = tl * (1.0 + c * t0 * t0);
  const double vp = (l == 0 ? 0.0 : l * std::pow(t0, l - 1)) + c * (l + 2) * std::pow(t0, l + 1);
  return {v, vp};
}

State rk4_step(const RadialOde& f, double t, const State& y, double dt) {
  auto axpy = [](const State& a, double s, const State& b) {
    return State{a[0] + s * b[0], a[1] + s * b[1]};
  };
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
  const State k3 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
  const State k4 = f(t + dt, axpy(y, dt, k3));
  return {y[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          y[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

/// Integrates from opts.t0 through each output point (ascending), calling
/// `record(i, state)` at each. Returns max |v| seen along the path.
double integrate(int n, int l, double mu, double r, const std::vector<double>& points,
                 const ShootingOptions& opts,
                 const std::function<void(std::size_t, const State&)>& record) {
  const RadialOde f{n, l, mu};
  const double dt_max = r / static_cast<double>(opts.uniform_steps);
  const double dt_min = 1e-6 * opts.t0;
  double t = opts.t0;
  State y = taylor_start(n, l, mu, t);
  double vmax = std::abs(y[0]);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double target = points[i];
    while (t < target) {
      double dt = std::min({dt_max, opts.grading * t, target - t});
      if (target - t - dt < 1e-3 * dt) dt = target - t;
      if (!(dt > dt_min) && target - t > dt_min) {
        throw Error("stiff-integration", "radial step size underflow");
      }
      y = rk4_step(f, t, y, dt);
      t = (dt == target - t) ? target : t + dt;
      vmax = std::max(vmax, std::abs(y[0]));
      if (!std::isfinite(y[0]) || !std::isfinite(y[1])) {
        throw Error("stiff-integration", "non-finite radial solution");
      }
    }
    record(i, y);
  }
  return vmax;
}

struct ShotValue {
  double v_end;
  double vmax;
};

ShotValue shoot_full(int n, double r, int l, double mu, const ShootingOptions& opts) {
  double v_end = 0.0;
  const double vmax =
      integrate(n, l, mu, r, {r}, opts, [&](std::size_t, const State& y) { v_end = y[0]; });
  return {v_end, vmax};
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double shoot(int n, double r, int l, double mu, const ShootingOptions& opts) {
  check_ball_args(n, r);
  return shoot_full(n, r, l, mu, opts).v_end;
}

RadialEigenResult mu_ball(int n, double r, int l, int k, const ShootingOptions& opts) {
  check_ball_args(n, r);
  if (l < 0) throw Error("invalid-argument", "angular index must be >= 0");
  if (k < 1) throw Error("invalid-argument", "root index must be >= 1");

  // Coarse sweep for the k-th sign change of v(r; mu).
  const double step = std::max(1.0, kPi * kPi / (r * r)) / 8.0;
  double lo = 0.0;
  double f_lo = shoot_full(n, r, l, lo, opts).v_end;
  int found = 0;
  double hi = lo;
  double f_hi = f_lo;
  constexpr int kMaxSweep = 200000;
  for (int i = 1; i <= kMaxSweep; ++i) {
    hi = step * i;
    f_hi = shoot_full(n, r, l, hi, opts).v_end;
    if (sign(f_hi) != sign(f_lo) || f_hi == 0.0) {
      if (++found == k) break;
    }
    if (found < k) {
      lo = hi;
      f_lo = f_hi;
    }
  }
  if (found < k) {
    throw Error("bracket-failure", "no sign change of v(r; mu) found in the mu sweep");
  }

  // Bisection to machine precision.
  for (int it = 0; it < 200 && f_hi != 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= opts.mu_rel_tol * hi) break;
    const double f_mid = shoot_full(n, r, l, mid, opts).v_end;
    if (sign(f_mid) == sign(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  const double mu = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;

  RadialEigenResult out;
  out.n = n;
  out.r = r;
  out.l = l;
  out.k = k;
  out.mu = mu;
  constexpr std::size_t kProfile = 1024;
  std::vector<double> points(kProfile + 1);
  for (std::size_t i = 0; i <= kProfile; ++i) {
    points[i] = opts.t0 + (r - opts.t0) * static_cast<double>(i) / kProfile;
  }
  points.back() = r;
  out.t_samples.resize(points.size());
  out.v_samples.resize(points.size());
  const double vmax = integrate(n, l, mu, r, points, opts, [&](std::size_t i, const State& y) {
    out.t_samples[i] = points[i];
    out.v_samples[i] = y[0];
  });
  out.residual = std::abs(out.v_samples.back()) / vmax;
  if (out.residual > opts.residual_tol) {
    throw Error("residual-failure",
                "shooting residual " + std::to_string(out.residual) + " above tolerance");
  }
  return out;
}

double mu1_h3_closed_form(double r) {
  check_ball_args(3, r);
  return 1.0 + kPi * kPi / (r * r);
}

double v_h3(double r, double t) {
  check_ball_args(3, r);
  if (!(t > 0.0 && t < r)) throw Error("invalid-argument", "v_h3 requires 0 < t < r");
  return std::sin(kPi * t / r) / std::sinh(t);
}

namespace {

bool use_series(double a, double t) { return std::max(a, 1.0) * t < 3e-3; }

}  // namespace

double h3_log_derivative(double r, double t) {
  const double a = kPi / r;
  if (use_series(a, t)) {
    return -(a * a + 1.0) * t / 3.0 - (a * a * a * a - 1.0) * t * t * t / 45.0;
  }
  return a / std::tan(a * t) - 1.0 / std::tanh(t);
}

double h3_log_second_derivative(double r, double t) {
  const double a = kPi / r;
  if (use_series(a, t)) {
    return -(a * a + 1.0) / 3.0 - (a * a * a * a - 1.0) * t * t / 15.0;
  }
  const double s = std::sin(a * t);
  const double sh = std::sinh(t);
  return -a * a / (s * s) + 1.0 / (sh * sh);
}

double h3_margin_sb4(double r) {
  check_ball_args(3, r);
  auto g = [r](double t) { return h3_log_second_derivative(r, t) - h3_log_derivative(r, t); };
  constexpr int kGrid = 4096;
  const double dt = r / kGrid;
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const double val = g((i + 0.5) * dt);
    if (val > best_val) {
      best_val = val;
      best = i;
    }
  }
  const double a = std::max(0.5 * dt * 0.01, (best - 0.5) * dt);
  const double b = std::min(r * (1.0 - 1e-9), (best + 1.5) * dt);
  const auto refined = boost::math::tools::brent_find_minima(
      [&](double t) { return -g(t); }, a, b, std::numeric_limits<double>::digits / 2);
  return std::max(best_val, -refined.second);
}

PhiProfile phi_profile(int n, double r, int grid_points, const ShootingOptions& opts) {
  check_ball_args(n, r);
  if (grid_points < 4096) throw Error("invalid-argument", "phi_profile needs >= 4096 points");
  const double mu1 = mu_ball(n, r, 0, 1, opts).mu;

  PhiProfile out;
  out.n = n;
  out.r = r;
  out.mu1 = mu1;
  const double t_lo = opts.t0;
  const double t_hi = r - opts.t0;
  std::vector<double> points(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) {
    points[i] = t_lo + (t_hi - t_lo) * static_cast<double>(i) / (grid_points - 1);
  }
  out.t_samples = points;
  out.phi.resize(points.size());
  out.phi_p.resize(points.size());

  // phi = v'/v of the shooting solution is the solution of
  // phi' = -(n-1) coth(t) phi - mu1 - phi^2 launched at -mu1 t0 / n.
  std::vector<double> v(points.size());
  integrate(n, 0, mu1, r, points, opts, [&](std::size_t i, const State& y) {
    v[i] = y[0];
    out.phi[i] = y[1] / y[0];
  });
  out.phi[0] = -mu1 * t_lo / n;
  out.margin_sb3 = -std::numeric_limits<double>::infinity();
  out.margin_sb4 = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(out.phi[i])) {
      throw Error("blow-up", "phi escapes to -infinity before t = r");
    }
    const double t = points[i];
    const double coth = 1.0 / std::tanh(t);
    const double phi = out.phi[i];
    out.phi_p[i] = -(n - 1) * coth * phi - mu1 - phi * phi;
    out.margin_sb3 = std::max(out.margin_sb3, (coth - 1.0) * phi);
    out.margin_sb4 = std::max(out.margin_sb4, out.phi_p[i] - phi);
  }
  return out;
}

BallConcavityReport ball_concavity(int n, double r, const ShootingOptions& opts) {
  const PhiProfile p = phi_profile(n, r, 8192, opts);
  BallConcavityReport rep;
  rep.n = n;
  rep.r = r;
  rep.mu1 = p.mu1;
  rep.margin_sb3 = p.margin_sb3;
  rep.margin_sb4 = p.margin_sb4;
  rep.strictly_super_log_concave = p.margin_sb3 < 0.0 && p.margin_sb4 < 0.0;
  return rep;
}

namespace {

/// First sign change of `margin` scanning (0, r_max] with `scan_step`,
/// refined by bisection. Returns nullopt-equivalent r_max when none.
double first_crossing(const std::function<double(double)>& margin, double r_max,
                      double scan_step, double tol, bool* found) {
  double lo = 0.0;
  double hi = 0.0;
  *found = false;
  const int steps = static_cast<int>(std::ceil(r_max / scan_step - 1e-9));
  for (int i = 1; i <= steps; ++i) {
    const double r = std::min(r_max, i * scan_step);
    if (margin(r) >= 0.0) {
      hi = r;
      *found = true;
      break;
    }
    lo = r;
  }
  if (!*found) return r_max;
  if (lo == 0.0) lo = 1e-3 * hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (margin(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

}  // namespace

double find_c0_h3(double tol) {
  bool found = false;
  const double c0 = first_crossing(h3_margin_sb4, 9.0, 0.5, tol, &found);
  if (!found) throw Error("no-sign-change", "Phi'' - Phi' never becomes positive for r <= 9");
  if (!(c0 > 2.0 && c0 < 3.0)) {
    throw Error("no-sign-change", "threshold " + std::to_string(c0) + " outside (2, 3)");
  }
  return c0;
}

double find_r0(int n, double r_max, double tol, const ShootingOptions& opts) {
  if (n < 2) throw Error("invalid-argument", "dimension n must be >= 2");
  if (!(r_max > 0.0 && r_max <= 10.0)) throw Error("invalid-argument", "r_max must be in (0, 10]");
  auto margin = [&](double r) {
    const PhiProfile p = phi_profile(n, r, 4096, opts);
    if (!(p.margin_sb3 < 0.0)) {
      throw Error("tangential-condition-violated", "tangential margin non-negative at r = " + std::to_string(r));
    }
    return p.margin_sb4;
  };
  bool found = false;
  return first_crossing(margin, r_max, 0.25, tol, &found);
}

double lemma_margin(int n, double mu1, double t1) {
  if (n < 2) throw Error("invalid-argument", "dimension n must be >= 2");
  if (!(t1 > 0.0) || !(mu1 > 0.0)) throw Error("invalid-argument", "need t1 > 0 and mu1 > 0");
  const double a = 1.0 + (n - 1) / std::tanh(t1);
  const double sh = std::sinh(t1);
  const double b = (n - 1) / (2.0 * sh * sh);
  double disc = a * a - 4.0 * mu1;
  // A^2 = 4 mu1 up to rounding is the double-root case.
  if (disc < 0.0 && disc >= -1e-12 * a * a) disc = 0.0;
  if (disc < 0.0) throw Error("no-real-root", "A^2 < 4 mu1 at this t1");
  return 2.0 / (a + std::sqrt(disc)) - 1.0 / (b + std::sqrt(b * b + mu1));
}

BallGapReport gap_ball(int n, double r, const ShootingOptions& opts) {
  BallGapReport g;
  g.mu1 = mu_ball(n, r, 0, 1, opts).mu;
  const double radial2 = mu_ball(n, r, 0, 2, opts).mu;
  const double angular1 = mu_ball(n, r, 1, 1, opts).mu;
  g.mu2 = std::min(radial2, angular1);
  g.mu2_angular_index = angular1 < radial2 ? 1 : 0;
  g.gap = g.mu2 - g.mu1;
  g.diameter = 2.0 * r;
  g.reference_scale = kPi * kPi / (g.diameter * g.diameter);
  return g;
}

}  // namespace hyplab::radial
