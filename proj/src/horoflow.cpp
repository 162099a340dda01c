#include "hyplab/horoflow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hyplab/error.hpp"
#include "hyplab/hypgeom.hpp"

namespace hyplab {

StarDomain FlowState::to_domain(double tolerance) const {
  return StarDomain::from_samples(rho, StarDomain::kMaxModes, tolerance);
}

HoroFlow::HoroFlow(FlowOptions opts)
    : opts_(opts), diff_(opts.samples), d1_(opts.samples), d2_(opts.samples) {
  if (opts_.samples < 16) throw Error("invalid-argument", "flow needs >= 16 theta samples");
}

HoroFlow::Eval HoroFlow::evaluate(const std::vector<double>& rho) {
  const std::size_t n = rho.size();
  if (n != opts_.samples) throw Error("invalid-argument", "sample count mismatch");
  diff_.differentiate(rho, d1_, d2_);
  Eval ev;
  ev.speed.resize(n);
  ev.rho_t.resize(n);
  auto& dg = ev.diag;
  dg.min_rho = dg.min_kappa_shift = dg.support_min = std::numeric_limits<double>::infinity();
  dg.max_rho = dg.support_max = -std::numeric_limits<double>::infinity();
  double mean = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = rho[j];
    if (!(r > 0.0)) throw Error("invalid-domain", "rho must stay positive along the flow");
    const double e = std::exp(r);
    const double sh = 0.5 * (e - 1.0 / e);
    const double ch = 0.5 * (e + 1.0 / e);
    const double rp = d1_[j];
    const double len2 = rp * rp + sh * sh;
    const double len = std::sqrt(len2);
    const double kappa = (sh * sh * ch + 2.0 * ch * rp * rp - sh * d2_[j]) / (len2 * len);
    const double kshift = kappa - 1.0;
    const double u = sh * sh / len;
    if (!(kshift > opts_.kappa_floor)) {
      throw Error("horo-convexity-lost",
                  "shifted curvature " + std::to_string(kshift) + " at or below floor");
    }
    const double f = (ch - u) / kshift - u;
    ev.speed[j] = f;
    ev.rho_t[j] = f * len / sh;
    dg.min_rho = std::min(dg.min_rho, r);
    dg.max_rho = std::max(dg.max_rho, r);
    dg.min_kappa_shift = std::min(dg.min_kappa_shift, kshift);
    dg.support_min = std::min(dg.support_min, u);
    dg.support_max = std::max(dg.support_max, u);
    mean += r;
  }
  mean /= static_cast<double>(n);
  dg.circle_distance = 0.0;
  for (double r : rho) dg.circle_distance = std::max(dg.circle_distance, std::abs(r - mean));
  return ev;
}

FlowState HoroFlow::make_state(std::vector<double> rho, double t) {
  FlowState s;
  s.t = t;
  s.rho = std::move(rho);
  Eval ev = evaluate(s.rho);
  s.diag = ev.diag;
  s.rho_t = std::move(ev.rho_t);
  return s;
}

FlowState HoroFlow::initial_state(const StarDomain& domain) {
  return make_state(domain.sample(opts_.samples));
}

std::vector<double> HoroFlow::speed(const FlowState& state) { return evaluate(state.rho).speed; }

double HoroFlow::dt_max(const FlowState& state) const {
  const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(opts_.samples);
  const double dth2 = dtheta * dtheta;
  const double ks = state.diag.min_kappa_shift;
  return std::min(0.1 * dth2, 0.5 * dth2 * ks * ks / std::cosh(state.diag.max_rho));
}

FlowState HoroFlow::step(const FlowState& state, double dt) {
  if (!(dt > 0.0)) throw Error("invalid-argument", "time step must be positive");
  if (dt > dt_max(state) * (1.0 + 1e-12)) {
    throw Error("unstable-step", "dt exceeds the stability bound " + std::to_string(dt_max(state)));
  }
  const std::size_t n = state.rho.size();
  const std::vector<double> k1 = state.rho_t.size() == n ? state.rho_t : evaluate(state.rho).rho_t;
  std::vector<double> tmp(n);
  auto stage = [&](const std::vector<double>& k, double c) {
    for (std::size_t j = 0; j < n; ++j) tmp[j] = state.rho[j] + c * dt * k[j];
    return evaluate(tmp).rho_t;
  };
  const auto k2 = stage(k1, 0.5);
  const auto k3 = stage(k2, 0.5);
  const auto k4 = stage(k3, 1.0);
  std::vector<double> next(n);
  for (std::size_t j = 0; j < n; ++j) {
    next[j] = state.rho[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  FlowState out = make_state(std::move(next), state.t + dt);
  const double before = state.diag.oscillation();
  if (out.diag.oscillation() > opts_.max_growth * before + 1e-12) {
    throw Error("unstable-step", "oscillation grew more than tenfold in one step");
  }
  return out;
}

std::vector<double> flow_speed(const FlowState& state, const FlowOptions& opts) {
  FlowOptions o = opts;
  o.samples = state.rho.size();
  HoroFlow flow(o);
  return flow.speed(state);
}

FlowState flow_step(const FlowState& state, double dt, const FlowOptions& opts) {
  FlowOptions o = opts;
  o.samples = state.rho.size();
  HoroFlow flow(o);
  FlowState s = state;
  if (s.rho_t.size() != s.rho.size()) s = flow.make_state(s.rho, s.t);
  return flow.step(s, dt);
}

double fit_decay_rate(const std::vector<MonitorRow>& rows, double t_max, double floor) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t m = 0;
  for (const auto& row : rows) {
    if (row.t > t_max || !(row.oscillation > floor)) continue;
    const double y = std::log(row.oscillation);
    sx += row.t;
    sy += y;
    sxx += row.t * row.t;
    sxy += row.t * y;
    ++m;
  }
  if (m < 2) return 0.0;
  const double den = static_cast<double>(m) * sxx - sx * sx;
  if (den <= 0.0) return 0.0;
  return -(static_cast<double>(m) * sxy - sx * sy) / den;
}

namespace {

MonitorRow monitor_row(const FlowState& s) {
  return {s.t, s.diag.min_rho, s.diag.max_rho, s.diag.min_kappa_shift, s.diag.oscillation()};
}

}  // namespace

void flow_run_into(FlowRun& out, const StarDomain& initial, double t_end,
                   std::vector<double> snapshot_times, const FlowOptions& opts) {
  if (!(t_end > 0.0)) throw Error("invalid-argument", "t_end must be positive");
  const double margin = horo_convexity_margin(initial);
  if (!(margin > 0.0)) {
    throw Error("not-horo-convex", "initial curve is not strictly horo-convex (margin " +
                                       std::to_string(margin) + ")");
  }
  for (double ts : snapshot_times) {
    if (ts < 0.0 || ts > t_end) throw Error("invalid-argument", "snapshot time outside [0, t_end]");
  }
  std::sort(snapshot_times.begin(), snapshot_times.end());
  snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end()),
                       snapshot_times.end());
  if (snapshot_times.empty() || snapshot_times.back() < t_end) snapshot_times.push_back(t_end);

  HoroFlow flow(opts);
  FlowState state = flow.initial_state(initial);
  out = FlowRun{};
  out.initial_min_rho = state.diag.min_rho;
  out.initial_max_rho = state.diag.max_rho;
  out.initial_oscillation = state.diag.oscillation();
  out.min_kappa_shift_seen = state.diag.min_kappa_shift;
  out.monitor.push_back(monitor_row(state));

  auto take_snapshot = [&](const FlowState& s) {
    FlowSnapshot snap{s, s.t == 0.0 ? initial : s.to_domain(), s.diag.oscillation(), 0.0};
    snap.fitted_rate = fit_decay_rate(out.monitor, s.t);
    out.snapshots.push_back(std::move(snap));
  };

  std::size_t next_snap = 0;
  try {
    while (next_snap < snapshot_times.size() && snapshot_times[next_snap] <= 0.0) {
      take_snapshot(state);
      ++next_snap;
    }
    while (next_snap < snapshot_times.size()) {
      const double target = snapshot_times[next_snap];
      double dt = std::min(flow.dt_max(state), target - state.t);
      const bool lands = dt >= target - state.t;
      const FlowDiagnostics prev = state.diag;
      state = flow.step(state, dt);
      if (lands) state.t = target;
      ++out.steps;
      const auto& dg = state.diag;
      out.min_kappa_shift_seen = std::min(out.min_kappa_shift_seen, dg.min_kappa_shift);
      if (dg.min_rho < out.initial_min_rho - opts.bounds_slack ||
          dg.max_rho > out.initial_max_rho + opts.bounds_slack) {
        ++out.bounds_violations;
      }
      if (dg.min_rho < prev.min_rho - opts.bounds_slack ||
          dg.max_rho > prev.max_rho + opts.bounds_slack) {
        ++out.monotonicity_violations;
      }
      if (lands || out.steps % opts.monitor_stride == 0) out.monitor.push_back(monitor_row(state));
      if (lands) {
        take_snapshot(state);
        ++next_snap;
      }
    }
  } catch (const Error& e) {
    out.failure = e.name();
    out.failure_time = state.t;
    throw;
  }
}

FlowRun flow_run(const StarDomain& initial, double t_end, std::vector<double> snapshot_times,
                 const FlowOptions& opts) {
  FlowRun run;
  flow_run_into(run, initial, t_end, std::move(snapshot_times), opts);
  return run;
}

}  // namespace hyplab
