#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyplab/spectral.hpp"
#include "hyplab/star_domain.hpp"

namespace hyplab {

struct FlowDiagnostics {
  double min_rho = 0.0;
  double max_rho = 0.0;
  double min_kappa_shift = 0.0;
  double support_min = 0.0;
  double support_max = 0.0;
  double circle_distance = 0.0;  // max |rho - mean rho|

  double oscillation() const { return max_rho - min_rho; }
};

/// Curve rho(theta, t) on a uniform theta grid.
struct FlowState {
  double t = 0.0;
  std::vector<double> rho;
  FlowDiagnostics diag;
  /// Normal-graph velocity rho_t at this state, cached by the integrator.
  std::vector<double> rho_t;

  StarDomain to_domain(double tolerance = 1e-8) const;
};

struct FlowOptions {
  std::size_t samples = 256;
  double kappa_floor = 1e-6;
  /// Largest allowed one-step growth factor of the oscillation.
  double max_growth = 10.0;
  /// Every n-th accepted step is kept in the monitor history.
  std::size_t monitor_stride = 10;
  /// Slack on the radius bounds min rho(0) <= rho(t) <= max rho(0).
  double bounds_slack = 1e-8;
};

/// Integrator for X_t = [(cosh r - u) / kappa_shift - u] nu on radial-graph
/// curves in H^2, written for the graph as
/// rho_t = F sqrt(rho'^2 + sinh^2 rho) / sinh rho.
class HoroFlow {
 public:
  explicit HoroFlow(FlowOptions opts = {});

  const FlowOptions& options() const { return opts_; }

  FlowState initial_state(const StarDomain& domain);
  FlowState make_state(std::vector<double> rho, double t = 0.0);

  /// Normal speed F per sample.
  std::vector<double> speed(const FlowState& state);
  /// Largest stable step for the state.
  double dt_max(const FlowState& state) const;
  /// One explicit RK4 step.
  FlowState step(const FlowState& state, double dt);

 private:
  struct Eval {
    std::vector<double> speed;
    std::vector<double> rho_t;
    FlowDiagnostics diag;
  };
  Eval evaluate(const std::vector<double>& rho);

  FlowOptions opts_;
  PeriodicDifferentiator diff_;
  std::vector<double> d1_;
  std::vector<double> d2_;
};

struct MonitorRow {
  double t = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double min_kappa_shift = 0.0;
  double oscillation = 0.0;
};

struct FlowSnapshot {
  FlowState state;
  StarDomain domain;
  double oscillation = 0.0;
  /// -d log(oscillation)/dt from a least-squares fit of the history so far.
  double fitted_rate = 0.0;
};

struct FlowRun {
  std::vector<FlowSnapshot> snapshots;
  std::vector<MonitorRow> monitor;
  double initial_min_rho = 0.0;
  double initial_max_rho = 0.0;
  double initial_oscillation = 0.0;
  std::size_t steps = 0;
  std::size_t bounds_violations = 0;        // outside the initial [min, max] radius
  std::size_t monotonicity_violations = 0;  // min rho fell or max rho rose in one step
  double min_kappa_shift_seen = 0.0;
  /// Set when the run stopped early; the contents above stay valid.
  std::optional<std::string> failure;
  double failure_time = 0.0;

  const StarDomain& terminal() const { return snapshots.back().domain; }
};

std::vector<double> flow_speed(const FlowState& state, const FlowOptions& opts = {});
FlowState flow_step(const FlowState& state, double dt, const FlowOptions& opts = {});

/// Runs the flow to t_end and snapshots at each requested time (t = 0 gives
/// the initial domain). Throws on step failure; `flow_run_into` leaves the
/// partial run in `out` before rethrowing.
FlowRun flow_run(const StarDomain& initial, double t_end, std::vector<double> snapshot_times,
                 const FlowOptions& opts = {});
void flow_run_into(FlowRun& out, const StarDomain& initial, double t_end,
                   std::vector<double> snapshot_times, const FlowOptions& opts = {});

/// Least-squares decay rate of log(oscillation) over monitor rows with
/// t <= t_max and oscillation above `floor`.
double fit_decay_rate(const std::vector<MonitorRow>& rows, double t_max, double floor = 1e-12);

}  // namespace hyplab
