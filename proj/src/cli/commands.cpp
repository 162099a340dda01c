#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hyplab/cli.hpp"
#include "hyplab/concavity.hpp"
#include "hyplab/eigen2d.hpp"
#include "hyplab/error.hpp"
#include "hyplab/horoflow.hpp"
#include "hyplab/hypgeom.hpp"
#include "hyplab/radial.hpp"
#include "hyplab/svg.hpp"

namespace hyplab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFooter = R"(CSV schemas (header row always written):
  ball.csv              t,v
  figure1.csv           r,t,value           value = Phi'' - Phi' for Phi = log v (H^3 ball)
  eig.csv               x1,x2,v1[,v2]       disk coordinates, eigenvectors scaled to max-norm 1
  concavity.csv         x1,x2,w,H11,H12,H22,min_eig_local
  flow_monitor.csv      t,min_rho,max_rho,min_kappa_shift,oscillation
Exit codes: 0 success, 2 domain/model error, 64 usage error.
Environment: HYPLAB_OUT overrides the configured output directory.)";

struct Context {
  std::string config_path;
  std::string out_flag;
  RunConfig cfg;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  fs::path out_dir() const {
    fs::path dir = cfg.output_dir;
    if (const char* env = std::getenv("HYPLAB_OUT"); env != nullptr && *env != '\0') dir = env;
    if (!out_flag.empty()) dir = out_flag;
    fs::create_directories(dir);
    return dir;
  }
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error("io-error", "cannot write " + path.string());
  f << text;
}

std::string fmt(double v, int prec = 10) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw CLI::ValidationError("list", "not a number: " + item);
    }
    if (used != item.size()) throw CLI::ValidationError("list", "not a number: " + item);
    out.push_back(v);
  }
  return out;
}

void warn_if_not_horo_convex(const Context& ctx, const StarDomain& d) {
  const double m = horo_convexity_margin(d);
  if (m < 0.0) {
    *ctx.err << "warning: domain is not horo-convex (min kappa - 1 = " << fmt(m, 6) << ")\n";
  }
}

// ---------------------------------------------------------------------------

void cmd_ball(const Context& ctx, int n, double r, int l, int k) {
  radial::ShootingOptions opts;
  opts.residual_tol = ctx.cfg.shooting_residual;
  const auto res = radial::mu_ball(n, r, l, k, opts);
  std::ostringstream csv;
  csv << std::setprecision(12) << "t,v\n";
  for (std::size_t i = 0; i < res.t_samples.size(); ++i) {
    csv << res.t_samples[i] << ',' << res.v_samples[i] << '\n';
  }
  write_file(ctx.out_dir() / "ball.csv", csv.str());
  *ctx.out << "ball n=" << n << " r=" << fmt(r) << " l=" << l << " k=" << k
           << " mu=" << fmt(res.mu, 12) << " residual=" << fmt(res.residual, 3) << '\n';
}

void cmd_figure1(const Context& ctx, const std::vector<double>& r_list, int samples) {
  std::ostringstream csv;
  csv << std::setprecision(12) << "r,t,value\n";
  std::vector<svg::Series> series;
  for (double r : r_list) {
    if (!(r > 0.0)) throw Error("invalid-argument", "radii must be positive");
    svg::Series s;
    s.label = "r = " + fmt(r, 4);
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
      const double t = r * (i + 0.5) / samples;
      const double val = radial::h3_log_second_derivative(r, t) - radial::h3_log_derivative(r, t);
      csv << r << ',' << t << ',' << val << '\n';
      s.x.push_back(t);
      s.y.push_back(val);
      peak = std::max(peak, val);
    }
    series.push_back(std::move(s));
    *ctx.out << "r=" << fmt(r, 6) << " max=" << fmt(peak, 8)
             << (peak < 0.0 ? " negative" : " attains-positive") << '\n';
  }
  const auto dir = ctx.out_dir();
  write_file(dir / "figure1.csv", csv.str());
  svg::PlotSpec spec;
  spec.title = "Phi'' - Phi' for Phi = log v, balls in H^3";
  spec.x_label = "t";
  spec.y_label = "Phi'' - Phi'";
  spec.y_range = std::pair{-4.0, 1.0};
  spec.zero_line = true;
  write_file(dir / "figure1.svg", svg::line_plot(series, spec));
}

void cmd_c0(const Context& ctx) {
  const double c0 = radial::find_c0_h3(1e-4);
  *ctx.out << "c0=" << fmt(c0, 8) << " tol=1e-4 in_(2,3)=true\n";
}

void cmd_r0(const Context& ctx, int n, double r_max) {
  const double r0 = radial::find_r0(n, r_max);
  *ctx.out << "r0 n=" << n << " r0=" << fmt(r0, 8) << " tol=1e-5"
           << (r0 >= r_max ? " (no sign change up to r_max)" : "") << '\n';
}

void write_eig_csv(const fs::path& path, const EigenSolution& sol) {
  std::ostringstream csv;
  csv << std::setprecision(12) << "x1,x2,v1" << (sol.eigenvectors.size() > 1 ? ",v2" : "") << '\n';
  const auto& nodes = sol.grid->nodes();
  for (std::size_t p = 0; p < nodes.size(); ++p) {
    csv << nodes[p].x.x1 << ',' << nodes[p].x.x2;
    for (const auto& v : sol.eigenvectors) csv << ',' << v[static_cast<Eigen::Index>(p)];
    csv << '\n';
  }
  write_file(path, csv.str());
}

EigenSolution solve(const Context& ctx, const StarDomain& d, double h, int k) {
  EigenSolution sol = solve_domain(d, h, k);
  for (double res : sol.residuals) {
    if (res > ctx.cfg.eigen_residual) {
      *ctx.err << "warning: eigen residual " << fmt(res, 3) << " above " << ctx.cfg.eigen_residual
               << '\n';
    }
  }
  if (sol.degenerate_pair) *ctx.err << "warning: degenerate-pair (mu2 - mu1 below 1e-10 mu1)\n";
  return sol;
}

void cmd_eig(const Context& ctx, const std::string& domain_path, double h, int k) {
  const StarDomain d = load_domain(domain_path);
  warn_if_not_horo_convex(ctx, d);
  const EigenSolution sol = solve(ctx, d, h, k);
  write_eig_csv(ctx.out_dir() / "eig.csv", sol);
  *ctx.out << "eig nodes=" << sol.grid->size() << " h=" << fmt(h);
  for (std::size_t e = 0; e < sol.mu_values.size(); ++e) {
    *ctx.out << " mu" << e + 1 << '=' << fmt(sol.mu_values[e], 12);
  }
  *ctx.out << " residual=" << fmt(*std::max_element(sol.residuals.begin(), sol.residuals.end()), 3)
           << " iterations=" << sol.iterations.front() << '\n';
}

struct ConcavityVerdict {
  ConcavityField field;
  ResidualReport residual;
  double boundary = 0.0;
  bool psd = false;
};

ConcavityVerdict concavity_of(const Context& ctx, const StarDomain& d, double h, double lambda,
                              double delta_mult) {
  const EigenSolution sol = solve(ctx, d, h, 1);
  const double delta = default_delta(*sol.grid, delta_mult);
  ConcavityVerdict v;
  v.field = concavity_field(sol, lambda, delta, ctx.cfg.v_floor);
  v.residual = pde_residual(sol, delta, ctx.cfg.v_floor);
  v.boundary = boundary_criterion(d, lambda);
  v.psd = v.field.numerically_psd(ctx.cfg.psd_tolerance);
  return v;
}

void cmd_concavity(const Context& ctx, const std::string& domain_path, double h, double lambda,
                   double delta_mult) {
  const StarDomain d = load_domain(domain_path);
  warn_if_not_horo_convex(ctx, d);
  const auto v = concavity_of(ctx, d, h, lambda, delta_mult);
  std::ostringstream csv;
  csv << std::setprecision(12) << "x1,x2,w,H11,H12,H22,min_eig_local\n";
  for (const auto& p : v.field.points) {
    csv << p.x.x1 << ',' << p.x.x2 << ',' << p.w << ',' << p.hess_log_v.a11 << ','
        << p.hess_log_v.a12 << ',' << p.hess_log_v.a22 << ',' << p.min_eig_local << '\n';
  }
  write_file(ctx.out_dir() / "concavity.csv", csv.str());
  *ctx.out << "concavity lambda=" << fmt(lambda) << " mu1=" << fmt(v.field.mu1, 10)
           << " min_eig=" << fmt(v.field.min_eig, 8) << " at=(" << fmt(v.field.min_location.x1, 5)
           << ',' << fmt(v.field.min_location.x2, 5) << ")"
           << " tolerance=" << fmt(ctx.cfg.psd_tolerance * v.field.mu1, 6)
           << " psd=" << (v.psd ? "true" : "false") << " boundary_criterion=" << fmt(v.boundary, 8)
           << '\n';
  *ctx.out << "residual pde_sup=" << fmt(v.residual.pde_residual_sup, 6)
           << " trace_sup=" << fmt(v.residual.trace_residual_sup, 6)
           << " points=" << v.residual.points
           << " c_star_flag=" << (v.residual.c_star_flag ? "true" : "false") << '\n';
}

void cmd_gap(const Context& ctx, const std::string& domain_path, double h) {
  const StarDomain d = load_domain(domain_path);
  warn_if_not_horo_convex(ctx, d);
  const GapReport g = gap_domain(d, h);
  json j{{"mu1", g.mu1},
         {"mu2", g.mu2},
         {"gap", g.gap},
         {"diameter", g.diameter},
         {"reference_scale", g.reference_scale},
         {"gap_over_reference", g.gap / g.reference_scale},
         {"h", h}};
  write_file(ctx.out_dir() / "gap.json", j.dump(2) + "\n");
  *ctx.out << "gap mu1=" << fmt(g.mu1, 10) << " mu2=" << fmt(g.mu2, 10) << " gap=" << fmt(g.gap, 10)
           << " D=" << fmt(g.diameter, 8) << " pi^2/D^2=" << fmt(g.reference_scale, 8) << '\n';
}

std::string time_tag(double t) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << t;
  return os.str();
}

void write_flow_outputs(const fs::path& dir, const FlowRun& run) {
  json manifest;
  manifest["snapshots"] = json::array();
  std::vector<svg::Series> curves;
  for (const auto& snap : run.snapshots) {
    const std::string name = "snapshot_t" + time_tag(snap.state.t) + ".json";
    StarDomain d = snap.domain;
    d.label = "flow t=" + time_tag(snap.state.t);
    write_file(dir / name, domain_to_json(d).dump(2) + "\n");
    manifest["snapshots"].push_back({{"t", snap.state.t},
                                     {"file", name},
                                     {"oscillation", snap.oscillation},
                                     {"fitted_rate", snap.fitted_rate},
                                     {"min_kappa_shift", snap.state.diag.min_kappa_shift}});
    svg::Series s;
    s.label = "t = " + time_tag(snap.state.t);
    const std::size_t n = snap.state.rho.size();
    for (std::size_t j = 0; j <= n; ++j) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(j % n) / static_cast<double>(n);
      const DiskPoint p = polar_to_disk({snap.state.rho[j % n], th});
      s.x.push_back(p.x1);
      s.y.push_back(p.x2);
    }
    curves.push_back(std::move(s));
  }
  std::ostringstream csv;
  csv << std::setprecision(12) << "t,min_rho,max_rho,min_kappa_shift,oscillation\n";
  const std::size_t stride = std::max<std::size_t>(1, run.monitor.size() / 4000);
  for (std::size_t i = 0; i < run.monitor.size(); ++i) {
    if (i % stride != 0 && i + 1 != run.monitor.size()) continue;
    const auto& m = run.monitor[i];
    csv << m.t << ',' << m.min_rho << ',' << m.max_rho << ',' << m.min_kappa_shift << ','
        << m.oscillation << '\n';
  }
  write_file(dir / "flow_monitor.csv", csv.str());
  if (!curves.empty()) {
    svg::PlotSpec spec;
    spec.title = "Boundary curves along the flow (Poincare disk)";
    spec.x_label = "x1";
    spec.y_label = "x2";
    spec.equal_aspect = true;
    write_file(dir / "flow.svg", svg::line_plot(curves, spec));
  }
  manifest["steps"] = run.steps;
  manifest["bounds_violations"] = run.bounds_violations;
  manifest["monotonicity_violations"] = run.monotonicity_violations;
  manifest["min_kappa_shift_seen"] = run.min_kappa_shift_seen;
  manifest["initial_oscillation"] = run.initial_oscillation;
  manifest["status"] = run.failure ? "failed" : "ok";
  if (run.failure) {
    manifest["failure"] = *run.failure;
    manifest["failure_time"] = run.failure_time;
  }
  write_file(dir / "MANIFEST.json", manifest.dump(2) + "\n");
}

void cmd_flow(const Context& ctx, const std::string& domain_path, double t_end,
              const std::vector<double>& snapshots) {
  const StarDomain d = load_domain(domain_path);
  FlowOptions opts;
  opts.samples = ctx.cfg.theta_samples;
  const auto dir = ctx.out_dir();
  FlowRun run;
  try {
    flow_run_into(run, d, t_end, snapshots, opts);
  } catch (const Error&) {
    if (run.failure) write_flow_outputs(dir, run);
    throw;
  }
  write_flow_outputs(dir, run);
  const auto& last = run.snapshots.back();
  *ctx.out << "flow t_end=" << fmt(t_end) << " steps=" << run.steps
           << " oscillation=" << fmt(last.oscillation, 6) << " initial_oscillation="
           << fmt(run.initial_oscillation, 6) << " min_kappa_shift=" << fmt(run.min_kappa_shift_seen, 6)
           << " bounds_violations=" << run.bounds_violations
           << " monotonicity_violations=" << run.monotonicity_violations << '\n';
}

void cmd_pipeline(const Context& ctx, const std::string& domain_path, std::vector<double> t_list,
                  double lambda, double h, double max_diameter) {
  const StarDomain d = load_domain(domain_path);
  const double diam0 = diameter(d);
  if (diam0 > max_diameter) {
    throw Error("domain-too-large", "diameter " + fmt(diam0, 6) + " exceeds cap " + fmt(max_diameter));
  }
  if (t_list.empty()) t_list.push_back(0.0);
  const double t_end = std::max(*std::max_element(t_list.begin(), t_list.end()), 1e-12);
  FlowOptions opts;
  opts.samples = ctx.cfg.theta_samples;
  json report;
  report["lambda"] = lambda;
  report["h"] = h;
  report["psd_tolerance"] = ctx.cfg.psd_tolerance;
  report["entries"] = json::array();

  FlowRun run;
  try {
    flow_run_into(run, d, t_end, t_list, opts);
  } catch (const Error& e) {
    report["flow_failure"] = {{"error", e.name()}, {"time", run.failure_time}};
  }
  bool all_ok = !run.failure;
  for (const auto& snap : run.snapshots) {
    if (std::find(t_list.begin(), t_list.end(), snap.state.t) == t_list.end()) continue;
    json entry{{"t", snap.state.t}};
    try {
      const StarDomain& dom = snap.domain;
      const auto v = concavity_of(ctx, dom, h, lambda, ctx.cfg.delta_multiplier);
      entry["mu1"] = v.field.mu1;
      entry["min_eig"] = v.field.min_eig;
      entry["verdict"] = v.psd;
      entry["diameter"] = diameter(dom);
      entry["boundary_criterion"] = v.boundary;
      entry["status"] = "ok";
    } catch (const Error& e) {
      entry["status"] = "failed";
      entry["error"] = e.name();
      all_ok = false;
    }
    *ctx.out << "pipeline " << entry.dump() << '\n';
    report["entries"].push_back(std::move(entry));
  }
  write_file(ctx.out_dir() / "pipeline.json", report.dump(2) + "\n");
  if (!all_ok) throw Error("pipeline-failed", "one or more stages failed (see pipeline.json)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hyplab: Dirichlet eigenfunctions, super log-concavity and horo-convex flow in "
               "hyperbolic space"};
  app.footer(kFooter);
  // "--h" is the grid spacing, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  app.add_option("--config", ctx.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  std::function<void()> action;

  auto* ball = app.add_subcommand("ball", "Radial eigenpair of a geodesic ball in H^n");
  int n = 0, l = 0, k = 1;
  double r = 0.0;
  ball->add_option("--n", n, "Ambient dimension (>= 2)")->required();
  ball->add_option("--r", r, "Ball radius")->required();
  ball->add_option("--l", l, "Angular index")->capture_default_str();
  ball->add_option("--k", k, "Root index (1 = first)")->capture_default_str();
  ball->add_option("--out", ctx.out_flag, "Output directory");
  ball->callback([&] { action = [&] { cmd_ball(ctx, n, r, l, k); }; });

  auto* fig = app.add_subcommand("figure1", "Phi'' - Phi' curves of H^3 balls (CSV + SVG)");
  std::string r_list = "1,2,3,4,5,6,7,8,9";
  int samples = 400;
  fig->add_option("--r-list", r_list, "Comma-separated radii")->capture_default_str();
  fig->add_option("--samples", samples, "Samples per curve")->capture_default_str()->check(CLI::PositiveNumber);
  fig->add_option("--out", ctx.out_flag, "Output directory");
  fig->callback([&] { action = [&] { cmd_figure1(ctx, parse_list(r_list), samples); }; });

  auto* c0 = app.add_subcommand("c0", "Super log-concavity threshold radius of H^3 balls");
  c0->callback([&] { action = [&] { cmd_c0(ctx); }; });

  auto* r0 = app.add_subcommand("r0", "Super log-concavity threshold radius of H^n balls");
  int r0_n = 0;
  double r_max = 10.0;
  r0->add_option("--n", r0_n, "Ambient dimension (>= 2)")->required();
  r0->add_option("--r-max", r_max, "Scan range upper end (<= 10)")->capture_default_str();
  r0->callback([&] { action = [&] { cmd_r0(ctx, r0_n, r_max); }; });

  std::string domain;
  double h = -1.0;
  auto* eig = app.add_subcommand("eig", "Dirichlet eigenpairs of a star domain in H^2");
  eig->add_option("--domain", domain, "Domain JSON file")->required();
  eig->add_option("--h", h, "Grid spacing in disk units");
  int eig_k = 2;
  eig->add_option("--k", eig_k, "Number of eigenpairs (1 or 2)")->capture_default_str();
  eig->add_option("--out", ctx.out_flag, "Output directory");
  eig->callback([&] { action = [&] { cmd_eig(ctx, domain, h, eig_k); }; });

  auto* conc = app.add_subcommand("concavity", "Pointwise lambda-log-concavity check");
  double lambda = 1.0;
  double delta_mult = -1.0;
  conc->add_option("--domain", domain, "Domain JSON file")->required();
  conc->add_option("--h", h, "Grid spacing in disk units");
  conc->add_option("--lambda", lambda, "Concavity parameter")->capture_default_str();
  conc->add_option("--delta", delta_mult, "Boundary margin in grid cells (default from config)");
  conc->add_option("--out", ctx.out_flag, "Output directory");
  conc->callback([&] {
    action = [&] {
      cmd_concavity(ctx, domain, h, lambda, delta_mult > 0 ? delta_mult : ctx.cfg.delta_multiplier);
    };
  });

  auto* gap = app.add_subcommand("gap", "Fundamental gap report (JSON)");
  gap->add_option("--domain", domain, "Domain JSON file")->required();
  gap->add_option("--h", h, "Grid spacing in disk units");
  gap->add_option("--out", ctx.out_flag, "Output directory");
  gap->callback([&] { action = [&] { cmd_gap(ctx, domain, h); }; });

  auto* flow = app.add_subcommand("flow", "Horo-convex curvature flow of a star domain");
  double t_end = 1.0;
  std::string snaps;
  flow->add_option("--domain", domain, "Domain JSON file")->required();
  flow->add_option("--t-end", t_end, "Final flow time")->capture_default_str();
  flow->add_option("--snapshots", snaps, "Comma-separated snapshot times");
  flow->add_option("--out-dir,--out", ctx.out_flag, "Output directory");
  flow->callback([&] { action = [&] { cmd_flow(ctx, domain, t_end, parse_list(snaps)); }; });

  auto* pipe = app.add_subcommand("pipeline", "Flow, then eigen + concavity check per snapshot");
  std::string t_list = "0";
  double max_diam = 2.0;
  pipe->add_option("--domain", domain, "Domain JSON file")->required();
  pipe->add_option("--t-list", t_list, "Comma-separated flow times")->capture_default_str();
  pipe->add_option("--lambda", lambda, "Concavity parameter")->capture_default_str();
  pipe->add_option("--h", h, "Grid spacing in disk units");
  pipe->add_option("--max-diameter", max_diam, "Diameter cap")->capture_default_str();
  pipe->add_option("--out", ctx.out_flag, "Output directory");
  pipe->callback([&] {
    action = [&] { cmd_pipeline(ctx, domain, parse_list(t_list), lambda, h, max_diam); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!ctx.config_path.empty()) ctx.cfg = RunConfig::load(ctx.config_path);
    if (h <= 0.0) h = ctx.cfg.h;
    action();
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitModel;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitModel;
  }
  return kExitOk;
}

}  // namespace hyplab::cli
