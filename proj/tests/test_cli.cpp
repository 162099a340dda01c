#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <regex>
#include <map>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "hyplab/cli.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hyplab;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hyplab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hyplab_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_json(const fs::path& dir, const std::string& name, const json& j) {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(f, l);) out.push_back(l);
  return out;
}

double field(const std::string& text, const std::string& key) {
  const std::regex re(key + "=([-+0-9.eE]+)");
  std::smatch m;
  REQUIRE(std::regex_search(text, m, re));
  return std::stod(m[1]);
}

// Tag balance over a simple SVG document (no comments or CDATA are emitted).
bool svg_well_formed(const std::string& s) {
  if (s.find("<svg") == std::string::npos || s.find("</svg>") == std::string::npos) return false;
  const std::regex tag("<(/?)([a-zA-Z]+)[^>]*?(/?)>");
  std::vector<std::string> stack;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[2] == "xml") continue;
    if (m[1] == "/") {
      if (stack.empty() || stack.back() != m[2]) return false;
      stack.pop_back();
    } else if (m[3] != "/") {
      stack.push_back(m[2]);
    }
  }
  return stack.empty();
}

}  // namespace

TEST_CASE("ball command") {
  const fs::path dir = scratch("ball");
  const Result r = run_cli({"ball", "--n", "3", "--r", "3.14159265", "--l", "0", "--k", "1", "--out", dir});
  CHECK(r.code == 0);
  CHECK(field(r.out, "mu") == doctest::Approx(2.0).epsilon(1e-7));
  const auto rows = lines(dir / "ball.csv");
  CHECK(rows.front() == "t,v");
  CHECK(rows.size() > 100);

  const Result l0 = run_cli({"ball", "--n", "2", "--r", "1", "--out", dir});
  const Result l1 = run_cli({"ball", "--n", "2", "--r", "1", "--l", "1", "--k", "1", "--out", dir});
  CHECK(field(l1.out, "mu") > field(l0.out, "mu"));
}

TEST_CASE("usage and model errors map to exit codes") {
  CHECK(run_cli({"ball", "--n", "3"}).code == cli::kExitUsage);
  CHECK(run_cli({"nonsense"}).code == cli::kExitUsage);
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"--help"}).code == cli::kExitOk);
  const Result bad = run_cli({"ball", "--n", "1", "--r", "1", "--out", scratch("bad")});
  CHECK(bad.code == cli::kExitModel);
  CHECK(bad.err.rfind("invalid-argument:", 0) == 0);
}

TEST_CASE("help documents the CSV schemas") {
  const Result r = run_cli({"--help"});
  for (const char* s : {"ball.csv", "figure1.csv", "eig.csv", "concavity.csv", "flow_monitor.csv"}) {
    CHECK(r.out.find(s) != std::string::npos);
  }
}

TEST_CASE("figure1 command") {
  const fs::path dir = scratch("fig");
  const Result r = run_cli({"figure1", "--samples", "200", "--out", dir});
  CHECK(r.code == 0);
  const auto rows = lines(dir / "figure1.csv");
  CHECK(rows.front() == "r,t,value");
  CHECK(rows.size() == 1 + 9 * 200);
  std::map<double, double> peak;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double rr, t, v;
    char c;
    std::istringstream(rows[i]) >> rr >> c >> t >> c >> v;
    CHECK(t > 0.0);
    CHECK(t < rr);
    peak[rr] = peak.count(rr) ? std::max(peak[rr], v) : v;
  }
  CHECK(peak[1] < 0.0);
  CHECK(peak[2] < 0.0);
  for (int k = 3; k <= 9; ++k) CHECK(peak[k] > 0.0);
  CHECK(svg_well_formed(slurp(dir / "figure1.svg")));

  const Result custom = run_cli({"figure1", "--r-list", "1,2.5", "--samples", "50", "--out", dir});
  CHECK(custom.code == 0);
  CHECK(lines(dir / "figure1.csv").size() == 101);
  CHECK(run_cli({"figure1", "--r-list", "1,x", "--out", dir}).code == cli::kExitUsage);
  CHECK(run_cli({"figure1", "--r-list", "1,-2", "--out", dir}).code == cli::kExitModel);
}

TEST_CASE("thresholds") {
  const Result c0 = run_cli({"c0"});
  CHECK(c0.code == 0);
  const double v = field(c0.out, "c0");
  CHECK(v > 2.0);
  CHECK(v < 3.0);
  const Result r3 = run_cli({"r0", "--n", "3"});
  CHECK(r3.code == 0);
  CHECK(field(r3.out, "r0") == doctest::Approx(v).epsilon(1e-3));
  const Result r2 = run_cli({"r0", "--n", "2"});
  CHECK(field(r2.out, "r0") > 0.0);
}

TEST_CASE("eig, concavity and gap on balls") {
  const fs::path dir = scratch("eig");
  const fs::path b05 = write_json(dir, "ball_r05.json", {{"model", "ball"}, {"radius", 0.5}});
  const Result e = run_cli({"eig", "--domain", b05, "--h", "0.005", "--k", "2", "--out", dir});
  CHECK(e.code == 0);
  CHECK(lines(dir / "eig.csv").front() == "x1,x2,v1,v2");
  CHECK(field(e.out, "mu2") > field(e.out, "mu1"));

  const Result c1 = run_cli({"concavity", "--domain", b05, "--lambda", "1", "--out", dir});
  CHECK(c1.code == 0);
  CHECK(c1.out.find("psd=true") != std::string::npos);
  CHECK(lines(dir / "concavity.csv").front() == "x1,x2,w,H11,H12,H22,min_eig_local");
  const Result c0 = run_cli({"concavity", "--domain", b05, "--lambda", "0", "--out", dir});
  CHECK(field(c0.out, "min_eig") >= field(c1.out, "min_eig"));
  CHECK(run_cli({"concavity", "--domain", b05, "--delta", "1", "--out", dir}).code == cli::kExitModel);

  const fs::path b1 = write_json(dir, "ball_r1.json", {{"model", "ball"}, {"radius", 1.0}});
  const Result g = run_cli({"gap", "--domain", b1, "--h", "0.01", "--out", dir});
  CHECK(g.code == 0);
  const json report = json::parse(slurp(dir / "gap.json"));
  CHECK(report["gap"].get<double>() > 0.0);
  CHECK(report["diameter"].get<double>() == doctest::Approx(2.0));
  CHECK(report["reference_scale"].get<double>() == doctest::Approx(std::numbers::pi * std::numbers::pi / 4));
}

TEST_CASE("non-horo-convex domains warn in eig but fail in flow") {
  const fs::path dir = scratch("ecc");
  const fs::path ecc = write_json(dir, "ecc.json", {{"model", "polar-fourier"}, {"a0", 0.5}, {"cos", {0.4}}, {"sin", json::array()}});
  const Result e = run_cli({"eig", "--domain", ecc, "--h", "0.02", "--out", dir});
  CHECK(e.code == 0);
  CHECK(e.err.find("warning") != std::string::npos);
  const Result f = run_cli({"flow", "--domain", ecc, "--t-end", "0.1", "--out-dir", dir});
  CHECK(f.code == cli::kExitModel);
}

TEST_CASE("domain file validation") {
  const fs::path dir = scratch("dom");
  const fs::path extra = write_json(dir, "extra.json", {{"model", "ball"}, {"radius", 0.5}, {"colour", "red"}});
  const fs::path neg = write_json(dir, "neg.json", {{"model", "ball"}, {"radius", -0.5}});
  const fs::path unk = write_json(dir, "unk.json", {{"model", "square"}});
  for (const auto& p : {extra, neg, unk}) CHECK(run_cli({"gap", "--domain", p, "--out", dir}).code == cli::kExitModel);
  CHECK(run_cli({"gap", "--domain", dir / "missing.json"}).code != 0);

  const StarDomain d = cli::parse_domain({{"model", "polar-fourier"}, {"a0", 0.7}, {"cos", {0.0, 0.1}}, {"sin", {0.02}}, {"label", "x"}});
  CHECK(d.label == "x");
  const StarDomain back = cli::parse_domain(cli::domain_to_json(d));
  CHECK(back.rho(0.3) == doctest::Approx(d.rho(0.3)));
  CHECK(cli::parse_domain({{"model", "polar-fourier"}, {"a0", 0.7}}).is_ball());
  CHECK(thrown([] { cli::parse_domain({{"model", "polar-fourier"}, {"cos", {0.1}}}); }) != "");
}

TEST_CASE("run configuration") {
  const json j = {{"h", 0.01}, {"psd_tolerance", 0.05}};
  const cli::RunConfig c = cli::RunConfig::from_json(j);
  CHECK(c.h == 0.01);
  CHECK(c.psd_tolerance == 0.05);
  CHECK(c.delta_multiplier == 5.0);
  CHECK(c.theta_samples == 256);
  CHECK(thrown([] { cli::RunConfig::from_json({{"unknown", 1}}); }) == "invalid-config");
  CHECK(thrown([] { cli::RunConfig::from_json({{"h", -1.0}}); }) == "invalid-config");
}

TEST_CASE("output directory precedence: flag, environment, config") {
  const fs::path base = scratch("prec");
  const fs::path cfg_dir = base / "cfg", env_dir = base / "env", flag_dir = base / "flag";
  const fs::path cfg = write_json(base, "cfg.json", {{"output_dir", cfg_dir.string()}});
  const std::vector<std::string> args = {"--config", cfg, "ball", "--n", "2", "--r", "1"};

  ::unsetenv("HYPLAB_OUT");
  CHECK(run_cli(args).code == 0);
  CHECK(fs::exists(cfg_dir / "ball.csv"));

  ::setenv("HYPLAB_OUT", env_dir.c_str(), 1);
  CHECK(run_cli(args).code == 0);
  CHECK(fs::exists(env_dir / "ball.csv"));

  auto with_flag = args;
  with_flag.insert(with_flag.end(), {"--out", flag_dir.string()});
  CHECK(run_cli(with_flag).code == 0);
  CHECK(fs::exists(flag_dir / "ball.csv"));
  ::unsetenv("HYPLAB_OUT");
}

TEST_CASE("flow command writes snapshots, monitor and manifest") {
  const fs::path dir = scratch("flow");
  const fs::path d = write_json(dir, "p.json", {{"model", "polar-fourier"}, {"a0", 0.4}, {"cos", {0.0, 0.02}}, {"sin", json::array()}});
  const Result r = run_cli({"flow", "--domain", d, "--t-end", "0.2", "--snapshots", "0,0.1,0.2", "--out-dir", dir});
  CHECK(r.code == 0);
  for (const char* s : {"snapshot_t0.0000.json", "snapshot_t0.1000.json", "snapshot_t0.2000.json"}) {
    REQUIRE(fs::exists(dir / s));
    CHECK_NOTHROW(cli::load_domain(dir / s));
  }
  CHECK(lines(dir / "flow_monitor.csv").front() == "t,min_rho,max_rho,min_kappa_shift,oscillation");
  CHECK(svg_well_formed(slurp(dir / "flow.svg")));
  const json m = json::parse(slurp(dir / "MANIFEST.json"));
  CHECK(m["snapshots"].size() == 3);
}

TEST_CASE("pipeline on a small perturbed circle") {
  const fs::path dir = scratch("pipe");
  const fs::path d = write_json(dir, "p.json", {{"model", "polar-fourier"}, {"a0", 0.4}, {"cos", {0.0, 0.02}}, {"sin", json::array()}});
  const Result r = run_cli({"pipeline", "--domain", d, "--t-list", "0,0.1", "--h", "0.01", "--out", dir});
  CHECK(r.code == 0);
  const json rep = json::parse(slurp(dir / "pipeline.json"));
  REQUIRE(rep["entries"].size() == 2);
  for (const auto& e : rep["entries"]) {
    CHECK(e["status"] == "ok");
    CHECK(e["verdict"] == true);
    CHECK(e["boundary_criterion"].get<double>() > 0.0);
  }
  CHECK(run_cli({"pipeline", "--domain", d, "--max-diameter", "0.1", "--out", dir}).code == cli::kExitModel);
}
