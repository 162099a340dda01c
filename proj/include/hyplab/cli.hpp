#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "hyplab/star_domain.hpp"

namespace hyplab::cli {

/// Tunables shared by the subcommands; loadable from a JSON file with
/// exactly these keys.
struct RunConfig {
  double shooting_residual = 1e-10;
  double eigen_residual = 1e-8;
  double psd_tolerance = 1e-2;
  double h = 0.005;
  std::size_t theta_samples = 256;
  double delta_multiplier = 5.0;
  double v_floor = 1e-3;
  std::string output_dir = ".";

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  void validate() const;
};

/// Domain file: {"model": "ball", "radius": r} or
/// {"model": "polar-fourier", "a0": a, "cos": [...], "sin": [...]}, with an
/// optional "label". Unknown keys are rejected.
StarDomain parse_domain(const nlohmann::json& j);
StarDomain load_domain(const std::filesystem::path& path);
nlohmann::json domain_to_json(const StarDomain& domain);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitModel = 2;
inline constexpr int kExitUsage = 64;

/// Entry point of the `hyplab` command line tool.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hyplab::cli
