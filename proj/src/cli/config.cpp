#include <fstream>

#include "hyplab/cli.hpp"
#include "hyplab/error.hpp"

namespace hyplab::cli {

using nlohmann::json;

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw Error("invalid-config", "config must be a JSON object");
  RunConfig c;
  for (const auto& [key, val] : j.items()) {
    if (key == "shooting_residual") c.shooting_residual = val.get<double>();
    else if (key == "eigen_residual") c.eigen_residual = val.get<double>();
    else if (key == "psd_tolerance") c.psd_tolerance = val.get<double>();
    else if (key == "h") c.h = val.get<double>();
    else if (key == "theta_samples") c.theta_samples = val.get<std::size_t>();
    else if (key == "delta_multiplier") c.delta_multiplier = val.get<double>();
    else if (key == "v_floor") c.v_floor = val.get<double>();
    else if (key == "output_dir") c.output_dir = val.get<std::string>();
    else throw Error("invalid-config", "unknown config key '" + key + "'");
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("invalid-config", "cannot open " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error("invalid-config", e.what());
  }
}

void RunConfig::validate() const {
  if (!(shooting_residual > 0 && eigen_residual > 0 && psd_tolerance > 0 && h > 0 &&
        delta_multiplier > 0 && v_floor > 0 && v_floor < 1 && theta_samples > 0)) {
    throw Error("invalid-config", "tolerances must be positive and v_floor in (0, 1)");
  }
}

StarDomain parse_domain(const json& j) {
  try {
    if (!j.is_object() || !j.contains("model")) {
      throw Error("invalid-domain", "domain file needs a \"model\" key");
    }
    const auto model = j.at("model").get<std::string>();
    std::optional<std::string> label;
    if (j.contains("label")) label = j.at("label").get<std::string>();
    StarDomain d = [&] {
      if (model == "ball") {
        for (const auto& [key, _] : j.items()) {
          if (key != "model" && key != "radius" && key != "label") {
            throw Error("invalid-domain", "unknown key '" + key + "'");
          }
        }
        return StarDomain::ball(j.at("radius").get<double>());
      }
      if (model == "polar-fourier") {
        for (const auto& [key, _] : j.items()) {
          if (key != "model" && key != "a0" && key != "cos" && key != "sin" && key != "label") {
            throw Error("invalid-domain", "unknown key '" + key + "'");
          }
        }
        auto c = j.value("cos", std::vector<double>{});
        auto s = j.value("sin", std::vector<double>{});
        return StarDomain::fourier(j.at("a0").get<double>(), std::move(c), std::move(s));
      }
      throw Error("invalid-domain", "unknown model '" + model + "'");
    }();
    d.label = label;
    return d;
  } catch (const json::exception& e) {
    throw Error("invalid-domain", e.what());
  }
}

StarDomain load_domain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("invalid-domain", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("invalid-domain", e.what());
  }
  return parse_domain(j);
}

json domain_to_json(const StarDomain& domain) {
  json j;
  if (domain.is_ball()) {
    j["model"] = "ball";
    j["radius"] = domain.a0();
  } else {
    j["model"] = "polar-fourier";
    j["a0"] = domain.a0();
    j["cos"] = domain.cos_coeffs();
    j["sin"] = domain.sin_coeffs();
  }
  if (domain.label) j["label"] = *domain.label;
  return j;
}

}  // namespace hyplab::cli
