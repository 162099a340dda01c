#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hyplab {

/// Star-shaped planar domain in H^2 given by its boundary as a polar radial
/// graph, rho(theta) = a0 + sum_k (c_k cos k theta + s_k sin k theta), where
/// rho is hyperbolic distance from the origin.
class StarDomain {
 public:
  static constexpr std::size_t kMaxModes = 32;

  /// Geodesic ball of radius r centred at the origin.
  static StarDomain ball(double radius);
  static StarDomain fourier(double a0, std::vector<double> cos_coeffs,
                            std::vector<double> sin_coeffs);

  /// Least-squares Fourier fit of uniformly sampled radii (theta_j = 2 pi j/N).
  /// Fails with "projection-loss" when the truncated series misses any sample
  /// by more than `tolerance`.
  static StarDomain from_samples(const std::vector<double>& rho,
                                 std::size_t max_modes = kMaxModes,
                                 double tolerance = 1e-8);

  double a0() const { return a0_; }
  const std::vector<double>& cos_coeffs() const { return cos_; }
  const std::vector<double>& sin_coeffs() const { return sin_; }
  bool is_ball() const;

  double rho(double theta) const;
  double rho_p(double theta) const;
  double rho_pp(double theta) const;

  /// Samples rho at theta_j = 2 pi j / n.
  std::vector<double> sample(std::size_t n) const;
  double max_rho(std::size_t n = 1024) const;

  std::optional<std::string> label;

 private:
  StarDomain(double a0, std::vector<double> c, std::vector<double> s);
  void validate() const;

  double a0_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

}  // namespace hyplab
