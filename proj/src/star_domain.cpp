#include "hyplab/star_domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hyplab/error.hpp"

namespace hyplab {

namespace {

void trim_tail(std::vector<double>& c, std::vector<double>& s) {
  while (!c.empty() && std::abs(c.back()) < 1e-15 && std::abs(s.back()) < 1e-15) {
    c.pop_back();
    s.pop_back();
  }
}

}  // namespace

StarDomain::StarDomain(double a0, std::vector<double> c, std::vector<double> s)
    : a0_(a0), cos_(std::move(c)), sin_(std::move(s)) {
  const auto n = std::max(cos_.size(), sin_.size());
  cos_.resize(n, 0.0);
  sin_.resize(n, 0.0);
  trim_tail(cos_, sin_);
  validate();
}

StarDomain StarDomain::ball(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error("invalid-domain", "ball radius must be positive");
  }
  return StarDomain(radius, {}, {});
}

StarDomain StarDomain::fourier(double a0, std::vector<double> cos_coeffs,
                               std::vector<double> sin_coeffs) {
  return StarDomain(a0, std::move(cos_coeffs), std::move(sin_coeffs));
}

StarDomain StarDomain::from_samples(const std::vector<double>& rho, std::size_t max_modes,
                                    double tolerance) {
  const std::size_t n = rho.size();
  if (n < 4) throw Error("invalid-domain", "need at least 4 samples");
  const std::size_t modes = std::min({max_modes, kMaxModes, n / 2 - 1});
  const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(n);

  double a0 = 0.0;
  for (double r : rho) a0 += r;
  a0 /= static_cast<double>(n);

  std::vector<double> c(modes, 0.0);
  std::vector<double> s(modes, 0.0);
  for (std::size_t k = 1; k <= modes; ++k) {
    double ck = 0.0;
    double sk = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double arg = static_cast<double>(k * j % n) * dtheta;
      ck += rho[j] * std::cos(arg);
      sk += rho[j] * std::sin(arg);
    }
    c[k - 1] = 2.0 * ck / static_cast<double>(n);
    s[k - 1] = 2.0 * sk / static_cast<double>(n);
  }
  StarDomain out(a0, std::move(c), std::move(s));

  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    worst = std::max(worst, std::abs(out.rho(static_cast<double>(j) * dtheta) - rho[j]));
  }
  if (worst > tolerance) {
    throw Error("projection-loss", "Fourier re-projection error " + std::to_string(worst));
  }
  return out;
}

bool StarDomain::is_ball() const { return cos_.empty(); }

double StarDomain::rho(double theta) const {
  double v = a0_;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double kt = static_cast<double>(k + 1) * theta;
    v += cos_[k] * std::cos(kt) + sin_[k] * std::sin(kt);
  }
  return v;
}

double StarDomain::rho_p(double theta) const {
  double v = 0.0;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double m = static_cast<double>(k + 1);
    v += m * (-cos_[k] * std::sin(m * theta) + sin_[k] * std::cos(m * theta));
  }
  return v;
}

double StarDomain::rho_pp(double theta) const {
  double v = 0.0;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double m = static_cast<double>(k + 1);
    v -= m * m * (cos_[k] * std::cos(m * theta) + sin_[k] * std::sin(m * theta));
  }
  return v;
}

std::vector<double> StarDomain::sample(std::size_t n) const {
  std::vector<double> out(n);
  const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = rho(static_cast<double>(j) * dtheta);
  return out;
}

double StarDomain::max_rho(std::size_t n) const {
  const auto s = sample(n);
  return *std::max_element(s.begin(), s.end());
}

void StarDomain::validate() const {
  if (!(a0_ > 0.0) || !std::isfinite(a0_)) {
    throw Error("invalid-domain", "mean radius must be positive");
  }
  if (cos_.size() > kMaxModes) {
    throw Error("invalid-domain", "at most 32 Fourier modes are supported");
  }
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    if (!std::isfinite(cos_[k]) || !std::isfinite(sin_[k])) {
      throw Error("invalid-domain", "non-finite Fourier coefficient");
    }
  }
  if (!is_ball()) {
    for (double r : sample(4096)) {
      if (!(r > 0.0)) throw Error("invalid-domain", "rho(theta) must stay positive");
    }
  }
}

}  // namespace hyplab
