#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hyplab/star_domain.hpp"
#include "support.hpp"

using hyplab::StarDomain;

TEST_CASE("ball is a constant profile") {
  const StarDomain b = StarDomain::ball(0.7);
  CHECK(b.is_ball());
  CHECK(b.rho(1.234) == 0.7);
  CHECK(b.rho_p(0.3) == 0.0);
  CHECK(b.max_rho() == 0.7);
}

TEST_CASE("fourier evaluation and derivatives") {
  const StarDomain d = StarDomain::fourier(1.0, {0.1, 0.05}, {0.02});
  const double th = 0.9;
  CHECK(d.rho(th) == doctest::Approx(1.0 + 0.1 * std::cos(th) + 0.05 * std::cos(2 * th) + 0.02 * std::sin(th)));
  const double e = 1e-5;
  CHECK(d.rho_p(th) == doctest::Approx((d.rho(th + e) - d.rho(th - e)) / (2 * e)).epsilon(1e-8));
  CHECK(d.rho_pp(th) == doctest::Approx((d.rho_p(th + e) - d.rho_p(th - e)) / (2 * e)).epsilon(1e-8));
  CHECK_FALSE(d.is_ball());
}

TEST_CASE("trailing zero coefficients are trimmed") {
  const StarDomain d = StarDomain::fourier(1.0, {0.0, 0.05, 0.0, 0.0}, {0.0, 0.0});
  // Both series share the length of the longest non-zero one.
  CHECK(d.cos_coeffs().size() == 2);
  CHECK(d.sin_coeffs() == std::vector<double>{0.0, 0.0});
  CHECK(StarDomain::fourier(0.5, {0.0}, {0.0}).is_ball());
}

TEST_CASE("sample round trip through from_samples") {
  const StarDomain d = StarDomain::fourier(0.9, {0.0, 0.04, 0.01}, {0.03, 0.0, 0.0, 0.005});
  const StarDomain e = StarDomain::from_samples(d.sample(128));
  CHECK(e.a0() == doctest::Approx(0.9).epsilon(1e-13));
  REQUIRE(e.cos_coeffs().size() == 4);
  CHECK(e.cos_coeffs()[1] == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(std::abs(e.cos_coeffs()[3]) < 1e-14);
  REQUIRE(e.sin_coeffs().size() == 4);
  CHECK(e.sin_coeffs()[3] == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("validation errors") {
  CHECK(thrown([] { StarDomain::ball(0.0); }) == "invalid-domain");
  CHECK(thrown([] { StarDomain::ball(-1.0); }) == "invalid-domain");
  CHECK(thrown([] { StarDomain::fourier(0.3, {0.5}, {}); }) == "invalid-domain");
  CHECK(thrown([] { StarDomain::fourier(1.0, std::vector<double>(33, 0.001), {}); }) == "invalid-domain");
  CHECK(thrown([] { StarDomain::fourier(1.0, {NAN}, {}); }) == "invalid-domain");
}

TEST_CASE("non-smooth samples lose accuracy on projection") {
  std::vector<double> rho(256);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double th = 2 * std::numbers::pi * i / rho.size();
    rho[i] = 1.0 + 0.1 * std::abs(std::sin(th));
  }
  CHECK(thrown([&] { StarDomain::from_samples(rho); }) == "projection-loss");
}
