#include "hyplab/spectral.hpp"

#include <fftw3.h>

#include <complex>

#include "hyplab/error.hpp"

namespace hyplab {

struct PeriodicDifferentiator::Impl {
  std::vector<double> real;
  fftw_complex* spec = nullptr;
  fftw_complex* work = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Impl(std::size_t n) : real(n) {
    const std::size_t m = n / 2 + 1;
    spec = fftw_alloc_complex(m);
    work = fftw_alloc_complex(m);
    const int ni = static_cast<int>(n);
    forward = fftw_plan_dft_r2c_1d(ni, real.data(), spec, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(ni, work, real.data(), FFTW_ESTIMATE);
  }
  ~Impl() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(spec);
    fftw_free(work);
  }
};

PeriodicDifferentiator::PeriodicDifferentiator(std::size_t n)
    : n_(n), impl_(std::make_unique<Impl>(n)) {
  if (n < 4 || n % 2 != 0) {
    throw Error("invalid-argument", "periodic differentiation needs an even size >= 4");
  }
}

PeriodicDifferentiator::~PeriodicDifferentiator() = default;
PeriodicDifferentiator::PeriodicDifferentiator(PeriodicDifferentiator&&) noexcept = default;
PeriodicDifferentiator& PeriodicDifferentiator::operator=(PeriodicDifferentiator&&) noexcept =
    default;

void PeriodicDifferentiator::differentiate(std::span<const double> f, std::span<double> df,
                                           std::span<double> d2f) {
  auto& im = *impl_;
  const std::size_t m = n_ / 2 + 1;
  const double scale = 1.0 / static_cast<double>(n_);
  std::copy(f.begin(), f.end(), im.real.begin());
  fftw_execute(im.forward);

  // First derivative: multiply by i k.
  for (std::size_t k = 0; k < m; ++k) {
    const double kk = (k == n_ / 2) ? 0.0 : static_cast<double>(k);
    im.work[k][0] = -kk * im.spec[k][1] * scale;
    im.work[k][1] = kk * im.spec[k][0] * scale;
  }
  fftw_execute(im.backward);
  std::copy(im.real.begin(), im.real.end(), df.begin());

  // Second derivative: multiply by -k^2.
  for (std::size_t k = 0; k < m; ++k) {
    const double k2 = static_cast<double>(k * k);
    im.work[k][0] = -k2 * im.spec[k][0] * scale;
    im.work[k][1] = -k2 * im.spec[k][1] * scale;
  }
  fftw_execute(im.backward);
  std::copy(im.real.begin(), im.real.end(), d2f.begin());
}

}  // namespace hyplab
