#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace hyplab {

/// Spectral differentiation of periodic samples on a uniform grid over
/// [0, 2 pi). Plans are created once per size; a differentiator is not safe
/// for concurrent use (it owns scratch buffers), but separate instances are.
class PeriodicDifferentiator {
 public:
  explicit PeriodicDifferentiator(std::size_t n);
  ~PeriodicDifferentiator();
  PeriodicDifferentiator(PeriodicDifferentiator&&) noexcept;
  PeriodicDifferentiator& operator=(PeriodicDifferentiator&&) noexcept;

  std::size_t size() const { return n_; }

  /// First and second derivatives of `f`. The Nyquist mode is dropped from
  /// the first derivative (it has no real derivative on the grid).
  void differentiate(std::span<const double> f, std::span<double> df,
                     std::span<double> d2f);

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hyplab
