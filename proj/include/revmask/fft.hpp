#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace revmask {

using cplx = std::complex<double>;

// In-place iterative radix-2 FFT. A plan is immutable once built, so one
// instance may be shared by any number of threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t size);

  // Process-wide cache; lookups are mutex protected.
  static std::shared_ptr<const FftPlan> shared(std::size_t size);

  std::size_t size() const noexcept { return size_; }

  // X[k] = sum_n x[n] e^{-2 pi i k n / N}
  void forward(std::span<cplx> data) const;
  // Inverse including the 1/N factor.
  void inverse(std::span<cplx> data) const;

 private:
  void transform(std::span<cplx> data) const;

  std::size_t size_;
  std::vector<std::size_t> bit_reverse_;
  // Twiddles for all stages laid out back to back: stage with half-size h
  // occupies [h - 1, 2h - 1).
  std::vector<cplx> twiddles_;
};

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;

}  // namespace revmask
