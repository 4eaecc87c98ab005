#include "revmask/fft.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "revmask/error.hpp"
#include "revmask/simd/kernels.hpp"

namespace revmask {

bool is_power_of_two(std::size_t n) noexcept { return std::has_single_bit(n); }

std::size_t next_power_of_two(std::size_t n) noexcept {
  return n <= 1 ? 1 : std::bit_ceil(n);
}

FftPlan::FftPlan(std::size_t size) : size_(size) {
  if (!is_power_of_two(size)) {
    fail(ErrorKind::kInvalidArgument,
         "FFT size must be a power of two, got " + std::to_string(size));
  }
  const int bits = std::countr_zero(size);
  bit_reverse_.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    bit_reverse_[i] = r;
  }
  twiddles_.reserve(size);
  for (std::size_t half = 1; half < size; half *= 2) {
    for (std::size_t j = 0; j < half; ++j) {
      // Direct evaluation per index; recurrences drift at large sizes.
      const double angle = -std::numbers::pi * static_cast<double>(j) /
                           static_cast<double>(half);
      twiddles_.emplace_back(std::cos(angle), std::sin(angle));
    }
  }
}

std::shared_ptr<const FftPlan> FftPlan::shared(std::size_t size) {
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[size];
  if (!slot) slot = std::make_shared<const FftPlan>(size);
  return slot;
}

void FftPlan::transform(std::span<cplx> data) const {
  if (data.size() != size_) {
    fail(ErrorKind::kInvalidArgument, "FFT buffer size does not match plan");
  }
  for (std::size_t i = 0; i < size_; ++i) {
    const std::size_t r = bit_reverse_[i];
    if (r > i) std::swap(data[i], data[r]);
  }
  // First stage has unit twiddles.
  for (std::size_t k = 0; k + 1 < size_; k += 2) {
    const cplx a = data[k], b = data[k + 1];
    data[k] = a + b;
    data[k + 1] = a - b;
  }
  const auto butterfly = simd::active().butterfly;
  for (std::size_t half = 2; half < size_; half *= 2) {
    const cplx* tw = twiddles_.data() + (half - 1);
    for (std::size_t k = 0; k < size_; k += 2 * half) {
      butterfly(data.data() + k, data.data() + k + half, tw, half);
    }
  }
}

void FftPlan::forward(std::span<cplx> data) const { transform(data); }

void FftPlan::inverse(std::span<cplx> data) const {
  for (auto& v : data) v = std::conj(v);
  transform(data);
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& v : data) v = std::conj(v) * scale;
}

}  // namespace revmask
