#include "revmask/reverb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "revmask/error.hpp"
#include "revmask/fft.hpp"
#include "revmask/simd/kernels.hpp"

namespace revmask {
namespace {

void require_same_rate(int a, int b, const char* what) {
  if (a != b) {
    fail(ErrorKind::kSampleRateMismatch,
         std::string(what) + ": sample rates differ (" + std::to_string(a) +
             " vs " + std::to_string(b) + " Hz)");
  }
}

void validate_rir(const RoomImpulseResponse& rir) {
  if (rir.taps.empty()) fail(ErrorKind::kInvalidArgument, "RIR has no taps");
  if (rir.sample_rate <= 0) {
    fail(ErrorKind::kInvalidArgument, "RIR sample rate must be positive");
  }
  if (rir.direct_index >= rir.taps.size()) {
    fail(ErrorKind::kInvalidArgument, "RIR direct index out of range");
  }
}

// Block FFT size for an overlap-add pass with a kernel of m taps over n
// signal samples.
std::size_t choose_fft_size(std::size_t n, std::size_t m) {
  const std::size_t full = next_power_of_two(n + m - 1);
  const std::size_t blocked = std::max<std::size_t>(next_power_of_two(2 * m), 4096);
  return std::min(full, blocked);
}

std::vector<cplx> kernel_spectrum(std::span<const double> kernel, const FftPlan& plan) {
  std::vector<cplx> spec(plan.size());
  for (std::size_t i = 0; i < kernel.size(); ++i) spec[i].real(kernel[i]);
  plan.forward(spec);
  return spec;
}

}  // namespace

std::vector<double> convolve(std::span<const double> signal, std::span<const double> kernel);

namespace {

// Convolution with trailing zero taps dropped, padded back to n + m - 1, so
// samples past the kernel's support are exactly 0.
Waveform convolve_support(const Waveform& s, const RoomImpulseResponse& h) {
  std::size_t support = h.taps.size();
  while (support > h.direct_index + 1 && h.taps[support - 1] == 0.0) --support;
  Waveform out{convolve(s.samples, std::span(h.taps).first(support)), s.sample_rate};
  if (!s.samples.empty()) out.samples.resize(s.size() + h.taps.size() - 1, 0.0);
  return out;
}

}  // namespace

std::size_t detect_direct_path(std::span<const double> taps) {
  if (taps.empty()) fail(ErrorKind::kInvalidArgument, "empty tap sequence");
  std::size_t best = 0;
  double best_mag = std::abs(taps[0]);
  for (std::size_t i = 1; i < taps.size(); ++i) {
    const double mag = std::abs(taps[i]);
    if (mag > best_mag) {
      best = i;
      best_mag = mag;
    }
  }
  if (best_mag == 0.0) {
    fail(ErrorKind::kInvalidArgument, "all-zero taps have no direct path");
  }
  return best;
}

RoomImpulseResponse make_rir(std::vector<double> taps, int sample_rate) {
  RoomImpulseResponse rir;
  rir.direct_index = detect_direct_path(taps);
  rir.taps = std::move(taps);
  rir.sample_rate = sample_rate;
  validate_rir(rir);
  return rir;
}

RoomImpulseResponse make_rir(const Waveform& w) {
  validate(w);
  return make_rir(w.samples, w.sample_rate);
}

RoomImpulseResponse truncate_direct(const RoomImpulseResponse& rir,
                                    double window_ms) {
  validate_rir(rir);
  if (!(window_ms >= 0.0) || !std::isfinite(window_ms)) {
    fail(ErrorKind::kInvalidArgument, "direct-path window must be >= 0 ms");
  }
  const double window_samples =
      std::round(window_ms * rir.sample_rate / 1000.0);
  RoomImpulseResponse out = rir;
  const double last = static_cast<double>(rir.direct_index) + window_samples;
  if (last + 1.0 < static_cast<double>(out.taps.size())) {
    std::fill(out.taps.begin() + static_cast<std::ptrdiff_t>(last) + 1,
              out.taps.end(), 0.0);
  }
  return out;
}

std::vector<double> convolve(std::span<const double> signal,
                             std::span<const double> kernel) {
  if (signal.empty() || kernel.empty()) return {};
  const std::size_t n = signal.size();
  const std::size_t m = kernel.size();
  const auto plan = FftPlan::shared(choose_fft_size(n, m));
  const std::size_t fft_size = plan->size();
  const std::size_t block = fft_size - m + 1;
  const std::vector<cplx> spec = kernel_spectrum(kernel, *plan);

  std::vector<double> out(n + m - 1, 0.0);
  std::vector<cplx> buf(fft_size);
  // Two consecutive signal blocks share one complex FFT (real and imaginary
  // parts); the kernel is real, so the parts never mix.
  for (std::size_t start = 0; start < n; start += 2 * block) {
    const std::size_t len_a = std::min(block, n - start);
    const std::size_t start_b = start + len_a;
    const std::size_t len_b = start_b < n ? std::min(block, n - start_b) : 0;
    std::fill(buf.begin(), buf.end(), cplx{});
    for (std::size_t i = 0; i < len_a; ++i) buf[i].real(signal[start + i]);
    for (std::size_t i = 0; i < len_b; ++i) buf[i].imag(signal[start_b + i]);
    plan->forward(buf);
    simd::complex_multiply(buf, spec, buf);
    plan->inverse(buf);
    const std::size_t span_a = std::min(len_a + m - 1, out.size() - start);
    for (std::size_t i = 0; i < span_a; ++i) out[start + i] += buf[i].real();
    if (len_b > 0) {
      const std::size_t span_b = std::min(len_b + m - 1, out.size() - start_b);
      for (std::size_t i = 0; i < span_b; ++i) out[start_b + i] += buf[i].imag();
    }
  }
  return out;
}

Waveform convolve(const Waveform& signal, const RoomImpulseResponse& rir) {
  validate(signal);
  validate_rir(rir);
  require_same_rate(signal.sample_rate, rir.sample_rate, "convolve");
  return Waveform{convolve(signal.samples, rir.taps), signal.sample_rate};
}

Waveform make_reverberant(const Waveform& s, const RoomImpulseResponse& h) {
  validate(s);
  validate_rir(h);
  require_same_rate(s.sample_rate, h.sample_rate, "make_reverberant");
  return convolve_support(s, h);
}

Waveform make_direct(const Waveform& s, const RoomImpulseResponse& h,
                     double window_ms) {
  validate(s);
  const RoomImpulseResponse direct = truncate_direct(h, window_ms);
  require_same_rate(s.sample_rate, h.sample_rate, "make_direct");
  return convolve_support(s, direct);
}

ReverberantPair make_reverberant_pair(const Waveform& s,
                                      const RoomImpulseResponse& h,
                                      double window_ms) {
  return {make_reverberant(s, h), make_direct(s, h, window_ms)};
}

double esnr(const Waveform& direct, const Waveform& reverberant) {
  require_same_rate(direct.sample_rate, reverberant.sample_rate, "esnr");
  if (direct.size() != reverberant.size()) {
    fail(ErrorKind::kShapeMismatch,
         "esnr: direct and reverberant lengths differ (" +
             std::to_string(direct.size()) + " vs " +
             std::to_string(reverberant.size()) + ")");
  }
  const double residual = simd::sum_squared_diff(reverberant.samples, direct.samples);
  if (residual == 0.0) {
    fail(ErrorKind::kAnechoic, "esnr: reverberant residual has zero energy");
  }
  const double energy = simd::sum_squares(direct.samples);
  if (energy == 0.0) {
    fail(ErrorKind::kSilentInput, "esnr: direct-path signal has zero energy");
  }
  return 10.0 * std::log10(energy / residual);
}

RoomImpulseResponse synth_rir(const SynthRirParams& p) {
  if (!(p.rt60_s > 0.0) || !std::isfinite(p.rt60_s)) {
    fail(ErrorKind::kInvalidArgument, "synth_rir: rt60 must be positive");
  }
  if (p.sample_rate <= 0) {
    fail(ErrorKind::kInvalidArgument, "synth_rir: sample rate must be positive");
  }
  if (!(p.direct_delay_ms >= 0.0) || !(p.tail_onset_ms >= p.direct_delay_ms)) {
    fail(ErrorKind::kInvalidArgument,
         "synth_rir: need 0 <= direct_delay_ms <= tail_onset_ms");
  }
  if (!(p.tail_gain >= 0.0) || !std::isfinite(p.tail_gain)) {
    fail(ErrorKind::kInvalidArgument, "synth_rir: tail gain must be >= 0");
  }
  const double rate = p.sample_rate;
  const auto direct =
      static_cast<std::size_t>(std::lround(p.direct_delay_ms * rate / 1000.0));
  const auto onset = std::max(
      direct + 1,
      static_cast<std::size_t>(std::lround(p.tail_onset_ms * rate / 1000.0)));
  const auto tail_len =
      static_cast<std::size_t>(std::ceil(1.5 * p.rt60_s * rate));

  std::vector<double> taps(onset + tail_len, 0.0);
  taps[direct] = 1.0;
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  // Energy envelope exp(-6 ln10 t / rt60), i.e. amplitude 10^(-3 t / rt60).
  const double decay = -3.0 * std::numbers::ln10 / (p.rt60_s * rate);
  for (std::size_t i = 0; i < tail_len; ++i) {
    taps[onset + i] = p.tail_gain * std::exp(decay * static_cast<double>(i)) * noise(rng);
  }
  return make_rir(std::move(taps), p.sample_rate);
}

double estimate_rt60(const RoomImpulseResponse& rir) {
  validate_rir(rir);
  const std::size_t n = rir.taps.size();
  std::vector<double> edc(n);
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    acc += rir.taps[i] * rir.taps[i];
    edc[i] = acc;
  }
  const double total = edc[0];
  if (!(total > 0.0)) fail(ErrorKind::kInsufficientDecay, "RIR has no energy");

  constexpr double kUpperDb = -5.0;
  constexpr double kLowerDb = -25.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  bool reached_lower = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (edc[i] <= 0.0) {
      reached_lower = true;
      break;
    }
    const double db = 10.0 * std::log10(edc[i] / total);
    if (db < kLowerDb) {
      reached_lower = true;
      break;
    }
    if (db <= kUpperDb) {
      const double t = static_cast<double>(i) / rir.sample_rate;
      sx += t;
      sy += db;
      sxx += t * t;
      sxy += t * db;
      ++count;
    }
  }
  if (!reached_lower || count < 2) {
    fail(ErrorKind::kInsufficientDecay,
         "decay curve lacks a usable -5 to -25 dB span (" +
             std::to_string(count) + " samples)");
  }
  const double c = static_cast<double>(count);
  const double denom = c * sxx - sx * sx;
  const double slope = (c * sxy - sx * sy) / denom;
  if (!(slope < 0.0) || denom <= 0.0) {
    fail(ErrorKind::kInsufficientDecay, "decay curve is not decreasing");
  }
  return -60.0 / slope;
}

}  // namespace revmask
