#include "revmask/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "revmask/error.hpp"

namespace revmask {
namespace {

struct Formants {
  std::array<double, 3> freq;
  std::array<double, 3> bandwidth;
  std::array<double, 3> gain;
};

double spectral_envelope(double f, const Formants& fm) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double x = (f - fm.freq[i]) / fm.bandwidth[i];
    acc += fm.gain[i] / (1.0 + x * x);
  }
  return acc / (1.0 + f / 1000.0);
}

}  // namespace

Waveform make_speech_like(const SpeechLikeParams& p, std::uint64_t seed) {
  if (p.sample_rate < 8000) {
    fail(ErrorKind::kInvalidArgument, "speech fixture needs >= 8 kHz");
  }
  if (!(p.duration_s > 0.2) || !(p.peak > 0.0) || p.peak > 1.0) {
    fail(ErrorKind::kInvalidArgument, "speech fixture: bad duration or peak");
  }
  const double rate = p.sample_rate;
  const auto total = static_cast<std::size_t>(std::llround(p.duration_s * rate));
  std::vector<double> x(total, 0.0);

  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double top_harmonic_hz = std::min(7500.0, 0.45 * rate);

  auto samples = [&](double seconds) {
    return static_cast<std::size_t>(std::llround(seconds * rate));
  };

  std::size_t pos = samples(uniform(0.08, 0.15));
  const std::size_t tail_guard = samples(0.1);
  while (pos + tail_guard < total) {
    const int syllables = 1 + static_cast<int>(uniform(0.0, 3.0));
    for (int s = 0; s < syllables && pos + tail_guard < total; ++s) {
      if (uniform(0.0, 1.0) < 0.35) {
        // Fricative onset: differenced noise, i.e. tilted toward high bins.
        const std::size_t len = std::min(samples(uniform(0.04, 0.08)), total - pos);
        const double amp = uniform(0.15, 0.35);
        double prev = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
          const double env = std::sin(std::numbers::pi * (i + 0.5) / len);
          const double n = gauss(rng);
          x[pos + i] += amp * env * (n - prev);
          prev = n;
        }
        pos += len;
      }
      const std::size_t len = std::min(samples(uniform(0.12, 0.25)), total - pos);
      const double f0_start = uniform(100.0, 160.0);
      const double f0_end = f0_start * uniform(0.8, 1.2);
      const Formants fm{{uniform(300, 900), uniform(900, 2400), uniform(2300, 3500)},
                        {uniform(60, 120), uniform(90, 180), uniform(120, 250)},
                        {1.0, uniform(0.4, 0.9), uniform(0.2, 0.5)}};
      double phase = 0.0;  // fundamental phase in cycles
      for (std::size_t i = 0; i < len; ++i) {
        const double t = (i + 0.5) / len;
        const double f0 = f0_start + (f0_end - f0_start) * t;
        phase += f0 / rate;
        const double env = std::pow(std::sin(std::numbers::pi * t), 0.7);
        double acc = 0.0;
        for (int k = 1; k * f0 <= top_harmonic_hz; ++k) {
          acc += spectral_envelope(k * f0, fm) *
                 std::sin(2.0 * std::numbers::pi * k * phase);
        }
        x[pos + i] += env * acc;
      }
      pos += len;
    }
    pos += samples(uniform(0.06, 0.2));
  }

  double max_abs = 0.0;
  for (double v : x) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs == 0.0) max_abs = 1.0;
  const double floor_amp = std::pow(10.0, p.noise_floor_db / 20.0);
  Waveform w;
  w.sample_rate = p.sample_rate;
  w.samples.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    w.samples[i] = p.peak * (x[i] / max_abs + floor_amp * gauss(rng));
  }
  // Floor noise can push a sample past the requested peak; rescale.
  const double final_peak = peak(w.samples);
  for (double& v : w.samples) v *= p.peak / final_peak;
  return w;
}

}  // namespace revmask
