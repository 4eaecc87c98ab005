#include "revmask/ci_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "revmask/error.hpp"

namespace revmask {

Grid Electrodogram::to_dense() const {
  Grid dense(frames.size(), num_channels);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (const Stimulus& s : frames[f]) dense(f, s.channel) = s.amplitude;
  }
  return dense;
}

Electrodogram from_dense(const Grid& dense, double frame_rate,
                         std::vector<double> center_freqs) {
  if (center_freqs.size() != dense.channels()) {
    fail(ErrorKind::kShapeMismatch,
         "electrodogram has " + std::to_string(dense.channels()) +
             " channels but " + std::to_string(center_freqs.size()) +
             " center frequencies");
  }
  Electrodogram e;
  e.frame_rate = frame_rate;
  e.num_channels = dense.channels();
  e.center_freqs = std::move(center_freqs);
  e.frames.resize(dense.frames());
  for (std::size_t f = 0; f < dense.frames(); ++f) {
    for (std::size_t c = 0; c < dense.channels(); ++c) {
      const double a = dense(f, c);
      if (!(a >= 0.0) || !std::isfinite(a)) {
        fail(ErrorKind::kInvalidArgument,
             "electrodogram amplitudes must be finite and >= 0");
      }
      if (a > 0.0) e.frames[f].push_back({c, a});
    }
  }
  return e;
}

Electrodogram select_maxima(const EnvelopeGrid& grid, std::size_t n) {
  const std::size_t channels = grid.channels();
  if (n < 1 || n > channels) {
    fail(ErrorKind::kInvalidArgument,
         "select_maxima: n must lie in [1, " + std::to_string(channels) +
             "], got " + std::to_string(n));
  }
  Electrodogram e;
  e.frame_rate = grid.frame_rate;
  e.num_channels = channels;
  e.center_freqs = grid.center_freqs;
  e.frames.resize(grid.frames());

  std::vector<std::size_t> order(channels);
  for (std::size_t f = 0; f < grid.frames(); ++f) {
    const auto row = grid.values.row(f);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n),
                      order.end(), [&](std::size_t a, std::size_t b) {
                        return row[a] > row[b] || (row[a] == row[b] && a < b);
                      });
    auto& picked = e.frames[f];
    for (std::size_t k = 0; k < n; ++k) {
      if (row[order[k]] > 0.0) picked.push_back({order[k], row[order[k]]});
    }
    std::sort(picked.begin(), picked.end(),
              [](const Stimulus& a, const Stimulus& b) { return a.channel < b.channel; });
  }
  return e;
}

Waveform vocode(const Electrodogram& e, const VocoderOptions& options) {
  if (e.center_freqs.size() != e.num_channels) {
    fail(ErrorKind::kShapeMismatch, "vocode: center frequency count mismatch");
  }
  if (!(e.frame_rate > 0.0) && !e.frames.empty()) {
    fail(ErrorKind::kInvalidArgument, "vocode: frame rate must be positive");
  }
  const double rate = options.output_rate;
  const double highest =
      e.center_freqs.empty() ? 0.0
                             : *std::max_element(e.center_freqs.begin(), e.center_freqs.end());
  if (!(rate >= 2.0 * highest) || options.output_rate <= 0) {
    fail(ErrorKind::kInvalidArgument,
         "vocode: output rate " + std::to_string(options.output_rate) +
             " Hz is below twice the highest carrier (" + std::to_string(highest) +
             " Hz)");
  }

  Waveform out;
  out.sample_rate = options.output_rate;
  if (e.frames.empty()) return out;
  const std::size_t frames = e.frames.size();
  const auto length = static_cast<std::size_t>(
      std::llround(static_cast<double>(frames) * rate / e.frame_rate));
  out.samples.assign(length, 0.0);

  std::vector<double> phases(e.num_channels, 0.0);
  if (options.random_phase_seed) {
    std::mt19937_64 rng(*options.random_phase_seed);
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    for (double& p : phases) p = uniform(rng);
  }

  const Grid dense = e.to_dense();
  std::vector<double> track(frames);
  for (std::size_t c = 0; c < e.num_channels; ++c) {
    bool active = false;
    for (std::size_t f = 0; f < frames; ++f) {
      track[f] = dense(f, c);
      active = active || track[f] > 0.0;
    }
    if (!active) continue;
    const double cycles_per_sample = e.center_freqs[c] / rate;
    for (std::size_t i = 0; i < length; ++i) {
      // Frame f is centred at (f + 0.5) / frame_rate seconds.
      const double pos = static_cast<double>(i) / rate * e.frame_rate - 0.5;
      double amp;
      if (pos <= 0.0) {
        amp = track.front();
      } else if (pos >= static_cast<double>(frames - 1)) {
        amp = track.back();
      } else {
        const auto f = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(f);
        amp = track[f] + frac * (track[f + 1] - track[f]);
      }
      if (amp == 0.0) continue;
      // Reduce the phase in cycles first to keep sin() arguments small.
      const double cycles = static_cast<double>(i) * cycles_per_sample;
      const double frac_cycle = cycles - std::floor(cycles);
      out.samples[i] += amp * std::sin(2.0 * std::numbers::pi * frac_cycle + phases[c]);
    }
  }

  const double p = peak(out.samples);
  if (p > 0.0) {
    const double g = options.peak / p;
    for (double& x : out.samples) x *= g;
  }
  return out;
}

}  // namespace revmask
