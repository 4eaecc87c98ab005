#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "revmask/audio_io.hpp"
#include "revmask/grid.hpp"
#include "revmask/tf_analysis.hpp"

namespace revmask {

struct Stimulus {
  std::size_t channel = 0;
  double amplitude = 0.0;

  friend bool operator==(const Stimulus&, const Stimulus&) = default;
};

// Per-frame stimulation pattern after N-of-M selection. Each frame lists its
// selected channels in increasing channel order.
struct Electrodogram {
  std::vector<std::vector<Stimulus>> frames;
  double frame_rate = 0.0;
  std::size_t num_channels = 0;
  std::vector<double> center_freqs;

  std::size_t num_frames() const noexcept { return frames.size(); }
  // frames x channels, zero where a channel was not selected.
  Grid to_dense() const;
};

Electrodogram from_dense(const Grid& dense, double frame_rate,
                         std::vector<double> center_freqs);

// Keeps the n largest nonzero channels of each frame; ties go to the lower
// channel index.
Electrodogram select_maxima(const EnvelopeGrid& grid, std::size_t n = 8);

struct VocoderOptions {
  int output_rate = 16000;
  // Zero phase on every carrier unless a seed is given.
  std::optional<std::uint64_t> random_phase_seed;
  double peak = 0.99;
};

// Sum of sinusoidal carriers at the channel center frequencies, each driven
// by its amplitude track (frame values placed at frame centres, linearly
// interpolated, held at the ends). Peak-normalized; silence stays silent.
Waveform vocode(const Electrodogram& e, const VocoderOptions& options = {});

}  // namespace revmask
