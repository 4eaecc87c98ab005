#pragma once

#include <cstddef>
#include <vector>

#include "revmask/audio_io.hpp"
#include "revmask/grid.hpp"

namespace revmask {

// Contiguous FFT bin range [first_bin, first_bin + num_bins) for one channel.
struct Band {
  std::size_t first_bin = 0;
  std::size_t num_bins = 0;
};

struct ChannelTable {
  std::vector<Band> bands;
  std::vector<double> center_freqs;  // Hz, strictly increasing
};

struct AnalysisConfig {
  int sample_rate = 16000;
  std::size_t fft_size = 128;
  std::size_t hop = 16;
  std::size_t num_channels = 22;

  double frame_rate() const noexcept {
    return static_cast<double>(sample_rate) / static_cast<double>(hop);
  }
};

// Throws kInvalidArgument on a non power-of-two FFT, hop outside
// [1, fft_size], or more channels than usable bins.
void validate(const AnalysisConfig& cfg);

// Lowest bin assigned to any channel; bins 0 and 1 carry no speech content.
inline constexpr std::size_t kFirstUsableBin = 2;

// Partitions bins [2, fft_size/2] into num_channels contiguous groups whose
// widths follow a geometric progression with a one-bin lowest channel.
// Widths are non-decreasing; center frequency is the mean bin frequency.
ChannelTable channel_table(const AnalysisConfig& cfg);

// Frames x channels envelope magnitudes with the axis metadata needed to
// interpret them.
struct EnvelopeGrid {
  Grid values;
  double frame_rate = 0.0;
  std::vector<double> center_freqs;

  std::size_t frames() const noexcept { return values.frames(); }
  std::size_t channels() const noexcept { return values.channels(); }
};

// Hann-windowed STFT (frame t covers samples [t*hop, t*hop + fft_size),
// zero-padded past the end) followed by power summation of each channel's
// bins. ceil(len / hop) frames. A full-scale sinusoid centered on a bin
// yields a channel envelope close to its amplitude.
EnvelopeGrid analyze(const Waveform& w, const AnalysisConfig& cfg);

}  // namespace revmask
