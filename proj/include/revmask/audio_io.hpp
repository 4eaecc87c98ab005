#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace revmask {

// Mono sample sequence; amplitudes nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  std::size_t size() const noexcept { return samples.size(); }
  double duration_s() const noexcept {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

// Throws kInvalidArgument unless sample_rate > 0 and every sample is finite.
void validate(const Waveform& w);

double rms(std::span<const double> samples);
double peak(std::span<const double> samples);

enum class WavEncoding { kPcm16, kFloat32 };

// Reads the first channel of a PCM (8/16/24/32-bit) or IEEE float (32/64-bit)
// WAV file. Integer PCM is scaled by 2^-(bits-1). Warns on stderr when the
// file has more than one channel.
Waveform read_wav(const std::filesystem::path& path);

// 16-bit output rejects any |sample| > 1 with kClipping instead of clamping.
void write_wav(const Waveform& w, const std::filesystem::path& path,
               WavEncoding encoding = WavEncoding::kFloat32);

// Band-limited rational resampling with a Kaiser-windowed sinc polyphase
// filter. Stopband starts at the lower of the two Nyquist frequencies and is
// at least 80 dB down by design.
Waveform resample(const Waveform& w, int target_rate);

// Scales every member by its own positive gain so all outputs share one RMS,
// the largest RMS for which no output sample exceeds magnitude 1.
std::vector<Waveform> normalize_rms_group(std::span<const Waveform> group);

// The per-member gains normalize_rms_group applies.
std::vector<double> rms_group_gains(std::span<const Waveform> group);

}  // namespace revmask
