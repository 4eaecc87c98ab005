#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "revmask/audio_io.hpp"

namespace revmask {

struct RoomImpulseResponse {
  std::vector<double> taps;
  int sample_rate = 0;
  std::size_t direct_index = 0;
};

// Index of the largest-magnitude tap, first occurrence on ties.
std::size_t detect_direct_path(std::span<const double> taps);

// Builds an RIR from raw taps, locating the direct path.
RoomImpulseResponse make_rir(std::vector<double> taps, int sample_rate);
RoomImpulseResponse make_rir(const Waveform& w);

// Keeps taps [0, direct_index + round(window_ms * rate / 1000)] and zeroes the
// rest. Length, rate and direct_index are unchanged.
RoomImpulseResponse truncate_direct(const RoomImpulseResponse& rir,
                                    double window_ms = 5.0);

// Full linear convolution by FFT overlap-add; output length n + m - 1.
Waveform convolve(const Waveform& signal, const RoomImpulseResponse& rir);
std::vector<double> convolve(std::span<const double> signal,
                             std::span<const double> kernel);

Waveform make_reverberant(const Waveform& s, const RoomImpulseResponse& h);
// Same length as make_reverberant; exactly zero past the truncated kernel's
// support.
Waveform make_direct(const Waveform& s, const RoomImpulseResponse& h,
                     double window_ms = 5.0);

struct ReverberantPair {
  Waveform reverberant;
  Waveform direct;
};
ReverberantPair make_reverberant_pair(const Waveform& s,
                                      const RoomImpulseResponse& h,
                                      double window_ms = 5.0);

// 10 log10(sum d^2 / sum (y - d)^2). Throws kAnechoic when the residual has
// zero energy.
double esnr(const Waveform& direct, const Waveform& reverberant);

struct SynthRirParams {
  double rt60_s = 0.8;
  double direct_delay_ms = 5.0;
  double tail_onset_ms = 6.0;
  int sample_rate = 16000;
  // RMS of the noise tail at onset, relative to the unit direct impulse.
  double tail_gain = 0.1;
  std::uint64_t seed = 1;
};

// Unit impulse at direct_delay, silence until tail_onset, then Gaussian noise
// whose energy envelope decays as exp(-6 ln10 t / rt60). Length covers
// tail_onset + 1.5 rt60.
RoomImpulseResponse synth_rir(const SynthRirParams& params);

// Schroeder backward integration, least-squares line over the -5..-25 dB
// span of the decay curve, extrapolated to 60 dB. Throws kInsufficientDecay
// when the curve never reaches -25 dB.
double estimate_rt60(const RoomImpulseResponse& rir);

}  // namespace revmask
