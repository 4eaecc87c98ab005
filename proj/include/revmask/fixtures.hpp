#pragma once

#include <cstdint>

#include "revmask/audio_io.hpp"

namespace revmask {

// Synthetic speech stand-in: words of one to three syllables separated by
// pauses. A syllable is a gliding-F0 harmonic complex shaped by three
// formant resonances under a smooth syllabic envelope, sometimes preceded by
// a high-passed noise burst. A low Gaussian floor keeps pauses non-silent.
struct SpeechLikeParams {
  int sample_rate = 16000;
  double duration_s = 2.0;
  double noise_floor_db = -60.0;  // relative to the final peak
  double peak = 0.5;
};

Waveform make_speech_like(const SpeechLikeParams& params, std::uint64_t seed);

}  // namespace revmask
