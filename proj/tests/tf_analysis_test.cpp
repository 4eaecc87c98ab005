#include "revmask/tf_analysis.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "revmask/error.hpp"

namespace revmask {
namespace {

using testing::random_vector;
using testing::tone;

TEST(ChannelTable, DefaultPartitionsSixtyThreeBins) {
  const ChannelTable t = channel_table(AnalysisConfig{});
  ASSERT_EQ(t.bands.size(), 22u);
  std::size_t total = 0, next = kFirstUsableBin;
  for (const Band& b : t.bands) {
    EXPECT_EQ(b.first_bin, next);
    EXPECT_GE(b.num_bins, 1u);
    total += b.num_bins;
    next += b.num_bins;
  }
  EXPECT_EQ(total, 63u);
  EXPECT_EQ(next, 65u);
  EXPECT_EQ(t.bands.front().num_bins, 1u);
  for (std::size_t i = 1; i < t.bands.size(); ++i) {
    EXPECT_GE(t.bands[i].num_bins, t.bands[i - 1].num_bins);
  }
}

TEST(ChannelTable, IdentityPartition) {
  const ChannelTable t = channel_table({.num_channels = 63});
  ASSERT_EQ(t.bands.size(), 63u);
  for (std::size_t i = 0; i < 63; ++i) {
    EXPECT_EQ(t.bands[i].first_bin, i + 2);
    EXPECT_EQ(t.bands[i].num_bins, 1u);
    EXPECT_DOUBLE_EQ(t.center_freqs[i], 125.0 * static_cast<double>(i + 2));
  }
}

TEST(ChannelTable, CenterFrequenciesIncreaseInsideNyquist) {
  for (std::size_t m : {1u, 2u, 8u, 16u, 22u, 40u, 63u}) {
    const ChannelTable t = channel_table({.num_channels = m});
    ASSERT_EQ(t.center_freqs.size(), m);
    for (std::size_t i = 0; i < m; ++i) {
      EXPECT_GT(t.center_freqs[i], 0.0);
      // Only the one-bin-per-channel table reaches the Nyquist bin alone.
      if (m < 63) {
        EXPECT_LT(t.center_freqs[i], 8000.0);
      } else {
        EXPECT_LE(t.center_freqs[i], 8000.0);
      }
      if (i > 0) {
        EXPECT_GT(t.center_freqs[i], t.center_freqs[i - 1]);
      }
    }
  }
}

TEST(ChannelTable, RejectsInvalidConfigs) {
  EXPECT_THROW(channel_table({.num_channels = 64}), Error);
  EXPECT_THROW(channel_table({.num_channels = 0}), Error);
  EXPECT_THROW(channel_table({.fft_size = 100}), Error);
  EXPECT_THROW(channel_table({.hop = 0}), Error);
  EXPECT_THROW(channel_table({.fft_size = 128, .hop = 129}), Error);
}

TEST(ChannelTable, Deterministic) {
  const AnalysisConfig cfg{.fft_size = 256, .num_channels = 22};
  const ChannelTable a = channel_table(cfg), b = channel_table(cfg);
  ASSERT_EQ(a.bands.size(), b.bands.size());
  for (std::size_t i = 0; i < a.bands.size(); ++i) {
    EXPECT_EQ(a.bands[i].first_bin, b.bands[i].first_bin);
    EXPECT_EQ(a.bands[i].num_bins, b.bands[i].num_bins);
  }
  EXPECT_EQ(a.center_freqs, b.center_freqs);
}

// Independent envelope computation: direct DFT per frame and power sum.
Grid oracle_envelopes(const std::vector<double>& x, const AnalysisConfig& cfg) {
  const ChannelTable table = channel_table(cfg);
  const std::size_t n = cfg.fft_size;
  const std::size_t frames = (x.size() + cfg.hop - 1) / cfg.hop;
  std::vector<double> w(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / n);
    sum += w[i];
  }
  Grid out(frames, cfg.num_channels);
  for (std::size_t f = 0; f < frames; ++f) {
    std::vector<double> power(n / 2 + 1, 0.0);
    for (std::size_t k = 0; k <= n / 2; ++k) {
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s = f * cfg.hop + i;
        const double v = s < x.size() ? x[s] * w[i] * 2.0 / sum : 0.0;
        const double a = -2.0 * std::numbers::pi * static_cast<double>((k * i) % n) / n;
        re += v * std::cos(a);
        im += v * std::sin(a);
      }
      power[k] = re * re + im * im;
    }
    for (std::size_t c = 0; c < table.bands.size(); ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < table.bands[c].num_bins; ++k) {
        acc += power[table.bands[c].first_bin + k];
      }
      out(f, c) = std::sqrt(acc);
    }
  }
  return out;
}

TEST(Analyze, MatchesDirectDftOracle) {
  const AnalysisConfig cfg{};
  const auto x = random_vector(333, 21);
  const EnvelopeGrid g = analyze(Waveform{x, 16000}, cfg);
  const Grid expected = oracle_envelopes(x, cfg);
  ASSERT_TRUE(g.values.same_shape(expected));
  for (std::size_t i = 0; i < expected.flat().size(); ++i) {
    EXPECT_NEAR(g.values.flat()[i], expected.flat()[i], 1e-12);
  }
}

TEST(Analyze, SilenceGivesZeros) {
  const EnvelopeGrid g = analyze(Waveform{std::vector<double>(1000, 0.0), 16000}, {});
  for (double v : g.values.flat()) EXPECT_EQ(v, 0.0);
}

TEST(Analyze, ShapeAndMetadata) {
  for (std::size_t len : {1u, 15u, 16u, 17u, 1000u, 16001u}) {
    const EnvelopeGrid g = analyze(Waveform{random_vector(len, len), 16000}, {});
    EXPECT_EQ(g.frames(), (len + 15) / 16);
    EXPECT_EQ(g.channels(), 22u);
    EXPECT_DOUBLE_EQ(g.frame_rate, 1000.0);
    EXPECT_EQ(g.center_freqs, channel_table({}).center_freqs);
  }
}

TEST(Analyze, ValuesNonNegativeAndFinite) {
  const EnvelopeGrid g = analyze(Waveform{random_vector(4000, 22), 16000}, {});
  for (double v : g.values.flat()) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GE(v, 0.0);
  }
}

TEST(Analyze, TonePerChannel) {
  const AnalysisConfig cfg{};
  const ChannelTable table = channel_table(cfg);
  const std::size_t len = 4000;
  for (std::size_t c = 0; c < table.bands.size(); ++c) {
    const double fc = table.center_freqs[c];
    const EnvelopeGrid g = analyze(Waveform{tone(fc, 16000, len, 0.5), 16000}, cfg);
    const std::size_t first = cfg.fft_size / cfg.hop;
    const std::size_t last = len / cfg.hop - first;
    double lo = 1e300, hi = 0.0;
    for (std::size_t f = first; f < last; ++f) {
      const double v = g.values(f, c);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      for (std::size_t o = 0; o < table.bands.size(); ++o) {
        if (o + 1 < c || o > c + 1) EXPECT_GE(v, 10.0 * g.values(f, o)) << c << " vs " << o;
      }
    }
    EXPECT_LE(hi - lo, 0.05 * hi) << "channel " << c;
  }
}

TEST(Analyze, BinCenteredToneHasUnitPeakBin) {
  // Tone on bin 2, which is channel 0 alone in the identity table.
  const EnvelopeGrid g =
      analyze(Waveform{tone(250.0, 16000, 2000, 0.7), 16000}, {.num_channels = 63});
  EXPECT_NEAR(g.values(60, 0), 0.7, 1e-9);
  EXPECT_NEAR(g.values(60, 1), 0.35, 1e-9);
  EXPECT_NEAR(g.values(60, 2), 0.0, 1e-9);
}

TEST(Analyze, Homogeneity) {
  const auto x = random_vector(2500, 23);
  const EnvelopeGrid base = analyze(Waveform{x, 16000}, {});
  for (double a : {0.01, 0.5, 3.0, 1000.0}) {
    std::vector<double> xa = x;
    for (double& v : xa) v *= a;
    const EnvelopeGrid scaled = analyze(Waveform{xa, 16000}, {});
    for (std::size_t i = 0; i < xa.size() / 16; ++i) {
      for (std::size_t c = 0; c < 22; ++c) {
        EXPECT_NEAR(scaled.values(i, c), a * base.values(i, c), 1e-12 * a);
      }
    }
  }
}

TEST(Analyze, GridEnergyTracksSignalEnergy) {
  // White noise: bins 2..64 hold 63/128 of each frame's energy, the scaled
  // Hann has sum w^2 = 6/N, and frames advance by hop.
  const AnalysisConfig cfg{};
  const double expected = (63.0 / 128.0) * 6.0 / 16.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto x = random_vector(64000, 300 + seed);
    const EnvelopeGrid g = analyze(Waveform{x, 16000}, cfg);
    double grid_energy = 0.0, signal_energy = 0.0;
    for (double v : g.values.flat()) grid_energy += v * v;
    for (double v : x) signal_energy += v * v;
    EXPECT_NEAR(grid_energy / signal_energy, expected, 0.03 * expected);
  }
}

TEST(Analyze, ErrorPaths) {
  EXPECT_THROW(analyze(Waveform{{0.1, 0.2}, 8000}, {}), Error);
  try {
    analyze(Waveform{{0.1}, 8000}, {});
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSampleRateMismatch);
  }
  EXPECT_THROW(analyze(Waveform{{}, 16000}, {}), Error);
}

}  // namespace
}  // namespace revmask
