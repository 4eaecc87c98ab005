#include "revmask/tf_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "revmask/error.hpp"
#include "revmask/fft.hpp"
#include "revmask/simd/kernels.hpp"

namespace revmask {
namespace {

std::size_t usable_bins(const AnalysisConfig& cfg) {
  return cfg.fft_size / 2 - kFirstUsableBin + 1;
}

// First-channel width of a geometric partition of `total` bins into
// `channels` groups with ratio r.
double first_width(double r, double total, double channels) {
  if (r == 1.0) return total / channels;
  return total * (r - 1.0) / (std::pow(r, channels) - 1.0);
}

}  // namespace

void validate(const AnalysisConfig& cfg) {
  if (cfg.sample_rate <= 0) {
    fail(ErrorKind::kInvalidArgument, "analysis sample rate must be positive");
  }
  if (cfg.fft_size < 8 || !is_power_of_two(cfg.fft_size)) {
    fail(ErrorKind::kInvalidArgument,
         "fft_size must be a power of two >= 8, got " +
             std::to_string(cfg.fft_size));
  }
  if (cfg.hop == 0 || cfg.hop > cfg.fft_size) {
    fail(ErrorKind::kInvalidArgument, "hop must lie in [1, fft_size]");
  }
  if (cfg.num_channels == 0 || cfg.num_channels > usable_bins(cfg)) {
    fail(ErrorKind::kInvalidArgument,
         "num_channels must lie in [1, " + std::to_string(usable_bins(cfg)) +
             "], got " + std::to_string(cfg.num_channels));
  }
}

ChannelTable channel_table(const AnalysisConfig& cfg) {
  validate(cfg);
  const std::size_t total = usable_bins(cfg);
  const std::size_t channels = cfg.num_channels;
  const double t = static_cast<double>(total);
  const double c = static_cast<double>(channels);

  // Growth ratio that makes the lowest channel exactly one bin wide.
  double ratio = 1.0;
  if (total > channels && channels > 1) {
    double lo = 1.0, hi = 2.0;
    while (first_width(hi, t, c) > 1.0) hi *= 2.0;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      (first_width(mid, t, c) > 1.0 ? lo : hi) = mid;
    }
    ratio = 0.5 * (lo + hi);
  }

  // Real-valued geometric edges, rounded. Rounding keeps every width >= 1
  // because every real width is >= 1; sorting restores monotonicity.
  std::vector<std::size_t> widths(channels);
  if (channels == 1) {
    widths[0] = total;
  } else {
    const double w0 = first_width(ratio, t, c);
    double edge = 0.0;
    std::size_t prev = 0;
    for (std::size_t i = 0; i < channels; ++i) {
      edge += w0 * std::pow(ratio, static_cast<double>(i));
      const std::size_t rounded =
          i + 1 == channels ? total : static_cast<std::size_t>(std::lround(edge));
      widths[i] = std::max<std::size_t>(rounded - prev, 1);
      prev += widths[i];
    }
    std::sort(widths.begin(), widths.end());
    // Absorb any rounding slack in the widest channel.
    const std::size_t sum = std::accumulate(widths.begin(), widths.end(), std::size_t{0});
    widths.back() = widths.back() + total - sum;
  }

  ChannelTable table;
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.fft_size;
  std::size_t bin = kFirstUsableBin;
  for (std::size_t w : widths) {
    table.bands.push_back({bin, w});
    table.center_freqs.push_back(bin_hz * (static_cast<double>(bin) +
                                           0.5 * static_cast<double>(w - 1)));
    bin += w;
  }
  return table;
}

EnvelopeGrid analyze(const Waveform& w, const AnalysisConfig& cfg) {
  validate(w);
  const ChannelTable table = channel_table(cfg);
  if (w.sample_rate != cfg.sample_rate) {
    fail(ErrorKind::kSampleRateMismatch,
         "analyze: waveform is " + std::to_string(w.sample_rate) +
             " Hz, analysis expects " + std::to_string(cfg.sample_rate) + " Hz");
  }
  if (w.samples.empty()) fail(ErrorKind::kInvalidArgument, "analyze: empty waveform");

  const std::size_t n = cfg.fft_size;
  const std::size_t frames = (w.size() + cfg.hop - 1) / cfg.hop;
  const auto plan = FftPlan::shared(n);

  // Periodic Hann, scaled so a bin-centred sinusoid of amplitude A has a
  // peak bin magnitude of A.
  std::vector<double> window(n);
  for (std::size_t i = 0; i < n; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(n));
  }
  const double gain = 2.0 / std::accumulate(window.begin(), window.end(), 0.0);
  for (double& v : window) v *= gain;

  EnvelopeGrid grid;
  grid.values = Grid(frames, cfg.num_channels);
  grid.frame_rate = cfg.frame_rate();
  grid.center_freqs = table.center_freqs;

  std::vector<double> segment(n);
  std::vector<double> windowed(n);
  std::vector<cplx> spectrum(n);
  std::vector<double> power(n / 2 + 1);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * cfg.hop;
    const std::size_t avail = std::min(n, w.size() - start);
    std::copy_n(w.samples.begin() + static_cast<std::ptrdiff_t>(start), avail,
                segment.begin());
    std::fill(segment.begin() + static_cast<std::ptrdiff_t>(avail), segment.end(), 0.0);
    simd::multiply(segment, window, windowed);
    for (std::size_t i = 0; i < n; ++i) spectrum[i] = cplx(windowed[i], 0.0);
    plan->forward(spectrum);
    simd::complex_norm(std::span<const cplx>(spectrum).first(power.size()), power);
    auto row = grid.values.row(f);
    for (std::size_t c = 0; c < table.bands.size(); ++c) {
      const Band& band = table.bands[c];
      double acc = 0.0;
      for (std::size_t k = 0; k < band.num_bins; ++k) acc += power[band.first_bin + k];
      row[c] = std::sqrt(acc);
    }
  }
  return grid;
}

}  // namespace revmask
