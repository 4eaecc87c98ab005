#include "revmask/audio_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "revmask/error.hpp"
#include "revmask/simd/kernels.hpp"

namespace revmask {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t load_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t load_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void store_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

double decode_sample(const unsigned char* p, const FmtChunk& fmt) {
  if (fmt.format == kFormatFloat) {
    if (fmt.bits == 32) {
      const std::uint32_t bits = load_u32(p);
      float f;
      std::memcpy(&f, &bits, sizeof f);
      return f;
    }
    const std::uint64_t bits = static_cast<std::uint64_t>(load_u32(p)) |
                               (static_cast<std::uint64_t>(load_u32(p + 4)) << 32);
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
  }
  switch (fmt.bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(load_u16(p)) / 32768.0;
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    default:
      return static_cast<std::int32_t>(load_u32(p)) / 2147483648.0;
  }
}

double kaiser_beta(double attenuation_db) {
  return 0.1102 * (attenuation_db - 8.7);
}

}  // namespace

void validate(const Waveform& w) {
  if (w.sample_rate <= 0) {
    fail(ErrorKind::kInvalidArgument,
         "waveform sample rate must be positive, got " +
             std::to_string(w.sample_rate));
  }
  if (!std::all_of(w.samples.begin(), w.samples.end(),
                   [](double x) { return std::isfinite(x); })) {
    fail(ErrorKind::kInvalidArgument, "waveform contains non-finite samples");
  }
}

double rms(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  return std::sqrt(simd::sum_squares(samples) /
                   static_cast<double>(samples.size()));
}

double peak(std::span<const double> samples) {
  double m = 0.0;
  for (double x : samples) m = std::max(m, std::abs(x));
  return m;
}

Waveform read_wav(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    fail(ErrorKind::kFileNotFound, "no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  const std::string where = " in " + path.string();

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    fail(ErrorKind::kMalformedHeader, "missing RIFF/WAVE header" + where);
  }

  FmtChunk fmt;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t size = load_u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || available < 16) {
        fail(ErrorKind::kMalformedHeader, "truncated fmt chunk" + where);
      }
      const unsigned char* f = bytes.data() + body;
      fmt.format = load_u16(f);
      fmt.channels = load_u16(f + 2);
      fmt.sample_rate = load_u32(f + 4);
      fmt.bits = load_u16(f + 14);
      if (fmt.format == kFormatExtensible) {
        if (size < 40 || available < 40) {
          fail(ErrorKind::kMalformedHeader,
               "truncated WAVE_FORMAT_EXTENSIBLE fmt chunk" + where);
        }
        fmt.format = load_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) {
        fail(ErrorKind::kMalformedHeader, "data chunk before fmt chunk" + where);
      }
      data = bytes.data() + body;
      // Streaming writers leave the size at 0 or 0xFFFFFFFF; take what exists.
      data_size = (size == 0 || size > available) ? available : size;
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) fail(ErrorKind::kMalformedHeader, "no fmt chunk" + where);
  if (data == nullptr) fail(ErrorKind::kMalformedHeader, "no data chunk" + where);
  if (fmt.channels == 0 || fmt.sample_rate == 0) {
    fail(ErrorKind::kMalformedHeader, "zero channels or sample rate" + where);
  }

  const bool pcm_ok = fmt.format == kFormatPcm &&
                      (fmt.bits == 8 || fmt.bits == 16 || fmt.bits == 24 ||
                       fmt.bits == 32);
  const bool float_ok =
      fmt.format == kFormatFloat && (fmt.bits == 32 || fmt.bits == 64);
  if (!pcm_ok && !float_ok) {
    fail(ErrorKind::kUnsupportedEncoding,
         "unsupported WAV encoding (format " + std::to_string(fmt.format) +
             ", " + std::to_string(fmt.bits) + " bits)" + where);
  }
  if (fmt.channels > 1) {
    std::cerr << "revmask: " << path.string() << " has " << fmt.channels
              << " channels; using channel 0\n";
  }

  const std::size_t sample_bytes = fmt.bits / 8;
  const std::size_t frame_bytes = sample_bytes * fmt.channels;
  const std::size_t frames = data_size / frame_bytes;
  Waveform w;
  w.sample_rate = static_cast<int>(fmt.sample_rate);
  w.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    w.samples[i] = decode_sample(data + i * frame_bytes, fmt);
  }
  validate(w);
  return w;
}

void write_wav(const Waveform& w, const std::filesystem::path& path,
               WavEncoding encoding) {
  validate(w);
  const bool pcm = encoding == WavEncoding::kPcm16;
  if (pcm) {
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
      if (std::abs(w.samples[i]) > 1.0) {
        fail(ErrorKind::kClipping,
             "sample " + std::to_string(i) + " = " +
                 std::to_string(w.samples[i]) +
                 " exceeds 16-bit range; normalize first (" + path.string() +
                 ")");
      }
    }
  }
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(w.samples.size() * (bits / 8));

  std::string out;
  out.reserve(44 + data_bytes);
  out.append("RIFF");
  store_u32(out, 36 + data_bytes);
  out.append("WAVEfmt ");
  store_u32(out, 16);
  store_u16(out, pcm ? kFormatPcm : kFormatFloat);
  store_u16(out, 1);
  store_u32(out, static_cast<std::uint32_t>(w.sample_rate));
  store_u32(out, static_cast<std::uint32_t>(w.sample_rate) * (bits / 8));
  store_u16(out, bits / 8);
  store_u16(out, bits);
  out.append("data");
  store_u32(out, data_bytes);
  for (double x : w.samples) {
    if (pcm) {
      const long q = std::clamp(std::lround(x * 32768.0), -32768L, 32767L);
      store_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      const float f = static_cast<float>(x);
      std::uint32_t u;
      std::memcpy(&u, &f, sizeof u);
      store_u32(out, u);
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(ErrorKind::kIo, "cannot open for writing: " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) fail(ErrorKind::kIo, "write failed: " + path.string());
}

Waveform resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) {
    fail(ErrorKind::kInvalidArgument,
         "target rate must be positive, got " + std::to_string(target_rate));
  }
  validate(w);
  if (target_rate == w.sample_rate) return w;

  const long g = std::gcd(static_cast<long>(w.sample_rate),
                          static_cast<long>(target_rate));
  const long up = target_rate / g;
  const long down = w.sample_rate / g;
  const double in_rate = w.sample_rate;

  constexpr double kAttenuationDb = 80.0;
  const double nyquist = 0.5 * std::min<double>(w.sample_rate, target_rate);
  const double transition_hz = 0.1 * nyquist;
  const double cutoff_hz = nyquist - 0.5 * transition_hz;
  // Kaiser length estimate, expressed as a half-width in seconds.
  const double half_width_s =
      (kAttenuationDb - 7.95) / (2.285 * 4.0 * std::numbers::pi * transition_hz);
  const double beta = kaiser_beta(kAttenuationDb);
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  const long half_taps =
      static_cast<long>(std::ceil(half_width_s * in_rate));

  // Continuous kernel sampled at offset t seconds, already scaled by 1/in_rate.
  auto kernel = [&](double t) {
    const double r = t / half_width_s;
    if (std::abs(r) >= 1.0) return 0.0;
    const double x = 2.0 * cutoff_hz * t;
    const double sinc =
        x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / i0_beta;
    return 2.0 * cutoff_hz * sinc * window / in_rate;
  };

  const std::size_t width = static_cast<std::size_t>(2 * half_taps + 1);
  const bool tabulate = up <= 4096;
  std::vector<double> table;
  if (tabulate) {
    table.resize(static_cast<std::size_t>(up) * width);
    for (long p = 0; p < up; ++p) {
      for (long j = -half_taps; j <= half_taps; ++j) {
        const double offset = (static_cast<double>(p) / up - j) / in_rate;
        table[static_cast<std::size_t>(p) * width + (j + half_taps)] = kernel(offset);
      }
    }
  }

  const long n_in = static_cast<long>(w.samples.size());
  const long n_out = static_cast<long>(
      (static_cast<long long>(n_in) * up + down - 1) / down);
  Waveform out;
  out.sample_rate = target_rate;
  out.samples.assign(static_cast<std::size_t>(n_out), 0.0);
  std::vector<double> scratch(width);
  for (long n = 0; n < n_out; ++n) {
    const long long pos = static_cast<long long>(n) * down;
    const long base = static_cast<long>(pos / up);
    const long phase = static_cast<long>(pos % up);
    const double* coeffs;
    if (tabulate) {
      coeffs = table.data() + static_cast<std::size_t>(phase) * width;
    } else {
      for (long j = -half_taps; j <= half_taps; ++j) {
        scratch[static_cast<std::size_t>(j + half_taps)] =
            kernel((static_cast<double>(phase) / up - j) / in_rate);
      }
      coeffs = scratch.data();
    }
    const long lo = std::max(-half_taps, -base);
    const long hi = std::min(half_taps, n_in - 1 - base);
    if (lo > hi) continue;
    out.samples[static_cast<std::size_t>(n)] =
        simd::dot(std::span(w.samples.data() + base + lo,
                            static_cast<std::size_t>(hi - lo + 1)),
                  std::span(coeffs + (lo + half_taps),
                            static_cast<std::size_t>(hi - lo + 1)));
  }
  return out;
}

std::vector<double> rms_group_gains(std::span<const Waveform> group) {
  // Common RMS r must satisfy peak_i * r / rms_i <= 1 for every member.
  double common = std::numeric_limits<double>::infinity();
  std::vector<double> member_rms;
  member_rms.reserve(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    validate(group[i]);
    const double r = rms(group[i].samples);
    if (!(r > 0.0)) {
      fail(ErrorKind::kSilentInput,
           "group member " + std::to_string(i) + " is silent (RMS = 0)");
    }
    member_rms.push_back(r);
    common = std::min(common, r / peak(group[i].samples));
  }
  std::vector<double> gains;
  gains.reserve(group.size());
  for (std::size_t i = 0; i < group.size(); ++i) {
    double g = common / member_rms[i];
    // Rounding may leave the limiting member a hair above full scale.
    const double p = peak(group[i].samples);
    while (g * p > 1.0) g = std::nextafter(g, 0.0);
    gains.push_back(g);
  }
  return gains;
}

std::vector<Waveform> normalize_rms_group(std::span<const Waveform> group) {
  const std::vector<double> gains = rms_group_gains(group);
  std::vector<Waveform> out(group.begin(), group.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (double& x : out[i].samples) x *= gains[i];
  }
  return out;
}

}  // namespace revmask
