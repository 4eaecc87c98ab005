#pragma once

#include <variant>

#include "revmask/grid.hpp"
#include "revmask/tf_analysis.hpp"

namespace revmask {

inline constexpr double kSrrFloorDb = -75.0;
inline constexpr double kSrrCeilingDb = 75.0;

// Per-unit speech-to-reverberant ratio. Both views saturate at +/-75 dB
// (linear 10^+/-7.5) so the binary and ratio masks see the same values.
struct SrrGrid {
  Grid db_values;
  Grid linear_values;
};

// D^2 / (Y - D)^2 on channel envelope magnitudes. A zero residual with
// direct energy saturates high; a unit with neither saturates low.
SrrGrid srr_grid(const EnvelopeGrid& direct, const EnvelopeGrid& reverberant);

enum class MaskKind { kBinary, kRatio };

struct BinaryMaskParams {
  double tau_db = 0.0;
  double esnr_db = 0.0;
  double local_threshold_db() const noexcept { return tau_db + esnr_db; }
};

struct RatioMaskParams {
  double alpha = 1.0;
  double beta = 1.0;
};

struct GainMask {
  Grid gains;
  MaskKind kind = MaskKind::kBinary;
  std::variant<BinaryMaskParams, RatioMaskParams> params;
};

// gain = 1 where db > tau + esnr (strictly), else 0.
GainMask ibm(const SrrGrid& srr, double tau_db, double esnr_db);

// Ratio-mask gains below this are set to 0. It keeps masked amplitudes far
// from the underflow range, where the product with an envelope would no
// longer scale with the input.
inline constexpr double kRatioGainFloor = 1e-100;

// gain = (l / (l + alpha))^beta on the linear SRR, 0 below kRatioGainFloor.
GainMask irm(const SrrGrid& srr, double alpha, double beta);

// Elementwise product; frame rate and center frequencies carried over.
EnvelopeGrid apply_mask(const EnvelopeGrid& grid, const GainMask& mask);

// Fraction of retained units (binary) or mean gain (ratio); 0 for an empty
// mask.
double mask_density(const GainMask& mask);

}  // namespace revmask
