#include "revmask/masking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "revmask/error.hpp"
#include "revmask/simd/kernels.hpp"

namespace revmask {
namespace {

const double kLinearFloor = std::pow(10.0, kSrrFloorDb / 10.0);
const double kLinearCeiling = std::pow(10.0, kSrrCeilingDb / 10.0);

std::string shape_string(const Grid& g) {
  return std::to_string(g.frames()) + "x" + std::to_string(g.channels());
}

}  // namespace

SrrGrid srr_grid(const EnvelopeGrid& direct, const EnvelopeGrid& reverberant) {
  if (!direct.values.same_shape(reverberant.values)) {
    fail(ErrorKind::kShapeMismatch,
         "srr_grid: direct grid " + shape_string(direct.values) +
             " vs reverberant grid " + shape_string(reverberant.values));
  }
  if (direct.frame_rate != reverberant.frame_rate ||
      direct.center_freqs != reverberant.center_freqs) {
    fail(ErrorKind::kShapeMismatch,
         "srr_grid: grids come from different analysis settings");
  }
  SrrGrid out{Grid(direct.frames(), direct.channels()),
              Grid(direct.frames(), direct.channels())};
  const auto d = direct.values.flat();
  const auto y = reverberant.values.flat();
  auto db = out.db_values.flat();
  auto lin = out.linear_values.flat();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double num = d[i] * d[i];
    const double diff = y[i] - d[i];
    const double den = diff * diff;
    double ratio;
    if (den == 0.0) {
      ratio = num > 0.0 ? kLinearCeiling : kLinearFloor;
    } else {
      ratio = std::clamp(num / den, kLinearFloor, kLinearCeiling);
    }
    lin[i] = ratio;
    db[i] = std::clamp(10.0 * std::log10(ratio), kSrrFloorDb, kSrrCeilingDb);
  }
  return out;
}

GainMask ibm(const SrrGrid& srr, double tau_db, double esnr_db) {
  if (!std::isfinite(tau_db) || !std::isfinite(esnr_db)) {
    fail(ErrorKind::kInvalidArgument, "ibm: tau and eSNR must be finite");
  }
  const BinaryMaskParams params{tau_db, esnr_db};
  const double threshold = params.local_threshold_db();
  GainMask mask{Grid(srr.db_values.frames(), srr.db_values.channels()),
                MaskKind::kBinary, params};
  const auto db = srr.db_values.flat();
  auto gains = mask.gains.flat();
  for (std::size_t i = 0; i < db.size(); ++i) gains[i] = db[i] > threshold ? 1.0 : 0.0;
  return mask;
}

GainMask irm(const SrrGrid& srr, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) ||
      !std::isfinite(beta)) {
    fail(ErrorKind::kInvalidArgument, "irm: alpha and beta must be positive");
  }
  GainMask mask{Grid(srr.linear_values.frames(), srr.linear_values.channels()),
                MaskKind::kRatio, RatioMaskParams{alpha, beta}};
  const auto lin = srr.linear_values.flat();
  auto gains = mask.gains.flat();
  for (std::size_t i = 0; i < lin.size(); ++i) {
    const double g = std::pow(lin[i] / (lin[i] + alpha), beta);
    gains[i] = g < kRatioGainFloor ? 0.0 : g;
  }
  return mask;
}

EnvelopeGrid apply_mask(const EnvelopeGrid& grid, const GainMask& mask) {
  if (!grid.values.same_shape(mask.gains)) {
    fail(ErrorKind::kShapeMismatch,
         "apply_mask: grid " + shape_string(grid.values) + " vs mask " +
             shape_string(mask.gains));
  }
  EnvelopeGrid out;
  out.values = Grid(grid.frames(), grid.channels());
  out.frame_rate = grid.frame_rate;
  out.center_freqs = grid.center_freqs;
  simd::multiply(grid.values.flat(), mask.gains.flat(), out.values.flat());
  return out;
}

double mask_density(const GainMask& mask) {
  const auto g = mask.gains.flat();
  if (g.empty()) return 0.0;
  return std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
}

}  // namespace revmask
