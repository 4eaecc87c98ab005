#include "revmask/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "revmask/error.hpp"
#include "revmask/simd/kernels.hpp"

namespace revmask {
namespace {

std::vector<double> centered(std::span<const double> v) {
  const double mean =
      std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x -= mean;
  return out;
}

bool is_binary(const GainMask& m) {
  if (m.kind != MaskKind::kBinary) return false;
  for (double g : m.gains.flat()) {
    if (g != 0.0 && g != 1.0) return false;
  }
  return true;
}

}  // namespace

double grid_similarity(const Grid& a, const Grid& b) {
  if (!a.same_shape(b)) {
    fail(ErrorKind::kShapeMismatch, "grid_similarity: grids differ in shape");
  }
  if (a.empty()) return 0.0;
  const std::vector<double> ca = centered(a.flat());
  const std::vector<double> cb = centered(b.flat());
  const double saa = simd::sum_squares(ca);
  const double sbb = simd::sum_squares(cb);
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  const double r = simd::dot(ca, cb) / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

double grid_similarity(const Electrodogram& a, const Electrodogram& b) {
  return grid_similarity(a.to_dense(), b.to_dense());
}

MaskConfusion mask_confusion(const GainMask& candidate, const GainMask& reference) {
  if (!candidate.gains.same_shape(reference.gains)) {
    fail(ErrorKind::kShapeMismatch, "mask_confusion: masks differ in shape");
  }
  if (!is_binary(candidate) || !is_binary(reference)) {
    fail(ErrorKind::kInvalidArgument, "mask_confusion: both masks must be binary");
  }
  const auto c = candidate.gains.flat();
  const auto r = reference.gains.flat();
  std::size_t positives = 0, negatives = 0, hits = 0, false_alarms = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] == 1.0) {
      ++positives;
      hits += c[i] == 1.0;
    } else {
      ++negatives;
      false_alarms += c[i] == 1.0;
    }
  }
  MaskConfusion out;
  if (positives > 0) out.hit_rate = static_cast<double>(hits) / positives;
  if (negatives > 0) out.false_alarm_rate = static_cast<double>(false_alarms) / negatives;
  return out;
}

}  // namespace revmask
