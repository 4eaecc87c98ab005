#pragma once

#include <optional>
#include <string>

#include "revmask/ci_chain.hpp"
#include "revmask/grid.hpp"
#include "revmask/masking.hpp"

namespace revmask {

// Normalized cross-correlation of two equally shaped grids after removing
// each grid's mean. 0 when either grid is constant.
double grid_similarity(const Grid& a, const Grid& b);
double grid_similarity(const Electrodogram& a, const Electrodogram& b);

// Rates of a binary candidate against a binary reference. A rate whose
// denominator is empty (reference all 0 or all 1) is absent.
struct MaskConfusion {
  std::optional<double> hit_rate;
  std::optional<double> false_alarm_rate;
};

MaskConfusion mask_confusion(const GainMask& candidate, const GainMask& reference);

// One scored (sentence, condition) pair.
struct ConditionScore {
  std::string label;
  std::optional<double> param;
  double density = 0.0;
  double similarity = 0.0;
  std::optional<double> hit_rate;
  std::optional<double> false_alarm_rate;
};

}  // namespace revmask
