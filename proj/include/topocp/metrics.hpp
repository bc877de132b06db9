#pragma once

// Segmentation metrics: Dice, average symmetric surface distance, Betti
// number error and the hole ratio, plus largest-component filtering.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "topocp/kernels.hpp"
#include "topocp/persistence.hpp"

namespace topocp {

/// 2|P&G| / (|P|+|G|); 1 when both masks are empty.
double dsc(const BinaryMask& pred, const BinaryMask& gt);

/// Mean of the two directed average border-to-border distances, in the units
/// of `spacing`. Empty when either mask is empty.
std::optional<double> assd(const BinaryMask& pred, const BinaryMask& gt, const Spacing& spacing);

/// |BN_k(pred) - expected_k|.
std::size_t bne(const BinaryMask& pred, const BettiVector& expected, int k = 1);

struct HoleRatioOptions {
  double mp = 0.01;
  int radius = 3;  ///< Chebyshev search radius from a hole seed to the nearest FN voxel.
};

struct HoleRatioResult {
  std::optional<double> value;  ///< Empty when gt is empty.
  BinaryMask fn_holes;
  std::size_t fn_holes_count = 0;
  std::size_t seeds = 0;         ///< Dim-1 pairs of pred.
  std::size_t mapped_seeds = 0;  ///< Seeds with an FN voxel in range.
};

HoleRatioResult hole_ratio(const BinaryMask& pred, const BinaryMask& gt, const HoleRatioOptions& opts = {});

/// Largest full-adjacency component; ties go to the component whose first
/// cell comes first in row-major order.
BinaryMask largest_cc(const BinaryMask& m);

struct MetricsReport {
  std::string subject_id;
  double dsc = 0.0;
  std::optional<double> assd_mm;
  BettiVector bne;
  std::optional<double> hole_ratio;
  ConfusionCounts counts;
  std::size_t fn_holes = 0;
  /// BN1 of the ground truth; nonzero values make the hole ratio unreliable.
  std::size_t gt_bn1 = 0;
};

struct EvalOptions {
  HoleRatioOptions hole;
  bool largest_component = true;
  BettiVector expected{1, 0, 0};
  /// Physical spacing; taken from gt when unset.
  std::optional<Spacing> spacing;
};

MetricsReport evaluate(const BinaryMask& pred, const BinaryMask& gt, const EvalOptions& opts = {},
                       const std::string& subject_id = {});

}  // namespace topocp
