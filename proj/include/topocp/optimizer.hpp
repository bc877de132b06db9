#pragma once

// Projected gradient descent on a likelihood map under a configured loss.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "topocp/loss.hpp"

namespace topocp {

struct TrajectoryPoint {
  double loss = 0.0;
  std::size_t bn1 = 0;  ///< BN1 of threshold(f, 0.5).
};

struct OptimRun {
  std::size_t steps = 0;
  double lr = 0.0;
  std::vector<TrajectoryPoint> trajectory;  ///< steps + 1 entries, the first is the initial state.
  LikelihoodGrid final;
};

/// f <- clamp(f - lr * grad L(f), 0, 1), `steps` times.
OptimRun optimize_likelihood(const LikelihoodGrid& init, const BinaryMask& target, const LossConfig& cfg,
                             std::size_t steps, double lr);

/// Columns step,loss,bn1.
void write_trajectory_csv(const OptimRun& run, std::ostream& os);
void write_trajectory_csv(const OptimRun& run, const std::string& path);

}  // namespace topocp
