#pragma once

// Segmentation losses on likelihood grids: BCE, Dice, the persistence-based
// topological loss and their combinations. Every loss returns its value and
// the gradient with respect to f, co-shaped with f.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "topocp/grid.hpp"
#include "topocp/persistence.hpp"

namespace topocp {

enum class LossMode { baseline, hybrid, topocp };

LossMode parse_loss_mode(const std::string& s);
const char* to_string(LossMode m);

struct LossWeights {
  std::array<double, 3> omega{1.0, 1.0, 1.0};
  int K = 1;  ///< Highest homology dimension included.
};

struct LossConfig {
  double lambda_topo = 0.005;
  double mp = 0.01;
  LossWeights weights;
  LossMode mode = LossMode::topocp;

  /// Throws ParameterError.
  void validate() const;
};

struct Matching {
  int dim = 0;
  std::vector<std::pair<PersistencePair, PersistencePair>> matched;
  std::vector<PersistencePair> to_diagonal;
  /// Target pairs left over when the target has more pairs than the prediction.
  std::vector<PersistencePair> target_unmatched;

  /// Squared distance of each matched pair, then each diagonal pair, then
  /// each unmatched target pair, in that order.
  std::vector<double> distances() const;
  double cost() const;
};

struct LossResult {
  double value = 0.0;
  Grid<double> gradient;
  /// Unweighted topological term per dimension (zero for non-topological losses).
  std::array<double, 3> per_dim{0.0, 0.0, 0.0};
  /// Component values as they enter `value` before weighting.
  double bce = 0.0, dice = 0.0, topo = 0.0;
};

/// Top min(n_pred, n_target) prediction pairs by persistence are matched in
/// order to the target pairs; remaining prediction pairs go to the diagonal.
Matching match_diagrams(const PersistenceDiagram& pred, const PersistenceDiagram& target, int k);

/// Diagram of a binary target on the pad_twice grid: (0, 1) pairs with
/// multiplicity given by the Betti numbers of the padded mask.
PersistenceDiagram target_diagram(const BinaryMask& target);

LossResult topo_loss(const LikelihoodGrid& f, const BinaryMask& target, const LossConfig& cfg = {});
/// Same, with a precomputed target diagram.
LossResult topo_loss(const LikelihoodGrid& f, const PersistenceDiagram& target, const LossConfig& cfg);

inline constexpr double kBceEps = 1e-7;
inline constexpr double kDiceSmooth = 1.0;

LossResult bce_loss(const LikelihoodGrid& f, const BinaryMask& target);
LossResult dice_loss(const LikelihoodGrid& f, const BinaryMask& target);

/// baseline: bce. hybrid: bce + dice. topocp: (1 - lambda) bce + lambda topo.
LossResult combined_loss(const LikelihoodGrid& f, const BinaryMask& target, const LossConfig& cfg);

/// combined_loss over many patches, evaluated concurrently. Results are in
/// input order and independent of the thread count.
std::vector<LossResult> batch_loss(const std::vector<LikelihoodGrid>& f, const std::vector<BinaryMask>& targets,
                                   const LossConfig& cfg);

}  // namespace topocp
