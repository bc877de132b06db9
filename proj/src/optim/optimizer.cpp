#include "topocp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace topocp {

OptimRun optimize_likelihood(const LikelihoodGrid& init, const BinaryMask& target, const LossConfig& cfg,
                             std::size_t steps, double lr) {
  require_same_shape(init.shape(), target.shape(), "optimize_likelihood");
  cfg.validate();
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ParameterError("learning rate must be positive");

  OptimRun run;
  run.steps = steps;
  run.lr = lr;
  run.trajectory.reserve(steps + 1);
  Grid<double> f = init.grid();
  for (std::size_t s = 0;; ++s) {
    const LikelihoodGrid cur(f);
    const LossResult r = combined_loss(cur, target, cfg);
    run.trajectory.push_back({r.value, betti_numbers(threshold(cur, 0.5)).bn1});
    if (s == steps) break;
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::clamp(f[i] - lr * r.gradient[i], 0.0, 1.0);
  }
  run.final = LikelihoodGrid(std::move(f));
  return run;
}

void write_trajectory_csv(const OptimRun& run, std::ostream& os) {
  os << "step,loss,bn1\n" << std::setprecision(10);
  for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
    os << i << ',' << run.trajectory[i].loss << ',' << run.trajectory[i].bn1 << '\n';
  }
}

void write_trajectory_csv(const OptimRun& run, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError(IoErrc::open_failed, 0, path);
  write_trajectory_csv(run, os);
  if (!os) throw IoError(IoErrc::write_failed, 0, path);
}

}  // namespace topocp
