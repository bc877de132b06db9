#include "topocp/loss.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "topocp/parallel.hpp"

namespace topocp {

LossMode parse_loss_mode(const std::string& s) {
  if (s == "baseline") return LossMode::baseline;
  if (s == "hybrid") return LossMode::hybrid;
  if (s == "topocp") return LossMode::topocp;
  throw ParameterError("unknown loss mode '" + s + "' (expected baseline, hybrid or topocp)");
}

const char* to_string(LossMode m) {
  switch (m) {
    case LossMode::baseline: return "baseline";
    case LossMode::hybrid: return "hybrid";
    case LossMode::topocp: return "topocp";
  }
  return "?";
}

void LossConfig::validate() const {
  if (!(lambda_topo >= 0.0 && lambda_topo <= 1.0)) {
    throw ParameterError("lambda must lie in [0, 1], got " + std::to_string(lambda_topo));
  }
  if (!(mp >= 0.0 && mp < 1.0)) throw ParameterError("mp must lie in [0, 1), got " + std::to_string(mp));
  if (weights.K < 0 || weights.K > 2) throw ParameterError("K must be 0, 1 or 2");
  bool any = false;
  for (int k = 0; k <= weights.K; ++k) {
    const double w = weights.omega[static_cast<std::size_t>(k)];
    if (!(w >= 0.0)) throw ParameterError("omega values must be >= 0");
    any = any || w > 0.0;
  }
  if (!any) throw ParameterError("at least one omega must be positive");
}

namespace {

double diagonal_cost(const PersistencePair& p) {
  const double h = 0.5 * (p.death - p.birth);
  return 2.0 * h * h;
}

double matched_cost(const PersistencePair& p, const PersistencePair& t) {
  const double db = p.birth - t.birth, dd = p.death - t.death;
  return db * db + dd * dd;
}

}  // namespace

std::vector<double> Matching::distances() const {
  std::vector<double> out;
  for (const auto& [p, t] : matched) out.push_back(matched_cost(p, t));
  for (const auto& p : to_diagonal) out.push_back(diagonal_cost(p));
  for (const auto& t : target_unmatched) out.push_back(diagonal_cost(t));
  return out;
}

double Matching::cost() const {
  double s = 0.0;
  for (double d : distances()) s += d;
  return s;
}

Matching match_diagrams(const PersistenceDiagram& pred, const PersistenceDiagram& target, int k) {
  Matching m;
  m.dim = k;
  if (k < 0 || k > 2) return m;
  const auto& p = pred.pairs(k);
  const auto& t = target.pairs(k);
  const std::size_t n = std::min(p.size(), t.size());
  for (std::size_t i = 0; i < n; ++i) m.matched.emplace_back(p[i], t[i]);
  m.to_diagonal.assign(p.begin() + static_cast<std::ptrdiff_t>(n), p.end());
  m.target_unmatched.assign(t.begin() + static_cast<std::ptrdiff_t>(n), t.end());
  return m;
}

PersistenceDiagram target_diagram(const BinaryMask& target) {
  const auto padded = pad_twice(to_likelihood(target));
  const auto b = betti_numbers(threshold(padded, 0.5));
  std::array<std::vector<PersistencePair>, 3> pairs;
  for (int k = 0; k < 3; ++k) pairs[static_cast<std::size_t>(k)].assign(b[k], PersistencePair{k, 0.0, 1.0, 0, 0});
  return PersistenceDiagram(padded.shape(), 2, 0.0, std::move(pairs));
}

LossResult topo_loss(const LikelihoodGrid& f, const BinaryMask& target, const LossConfig& cfg) {
  require_same_shape(f.shape(), target.shape(), "topo_loss");
  return topo_loss(f, target_diagram(target), cfg);
}

LossResult topo_loss(const LikelihoodGrid& f, const PersistenceDiagram& target, const LossConfig& cfg) {
  cfg.validate();
  const Shape& s = f.shape();
  const int rank = s.rank();
  if (target.offset() != 2) throw ParameterError("target diagram must be built on the pad_twice grid");
  const auto d = compute_persistence(f, {cfg.mp, Padding::twice, std::min(cfg.weights.K, rank - 1)});
  const Shape& ps = d.grid_shape();
  require_same_shape(ps, target.grid_shape(), "topo_loss target diagram");

  // The inner padding ring holds max(f), so its gradient belongs to the
  // first cell attaining the maximum. The outer ring is constant.
  const auto vals = f.values();
  const std::size_t argmax = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());

  LossResult r;
  r.gradient = Grid<double>(s, 0.0, f.spacing());
  auto route = [&](std::size_t cell, double g) {
    const Coord c = d.input_coords(cell);
    bool inside = true, outer = false;
    for (int a = 0; a < rank; ++a) {
      const auto e = static_cast<std::ptrdiff_t>(s.extent(a));
      if (c[a] < 0 || c[a] >= e) inside = false;
      if (c[a] < -1 || c[a] > e) outer = true;
    }
    if (outer) return;
    r.gradient[inside ? s.index(c) : argmax] += g;
  };

  for (int k = 0; k <= std::min(cfg.weights.K, rank - 1); ++k) {
    const double w = cfg.weights.omega[static_cast<std::size_t>(k)];
    const Matching m = match_diagrams(d, target, k);
    r.per_dim[static_cast<std::size_t>(k)] = m.cost();
    if (w == 0.0) continue;
    for (const auto& [p, t] : m.matched) {
      route(p.birth_cell, 2.0 * w * (p.birth - t.birth));
      route(p.death_cell, 2.0 * w * (p.death - t.death));
    }
    for (const auto& p : m.to_diagonal) {
      const double h = p.death - p.birth;
      route(p.birth_cell, -w * h);
      route(p.death_cell, w * h);
    }
  }
  for (int k = 0; k < 3; ++k) r.value += cfg.weights.omega[static_cast<std::size_t>(k)] * r.per_dim[static_cast<std::size_t>(k)];
  r.topo = r.value;
  return r;
}

LossResult bce_loss(const LikelihoodGrid& f, const BinaryMask& target) {
  require_same_shape(f.shape(), target.shape(), "bce_loss");
  const std::size_t n = f.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  LossResult r;
  r.gradient = Grid<double>(f.shape(), 0.0, f.spacing());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::clamp(f[i], kBceEps, 1.0 - kBceEps);
    const double t = target[i] ? 1.0 : 0.0;
    sum -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    r.gradient[i] = (p - t) / (p * (1.0 - p)) * inv_n;
  }
  r.value = sum * inv_n;
  r.bce = r.value;
  return r;
}

LossResult dice_loss(const LikelihoodGrid& f, const BinaryMask& target) {
  require_same_shape(f.shape(), target.shape(), "dice_loss");
  double inter = 0.0, sf = 0.0, st = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double t = target[i] ? 1.0 : 0.0;
    inter += f[i] * t;
    sf += f[i];
    st += t;
  }
  const double num = 2.0 * inter + kDiceSmooth, den = sf + st + kDiceSmooth;
  LossResult r;
  r.value = 1.0 - num / den;
  r.dice = r.value;
  r.gradient = Grid<double>(f.shape(), 0.0, f.spacing());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double t = target[i] ? 1.0 : 0.0;
    r.gradient[i] = -(2.0 * t * den - num) / (den * den);
  }
  return r;
}

namespace {

void axpy(double a, const Grid<double>& x, Grid<double>& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

LossResult combined_loss(const LikelihoodGrid& f, const BinaryMask& target, const LossConfig& cfg) {
  cfg.validate();
  LossResult r = bce_loss(f, target);
  switch (cfg.mode) {
    case LossMode::baseline:
      break;
    case LossMode::hybrid: {
      const LossResult d = dice_loss(f, target);
      r.value += d.value;
      r.dice = d.value;
      axpy(1.0, d.gradient, r.gradient);
      break;
    }
    case LossMode::topocp: {
      const double lam = cfg.lambda_topo;
      if (lam == 0.0) break;
      const LossResult t = topo_loss(f, target, cfg);
      r.value = (1.0 - lam) * r.bce + lam * t.value;
      for (auto& g : r.gradient.values()) g *= 1.0 - lam;
      axpy(lam, t.gradient, r.gradient);
      r.topo = t.value;
      r.per_dim = t.per_dim;
      break;
    }
  }
  return r;
}

std::vector<LossResult> batch_loss(const std::vector<LikelihoodGrid>& f, const std::vector<BinaryMask>& targets,
                                   const LossConfig& cfg) {
  if (f.size() != targets.size()) throw ShapeError("batch_loss: prediction and target counts differ");
  cfg.validate();
  std::vector<LossResult> out(f.size());
  std::vector<std::exception_ptr> errors(f.size());
  const auto n = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for num_threads(max_threads()) schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    try {
      out[u] = combined_loss(f[u], targets[u], cfg);
    } catch (...) {
      errors[u] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace topocp
