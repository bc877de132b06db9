#include "topocp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topocp/labeling.hpp"

namespace topocp {

double dsc(const BinaryMask& pred, const BinaryMask& gt) {
  const ConfusionCounts c = kernels::confusion(pred, gt);
  const std::size_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::optional<double> assd(const BinaryMask& pred, const BinaryMask& gt, const Spacing& spacing) {
  require_same_shape(pred.shape(), gt.shape(), "assd");
  if (pred.empty() || gt.empty()) return std::nullopt;
  const BinaryMask bp = kernels::border(pred);
  const BinaryMask bg = kernels::border(gt);
  const DistanceSum ab = kernels::directed_distance(bp, kernels::squared_edt(bg, spacing));
  const DistanceSum ba = kernels::directed_distance(bg, kernels::squared_edt(bp, spacing));
  return 0.5 * (ab.mean() + ba.mean());
}

std::size_t bne(const BinaryMask& pred, const BettiVector& expected, int k) {
  const std::size_t b = betti_numbers(pred)[k];
  const std::size_t e = expected[k];
  return b > e ? b - e : e - b;
}

namespace {

// Nearest FN voxel to `seed` within the Chebyshev ball, Euclidean distance in
// index space, ties to the lowest row-major index.
std::optional<std::size_t> nearest_fn(const BinaryMask& fn, const Coord& seed, int radius) {
  const Shape& s = fn.shape();
  std::optional<std::size_t> best;
  std::ptrdiff_t best_d = std::numeric_limits<std::ptrdiff_t>::max();
  const int r2 = s.rank() == 3 ? radius : 0;
  for (std::ptrdiff_t d0 = -radius; d0 <= radius; ++d0)
    for (std::ptrdiff_t d1 = -radius; d1 <= radius; ++d1)
      for (std::ptrdiff_t d2 = -r2; d2 <= r2; ++d2) {
        const Coord c{seed[0] + d0, seed[1] + d1, seed[2] + d2};
        if (!s.contains(c) || !fn.at(c)) continue;
        const std::ptrdiff_t d = d0 * d0 + d1 * d1 + d2 * d2;
        const std::size_t idx = s.index(c);
        if (d < best_d || (d == best_d && idx < *best)) {
          best_d = d;
          best = idx;
        }
      }
  return best;
}

}  // namespace

HoleRatioResult hole_ratio(const BinaryMask& pred, const BinaryMask& gt, const HoleRatioOptions& opts) {
  require_same_shape(pred.shape(), gt.shape(), "hole_ratio");
  if (opts.radius < 0) throw ParameterError("hole search radius must be >= 0");
  const Shape& s = gt.shape();
  HoleRatioResult r;
  r.fn_holes = BinaryMask(s, gt.spacing());
  if (gt.empty()) return r;
  const ConfusionCounts c = kernels::confusion(pred, gt);
  r.value = 0.0;
  if (c.fn == 0 || betti_numbers(pred).bn1 == 0) return r;

  // Persistence only needs the prediction's bounding box: everything outside
  // is background joined to the exterior.
  const Box box = *bounding_box(pred);
  std::array<std::size_t, 3> ext{1, 1, 1};
  for (int a = 0; a < s.rank(); ++a) ext[a] = static_cast<std::size_t>(box.hi[a] - box.lo[a] + 1);
  const BinaryMask sub(subgrid(pred.grid(), box.lo, Shape::of_rank(s.rank(), ext)));
  PersistenceOptions po;
  po.min_persistence = opts.mp;
  po.padding = Padding::zero;
  po.max_dim = 1;
  const PersistenceDiagram d = compute_persistence(to_likelihood(sub), po);

  BinaryMask fn(s, gt.spacing());
  for (std::size_t i = 0; i < s.size(); ++i) fn.set(i, gt[i] && !pred[i]);
  const Components comps = label_components(fn, true, Adjacency::face);
  std::vector<bool> hit(comps.count(), false);
  for (const auto& p : d.pairs(1)) {
    ++r.seeds;
    Coord seed = d.input_coords(p.birth_cell);
    for (int a = 0; a < s.rank(); ++a) seed[a] += box.lo[a];
    const auto idx = nearest_fn(fn, seed, opts.radius);
    if (!idx) continue;
    ++r.mapped_seeds;
    hit[static_cast<std::size_t>(comps.labels[*idx] - 1)] = true;
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto l = comps.labels[i];
    if (l > 0 && hit[static_cast<std::size_t>(l - 1)]) {
      r.fn_holes.set(i, true);
      ++r.fn_holes_count;
    }
  }
  r.value = static_cast<double>(r.fn_holes_count) / static_cast<double>(c.tp + c.fn);
  return r;
}

BinaryMask largest_cc(const BinaryMask& m) {
  const Components comps = foreground_components(m);
  BinaryMask out(m.shape(), m.spacing());
  if (comps.count() == 0) return out;
  const auto best = static_cast<std::int32_t>(std::max_element(comps.sizes.begin(), comps.sizes.end()) - comps.sizes.begin()) + 1;
  for (std::size_t i = 0; i < m.size(); ++i) out.set(i, comps.labels[i] == best);
  return out;
}

MetricsReport evaluate(const BinaryMask& pred_in, const BinaryMask& gt, const EvalOptions& opts,
                       const std::string& subject_id) {
  require_same_shape(pred_in.shape(), gt.shape(), "evaluate");
  const BinaryMask pred = opts.largest_component ? largest_cc(pred_in) : pred_in;
  MetricsReport r;
  r.subject_id = subject_id;
  r.counts = kernels::confusion(pred, gt);
  r.dsc = dsc(pred, gt);
  r.assd_mm = assd(pred, gt, opts.spacing.value_or(gt.spacing()));
  const BettiVector b = betti_numbers(pred);
  for (int k = 0; k < 3; ++k) {
    const std::size_t e = opts.expected[k];
    const std::size_t v = b[k] > e ? b[k] - e : e - b[k];
    (k == 0 ? r.bne.bn0 : k == 1 ? r.bne.bn1 : r.bne.bn2) = v;
  }
  const HoleRatioResult hr = hole_ratio(pred, gt, opts.hole);
  r.hole_ratio = hr.value;
  r.fn_holes = hr.fn_holes_count;
  r.gt_bn1 = betti_numbers(gt).bn1;
  return r;
}

}  // namespace topocp
