#include <cmath>
#include <random>

#include "doctest.h"
#include "gradcheck.hpp"
#include "topocp/fixtures.hpp"
#include "topocp/loss.hpp"
#include "topocp/parallel.hpp"

using namespace topocp;

namespace {

PersistenceDiagram diagram(int dim, std::vector<std::pair<double, double>> bd) {
  std::array<std::vector<PersistencePair>, 3> pairs;
  std::size_t cell = 0;
  for (auto [b, d] : bd) pairs[static_cast<std::size_t>(dim)].push_back({dim, b, d, cell++, cell++});
  return PersistenceDiagram(Shape(4, 4), 2, 0.01, std::move(pairs));
}

LossConfig topo_only() {
  LossConfig c;
  c.mode = LossMode::topocp;
  return c;
}

}  // namespace

TEST_CASE("match_diagrams") {
  SUBCASE("single loop matched") {
    const auto m = match_diagrams(diagram(1, {{0.3, 0.9}}), diagram(1, {{0.0, 1.0}}), 1);
    REQUIRE(m.matched.size() == 1);
    CHECK(m.matched[0].first.birth == 0.3);
    CHECK(m.to_diagonal.empty());
    CHECK(m.cost() == doctest::Approx(0.09 + 0.01));
  }
  SUBCASE("higher persistence wins the match") {
    const auto m = match_diagrams(diagram(0, {{0.4, 0.5}, {0.1, 0.95}}), diagram(0, {{0.0, 1.0}}), 0);
    REQUIRE(m.matched.size() == 1);
    CHECK(m.matched[0].first.birth == 0.1);
    REQUIRE(m.to_diagonal.size() == 1);
    CHECK(m.to_diagonal[0].birth == 0.4);
    // distance to the diagonal point (0.45, 0.45)
    CHECK(m.distances()[1] == doctest::Approx(2 * 0.05 * 0.05));
  }
  SUBCASE("empty target sends everything to the diagonal") {
    const auto m = match_diagrams(diagram(1, {{0.1, 0.5}, {0.2, 0.3}, {0.6, 0.9}}), diagram(1, {}), 1);
    CHECK(m.matched.empty());
    CHECK(m.to_diagonal.size() == 3);
  }
  SUBCASE("missing dimension gives an empty matching") {
    const auto m = match_diagrams(diagram(0, {{0.1, 0.5}}), diagram(0, {}), 2);
    CHECK(m.matched.empty());
    CHECK(m.to_diagonal.empty());
  }
  SUBCASE("surplus target pairs cost their diagonal distance") {
    const auto m = match_diagrams(diagram(1, {}), diagram(1, {{0.0, 1.0}, {0.0, 1.0}}), 1);
    CHECK(m.target_unmatched.size() == 2);
    CHECK(m.cost() == doctest::Approx(1.0));
  }
}

TEST_CASE("target diagram counts padded Betti numbers") {
  CHECK(target_diagram(BinaryMask(Shape(5, 5))).total() == 0);
  const auto d = target_diagram(fixtures::square_ring(8, 1));
  // The max ring adds one component and encloses the gap between it and the ring.
  CHECK(d.count(0) == 2);
  CHECK(d.count(1) == 2);
  for (const auto& p : d.pairs(1)) {
    CHECK(p.birth == 0.0);
    CHECK(p.death == 1.0);
  }
}

TEST_CASE("topological loss vanishes at the truth") {
  for (const BinaryMask& m : {fixtures::square_ring(8, 1), fixtures::two_blobs(), fixtures::hollow_cube(),
                              fixtures::solid_torus(), fixtures::cup(7, 3)}) {
    LossConfig cfg = topo_only();
    cfg.weights.K = m.rank() - 1;
    const auto r = topo_loss(to_likelihood(m), m, cfg);
    CHECK(r.value == 0.0);
    for (double g : r.gradient.values()) CHECK(g == 0.0);
  }
}

TEST_CASE("weak ring cell is pushed up") {
  const auto [f, t] = fixtures::weak_ring();
  const auto r = topo_loss(f, t, topo_only());
  CHECK(r.value > 0.0);
  const double g = r.gradient.at(fixtures::weak_ring_cell());
  CHECK(g < 0.0);
  // Loop alive on (0.05, 0.4]: matched to (0, 1) its death term is 2 (0.4 - 1).
  CHECK(g == doctest::Approx(-1.2));
}

TEST_CASE("weak ring gradient matches finite differences once ties are broken") {
  auto [f0, t] = fixtures::weak_ring();
  std::vector<double> v(f0.values().begin(), f0.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += 1e-3 * static_cast<double>((i * 37) % 256) / 256.0;
  const LikelihoodGrid f(f0.shape(), v);
  const auto rep = gradcheck::compare(f, t, [](const LikelihoodGrid& x, const BinaryMask& y) {
    return topo_loss(x, y, topo_only());
  }, 1e-6);
  CAPTURE(rep.worst_rel);
  CAPTURE(rep.worst_abs_zero);
  CHECK(rep.nonzero > 0);
  CHECK(rep.ok());
}

TEST_CASE("constant one-half input against an empty target") {
  // One component alive on (0, 0.5], sent to the diagonal point (0.25, 0.25).
  const auto r = topo_loss(LikelihoodGrid::filled(Shape(4, 4), 0.5), BinaryMask(Shape(4, 4)), topo_only());
  CHECK(r.per_dim[0] == doctest::Approx(2 * 0.25 * 0.25));
  CHECK(r.per_dim[1] == 0.0);
  CHECK(r.value == doctest::Approx(0.125));
}

TEST_CASE("omega weights scale their own dimension") {
  const auto [f, t] = fixtures::weak_ring();
  LossConfig a = topo_only(), b = topo_only();
  b.weights.omega[1] = 2.0;
  const auto ra = topo_loss(f, t, a), rb = topo_loss(f, t, b);
  CHECK(rb.per_dim[0] == ra.per_dim[0]);
  CHECK(rb.per_dim[1] == ra.per_dim[1]);
  CHECK(rb.value - ra.value == doctest::Approx(ra.per_dim[1]));
}

TEST_CASE("bce") {
  const BinaryMask t(Shape(2, 2), std::vector<std::uint8_t>{1, 0, 0, 1});
  CHECK(bce_loss(to_likelihood(t), t).value == doctest::Approx(-std::log(1.0 - kBceEps)).epsilon(1e-6));
  CHECK(bce_loss(LikelihoodGrid::filled(Shape(2, 2), 0.5), t).value == doctest::Approx(std::log(2.0)));
  std::mt19937 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto [f, m] = gradcheck::random_fixture(Shape(4, 4), rng, 0.01);
    CHECK(gradcheck::compare(f, m, bce_loss).ok(1e-5));
  }
}

TEST_CASE("dice") {
  BinaryMask t(Shape(2, 5));
  for (std::size_t i : {0, 3, 6, 9}) t.set(i, true);
  CHECK(dice_loss(to_likelihood(t), t).value == doctest::Approx(0.0));
  CHECK(dice_loss(LikelihoodGrid::filled(Shape(2, 4), 0.0), BinaryMask(Shape(2, 4))).value == doctest::Approx(0.0));
  BinaryMask half(Shape(2, 4));
  for (std::size_t i = 0; i < 4; ++i) half.set(i, true);
  CHECK(dice_loss(LikelihoodGrid::filled(Shape(2, 4), 0.5), half).value == doctest::Approx(4.0 / 9.0));
  std::mt19937 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const auto [f, m] = gradcheck::random_fixture(Shape(4, 4), rng, 0.01);
    CHECK(gradcheck::compare(f, m, dice_loss).ok());
  }
}

TEST_CASE("combined modes") {
  const auto [f, t] = fixtures::weak_ring();
  const auto bce = bce_loss(f, t);
  LossConfig cfg;
  cfg.mode = LossMode::baseline;
  auto r = combined_loss(f, t, cfg);
  CHECK(r.value == bce.value);
  CHECK(r.gradient == bce.gradient);

  cfg.mode = LossMode::topocp;
  cfg.lambda_topo = 0.0;
  r = combined_loss(f, t, cfg);
  CHECK(r.value == bce.value);
  CHECK(r.gradient == bce.gradient);

  cfg.lambda_topo = 0.005;
  r = combined_loss(f, t, cfg);
  const auto topo = topo_loss(f, t, cfg);
  CHECK(r.value == doctest::Approx(0.995 * bce.value + 0.005 * topo.value));
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(r.gradient[i] == doctest::Approx(0.995 * bce.gradient[i] + 0.005 * topo.gradient[i]));

  cfg.mode = LossMode::hybrid;
  r = combined_loss(f, t, cfg);
  CHECK(r.value == doctest::Approx(bce.value + dice_loss(f, t).value));
}

TEST_CASE("analytic gradients match central differences on random fixtures") {
  std::mt19937 rng(2718);
  LossConfig topo = topo_only(), hybrid = topo_only(), tcp = topo_only();
  hybrid.mode = LossMode::hybrid;
  tcp.lambda_topo = 0.3;
  for (int trial = 0; trial < 8; ++trial) {
    const bool three = trial % 4 == 3;
    const Shape s = three ? Shape(3, 4, 3) : Shape(6, 6);
    LossConfig t3 = topo;
    t3.weights.K = three ? 2 : 1;
    const auto [f, m] = gradcheck::random_fixture(s, rng, 0.01);
    CAPTURE(trial);
    const auto rt = gradcheck::compare(f, m, [&](auto& x, auto& y) { return topo_loss(x, y, t3); });
    CHECK(rt.nonzero > 0);
    CHECK(rt.ok());
    CHECK(gradcheck::compare(f, m, [&](auto& x, auto& y) { return combined_loss(x, y, hybrid); }).ok());
    CHECK(gradcheck::compare(f, m, [&](auto& x, auto& y) { return combined_loss(x, y, tcp); }).ok());
  }
}

TEST_CASE("topological gradient is supported on critical cells") {
  std::mt19937 rng(12);
  const auto [f, m] = gradcheck::random_fixture(Shape(7, 7), rng, 0.01);
  const LossConfig cfg = topo_only();
  const auto r = topo_loss(f, m, cfg);
  const auto d = compute_persistence(f, {cfg.mp, Padding::twice});
  std::vector<bool> critical(f.size(), false);
  const auto vals = f.values();
  critical[static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin())] = true;
  for (int k = 0; k < 2; ++k)
    for (const auto& p : d.pairs(k))
      for (std::size_t cell : {p.birth_cell, p.death_cell}) {
        const Coord c = d.input_coords(cell);
        if (f.shape().contains(c)) critical[f.shape().index(c)] = true;
      }
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!critical[i]) CHECK(r.gradient[i] == 0.0);
}

TEST_CASE("batch loss is independent of the thread count") {
  std::mt19937 rng(55);
  std::vector<LikelihoodGrid> fs;
  std::vector<BinaryMask> ts;
  for (int i = 0; i < 12; ++i) {
    auto [f, m] = gradcheck::random_fixture(Shape(8, 8), rng, 0.01);
    fs.push_back(f);
    ts.push_back(m);
  }
  LossConfig cfg;
  set_max_threads(1);
  const auto one = batch_loss(fs, ts, cfg);
  set_max_threads(4);
  const auto four = batch_loss(fs, ts, cfg);
  set_max_threads(0);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    CHECK(one[i].value == four[i].value);
    CHECK(one[i].gradient == four[i].gradient);
    CHECK(one[i].value == combined_loss(fs[i], ts[i], cfg).value);
  }
}

TEST_CASE("loss argument validation") {
  const auto [f, t] = fixtures::weak_ring();
  LossConfig cfg;
  cfg.lambda_topo = 1.5;
  CHECK_THROWS_AS(combined_loss(f, t, cfg), ParameterError);
  cfg = {};
  cfg.mp = 1.0;
  CHECK_THROWS_AS(topo_loss(f, t, cfg), ParameterError);
  cfg = {};
  cfg.weights.omega = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(topo_loss(f, t, cfg), ParameterError);
  CHECK_THROWS_AS(bce_loss(f, BinaryMask(Shape(3, 3))), ShapeError);
  CHECK_THROWS_AS(parse_loss_mode("nope"), ParameterError);
}
