// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "gradcheck.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "topocp/fixtures.hpp"
#include "topocp/loss.hpp"
#include "topocp/metrics.hpp"
#include "topocp/nifti.hpp"
#include "topocp/optimizer.hpp"
#include "topocp/parallel.hpp"
#include "topocp/patches.hpp"
#include "topocp/persistence.hpp"

using namespace topocp;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

BinaryMask superlevel(const Grid<double>& g, double gamma) {
  BinaryMask m(g.shape());
  for (std::size_t i = 0; i < g.size(); ++i) m.set(i, g[i] >= gamma);
  return m;
}

bool same_betti(const PersistenceDiagram& d, const oracle::Betti& b, double gamma) {
  return bars_alive(d, 0, gamma) == static_cast<std::size_t>(b.bn0) &&
         bars_alive(d, 1, gamma) == static_cast<std::size_t>(b.bn1) &&
         bars_alive(d, 2, gamma) == static_cast<std::size_t>(b.bn2);
}

Outcome level_set_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937 rng(1);
  const std::vector<double> levels{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t checks = 0;
  for (int g = 0; g < 250 && o.pass; ++g) {
    const Shape s = g < 200 ? Shape(6, 6) : Shape(4, 4, 4);
    const LikelihoodGrid f(s, oracle::random_levels(s.size(), rng, levels));
    const auto dz = compute_persistence(f, {0.0, Padding::zero});
    const auto dt = compute_persistence(f, {0.0, Padding::twice});
    const auto twice = pad_twice(f).grid();
    for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
      const double gamma = 0.5 * (levels[l] + levels[l + 1]);
      if (!same_betti(dz, oracle::betti(threshold(f, gamma)), gamma) ||
          !same_betti(dt, oracle::betti(superlevel(twice, gamma)), gamma)) {
        o.fail(fmt("grid %d threshold %.2f", g, gamma));
        break;
      }
      checks += 2;
    }
  }
  const double t = seconds_since(t0);
  if (t >= 30.0) o.fail(fmt("runtime %.1f s", t));
  if (o.pass) o.detail = fmt("%zu threshold checks on 250 grids in %.2f s", checks, t);
  return o;
}

Outcome binary_specialization() {
  Outcome o;
  std::mt19937 rng(2);
  std::bernoulli_distribution coin(0.5);
  std::size_t pairs = 0;
  for (int trial = 0; trial < 50 && o.pass; ++trial) {
    const Shape s = trial % 2 ? Shape(7, 8, 6) : Shape(16, 13);
    BinaryMask m(s);
    for (std::size_t i = 0; i < s.size(); ++i) m.set(i, coin(rng));
    const auto d = compute_persistence(to_likelihood(m), {0.0, Padding::zero});
    const auto b = betti_numbers(m);
    for (int k = 0; k < 3; ++k) {
      if (d.count(k) != b[k]) o.fail(fmt("mask %d dim %d: %zu pairs, betti %zu", trial, k, d.count(k), b[k]));
      for (const auto& p : d.pairs(k)) {
        if (p.birth != 0.0 || p.death != 1.0) o.fail(fmt("mask %d: pair (%g, %g)", trial, p.birth, p.death));
        ++pairs;
      }
    }
  }
  if (o.pass) o.detail = fmt("50 masks, %zu pairs, all (0, 1)", pairs);
  return o;
}

Outcome betti_fixtures() {
  Outcome o;
  const std::vector<std::tuple<const char*, BinaryMask, BettiVector>> cases{
      {"ring", fixtures::square_ring(8, 1), {1, 1, 0}},
      {"two blobs", fixtures::two_blobs(), {2, 0, 0}},
      {"hollow cube", fixtures::hollow_cube(), {1, 0, 1}},
      {"solid torus", fixtures::solid_torus(), {1, 1, 0}},
  };
  std::string got;
  for (const auto& [name, m, expect] : cases) {
    const auto b = betti_numbers(m);
    if (!(b.bn0 == expect.bn0 && b.bn1 == expect.bn1 && b.bn2 == expect.bn2)) {
      o.fail(fmt("%s gives (%s)", name, to_string(b).c_str()));
    }
    got += std::string(got.empty() ? "" : ", ") + name + " (" + to_string(b) + ")";
  }
  if (o.pass) o.detail = got;
  return o;
}

Outcome gradient_checks() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937 rng(4);
  LossConfig hybrid, tcp;
  hybrid.mode = LossMode::hybrid;
  tcp.mode = LossMode::topocp;
  double worst = 0.0;
  std::size_t nonzero = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const bool three = trial % 5 == 4;
    const Shape s = three ? Shape(3, 4, 3) : Shape(6, 6);
    LossConfig topo;
    topo.weights.K = three ? 2 : 1;
    tcp.weights.K = topo.weights.K;
    const auto [f, t] = gradcheck::random_fixture(s, rng, topo.mp);
    const std::vector<std::pair<const char*, gradcheck::LossFn>> losses{
        {"bce", [](auto& x, auto& y) { return bce_loss(x, y); }},
        {"dice", [](auto& x, auto& y) { return dice_loss(x, y); }},
        {"topo", [&](auto& x, auto& y) { return topo_loss(x, y, topo); }},
        {"hybrid", [&](auto& x, auto& y) { return combined_loss(x, y, hybrid); }},
        {"topocp", [&](auto& x, auto& y) { return combined_loss(x, y, tcp); }},
    };
    for (const auto& [name, fn] : losses) {
      const auto r = gradcheck::compare(f, t, fn, 1e-4);
      worst = std::max(worst, r.worst_rel);
      nonzero += r.nonzero;
      if (!r.ok()) o.fail(fmt("fixture %d %s: rel %.3g, zero-entry fd %.3g", trial, name, r.worst_rel, r.worst_abs_zero));
      if (r.nonzero == 0) o.fail(fmt("fixture %d %s: gradient identically zero", trial, name));
    }
  }
  const double t = seconds_since(t0);
  if (t >= 60.0) o.fail(fmt("runtime %.1f s", t));
  if (o.pass) o.detail = fmt("100 checks, %zu nonzero components, worst rel error %.2e, %.2f s", nonzero, worst, t);
  return o;
}

Outcome hole_repair_demo() {
  Outcome o;
  const auto t0 = Clock::now();
  LossConfig cfg;
  cfg.mode = LossMode::topocp;
  const auto broken = fixtures::broken_ring();
  const auto run = optimize_likelihood(broken.f, broken.target, cfg, 500, 0.5);
  std::size_t reached = 0;
  for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
    if (run.trajectory[i].bn1 == 1) {
      reached = i;
      break;
    }
  }
  if (reached == 0) o.fail("topocp run never reaches BN1 = 1");

  LossConfig base;
  base.mode = LossMode::baseline;
  const auto noisy = fixtures::noisy_target_ring();
  const auto brun = optimize_likelihood(noisy.f, noisy.target, base, 500, 0.5);
  for (const auto& p : brun.trajectory) {
    if (p.bn1 == 1) {
      o.fail("baseline run on the noisy target closes the ring");
      break;
    }
  }
  const double t = seconds_since(t0);
  if (t >= 60.0) o.fail(fmt("runtime %.1f s", t));
  if (o.pass) o.detail = fmt("topocp BN1 = 1 at step %zu, baseline stays at BN1 = %zu, %.2f s", reached,
                             brun.trajectory.back().bn1, t);
  return o;
}

Outcome hole_ratio_fixtures() {
  Outcome o;
  auto expect_hr = [&](const char* name, const fixtures::ShellCase& c, double expected) {
    const auto r = evaluate(c.pred, c.gt);
    if (!r.hole_ratio || *r.hole_ratio != expected) {
      o.fail(fmt("%s: HR %s, expected %.9g", name, r.hole_ratio ? fmt("%.9g", *r.hole_ratio).c_str() : "undefined",
                 expected));
    }
    return r;
  };
  const auto tunnel = fixtures::cup_with_tunnel();
  const auto rt = expect_hr("tunnel", tunnel, static_cast<double>(tunnel.removed) /
                                                  static_cast<double>(tunnel.gt.count()));
  const auto dent = fixtures::dented_cup();
  const auto rd = expect_hr("dent", dent, 0.0);
  if (rd.counts.fn == 0) o.fail("dent has no false negatives");

  const auto big = fixtures::cup_big_tunnel(), four = fixtures::cup_four_tunnels();
  const auto rb = expect_hr("big tunnel", big, static_cast<double>(big.removed) / static_cast<double>(big.gt.count()));
  const auto rf = expect_hr("four tunnels", four, static_cast<double>(four.removed) / static_cast<double>(four.gt.count()));
  if (!(rb.bne.bn1 < rf.bne.bn1)) o.fail(fmt("BNE1 big %zu vs four %zu", rb.bne.bn1, rf.bne.bn1));
  if (rb.hole_ratio && rf.hole_ratio && !(*rb.hole_ratio > *rf.hole_ratio)) o.fail("HR big not above HR four");
  if (o.pass) {
    o.detail = fmt("tunnel %zu/%zu, dent 0 with FN %zu, big BNE1 %zu HR %.4f vs four BNE1 %zu HR %.4f",
                   rt.fn_holes, tunnel.gt.count(), rd.counts.fn, rb.bne.bn1, *rb.hole_ratio, rf.bne.bn1,
                   *rf.hole_ratio);
  }
  return o;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "topocp");
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream is(p);
  return nlohmann::json::parse(is);
}

Outcome metric_sanity(const fs::path& work) {
  Outcome o;
  // BNE1 is measured against the expected BN1, so looped shapes pass it.
  const std::vector<std::tuple<std::string, BinaryMask, int>> masks{
      {"cup", fixtures::cup_with_tunnel().gt, 0},        {"cup11", fixtures::cup_big_tunnel().gt, 0},
      {"hollow", fixtures::hollow_cube(), 0},            {"blobs", fixtures::two_blobs(), 0},
      {"ring", fixtures::square_ring(8, 1), 1},          {"tunnel", fixtures::cup_with_tunnel().pred, 1}};
  for (const auto& [name, m, expected] : masks) {
    const auto path = (work / (name + ".nii")).string(), rep = (work / (name + ".json")).string();
    nifti::write(m, path);
    std::vector<std::string> args{"eval", "--pred", path, "--gt", path, "--report", rep, "--expected-bn1",
                                  std::to_string(expected)};
    // largest-component filtering would drop one blob
    if (name == "blobs") args.push_back("--no-lcc");
    if (run_cli(args) != 0) {
      o.fail(name + ": eval exited nonzero");
      continue;
    }
    const auto j = read_json(rep)[0];
    if (!(j["dsc"] == 1.0 && j["assd_mm"] == 0.0 && j["bne1"] == 0 && j["hole_ratio"] == 0.0)) {
      o.fail(name + ": identity report " + j.dump());
    }
  }

  BinaryMask a(Shape(8, 8)), b(Shape(8, 8));
  for (std::ptrdiff_t i = 2; i < 4; ++i)
    for (std::ptrdiff_t j = 2; j < 4; ++j) {
      a.set({i, j, 0}, true);
      b.set({i, j + 1, 0}, true);
    }
  nifti::write(a, (work / "sq_a.nii").string());
  nifti::write(b, (work / "sq_b.nii").string());
  run_cli({"eval", "--pred", (work / "sq_a.nii").string(), "--gt", (work / "sq_b.nii").string(), "--report",
           (work / "sq.json").string()});
  const double d = read_json(work / "sq.json")[0]["dsc"];
  if (d != 0.5) o.fail(fmt("translated square DSC %g", d));

  std::mt19937 rng(7);
  std::bernoulli_distribution coin(0.3);
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    BinaryMask p(Shape(12, 10, 9)), g(Shape(12, 10, 9));
    for (std::size_t i = 0; i < p.size(); ++i) {
      p.set(i, coin(rng));
      g.set(i, coin(rng));
    }
    const auto base = assd(p, g, {1.0, 1.0, 1.0});
    for (double s : {0.25, 0.7, 2.0, 3.3}) {
      const auto scaled = assd(p, g, {s, s, s});
      const double err = std::abs(*scaled - s * *base) / (s * *base);
      worst = std::max(worst, err);
    }
  }
  if (worst > 1e-9) o.fail(fmt("ASSD scaling relative error %.3g", worst));
  if (o.pass) o.detail = fmt("6 identity pairs via CLI eval, translated DSC %g, ASSD scaling error %.1e", d, worst);
  return o;
}

Outcome io_robustness() {
  Outcome o;
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t roundtrips = 0;
  for (auto t : {nifti::Datatype::uint8, nifti::Datatype::int16, nifti::Datatype::float32, nifti::Datatype::float64}) {
    for (bool swap : {false, true}) {
      for (const Shape& s : {Shape(9, 4), Shape(5, 6, 7)}) {
        Grid<double> g(s, 0.0, {0.9, 1.1, 3.0});
        for (auto& v : g.values()) {
          const double x = u(rng);
          switch (t) {
            case nifti::Datatype::uint8: v = std::floor(x * 256.0); break;
            case nifti::Datatype::int16: v = std::floor(x * 65536.0) - 32768.0; break;
            case nifti::Datatype::float32: v = static_cast<float>(x * 1e3 - 500.0); break;
            case nifti::Datatype::float64: v = x * 1e9 - 3e8; break;
          }
        }
        const auto back = nifti::parse(nifti::serialize(g, {t, swap}));
        if (!(back.values.shape() == s) || std::memcmp(back.values.data(), g.data(), g.size() * sizeof(double)) != 0) {
          o.fail(fmt("round trip datatype %d swap %d", static_cast<int>(t), swap));
        }
        ++roundtrips;
      }
    }
  }

  const auto good = nifti::serialize(Grid<double>(Shape(6, 5, 4), 0.25), {nifti::Datatype::float32, false});
  std::uniform_int_distribution<std::size_t> cut(0, good.size() - 1), pos(0, nifti::kVoxOffset - 1);
  std::uniform_int_distribution<int> byte(0, 255);
  std::size_t errors = 0, corrupt_ok = 0;
  for (int t = 0; t < 1000; ++t) {
    auto b = good;
    b.resize(cut(rng));
    try {
      nifti::parse(b);
      o.fail(fmt("truncation to %zu bytes parsed", b.size()));
    } catch (const IoError&) {
      ++errors;
    }
  }
  for (int t = 0; t < 1000; ++t) {
    auto b = good;
    for (int k = 0; k < 4; ++k) b[pos(rng)] = static_cast<std::uint8_t>(byte(rng));
    try {
      nifti::parse(b);
      ++corrupt_ok;
    } catch (const Error&) {
    }
  }
  if (o.pass) {
    o.detail = fmt("%zu bit-exact round trips, %zu/1000 truncations rejected, 1000 header corruptions survived (%zu parsed)",
                   roundtrips, errors, corrupt_ok);
  }
  return o;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

Outcome performance() {
  Outcome o;
  const auto target = fixtures::square_ring(64, 12, 3);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(target.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.6 * (target[i] ? 1.0 : 0.0) + 0.4 * u(rng);
  const LikelihoodGrid f(target.shape(), v);
  std::vector<double> ms;
  for (int rep = 0; rep < 31; ++rep) {
    const auto t0 = Clock::now();
    const auto d = compute_persistence(f, {0.01, Padding::twice});
    const auto l = topo_loss(f, target, {});
    ms.push_back(1e3 * seconds_since(t0));
    if (d.count(0) == 0 || !std::isfinite(l.value)) o.fail("degenerate patch result");
  }
  const double patch_ms = median(ms);
  if (patch_ms > 10.0) o.fail(fmt("patch median %.2f ms", patch_ms));

  const std::size_t n = 128;
  const Shape s(n, n, n);
  BinaryMask gt(s), pred(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Coord c = s.coords(i);
    const double r = std::hypot(c[0] - 63.5, c[1] - 63.5, c[2] - 63.5);
    const double r2 = std::hypot(c[0] - 64.0, c[1] - 63.0, c[2] - 63.5);
    gt.set(i, r >= 40 && r <= 48);
    bool p = r2 >= 40.5 && r2 <= 48;
    for (int t = 0; t < 6; ++t) {
      if (std::abs(c[1] - (30 + 12 * t)) <= 1 && std::abs(c[2] - 64) <= 1 && c[0] < 64) p = false;
    }
    pred.set(i, p);
  }
  const auto t0 = Clock::now();
  const auto r = evaluate(pred, gt);
  const double eval_s = seconds_since(t0);
  if (eval_s > 10.0) o.fail(fmt("128^3 eval %.2f s", eval_s));
  if (!r.assd_mm || !r.hole_ratio) o.fail("128^3 eval left a metric undefined");
  if (o.pass) o.detail = fmt("64x64 patch median %.2f ms, 128^3 eval %.2f s (%d threads)", patch_ms, eval_s, max_threads());
  return o;
}

Outcome pipeline_roundtrip(const fs::path& work) {
  Outcome o;
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> extent(14, 30);
  std::size_t covered = 0;
  for (int t = 0; t < 10 && o.pass; ++t) {
    const Shape s(extent(rng), extent(rng), extent(rng));
    Grid<double> vol(s, 0.0);
    BinaryMask brain(s);
    const double c0 = 0.5 * s.extent(0), c1 = 0.5 * s.extent(1), c2 = 0.5 * s.extent(2);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Coord c = s.coords(i);
      const double d = std::pow((c[0] - c0) / (0.4 * s.extent(0)), 2) + std::pow((c[1] - c1) / (0.4 * s.extent(1)), 2) +
                       std::pow((c[2] - c2) / (0.35 * s.extent(2)), 2);
      brain.set(i, d <= 1.0);
      vol[i] = static_cast<float>(u(rng));
    }
    PatchSpec spec;
    spec.size = 12;
    spec.stride = 4;
    spec.standardize = false;
    const fs::path dir = work / fmt("patches_%d", t);
    write_patch_dir({s, spec.size, spec.stride, extract_patches(vol, brain, spec)}, dir.string());
    const auto a = aggregate(read_patch_dir(dir.string()).patches, s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (brain[i] && a.coverage[i] == 0) o.fail(fmt("volume %d: brain voxel %zu uncovered", t, i));
      if (a.coverage[i] == 0) continue;
      ++covered;
      const bool source = (brain[i] ? vol[i] : 0.0) >= 0.5;
      if (a.mask[i] != source) {
        o.fail(fmt("volume %d: voxel %zu differs", t, i));
        break;
      }
    }
  }
  if (o.pass) o.detail = fmt("10 volumes through patch directories, %zu covered voxels identical", covered);
  return o;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "topocp_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"level-set oracle", level_set_oracle},
      {"binary specialization", binary_specialization},
      {"Betti fixtures", betti_fixtures},
      {"gradient checks", gradient_checks},
      {"hole-repair demo", hole_repair_demo},
      {"hole ratio fixtures", hole_ratio_fixtures},
      {"metric sanity", [&] { return metric_sanity(work); }},
      {"I/O round trip and fuzzing", io_robustness},
      {"performance", performance},
      {"pipeline round trip", [&] { return pipeline_roundtrip(work); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(work);
  return failed;
}
