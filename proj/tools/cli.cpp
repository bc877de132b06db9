#include "cli.hpp"

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "topocp/fixtures.hpp"
#include "topocp/loss.hpp"
#include "topocp/metrics.hpp"
#include "topocp/nifti.hpp"
#include "topocp/optimizer.hpp"
#include "topocp/parallel.hpp"
#include "topocp/patches.hpp"
#include "topocp/persistence.hpp"
#include "topocp/report.hpp"

namespace topocp::cli {
namespace {

namespace fs = std::filesystem;

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Options shared by loss and demo.
struct LossFlags {
  std::string mode = "topocp";
  double lambda = 0.005;
  double mp = 0.01;
  std::vector<double> omega{1.0, 1.0};
  int K = 1;

  void add(CLI::App* app) {
    app->add_option("--mode", mode, "baseline, hybrid or topocp")->capture_default_str();
    app->add_option("--lambda", lambda, "Weight of the topological term")->capture_default_str();
    app->add_option("--mp", mp, "Minimum persistence")->capture_default_str();
    app->add_option("--omega", omega, "Weight per homology dimension (comma separated)")->delimiter(',');
    app->add_option("--K", K, "Highest homology dimension in the topological term")->capture_default_str();
  }

  LossConfig config() const {
    LossConfig c;
    c.mode = parse_loss_mode(mode);
    c.lambda_topo = lambda;
    c.mp = mp;
    c.weights.K = K;
    if (omega.size() > 3) throw ParameterError("at most three omega values");
    c.weights.omega = {1.0, 1.0, 1.0};
    for (std::size_t k = 0; k < omega.size(); ++k) c.weights.omega[k] = omega[k];
    c.validate();
    return c;
  }
};

BinaryMask read_mask(const std::string& path) { return nifti::read(path).mask(); }
LikelihoodGrid read_likelihood(const std::string& path) { return nifti::read(path).likelihood(); }

// pred/gt file pairs for eval, matched by file name.
std::vector<std::tuple<std::string, std::string, std::string>> pair_dirs(const std::string& pred_dir,
                                                                         const std::string& gt_dir) {
  std::map<std::string, std::string> preds;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(pred_dir, ec)) {
    if (e.is_regular_file() && e.path().extension() == ".nii") preds[e.path().filename().string()] = e.path().string();
  }
  if (ec) throw IoError(IoErrc::open_failed, 0, pred_dir + ": " + ec.message());
  std::vector<std::tuple<std::string, std::string, std::string>> out;
  for (const auto& [name, path] : preds) {
    const fs::path gt = fs::path(gt_dir) / name;
    if (!fs::exists(gt)) throw IoError(IoErrc::open_failed, 0, gt.string() + ": no ground truth for " + name);
    out.emplace_back(fs::path(name).stem().string(), path, gt.string());
  }
  if (out.empty()) throw IoError(IoErrc::open_failed, 0, pred_dir + ": no .nii files");
  return out;
}

void write_fixtures(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(IoErrc::open_failed, 0, dir + ": " + ec.message());
  auto p = [&](const char* name) { return (fs::path(dir) / name).string(); };
  nifti::write(fixtures::square_ring(8, 1), p("ring.nii"));
  nifti::write(fixtures::two_blobs(), p("two_blobs.nii"));
  nifti::write(fixtures::hollow_cube(), p("hollow_cube.nii"));
  nifti::write(fixtures::solid_torus(), p("torus.nii"));
  const auto weak = fixtures::weak_ring();
  nifti::write(weak.f, p("weak_ring_f.nii"));
  nifti::write(weak.target, p("weak_ring_t.nii"));
  const auto broken = fixtures::broken_ring();
  nifti::write(broken.f, p("broken_ring_init.nii"));
  nifti::write(broken.target, p("broken_ring_target.nii"));
  const auto noisy = fixtures::noisy_target_ring();
  nifti::write(noisy.f, p("noisy_ring_init.nii"));
  nifti::write(noisy.target, p("noisy_ring_target.nii"));
  const auto tunnel = fixtures::cup_with_tunnel();
  nifti::write(tunnel.gt, p("cup_gt.nii"));
  nifti::write(tunnel.pred, p("cup_tunnel.nii"));
  nifti::write(fixtures::dented_cup().pred, p("cup_dent.nii"));
  const auto big = fixtures::cup_big_tunnel();
  nifti::write(big.gt, p("cup11_gt.nii"));
  nifti::write(big.pred, p("cup11_big_tunnel.nii"));
  nifti::write(fixtures::cup_four_tunnels().pred, p("cup11_four_tunnels.nii"));
}

int dispatch(CLI::App& app, std::ostream& out, std::ostream& err, const std::vector<std::string>& args) {
  app.require_subcommand(1);

  // betti
  auto* betti_cmd = app.add_subcommand("betti", "Betti numbers of a mask");
  std::string betti_in;
  std::optional<double> betti_gamma;
  betti_cmd->add_option("--input", betti_in, "Mask (or likelihood with --threshold)")->required();
  betti_cmd->add_option("--threshold", betti_gamma, "Threshold a likelihood map first");

  // persistence
  auto* pers_cmd = app.add_subcommand("persistence", "Persistence diagram of a likelihood map");
  std::string pers_in, pers_out, pers_pad = "twice";
  double pers_mp = 0.01;
  pers_cmd->add_option("--input", pers_in)->required();
  pers_cmd->add_option("--out", pers_out, "Diagram CSV");
  pers_cmd->add_option("--mp", pers_mp)->capture_default_str();
  pers_cmd->add_option("--padding", pers_pad, "none, zero or twice")->capture_default_str();

  // loss
  auto* loss_cmd = app.add_subcommand("loss", "Loss value and gradient");
  std::string loss_pred, loss_gt, loss_grad;
  LossFlags loss_flags;
  loss_cmd->add_option("--pred", loss_pred)->required();
  loss_cmd->add_option("--gt", loss_gt)->required();
  loss_cmd->add_option("--grad", loss_grad, "Write the gradient volume (float64)");
  loss_flags.add(loss_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Segmentation metrics report");
  std::string eval_pred, eval_gt, eval_pred_dir, eval_gt_dir, eval_report, eval_csv, eval_subject;
  bool eval_no_lcc = false, eval_strict = false;
  double eval_mp = 0.01;
  int eval_radius = 3;
  std::size_t eval_expected_bn1 = 0;
  auto* o_pred = eval_cmd->add_option("--pred", eval_pred);
  auto* o_gt = eval_cmd->add_option("--gt", eval_gt);
  auto* o_pred_dir = eval_cmd->add_option("--pred-dir", eval_pred_dir, "Evaluate every .nii in this directory");
  auto* o_gt_dir = eval_cmd->add_option("--gt-dir", eval_gt_dir, "Ground truths, matched by file name");
  o_pred->excludes(o_pred_dir)->needs(o_gt);
  o_gt->excludes(o_gt_dir);
  o_pred_dir->needs(o_gt_dir);
  eval_cmd->add_option("--report", eval_report, "JSON report");
  eval_cmd->add_option("--csv", eval_csv, "CSV report");
  eval_cmd->add_option("--subject", eval_subject, "Subject id (single pair)");
  eval_cmd->add_flag("--no-lcc", eval_no_lcc, "Skip largest-component filtering of the prediction");
  eval_cmd->add_flag("--strict", eval_strict, "Fail when a metric is undefined");
  eval_cmd->add_option("--mp", eval_mp)->capture_default_str();
  eval_cmd->add_option("--radius", eval_radius, "Hole seed search radius")->capture_default_str();
  eval_cmd->add_option("--expected-bn1", eval_expected_bn1)->capture_default_str();

  // patches
  auto* patch_cmd = app.add_subcommand("patches", "Extract multiview patches");
  std::string patch_in, patch_mask, patch_out, patch_axes = "axial,coronal,sagittal";
  PatchSpec patch_spec;
  bool patch_raw = false;
  patch_cmd->add_option("--input", patch_in)->required();
  patch_cmd->add_option("--mask", patch_mask)->required();
  patch_cmd->add_option("--out", patch_out)->required();
  patch_cmd->add_option("--size", patch_spec.size)->capture_default_str();
  patch_cmd->add_option("--stride", patch_spec.stride)->capture_default_str();
  patch_cmd->add_option("--axes", patch_axes)->capture_default_str();
  patch_cmd->add_flag("--no-standardize", patch_raw, "Keep raw intensities");

  // aggregate
  auto* agg_cmd = app.add_subcommand("aggregate", "Aggregate patch likelihoods into a volume");
  std::vector<std::string> agg_dirs;
  std::vector<std::size_t> agg_dims;
  std::string agg_prob, agg_mask;
  bool agg_lcc = false;
  agg_cmd->add_option("--patches", agg_dirs, "Patch directories (one per model)")->required();
  agg_cmd->add_option("--dims", agg_dims, "Volume extents X,Y,Z")->delimiter(',')->expected(3);
  agg_cmd->add_option("--out-prob", agg_prob);
  agg_cmd->add_option("--out-mask", agg_mask);
  agg_cmd->add_flag("--lcc", agg_lcc, "Keep only the largest component of the mask");

  // demo
  auto* demo_cmd = app.add_subcommand("demo", "Gradient descent on a likelihood map");
  std::string demo_target, demo_init, demo_traj, demo_out;
  std::size_t demo_steps = 500;
  double demo_lr = 0.5;
  LossFlags demo_flags;
  demo_cmd->add_option("--target", demo_target)->required();
  demo_cmd->add_option("--init", demo_init)->required();
  demo_cmd->add_option("--steps", demo_steps)->capture_default_str();
  demo_cmd->add_option("--lr", demo_lr)->capture_default_str();
  demo_cmd->add_option("--traj", demo_traj, "Trajectory CSV");
  demo_cmd->add_option("--out", demo_out, "Final likelihood volume");
  demo_flags.add(demo_cmd);

  auto* gen_cmd = app.add_subcommand("gen-fixtures", "");
  gen_cmd->group("");
  std::string gen_out;
  gen_cmd->add_option("--out", gen_out)->required();

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (*betti_cmd) {
    const auto vol = nifti::read(betti_in);
    const BinaryMask m = betti_gamma ? threshold(vol.likelihood(), *betti_gamma) : vol.mask();
    out << to_string(betti_numbers(m)) << '\n';
    return kOk;
  }

  if (*pers_cmd) {
    PersistenceOptions po;
    po.min_persistence = pers_mp;
    if (pers_pad == "none") po.padding = Padding::none;
    else if (pers_pad == "zero") po.padding = Padding::zero;
    else if (pers_pad == "twice") po.padding = Padding::twice;
    else throw ParameterError("unknown padding '" + pers_pad + "'");
    const auto d = compute_persistence(read_likelihood(pers_in), po);
    for (int k = 0; k < 3; ++k) out << "dim" << k << " pairs " << d.count(k) << '\n';
    if (!pers_out.empty()) write_diagram_csv(d, pers_out);
    return kOk;
  }

  if (*loss_cmd) {
    const LossConfig cfg = loss_flags.config();
    const auto f = read_likelihood(loss_pred);
    const auto t = read_mask(loss_gt);
    const LossResult r = combined_loss(f, t, cfg);
    out << "loss " << real(r.value) << '\n';
    out << "bce " << real(r.bce) << '\n';
    out << "dice " << real(r.dice) << '\n';
    out << "topo " << real(r.topo) << '\n';
    for (int k = 0; k <= std::min(cfg.weights.K, f.rank() - 1); ++k) {
      out << "topo_dim" << k << ' ' << real(r.per_dim[static_cast<std::size_t>(k)]) << '\n';
    }
    if (!loss_grad.empty()) nifti::write(r.gradient, loss_grad, {nifti::Datatype::float64, false});
    return kOk;
  }

  if (*eval_cmd) {
    if (eval_pred.empty() && eval_pred_dir.empty()) throw CLI::RequiredError("--pred or --pred-dir");
    EvalOptions opts;
    opts.largest_component = !eval_no_lcc;
    opts.hole.mp = eval_mp;
    opts.hole.radius = eval_radius;
    opts.expected.bn1 = eval_expected_bn1;
    if (!(eval_mp >= 0.0 && eval_mp < 1.0)) throw ParameterError("mp must lie in [0, 1)");

    std::vector<std::tuple<std::string, std::string, std::string>> jobs;
    if (!eval_pred.empty()) {
      jobs.emplace_back(eval_subject.empty() ? fs::path(eval_pred).stem().string() : eval_subject, eval_pred, eval_gt);
    } else {
      jobs = pair_dirs(eval_pred_dir, eval_gt_dir);
    }
    std::vector<MetricsReport> reports(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    const auto n = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for num_threads(max_threads()) schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      try {
        const auto& [id, pp, gp] = jobs[u];
        const auto gt = nifti::read(gp);
        reports[u] = evaluate(read_mask(pp), gt.mask(), opts, id);
      } catch (...) {
        errors[u] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    bool undefined = false;
    for (const auto& r : reports) {
      out << r.subject_id << ": dsc " << format_real(r.dsc) << "  assd_mm "
          << (r.assd_mm ? format_real(*r.assd_mm) : "undefined") << "  bne1 " << r.bne.bn1 << "  hole_ratio "
          << (r.hole_ratio ? format_real(*r.hole_ratio) : "undefined") << '\n';
      if (r.gt_bn1 != 0) err << "warning: " << r.subject_id << ": ground truth has BN1 = " << r.gt_bn1 << '\n';
      undefined = undefined || !r.assd_mm || !r.hole_ratio;
    }
    if (!eval_report.empty()) write_report(reports, eval_report, ReportFormat::json);
    if (!eval_csv.empty()) write_report(reports, eval_csv, ReportFormat::csv);
    if (eval_strict && undefined) throw ComputationError("a metric is undefined (empty mask)");
    return kOk;
  }

  if (*patch_cmd) {
    patch_spec.standardize = !patch_raw;
    patch_spec.axes.clear();
    std::stringstream ss(patch_axes);
    for (std::string a; std::getline(ss, a, ',');) patch_spec.axes.push_back(parse_view(a));
    patch_spec.validate();
    const auto vol = nifti::read(patch_in);
    const auto brain = read_mask(patch_mask);
    PatchDir dir{vol.values.shape(), patch_spec.size, patch_spec.stride,
                 extract_patches(vol.values, brain, patch_spec)};
    if (dir.patches.empty()) err << "warning: brain mask is empty, no patches written\n";
    write_patch_dir(dir, patch_out);
    out << dir.patches.size() << " patches\n";
    return kOk;
  }

  if (*agg_cmd) {
    std::vector<PatchRecord> all;
    std::optional<Shape> vol;
    for (const auto& d : agg_dirs) {
      PatchDir pd = read_patch_dir(d);
      if (vol && !(*vol == pd.volume)) throw ShapeError("patch directories disagree on volume extents");
      vol = pd.volume;
      for (auto& p : pd.patches) all.push_back(std::move(p));
    }
    if (!agg_dims.empty()) {
      const Shape s(agg_dims[0], agg_dims[1], agg_dims[2]);
      if (!(s == *vol)) throw ShapeError("--dims " + s.to_string() + " does not match the patch index " + vol->to_string());
    }
    Aggregation a = aggregate(all, *vol);
    if (!a.covered) err << "warning: no voxel is covered by a prediction\n";
    if (agg_lcc) a.mask = largest_cc(a.mask);
    if (!agg_prob.empty()) nifti::write(a.likelihood, agg_prob);
    if (!agg_mask.empty()) nifti::write(a.mask, agg_mask);
    out << all.size() << " predictions, " << a.mask.count() << " foreground voxels\n";
    return kOk;
  }

  if (*demo_cmd) {
    const LossConfig cfg = demo_flags.config();
    const auto run = optimize_likelihood(read_likelihood(demo_init), read_mask(demo_target), cfg, demo_steps, demo_lr);
    if (!demo_traj.empty()) write_trajectory_csv(run, demo_traj);
    if (!demo_out.empty()) nifti::write(run.final, demo_out);
    out << "steps " << run.steps << "  loss " << real(run.trajectory.front().loss) << " -> "
        << real(run.trajectory.back().loss) << "  bn1 " << run.trajectory.front().bn1 << " -> "
        << run.trajectory.back().bn1 << '\n';
    return kOk;
  }

  if (*gen_cmd) {
    write_fixtures(gen_out);
    return kOk;
  }
  return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topology-aware segmentation losses and metrics"};
  app.name(args.empty() ? "topocp" : fs::path(args[0]).filename().string());
  try {
    return dispatch(app, out, err, args);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kParameter;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kParameter;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kComputation;
  }
}

}  // namespace topocp::cli
