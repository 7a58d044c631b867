#include "blendkit/cli.hpp"

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "blendkit/error.hpp"
#include "blendkit/image.hpp"
#include "blendkit/metrics.hpp"
#include "blendkit/morphology.hpp"
#include "blendkit/optimizer.hpp"
#include "blendkit/parallel.hpp"
#include "blendkit/png_io.hpp"
#include "blendkit/poisson.hpp"
#include "blendkit/report.hpp"

namespace blendkit::cli {

namespace {

using nlohmann::ordered_json;

struct TaskFlags {
  std::string source, target, mask, offset;
  double threshold = 0.5;
};

struct RefineFlags {
  int erode = RefineParams{}.erode_iters;
  int dilate = RefineParams{}.dilate_iters;
  int radius = RefineParams{}.radius;
};

struct OptimizerFlags {
  StageConfig stage1 = StageConfig::stage1_defaults();
  StageConfig stage2 = StageConfig::stage2_defaults();
  double momentum = StageConfig{}.momentum;
  bool no_backtracking = false;
  bool no_stage2 = false;
  std::string init = "composite";
  std::uint64_t seed = 0;
  int record_every = 1;
};

struct PoissonFlags {
  double tol = PoissonOptions{}.tol;
  int max_iters = PoissonOptions{}.max_iters;
};

void add_task_flags(CLI::App* cmd, TaskFlags& f) {
  cmd->add_option("--source", f.source, "Source image PNG")->required();
  cmd->add_option("--target", f.target, "Target (background) image PNG")->required();
  cmd->add_option("--mask", f.mask, "Source-sized black-and-white mask PNG")->required();
  cmd->add_option("--offset", f.offset, "Top-left placement X,Y in the target")->required();
  cmd->add_option("--threshold", f.threshold, "Mask luma threshold")->capture_default_str();
}

void add_refine_flags(CLI::App* cmd, RefineFlags& f) {
  cmd->add_option("--erode", f.erode, "Erosion iterations")->capture_default_str();
  cmd->add_option("--dilate", f.dilate, "Dilation iterations")->capture_default_str();
  cmd->add_option("--radius", f.radius, "Structuring element radius")->capture_default_str();
}

void add_optimizer_flags(CLI::App* cmd, OptimizerFlags& f) {
  auto stage = [&](StageConfig& s, const std::string& n) {
    cmd->add_option("--w-grad" + n, s.weights.grad, "Stage " + n + " gradient weight")->capture_default_str();
    cmd->add_option("--w-style" + n, s.weights.style, "Stage " + n + " style weight")->capture_default_str();
    cmd->add_option("--w-content" + n, s.weights.content, "Stage " + n + " content weight")->capture_default_str();
    cmd->add_option("--w-sat" + n, s.weights.sat, "Stage " + n + " saturation weight")->capture_default_str();
    cmd->add_option("--iters" + n, s.iterations, "Stage " + n + " iterations")->capture_default_str();
    cmd->add_option("--step" + n, s.step_size, "Stage " + n + " initial step size")->capture_default_str();
  };
  stage(f.stage1, "1");
  stage(f.stage2, "2");
  cmd->add_option("--momentum", f.momentum, "Momentum for both stages")->capture_default_str();
  cmd->add_flag("--no-backtracking", f.no_backtracking, "Use a fixed step size");
  cmd->add_flag("--no-stage2", f.no_stage2, "Stop after stage 1");
  cmd->add_option("--init", f.init, "Initial block: composite or random")->capture_default_str()
      ->check(CLI::IsMember({"composite", "random"}));
  cmd->add_option("--seed", f.seed, "Seed for --init random")->capture_default_str();
  cmd->add_option("--record-every", f.record_every, "History sampling interval")->capture_default_str();
}

void add_poisson_flags(CLI::App* cmd, PoissonFlags& f) {
  cmd->add_option("--tol", f.tol, "Conjugate-gradient relative residual")->capture_default_str();
  cmd->add_option("--max-iters", f.max_iters, "Conjugate-gradient iteration cap")->capture_default_str();
}

Placement parse_offset(const std::string& text) {
  std::istringstream in(text);
  Placement p;
  char comma = 0;
  if (!(in >> p.offset_x >> comma >> p.offset_y) || comma != ',' || !(in >> std::ws).eof())
    throw ValidationError("--offset must look like X,Y, got '" + text + "'");
  return p;
}

struct LoadedTask {
  BlendTask task;
  BinaryMask refined;
};

LoadedTask load_task(const TaskFlags& t, const RefineFlags& r) {
  const Placement placement = parse_offset(t.offset);
  BlendTask task(load_png(t.source), load_png(t.target), load_mask(t.mask, t.threshold),
                 placement);
  BinaryMask refined = refine_mask(task.mask(), r.erode, r.dilate, StructuringElement(r.radius));
  return {std::move(task), std::move(refined)};
}

BlendRun make_run(LoadedTask lt, const OptimizerFlags& f) {
  BlendRun run{std::move(lt.task), std::move(lt.refined)};
  run.stage1 = f.stage1;
  run.stage2 = f.stage2;
  for (StageConfig* s : {&run.stage1, &run.stage2}) {
    s->momentum = f.momentum;
    s->backtracking = !f.no_backtracking;
    s->validate();
  }
  run.run_stage2 = !f.no_stage2;
  run.record_every = f.record_every;
  run.init = f.init == "random" ? InitMode::random : InitMode::composite;
  run.seed = f.seed;
  if (run.record_every < 1) throw ValidationError("--record-every must be >= 1");
  return run;
}

void record_task_flags(RunManifest& m, const TaskFlags& t) {
  m.flags["source"] = t.source;
  m.flags["target"] = t.target;
  m.flags["mask"] = t.mask;
  m.flags["offset"] = t.offset;
  m.flags["threshold"] = t.threshold;
  m.input_digests["source"] = file_digest(t.source);
  m.input_digests["target"] = file_digest(t.target);
  m.input_digests["mask"] = file_digest(t.mask);
}

void record_refine_flags(RunManifest& m, const RefineFlags& r) {
  m.flags["erode"] = r.erode;
  m.flags["dilate"] = r.dilate;
  m.flags["radius"] = r.radius;
}

void record_optimizer_flags(RunManifest& m, const BlendRun& run, const OptimizerFlags& f) {
  auto stage = [&](const StageConfig& s, const std::string& n) {
    m.flags["w-grad" + n] = s.weights.grad;
    m.flags["w-style" + n] = s.weights.style;
    m.flags["w-content" + n] = s.weights.content;
    m.flags["w-sat" + n] = s.weights.sat;
    m.flags["iters" + n] = s.iterations;
    m.flags["step" + n] = s.step_size;
  };
  stage(run.stage1, "1");
  stage(run.stage2, "2");
  m.flags["momentum"] = f.momentum;
  m.flags["no-backtracking"] = f.no_backtracking;
  m.flags["no-stage2"] = f.no_stage2;
  m.flags["init"] = f.init;
  m.flags["seed"] = f.seed;
  m.flags["record-every"] = f.record_every;
}

void record_poisson_flags(RunManifest& m, const PoissonFlags& p) {
  m.flags["tol"] = p.tol;
  m.flags["max-iters"] = p.max_iters;
}

PoissonOptions poisson_options(const PoissonFlags& p) {
  if (p.max_iters < 0) throw ValidationError("--max-iters must be non-negative");
  return {p.tol, p.max_iters};
}

void emit(const ordered_json& doc, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << doc.dump(2) << "\n";
  else
    write_json(doc, path);
}

ImageRGB pick_reference(const std::string& name, const ImageRGB& copy_paste,
                        const ImageRGB& target) {
  return name == "target" ? target : copy_paste;
}

ImageRGB contact_sheet(const std::vector<const ImageRGB*>& images) {
  const int h = images.front()->height(), w = images.front()->width();
  ImageRGB sheet(h, w * static_cast<int>(images.size()));
  for (std::size_t i = 0; i < images.size(); ++i)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        sheet.set_pixel(y, x + w * static_cast<int>(i), images[i]->pixel(y, x));
  return sheet;
}

void write_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << ordered_json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage image blending, seamless cloning and image metrics", "blendkit"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads (results do not depend on it)")->capture_default_str();

  // blend
  TaskFlags blend_task;
  RefineFlags blend_refine;
  OptimizerFlags blend_opt;
  std::string blend_out, blend_report_path, blend_history, blend_reference = "copy-paste";
  bool blend_wall_times = false;
  CLI::App* blend_cmd = app.add_subcommand("blend", "Two-stage loss-driven blend");
  add_task_flags(blend_cmd, blend_task);
  add_refine_flags(blend_cmd, blend_refine);
  add_optimizer_flags(blend_cmd, blend_opt);
  blend_cmd->add_option("--out", blend_out, "Output PNG")->required();
  blend_cmd->add_option("--report", blend_report_path, "JSON report (default: stdout)");
  blend_cmd->add_option("--history", blend_history, "Loss history CSV");
  blend_cmd->add_option("--reference", blend_reference, "Metric reference image")->capture_default_str()
      ->check(CLI::IsMember({"copy-paste", "target"}));
  blend_cmd->add_flag("--wall-times", blend_wall_times, "Include stage timings in the report");

  // refine-mask
  std::string refine_in, refine_out;
  double refine_threshold = 0.5;
  RefineFlags refine_flags;
  CLI::App* refine_cmd = app.add_subcommand("refine-mask", "Erode then dilate a mask");
  refine_cmd->add_option("--mask", refine_in, "Input mask PNG")->required();
  refine_cmd->add_option("--out", refine_out, "Output mask PNG")->required();
  refine_cmd->add_option("--threshold", refine_threshold, "Mask luma threshold")->capture_default_str();
  add_refine_flags(refine_cmd, refine_flags);

  // poisson
  TaskFlags poisson_task;
  RefineFlags poisson_refine;
  PoissonFlags poisson_flags;
  std::string poisson_out, poisson_report_path, poisson_reference = "copy-paste";
  CLI::App* poisson_cmd = app.add_subcommand("poisson", "Seamless-clone baseline");
  add_task_flags(poisson_cmd, poisson_task);
  add_refine_flags(poisson_cmd, poisson_refine);
  add_poisson_flags(poisson_cmd, poisson_flags);
  poisson_cmd->add_option("--out", poisson_out, "Output PNG")->required();
  poisson_cmd->add_option("--report", poisson_report_path, "JSON report (default: stdout)");
  poisson_cmd->add_option("--reference", poisson_reference, "Metric reference image")->capture_default_str()
      ->check(CLI::IsMember({"copy-paste", "target"}));

  // compare
  TaskFlags compare_task;
  RefineFlags compare_refine;
  OptimizerFlags compare_opt;
  PoissonFlags compare_poisson;
  std::string compare_dir, compare_reference = "copy-paste";
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Copy-paste, Poisson and two-stage on one task");
  add_task_flags(compare_cmd, compare_task);
  add_refine_flags(compare_cmd, compare_refine);
  add_optimizer_flags(compare_cmd, compare_opt);
  add_poisson_flags(compare_cmd, compare_poisson);
  compare_cmd->add_option("--out-dir", compare_dir, "Directory for reports, CSV and sheet")
      ->required();
  compare_cmd->add_option("--reference", compare_reference, "Metric reference image")->capture_default_str()
      ->check(CLI::IsMember({"copy-paste", "target"}));

  // metrics
  std::string metrics_image, metrics_reference, metrics_mask_a, metrics_mask_b, metrics_report;
  double metrics_threshold = 0.5;
  CLI::App* metrics_cmd = app.add_subcommand("metrics", "PSNR, SSIM, MSE, L_sat and IoU");
  metrics_cmd->add_option("--image", metrics_image, "Image PNG")->required();
  metrics_cmd->add_option("--reference", metrics_reference, "Reference PNG")->required();
  auto* mask_a = metrics_cmd->add_option("--mask-a", metrics_mask_a, "First mask for IoU");
  auto* mask_b = metrics_cmd->add_option("--mask-b", metrics_mask_b, "Second mask for IoU");
  mask_a->needs(mask_b);
  mask_b->needs(mask_a);
  metrics_cmd->add_option("--threshold", metrics_threshold, "Mask luma threshold")->capture_default_str();
  metrics_cmd->add_option("--report", metrics_report, "JSON report (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << "usage: " << sub->get_display_name() << " " << sub->help().substr(0, sub->help().find('\n'))
        << "\n";
    write_error(err, "usage", e.what());
    return kValidation;
  }

  set_thread_count(threads);

  try {
    if (*blend_cmd) {
      const BlendRun run = make_run(load_task(blend_task, blend_refine), blend_opt);
      const BlendResult result = blend(run);
      save_png(result.image, blend_out);

      RunManifest m{"blend", {}, {}, kToolVersion};
      record_task_flags(m, blend_task);
      record_refine_flags(m, blend_refine);
      record_optimizer_flags(m, run, blend_opt);
      m.flags["out"] = blend_out;
      m.flags["report"] = blend_report_path;
      m.flags["history"] = blend_history;
      m.flags["reference"] = blend_reference;
      m.flags["wall-times"] = blend_wall_times;

      const ImageRGB ref = pick_reference(blend_reference, result.copy_paste, run.task.target());
      const MetricReport report =
          blend_report(run, result, ref, blend_reference, blend_wall_times);
      if (!blend_history.empty()) {
        std::string csv = history_csv_header();
        append_history_csv(csv, result.stage1.history, 0);
        if (run.run_stage2)
          append_history_csv(csv, result.stage2.history, result.stage1.iterations_run);
        write_text(csv, blend_history);
      }
      emit(to_json(report, m), blend_report_path, out);
      return kOk;
    }

    if (*refine_cmd) {
      const BinaryMask mask = load_mask(refine_in, refine_threshold);
      const BinaryMask refined = refine_mask(mask, refine_flags.erode, refine_flags.dilate,
                                             StructuringElement(refine_flags.radius));
      save_mask(refined, refine_out);
      return kOk;
    }

    if (*poisson_cmd) {
      const PoissonOptions opts = poisson_options(poisson_flags);
      const LoadedTask lt = load_task(poisson_task, poisson_refine);
      const ImageRGB result = poisson_blend(lt.task, lt.refined, opts);
      save_png(result, poisson_out);

      RunManifest m{"poisson", {}, {}, kToolVersion};
      record_task_flags(m, poisson_task);
      record_refine_flags(m, poisson_refine);
      record_poisson_flags(m, poisson_flags);
      m.flags["out"] = poisson_out;
      m.flags["report"] = poisson_report_path;
      m.flags["reference"] = poisson_reference;
      const ImageRGB cp = paste_block(lt.task.target(), lt.task.source(), lt.refined,
                                      lt.task.placement());
      MetricReport report = measure(result, pick_reference(poisson_reference, cp, lt.task.target()),
                                    lt.task.target(), poisson_reference);
      attach_iou(report, lt.task.mask(), lt.refined);
      emit(to_json(report, m), poisson_report_path, out);
      return kOk;
    }

    if (*compare_cmd) {
      const PoissonOptions opts = poisson_options(compare_poisson);
      const BlendRun run = make_run(load_task(compare_task, compare_refine), compare_opt);
      const ImageRGB& target = run.task.target();
      const BlendResult two_stage = blend(run);
      const ImageRGB poisson = poisson_blend(run.task, run.refined_mask, opts);
      const ImageRGB& copy_paste = two_stage.copy_paste;
      const ImageRGB ref = pick_reference(compare_reference, copy_paste, target);

      RunManifest m{"compare", {}, {}, kToolVersion};
      record_task_flags(m, compare_task);
      record_refine_flags(m, compare_refine);
      record_optimizer_flags(m, run, compare_opt);
      record_poisson_flags(m, compare_poisson);
      m.flags["out-dir"] = compare_dir;
      m.flags["reference"] = compare_reference;

      std::filesystem::create_directories(compare_dir);
      const std::filesystem::path dir(compare_dir);
      struct Method {
        const char* name;
        const ImageRGB* image;
        MetricReport report;
      };
      std::vector<Method> methods;
      methods.push_back({"copy-paste", &copy_paste,
                         measure(copy_paste, ref, target, compare_reference)});
      methods.push_back({"poisson", &poisson, measure(poisson, ref, target, compare_reference)});
      methods.push_back({"two-stage", &two_stage.image,
                         blend_report(run, two_stage, ref, compare_reference)});

      std::string csv = "method,psnr_db,ssim,mse,l_sat_raw,l_sat_hinged\n";
      for (Method& meth : methods) {
        attach_iou(meth.report, run.task.mask(), run.refined_mask);
        write_json(to_json(meth.report, m), dir / (std::string(meth.name) + ".json"));
        csv += std::string(meth.name) + "," + format_number(meth.report.psnr_db) + "," +
               format_number(meth.report.ssim) + "," + format_number(meth.report.mse) + "," +
               format_number(meth.report.l_sat_raw) + "," +
               format_number(meth.report.l_sat_hinged) + "\n";
      }
      write_text(csv, dir / "compare.csv");
      save_png(contact_sheet({&copy_paste, &poisson, &two_stage.image}),
               dir / "contact_sheet.png");
      return kOk;
    }

    if (*metrics_cmd) {
      const ImageRGB image = load_png(metrics_image);
      const ImageRGB reference = load_png(metrics_reference);
      if (!image.same_shape(reference))
        throw ValidationError("--image and --reference differ in size");
      MetricReport report = measure(image, reference, reference, "reference");
      RunManifest m{"metrics", {}, {}, kToolVersion};
      m.flags["image"] = metrics_image;
      m.flags["reference"] = metrics_reference;
      m.flags["threshold"] = metrics_threshold;
      m.flags["report"] = metrics_report;
      m.input_digests["image"] = file_digest(metrics_image);
      m.input_digests["reference"] = file_digest(metrics_reference);
      if (!metrics_mask_a.empty()) {
        attach_iou(report, load_mask(metrics_mask_a, metrics_threshold),
                   load_mask(metrics_mask_b, metrics_threshold));
        m.flags["mask-a"] = metrics_mask_a;
        m.flags["mask-b"] = metrics_mask_b;
        m.input_digests["mask-a"] = file_digest(metrics_mask_a);
        m.input_digests["mask-b"] = file_digest(metrics_mask_b);
      }
      emit(to_json(report, m), metrics_report, out);
      return kOk;
    }
  } catch (const ValidationError& e) {
    write_error(err, e.kind(), e.what());
    return kValidation;
  } catch (const ConvergenceError& e) {
    write_error(err, e.kind(), e.what());
    return kDiverged;
  } catch (const DivergenceError& e) {
    write_error(err, e.kind(), e.what());
    return kDiverged;
  } catch (const Error& e) {
    write_error(err, e.kind(), e.what());
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    write_error(err, "unwritable", e.what());
    return kIo;
  }
  return kValidation;
}

}  // namespace blendkit::cli
