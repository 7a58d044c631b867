#include "blendkit/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "blendkit/error.hpp"

namespace blendkit {

namespace {

constexpr int kMaxHalvings = 40;
constexpr double kMaxGrowth = 1e12;

struct Descent {
  const LossContext& ctx;
  const StageConfig& cfg;
  int record_every;
};

// Region pixels are the only variables; everything else stays bit-identical
// to the starting composite.
StageResult descend(ImageRGB x, const Descent& d) {
  const auto start = std::chrono::steady_clock::now();
  const BinaryMask& region = d.ctx.region;
  std::vector<std::size_t> vars;
  for (int y = 0; y < x.height(); ++y)
    for (int px = 0; px < x.width(); ++px)
      if (region.at(y, px))
        for (int c = 0; c < 3; ++c) vars.push_back(x.index(y, px, c));

  StageResult res;
  TotalLoss cur = total_loss(x, d.ctx, d.cfg.weights);
  res.history.push_back({0, cur.breakdown});

  std::vector<double> velocity(vars.size(), 0.0);
  double step = d.cfg.step_size;
  const double max_step = d.cfg.step_size * kMaxGrowth;

  auto propose = [&](double s, const std::vector<double>& v) {
    ImageRGB cand = x;
    auto cv = cand.values();
    const auto g = cur.grad.values();
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const std::size_t i = vars[k];
      cv[i] = std::clamp(cv[i] + d.cfg.momentum * v[k] - s * g[i], 0.0, 1.0);
    }
    return cand;
  };

  int it = 0;
  for (; it < d.cfg.iterations && !vars.empty(); ++it) {
    ImageRGB next;
    TotalLoss next_loss;
    if (!d.cfg.backtracking) {
      next = propose(step, velocity);
      next_loss = total_loss(next, d.ctx, d.cfg.weights);
    } else {
      const double base = std::min(step * 2.0, max_step);
      bool accepted = false;
      for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
        step = base;
        for (int h = 0; h <= kMaxHalvings; ++h, step *= 0.5) {
          next = propose(step, velocity);
          next_loss = total_loss(next, d.ctx, d.cfg.weights);
          if (next_loss.breakdown.total <= cur.breakdown.total) {
            accepted = true;
            break;
          }
        }
        if (!accepted) std::fill(velocity.begin(), velocity.end(), 0.0);
      }
      if (!accepted) break;  // no descent direction left
    }
    const auto xv = x.values();
    const auto nv = next.values();
    bool moved = false;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      velocity[k] = nv[vars[k]] - xv[vars[k]];
      moved = moved || velocity[k] != 0.0;
    }
    x = std::move(next);
    cur = std::move(next_loss);
    if (d.record_every > 0 && ((it + 1) % d.record_every == 0 || it + 1 == d.cfg.iterations))
      res.history.push_back({it + 1, cur.breakdown});
    if (!moved) {
      ++it;
      break;
    }
  }
  if (res.history.back().iteration != it) res.history.push_back({it, cur.breakdown});

  res.iterations_run = it;
  res.final_loss = cur.breakdown;
  res.image = std::move(x);
  res.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

ImageRGB initial_composite(const BlendRun& run) {
  const BlendTask& t = run.task;
  if (run.init == InitMode::composite)
    return paste_block(t.target(), t.source(), run.refined_mask, t.placement());
  std::mt19937_64 rng(run.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  ImageRGB block(t.source().height(), t.source().width());
  for (int y = 0; y < block.height(); ++y)
    for (int x = 0; x < block.width(); ++x)
      if (run.refined_mask.at(y, x))
        for (int c = 0; c < 3; ++c) block.at(y, x, c) = uni(rng);
  return paste_block(t.target(), block, run.refined_mask, t.placement());
}

}  // namespace

void StageConfig::validate() const {
  weights.validate();
  if (iterations < 0) throw ValidationError("iteration count must be non-negative");
  if (!std::isfinite(step_size) || step_size <= 0.0)
    throw ValidationError("step size must be finite and positive");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw ValidationError("momentum must lie in [0,1)");
}

LossContext make_loss_context(const BlendTask& task, const BinaryMask& refined_mask,
                              ImageRGB anchor) {
  task.check_mask(refined_mask);
  const ImageRGB& target = task.target();
  LossContext ctx;
  ctx.guidance = guidance_field(task, refined_mask);
  ctx.region = place_mask(refined_mask, task.placement(), target.height(), target.width());
  ctx.anchor = std::move(anchor);
  ctx.mask = refined_mask;
  ctx.placement = task.placement();
  ctx.target_stats = color_stats(target);
  ctx.original_mutation = saturation_mutation(saturation_layer(target));
  return ctx;
}

StageResult run_stage1(const BlendRun& run) {
  run.stage1.validate();
  const LossContext ctx = make_loss_context(run.task, run.refined_mask, run.task.source());
  return descend(initial_composite(run), {ctx, run.stage1, run.record_every});
}

StageResult run_stage2(const ImageRGB& m_br, const BlendRun& run) {
  run.stage2.validate();
  const BlendTask& t = run.task;
  if (!m_br.same_shape(t.target()))
    throw ValidationError("stage-2 input must have the target's dimensions");
  ImageRGB anchor = crop(m_br, t.placement().offset_y, t.placement().offset_x,
                         t.source().height(), t.source().width());
  const LossContext ctx = make_loss_context(t, run.refined_mask, std::move(anchor));
  return descend(m_br, {ctx, run.stage2, run.record_every});
}

BlendResult blend(const BlendRun& run) {
  BlendResult out;
  out.copy_paste = paste_block(run.task.target(), run.task.source(), run.refined_mask,
                               run.task.placement());
  out.stage1 = run_stage1(run);
  if (run.run_stage2) {
    out.stage2 = run_stage2(out.stage1.image, run);
    out.image = out.stage2.image;
  } else {
    out.image = out.stage1.image;
  }
  return out;
}

MetricReport blend_report(const BlendRun& run, const BlendResult& result,
                          const ImageRGB& reference, const std::string& reference_name,
                          bool include_wall_times) {
  MetricReport r = measure(result.image, reference, run.task.target(), reference_name);
  attach_iou(r, run.task.mask(), run.refined_mask);
  r.stage1_final_loss = result.stage1.final_loss;
  if (run.run_stage2) r.stage2_final_loss = result.stage2.final_loss;
  if (run.refined_mask.empty()) r.flags.emplace_back("empty_mask");
  if (include_wall_times) r.wall_times = WallTimes{result.stage1.seconds, result.stage2.seconds};
  return r;
}

}  // namespace blendkit
