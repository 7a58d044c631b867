#pragma once

#include <cstdint>
#include <vector>

#include "blendkit/image.hpp"
#include "blendkit/losses.hpp"
#include "blendkit/metrics.hpp"

namespace blendkit {

/// Settings of one descent stage.
///
/// With backtracking on (the default) every iteration first doubles the
/// step, then halves it until the loss does not increase; if even a tiny
/// step fails, the velocity is dropped and the search repeats from the
/// iteration's starting step. Recorded losses are therefore non-increasing.
/// Without backtracking the step is fixed at step_size.
struct StageConfig {
  LossWeights weights;
  int iterations = 1000;
  double step_size = 0.01;
  double momentum = 0.99;
  bool backtracking = true;

  void validate() const;

  static StageConfig stage1_defaults() { return {LossWeights::stage1_defaults()}; }
  static StageConfig stage2_defaults() { return {LossWeights::stage2_defaults()}; }
};

enum class InitMode { composite, random };

struct BlendRun {
  BlendTask task;
  BinaryMask refined_mask;  ///< source-sized
  StageConfig stage1 = StageConfig::stage1_defaults();
  StageConfig stage2 = StageConfig::stage2_defaults();
  bool run_stage2 = true;
  int record_every = 1;
  InitMode init = InitMode::composite;
  std::uint64_t seed = 0;  ///< used by InitMode::random
};

struct HistoryEntry {
  int iteration = 0;
  LossBreakdown loss;
};

struct StageResult {
  ImageRGB image;  ///< target-sized composite
  std::vector<HistoryEntry> history;
  LossBreakdown final_loss;
  int iterations_run = 0;
  double seconds = 0.0;
};

/// Seam smoothing: content anchored to the source, guidance from
/// guidance_field. Starts from the copy-paste composite (or random values
/// under the mask).
StageResult run_stage1(const BlendRun& run);

/// Refinement of the stage-1 output: content anchored to m_br, saturation
/// measured against the target.
StageResult run_stage2(const ImageRGB& m_br, const BlendRun& run);

struct BlendResult {
  ImageRGB image;
  ImageRGB copy_paste;
  StageResult stage1;
  StageResult stage2;
};

/// Both stages back to back (stage 2 skipped when run.run_stage2 is false).
BlendResult blend(const BlendRun& run);

/// Metrics of a blend result against `reference`, with the final losses of
/// both stages attached. Wall times are included only on request since they
/// make reports non-reproducible.
MetricReport blend_report(const BlendRun& run, const BlendResult& result,
                          const ImageRGB& reference, const std::string& reference_name,
                          bool include_wall_times = false);

/// Builds the loss context a stage evaluates against.
LossContext make_loss_context(const BlendTask& task, const BinaryMask& refined_mask,
                              ImageRGB anchor);

}  // namespace blendkit
