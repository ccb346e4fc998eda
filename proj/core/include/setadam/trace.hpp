#pragma once

#include <span>
#include <vector>

#include "setadam/hyperparams.hpp"
#include "setadam/partition.hpp"

namespace setadam {

// One per-layer snapshot of the adaptive-stepsize statistics at an iteration.
// Stepsizes here are the eta-free quantities 1/denominator, so traces are
// comparable across stepsize schedules.
struct StepsizeRecord {
  long iter = 0;
  int epoch = 0;
  std::size_t layer = 0;
  real mean_alpha = 0;
  real std_alpha = 0;  // population standard deviation
  real min_alpha = 0;
  real max_alpha = 0;
  real gamma = 1;
  real angle_deg = 0;  // angle between v_l and the all-one vector
};

using StepsizeTrace = std::vector<StepsizeRecord>;

// Cross-layer spread of the layerwise mean stepsizes at one iteration.
struct RangeSummary {
  long iter = 0;
  int epoch = 0;
  real ratio = 1;  // max layer mean / min layer mean
  real cv = 0;     // std of layer means / mean of layer means
  real global_min_alpha = 0;
  real global_max_alpha = 0;
};

// One record per layer; read-only observer of the step output.
std::vector<StepsizeRecord> record_layer_stats(const StepOutput& step,
                                               const LayerPartition& partition,
                                               long iter, int epoch = 0);

// Records must all belong to the same iteration and cover >= 1 layer.
RangeSummary summarize_range(std::span<const StepsizeRecord> at_iter);

// Keeps records whose iteration is a multiple of every_k, plus the records of
// the final iteration present in the trace.
StepsizeTrace downsample(const StepsizeTrace& trace, long every_k);

}  // namespace setadam
