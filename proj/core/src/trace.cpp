#include "setadam/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace setadam {
namespace {

constexpr real kRadToDeg = 57.295779513082320876798154814105;

}  // namespace

std::vector<StepsizeRecord> record_layer_stats(const StepOutput& step,
                                               const LayerPartition& partition,
                                               long iter, int epoch) {
  if (step.denom.size() != partition.dim()) {
    throw std::invalid_argument("record_layer_stats: partition mismatch");
  }
  std::vector<StepsizeRecord> records;
  records.reserve(partition.layer_count());
  for (std::size_t l = 0; l < partition.layer_count(); ++l) {
    const std::size_t off = partition.layer_offset(l);
    const std::size_t n = partition.layer_size(l);

    real sum = 0, lo = std::numeric_limits<real>::infinity(), hi = 0;
    for (std::size_t i = off; i < off + n; ++i) {
      const real a = 1 / step.denom[i];
      sum += a;
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    const real mean = sum / static_cast<real>(n);
    real sq = 0;
    for (std::size_t i = off; i < off + n; ++i) {
      const real d = 1 / step.denom[i] - mean;
      sq += d * d;
    }

    StepsizeRecord rec;
    rec.iter = iter;
    rec.epoch = epoch;
    rec.layer = l;
    rec.mean_alpha = mean;
    rec.std_alpha = std::sqrt(sq / static_cast<real>(n));
    rec.min_alpha = lo;
    rec.max_alpha = hi;
    rec.gamma = l < step.gamma.size() ? step.gamma[l] : 1;
    const real c2 = l < step.cos2.size() ? step.cos2[l] : 1;
    rec.angle_deg = std::acos(std::min(std::sqrt(std::max(c2, real(0))), real(1))) *
                    kRadToDeg;
    records.push_back(rec);
  }
  return records;
}

RangeSummary summarize_range(std::span<const StepsizeRecord> at_iter) {
  if (at_iter.empty()) {
    throw std::invalid_argument("summarize_range: no records");
  }
  RangeSummary s;
  s.iter = at_iter.front().iter;
  s.epoch = at_iter.front().epoch;
  real mean_sum = 0;
  real lo = std::numeric_limits<real>::infinity();
  real hi = -std::numeric_limits<real>::infinity();
  s.global_min_alpha = std::numeric_limits<real>::infinity();
  s.global_max_alpha = 0;
  for (const StepsizeRecord& r : at_iter) {
    if (r.iter != s.iter) {
      throw std::invalid_argument("summarize_range: records span several iterations");
    }
    mean_sum += r.mean_alpha;
    lo = std::min(lo, r.mean_alpha);
    hi = std::max(hi, r.mean_alpha);
    s.global_min_alpha = std::min(s.global_min_alpha, r.min_alpha);
    s.global_max_alpha = std::max(s.global_max_alpha, r.max_alpha);
  }
  const real n = static_cast<real>(at_iter.size());
  const real mean = mean_sum / n;
  real sq = 0;
  for (const StepsizeRecord& r : at_iter) {
    const real d = r.mean_alpha - mean;
    sq += d * d;
  }
  s.ratio = hi / lo;
  s.cv = std::sqrt(sq / n) / mean;
  return s;
}

StepsizeTrace downsample(const StepsizeTrace& trace, long every_k) {
  if (every_k < 1) {
    throw std::invalid_argument("downsample: every_k must be >= 1");
  }
  if (trace.empty()) return {};
  const long last_iter = trace.back().iter;
  StepsizeTrace out;
  for (const StepsizeRecord& r : trace) {
    if (r.iter % every_k == 0 || r.iter == last_iter) {
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace setadam
