#include "fisherwatch/screening.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fisherwatch/parallel.hpp"
#include "fisherwatch/specstats.hpp"

namespace fisherwatch::screening {

std::vector<std::size_t> segment_boundaries(std::size_t T, std::size_t D) {
  if (D == 0) throw Error(ErrorCode::Config, "segment width D must be positive");
  if (T < 2 * D) {
    throw Error(ErrorCode::TooShort, "record of " + std::to_string(T) +
                                         " samples is shorter than 2D = " +
                                         std::to_string(2 * D));
  }
  const std::size_t n = T / D - 1;
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (i + 1) * D;
  return out;
}

std::vector<Interval> merge_intervals(std::vector<Interval> raw) {
  std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) {
    return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
  });
  std::vector<Interval> merged;
  for (const auto& iv : raw) {
    if (!merged.empty() && iv.lo <= merged.back().hi + 1) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

std::vector<Interval> rejected_neighbourhoods(const std::vector<std::size_t>& boundaries,
                                              const std::vector<bool>& rejections,
                                              std::size_t T) {
  std::vector<Interval> raw;
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if (!rejections[i]) continue;
    const std::size_t prev = i == 0 ? 0 : boundaries[i - 1];
    const std::size_t next = i + 1 < boundaries.size() ? boundaries[i + 1] : T;
    raw.push_back({prev + 1, next});
  }
  return raw;
}

rmt::TestOutcome boundary_test(const StateMatrix& X, const CheckedConfig& cfg,
                               const std::vector<std::size_t>& boundaries, std::size_t i,
                               double threshold) {
  const std::size_t T = X.samples();
  const std::size_t prev = i == 1 ? 0 : boundaries[i - 2];
  const std::size_t here = boundaries[i - 1];
  const std::size_t next = i < boundaries.size() ? boundaries[i] : T;
  const std::size_t w1 = here - prev;
  const std::size_t w2 = next - here;
  const std::size_t p = X.channels();

  try {
    specstats::WindowSplit split{prev + 1, w1, w2};
    auto [s1, s2] = specstats::window_covariances(X.values(), split);
    const double tr = specstats::trace_sq_dev_direct(s1, s2);
    const auto consts = rmt::clt_constants(static_cast<double>(p) / static_cast<double>(w1 - 1),
                                           static_cast<double>(p) / static_cast<double>(w2 - 1),
                                           cfg.kappa, cfg.beta1, cfg.beta2);
    rmt::TestOutcome out;
    out.L = rmt::statistic_L(tr, consts, p);
    out.threshold = threshold;
    out.reject = std::abs(out.L) >= threshold;
    out.position = here;
    return out;
  } catch (const Error& e) {
    throw Error(e.code(), "boundary " + std::to_string(i) + " (t=" + std::to_string(here) +
                              "): " + e.what());
  }
}

ScreenResult screen(const StateMatrix& X, const CheckedConfig& cfg) {
  ScreenResult result;
  result.boundaries = segment_boundaries(X.samples(), cfg.D);
  result.threshold = rmt::gaussian_quantile(1.0 - cfg.alpha / 2.0);

  const std::size_t n = result.boundaries.size();
  std::vector<rmt::TestOutcome> outcomes(n);
  parallel_for(n, [&](std::size_t k) {
    outcomes[k] = boundary_test(X, cfg, result.boundaries, k + 1, result.threshold);
  });

  result.statistics.reserve(n);
  result.rejections.reserve(n);
  for (const auto& o : outcomes) {
    result.statistics.push_back(o.L);
    result.rejections.push_back(o.reject);
  }
  result.raw_intervals = rejected_neighbourhoods(result.boundaries, result.rejections, X.samples());
  result.merged_intervals = merge_intervals(result.raw_intervals);
  return result;
}

}  // namespace fisherwatch::screening
