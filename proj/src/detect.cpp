#include "fisherwatch/detect.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fisherwatch/parallel.hpp"
#include "fisherwatch/rmt.hpp"
#include "fisherwatch/screening.hpp"

namespace fisherwatch::detect {
namespace {

double ratio(std::size_t p, std::size_t n) {
  return static_cast<double>(p) / static_cast<double>(n - 1);
}

Interval checked_interval(const StateMatrix& X, Interval iv) {
  if (iv.lo < 1 || iv.hi < iv.lo || iv.hi > X.samples()) {
    throw Error(ErrorCode::Shape, "interval [" + std::to_string(iv.lo) + ", " +
                                      std::to_string(iv.hi) + "] outside the record");
  }
  return iv;
}

// Evaluates value_of(block, split) for every window and folds the flags.
template <typename ValueFn, typename FlagFn>
ScanResult run_scan(DetectorKind kind, const StateMatrix& X, Interval iv, const CheckedConfig& cfg,
                    double threshold, ValueFn value_of, FlagFn flag_of) {
  checked_interval(X, iv);
  const auto block = X.values().middleCols(static_cast<Eigen::Index>(iv.lo - 1),
                                           static_cast<Eigen::Index>(iv.width()));
  const auto windows = slide_windows(iv.width(), cfg.d1, cfg.d2);

  ScanResult out;
  out.trace.kind = kind;
  out.trace.interval = iv;
  out.trace.threshold = threshold;
  out.trace.values.assign(windows.size(), 0.0);
  parallel_for(windows.size(), [&](std::size_t k) {
    try {
      out.trace.values[k] = value_of(block, windows[k]);
    } catch (const Error& e) {
      throw Error(e.code(), "window " + std::to_string(k + 1) + " of interval [" +
                                std::to_string(iv.lo) + ", " + std::to_string(iv.hi) +
                                "]: " + e.what());
    }
  });
  out.trace.flags.reserve(windows.size());
  for (double v : out.trace.values) out.trace.flags.push_back(flag_of(v, threshold));
  out.detection = detection_from_trace(out.trace, cfg.s, cfg.d());
  return out;
}

}  // namespace

std::vector<specstats::WindowSplit> slide_windows(std::size_t width, std::size_t d1,
                                                  std::size_t d2) {
  if (d1 < 2) throw Error(ErrorCode::Config, "d1 must be at least 2");
  if (d2 < 2) throw Error(ErrorCode::Config, "d2 must be at least 2");
  const std::size_t d = d1 + d2;
  if (width < d) {
    throw Error(ErrorCode::TooShort, "interval of width " + std::to_string(width) +
                                         " is shorter than the window d = " + std::to_string(d));
  }
  std::vector<specstats::WindowSplit> out;
  out.reserve(width - d + 1);
  for (std::size_t k = 1; k + d - 1 <= width; ++k) out.push_back({k, d1, d2});
  return out;
}

std::optional<std::size_t> run_rule(const std::vector<bool>& flags, std::size_t s) {
  if (s == 0) throw Error(ErrorCode::Config, "s must be at least 1");
  std::size_t run = 0;
  for (std::size_t j = 0; j < flags.size(); ++j) {
    run = flags[j] ? run + 1 : 0;
    if (run >= s) return j + 1;
  }
  return std::nullopt;
}

std::optional<Detection> detection_from_trace(const DetectorTrace& trace, std::size_t s,
                                              std::size_t d) {
  const auto ks = run_rule(trace.flags, s);
  if (!ks) return std::nullopt;
  Detection det;
  det.interval = trace.interval;
  det.trigger_window = *ks;
  det.consecutive_count = s;
  det.detector = trace.kind;
  det.fault_time = trace.interval.lo - 1 + *ks + d - 1;
  return det;
}

double detector_threshold(DetectorKind kind, const CheckedConfig& cfg) {
  switch (kind) {
    case DetectorKind::Dele:
      return rmt::support_edges(ratio(cfg.p, cfg.d1), ratio(cfg.p, cfg.d2)).b;
    case DetectorKind::Deht:
      return rmt::gaussian_quantile(1.0 - cfg.alpha / 2.0);
    case DetectorKind::Mp:
      return rmt::mp_upper_edge(ratio(cfg.p, cfg.d()));
  }
  return 0.0;
}

ScanResult dele_scan(const StateMatrix& X, Interval iv, const CheckedConfig& cfg) {
  const double b = detector_threshold(DetectorKind::Dele, cfg);
  return run_scan(
      DetectorKind::Dele, X, iv, cfg, b,
      [](specstats::ConstBlock block, const specstats::WindowSplit& w) {
        auto [s1, s2] = specstats::window_covariances(block, w);
        return specstats::largest_eigenvalue(specstats::fisher_eigenvalues(s1, s2, w.n1, w.n2));
      },
      [](double v, double thr) { return v > thr; });
}

ScanResult deht_scan(const StateMatrix& X, Interval iv, const CheckedConfig& cfg) {
  const double u = detector_threshold(DetectorKind::Deht, cfg);
  const auto consts = rmt::clt_constants(ratio(cfg.p, cfg.d1), ratio(cfg.p, cfg.d2), cfg.kappa,
                                         cfg.beta1, cfg.beta2);
  const std::size_t p = cfg.p;
  return run_scan(
      DetectorKind::Deht, X, iv, cfg, u,
      [&consts, p](specstats::ConstBlock block, const specstats::WindowSplit& w) {
        auto [s1, s2] = specstats::window_covariances(block, w);
        return std::fabs(rmt::statistic_L(specstats::trace_sq_dev_direct(s1, s2), consts, p));
      },
      [](double v, double thr) { return v >= thr; });
}

ScanResult mp_scan(const StateMatrix& X, Interval iv, const CheckedConfig& cfg) {
  const double edge = detector_threshold(DetectorKind::Mp, cfg);
  return run_scan(
      DetectorKind::Mp, X, iv, cfg, edge,
      [](specstats::ConstBlock block, const specstats::WindowSplit& w) {
        const auto window = block.middleCols(static_cast<Eigen::Index>(w.start - 1),
                                             static_cast<Eigen::Index>(w.width()));
        const RowMatrix s = specstats::sample_covariance(specstats::normalize_rows(window));
        return specstats::symmetric_eigenvalues(s).front();
      },
      [](double v, double thr) { return v > thr; });
}

ScanResult scan(DetectorKind kind, const StateMatrix& X, Interval iv, const CheckedConfig& cfg) {
  switch (kind) {
    case DetectorKind::Dele: return dele_scan(X, iv, cfg);
    case DetectorKind::Deht: return deht_scan(X, iv, cfg);
    case DetectorKind::Mp: return mp_scan(X, iv, cfg);
  }
  throw Error(ErrorCode::Config, "unknown detector");
}

FaultReport localize(const StateMatrix& X, const CheckedConfig& cfg, DetectorKind kind,
                     const std::vector<std::size_t>& change_times) {
  if (cfg.p != X.channels()) {
    throw Error(ErrorCode::Config, "configuration was validated for p = " +
                                       std::to_string(cfg.p) + " but data has " +
                                       std::to_string(X.channels()) + " channels");
  }
  FaultReport report;
  report.config = cfg;
  report.channels = X.channels();
  report.samples = X.samples();
  report.sample_rate_hz = X.sample_rate_hz();
  report.detector = kind;
  report.screening = screening::screen(X, cfg);
  report.screened_intervals = report.screening.merged_intervals;

  std::vector<std::size_t> times = change_times;
  std::sort(times.begin(), times.end());

  for (const auto& iv : report.screened_intervals) {
    auto result = scan(kind, X, iv, cfg);
    if (result.detection) {
      Detection det = *result.detection;
      std::optional<std::size_t> truth;
      for (std::size_t tau : times) {
        if (!iv.contains(tau)) continue;
        if (tau <= det.fault_time) {
          truth = tau;
        } else if (!truth) {
          truth = tau;
          break;
        }
      }
      if (truth) {
        det.delay_samples =
            static_cast<long long>(det.fault_time) - static_cast<long long>(*truth);
      }
      report.detections.push_back(det);
    }
    report.traces.push_back(std::move(result.trace));
  }
  return report;
}

}  // namespace fisherwatch::detect
