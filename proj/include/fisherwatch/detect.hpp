#pragma once

// Point-by-point localization inside screened intervals. A window of width
// d = d1 + d2 slides one sample at a time; each position yields a value that
// is compared against a threshold, and a fault is declared once s consecutive
// windows exceed it.
//
//   DELE  largest eigenvalue of F_k against the support edge b
//   DEHT  |L_k| against the Gaussian quantile U_{1-alpha/2}
//   MP    largest eigenvalue of the whole-window covariance against the
//         Marchenko-Pastur edge (baseline)

#include <cstddef>
#include <optional>
#include <vector>

#include "fisherwatch/core.hpp"
#include "fisherwatch/specstats.hpp"

namespace fisherwatch::detect {

/// K = W - d + 1 windows over a block of width W; window k covers columns
/// [k, k + d - 1] and splits after d1 columns.
std::vector<specstats::WindowSplit> slide_windows(std::size_t width, std::size_t d1,
                                                  std::size_t d2);

/// Smallest 1-based j with flags[j-s+1 .. j] all set.
std::optional<std::size_t> run_rule(const std::vector<bool>& flags, std::size_t s);

struct ScanResult {
  DetectorTrace trace;
  std::optional<Detection> detection;
};

/// Threshold a detector applies for the given parameters.
double detector_threshold(DetectorKind kind, const CheckedConfig& cfg);

/// Scans `interval` of X. Detection times are absolute:
/// fault_time = interval.lo - 1 + k_s + d - 1.
ScanResult scan(DetectorKind kind, const StateMatrix& X, Interval interval,
                const CheckedConfig& cfg);

ScanResult dele_scan(const StateMatrix& X, Interval interval, const CheckedConfig& cfg);
ScanResult deht_scan(const StateMatrix& X, Interval interval, const CheckedConfig& cfg);
ScanResult mp_scan(const StateMatrix& X, Interval interval, const CheckedConfig& cfg);

/// Applies the run rule to an existing trace with a different s.
std::optional<Detection> detection_from_trace(const DetectorTrace& trace, std::size_t s,
                                              std::size_t d);

/// Screening followed by the chosen scan on every merged interval. When
/// change times are supplied, each detection carries the delay from the
/// latest change time in its interval at or before the detection (or the
/// first one in the interval if none precedes it).
FaultReport localize(const StateMatrix& X, const CheckedConfig& cfg, DetectorKind kind,
                     const std::vector<std::size_t>& change_times = {});

}  // namespace fisherwatch::detect
