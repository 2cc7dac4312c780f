#pragma once

// Coarse pass over the record: split it into width-D segments, test every
// boundary for a covariance change, and merge the neighbourhoods of rejected
// boundaries into disjoint candidate intervals.

#include <cstddef>
#include <vector>

#include "fisherwatch/core.hpp"
#include "fisherwatch/rmt.hpp"

namespace fisherwatch::screening {

/// t_i = i * D for i = 1..N, N = floor(T / D) - 1. Throws TooShort when T < 2D.
std::vector<std::size_t> segment_boundaries(std::size_t T, std::size_t D);

/// Sorted union of the inputs; overlapping and touching (hi + 1 == lo)
/// intervals are joined.
std::vector<Interval> merge_intervals(std::vector<Interval> raw);

/// Raw neighbourhoods [t_{i-1} + 1, t_{i+1}] of every rejected boundary, with
/// t_0 = 0 and t_{N+1} = T.
std::vector<Interval> rejected_neighbourhoods(const std::vector<std::size_t>& boundaries,
                                              const std::vector<bool>& rejections,
                                              std::size_t T);

/// Test of boundary i (1-based): segments [t_{i-1}+1, t_i] and [t_i+1, t_{i+1}],
/// each normalized on its own.
rmt::TestOutcome boundary_test(const StateMatrix& X, const CheckedConfig& cfg,
                               const std::vector<std::size_t>& boundaries, std::size_t i,
                               double threshold);

ScreenResult screen(const StateMatrix& X, const CheckedConfig& cfg);

}  // namespace fisherwatch::screening
