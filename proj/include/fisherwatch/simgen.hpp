#pragma once

// Seeded synthetic multichannel streams with piecewise-constant covariance.
// Columns are drawn independently (optionally AR(1) in time) from the base
// covariance composed with every event active at that sample, then white
// noise of scale noise_sigma is added to every entry.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fisherwatch/core.hpp"

namespace fisherwatch::simgen {

enum class CovKind { Identity, Toeplitz, Matrix };

struct CovSpec {
  CovKind kind = CovKind::Identity;
  double rho = 0.0;   // Toeplitz: Sigma_ij = rho^|i-j|
  RowMatrix matrix;   // Matrix: used as given
};

/// Identity, Toeplitz(rho) with |rho| < 1, or a user matrix that must be
/// symmetric with minimum eigenvalue above 1e-10.
RowMatrix sample_spd(const CovSpec& spec, std::size_t p);

enum class EventKind {
  ScaleSubset,  // Sigma <- D Sigma D, D_ii = sqrt(factor) on `channels`
  Spike,        // Sigma <- Sigma + strength * u u^T, u = direction / |direction|
  FullReplace   // Sigma <- matrix
};

struct Event {
  EventKind kind = EventKind::ScaleSubset;
  std::size_t tau = 0;               // last pre-change sample; active for t > tau
  std::optional<std::size_t> end;    // last affected sample (inclusive), default T
  std::vector<std::size_t> channels; // 1-based; ScaleSubset, or Spike direction support
  double factor = 1.0;
  std::vector<double> direction;     // Spike: length p; empty means uniform over channels
  double strength = 0.0;
  RowMatrix matrix;                  // FullReplace
};

enum class Marginal { Gaussian, Uniform };

struct Scenario {
  std::size_t p = 0;
  std::size_t T = 0;
  CovSpec base;
  std::vector<Event> events;
  double noise_sigma = 1e-4;
  std::uint64_t seed = 20240101;
  Marginal marginal = Marginal::Gaussian;
  double ar1 = 0.0;  // column-to-column correlation of the innovations
  std::optional<double> sample_rate_hz;
};

struct GroundTruth {
  std::vector<std::size_t> change_times;
  std::vector<std::size_t> end_times;
};

struct Simulation {
  StateMatrix data;
  GroundTruth truth;
};

/// Throws Scenario errors for out-of-range fields or non-SPD covariances.
void validate_scenario(const Scenario& scenario);

/// Covariance in force at 1-based sample t.
RowMatrix covariance_at(const Scenario& scenario, std::size_t t);

Simulation generate(const Scenario& scenario);

}  // namespace fisherwatch::simgen
