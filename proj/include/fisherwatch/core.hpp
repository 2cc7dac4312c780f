#pragma once

// Data model shared by every stage: the state matrix, detection parameters,
// and the report containers produced by screening and localization.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fisherwatch {

/// Channels are rows; a row's samples are contiguous in memory.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ErrorCode {
  Shape,              // ragged or undersized input
  Data,               // non-finite values
  Config,             // parameter outside its domain
  Singular,           // second-sample covariance not positive definite
  DegenerateChannel,  // zero-variance row
  Domain,             // math function argument out of range
  TooShort,           // record or interval too short for the requested widths
  Scenario,           // invalid simulation scenario
  Input               // unparseable file or document
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class StateMatrix {
 public:
  StateMatrix(RowMatrix values, std::vector<std::string> channel_ids = {},
              std::optional<double> sample_rate_hz = std::nullopt);

  std::size_t channels() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t samples() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  const RowMatrix& values() const noexcept { return values_; }
  const std::vector<std::string>& channel_ids() const noexcept { return channel_ids_; }
  std::optional<double> sample_rate_hz() const noexcept { return sample_rate_hz_; }

  std::vector<double> row(std::size_t i) const;

  bool operator==(const StateMatrix& other) const;

 private:
  RowMatrix values_;
  std::vector<std::string> channel_ids_;
  std::optional<double> sample_rate_hz_;
};

/// Builds a p x T matrix from p equally long channel series. Missing ids
/// default to "ch1".."chp".
StateMatrix build_state_matrix(const std::vector<std::vector<double>>& rows,
                               std::vector<std::string> channel_ids = {},
                               std::optional<double> sample_rate_hz = std::nullopt);

enum class Profile { Distribution, Transmission };

const char* to_string(Profile profile) noexcept;
Profile profile_from_string(const std::string& name);

/// User-facing parameters. Unset fields are filled from the profile by
/// validate_config().
struct DetectionConfig {
  std::optional<std::size_t> D;
  std::optional<std::size_t> d1;
  std::optional<std::size_t> d2;
  std::optional<std::size_t> s;
  std::optional<double> alpha;
  int kappa = 2;
  double beta1 = 0.0;
  double beta2 = 0.0;
  Profile profile = Profile::Distribution;

  bool operator==(const DetectionConfig&) const = default;
};

/// Fully resolved parameters for a given channel count.
struct CheckedConfig {
  std::size_t p = 0;
  std::size_t D = 0;
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  std::size_t s = 0;
  double alpha = 0.01;
  int kappa = 2;
  double beta1 = 0.0;
  double beta2 = 0.0;
  Profile profile = Profile::Distribution;

  std::size_t d() const noexcept { return d1 + d2; }
  DetectionConfig to_config() const;

  bool operator==(const CheckedConfig&) const = default;
};

/// Fills defaults (d1 = p-10, d2 = p+10, D = 3p or p+24, s = 16 or 9,
/// alpha = 0.01) and enforces d2 > p, D > p, d1 >= 2, s >= 1, 0 < alpha < 1,
/// kappa in {1, 2}.
CheckedConfig validate_config(const DetectionConfig& cfg, std::size_t p);

/// Closed 1-based sample range [lo, hi].
struct Interval {
  std::size_t lo = 0;
  std::size_t hi = 0;

  std::size_t width() const noexcept { return hi - lo + 1; }
  bool contains(std::size_t t) const noexcept { return lo <= t && t <= hi; }
  bool operator==(const Interval&) const = default;
};

enum class DetectorKind { Dele, Deht, Mp };

const char* to_string(DetectorKind kind) noexcept;
DetectorKind detector_from_string(const std::string& name);

/// Outcome of screening the whole record.
struct ScreenResult {
  std::vector<std::size_t> boundaries;  // t_i = i * D, i = 1..N
  std::vector<double> statistics;       // L_i
  std::vector<bool> rejections;         // v_i
  double threshold = 0.0;               // U_{1-alpha/2}
  std::vector<Interval> raw_intervals;
  std::vector<Interval> merged_intervals;
};

struct DetectorTrace {
  DetectorKind kind = DetectorKind::Dele;
  Interval interval;
  double threshold = 0.0;
  std::vector<double> values;  // indexed by window k - 1
  std::vector<bool> flags;
};

struct Detection {
  Interval interval;
  std::size_t fault_time = 0;      // absolute, 1-based
  std::size_t trigger_window = 0;  // k_s, 1-based within the interval
  std::size_t consecutive_count = 0;
  DetectorKind detector = DetectorKind::Dele;
  std::optional<long long> delay_samples;
};

struct FaultReport {
  CheckedConfig config;
  std::size_t channels = 0;
  std::size_t samples = 0;
  std::optional<double> sample_rate_hz;
  DetectorKind detector = DetectorKind::Dele;
  ScreenResult screening;
  std::vector<Interval> screened_intervals;
  std::vector<Detection> detections;
  std::vector<DetectorTrace> traces;
};

}  // namespace fisherwatch
