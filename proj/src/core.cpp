#include "fisherwatch/core.hpp"

#include <cmath>
#include <utility>

namespace fisherwatch {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Shape: return "shape";
    case ErrorCode::Data: return "data";
    case ErrorCode::Config: return "config";
    case ErrorCode::Singular: return "singular";
    case ErrorCode::DegenerateChannel: return "degenerate_channel";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::TooShort: return "too_short";
    case ErrorCode::Scenario: return "scenario";
    case ErrorCode::Input: return "input";
  }
  return "unknown";
}

StateMatrix::StateMatrix(RowMatrix values, std::vector<std::string> channel_ids,
                         std::optional<double> sample_rate_hz)
    : values_(std::move(values)),
      channel_ids_(std::move(channel_ids)),
      sample_rate_hz_(sample_rate_hz) {
  if (values_.rows() < 2) {
    throw Error(ErrorCode::Shape, "state matrix needs at least 2 channels, got " +
                                      std::to_string(values_.rows()));
  }
  if (values_.cols() < 2) {
    throw Error(ErrorCode::Shape, "state matrix needs at least 2 samples, got " +
                                      std::to_string(values_.cols()));
  }
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index t = 0; t < values_.cols(); ++t) {
      if (!std::isfinite(values_(i, t))) {
        throw Error(ErrorCode::Data, "non-finite value at channel " + std::to_string(i + 1) +
                                         ", sample " + std::to_string(t + 1));
      }
    }
  }
  if (channel_ids_.empty()) {
    channel_ids_.reserve(static_cast<std::size_t>(values_.rows()));
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      channel_ids_.push_back("ch" + std::to_string(i + 1));
    }
  } else if (channel_ids_.size() != static_cast<std::size_t>(values_.rows())) {
    throw Error(ErrorCode::Shape, "channel id count does not match row count");
  }
  if (sample_rate_hz_ && !(*sample_rate_hz_ > 0.0)) {
    throw Error(ErrorCode::Config, "sample rate must be positive");
  }
}

std::vector<double> StateMatrix::row(std::size_t i) const {
  const auto r = values_.row(static_cast<Eigen::Index>(i));
  return {r.data(), r.data() + r.size()};
}

bool StateMatrix::operator==(const StateMatrix& other) const {
  return values_.rows() == other.values_.rows() && values_.cols() == other.values_.cols() &&
         values_ == other.values_ && channel_ids_ == other.channel_ids_ &&
         sample_rate_hz_ == other.sample_rate_hz_;
}

StateMatrix build_state_matrix(const std::vector<std::vector<double>>& rows,
                               std::vector<std::string> channel_ids,
                               std::optional<double> sample_rate_hz) {
  if (rows.size() < 2) {
    throw Error(ErrorCode::Shape,
                "need at least 2 channel series, got " + std::to_string(rows.size()));
  }
  const std::size_t T = rows.front().size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != T) {
      throw Error(ErrorCode::Shape, "channel " + std::to_string(i + 1) + " has " +
                                        std::to_string(rows[i].size()) + " samples, expected " +
                                        std::to_string(T));
    }
  }
  RowMatrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(T));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t t = 0; t < T; ++t) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = rows[i][t];
    }
  }
  return StateMatrix(std::move(values), std::move(channel_ids), sample_rate_hz);
}

const char* to_string(Profile profile) noexcept {
  return profile == Profile::Transmission ? "transmission" : "distribution";
}

Profile profile_from_string(const std::string& name) {
  if (name == "distribution") return Profile::Distribution;
  if (name == "transmission") return Profile::Transmission;
  throw Error(ErrorCode::Config, "unknown profile '" + name + "'");
}

DetectionConfig CheckedConfig::to_config() const {
  DetectionConfig cfg;
  cfg.D = D;
  cfg.d1 = d1;
  cfg.d2 = d2;
  cfg.s = s;
  cfg.alpha = alpha;
  cfg.kappa = kappa;
  cfg.beta1 = beta1;
  cfg.beta2 = beta2;
  cfg.profile = profile;
  return cfg;
}

CheckedConfig validate_config(const DetectionConfig& cfg, std::size_t p) {
  if (p < 2) throw Error(ErrorCode::Config, "need at least 2 channels");

  CheckedConfig out;
  out.p = p;
  out.profile = cfg.profile;
  out.d1 = cfg.d1.value_or(p > 12 ? p - 10 : 2);
  out.d2 = cfg.d2.value_or(p + 10);
  if (cfg.profile == Profile::Transmission) {
    out.D = cfg.D.value_or(p + 24);
    out.s = cfg.s.value_or(9);
  } else {
    out.D = cfg.D.value_or(3 * p);
    out.s = cfg.s.value_or(16);
  }
  out.alpha = cfg.alpha.value_or(0.01);
  out.kappa = cfg.kappa;
  out.beta1 = cfg.beta1;
  out.beta2 = cfg.beta2;

  if (out.d2 <= p) {
    throw Error(ErrorCode::Singular, "d2 = " + std::to_string(out.d2) +
                                         " must exceed p = " + std::to_string(p) +
                                         " for the second covariance to be invertible");
  }
  if (out.D <= p) {
    throw Error(ErrorCode::Singular, "D = " + std::to_string(out.D) + " must exceed p = " +
                                         std::to_string(p) +
                                         " for the segment covariance to be invertible");
  }
  if (out.d1 < 2) throw Error(ErrorCode::Config, "d1 must be at least 2");
  if (out.s < 1) throw Error(ErrorCode::Config, "s must be at least 1");
  if (!(out.alpha > 0.0 && out.alpha < 1.0)) {
    throw Error(ErrorCode::Config, "alpha must lie in (0, 1)");
  }
  if (out.kappa != 1 && out.kappa != 2) {
    throw Error(ErrorCode::Config, "kappa must be 1 (complex) or 2 (real)");
  }
  if (!std::isfinite(out.beta1) || !std::isfinite(out.beta2)) {
    throw Error(ErrorCode::Config, "beta1 and beta2 must be finite");
  }
  return out;
}

const char* to_string(DetectorKind kind) noexcept {
  switch (kind) {
    case DetectorKind::Dele: return "DELE";
    case DetectorKind::Deht: return "DEHT";
    case DetectorKind::Mp: return "MP";
  }
  return "unknown";
}

DetectorKind detector_from_string(const std::string& name) {
  if (name == "dele" || name == "DELE") return DetectorKind::Dele;
  if (name == "deht" || name == "DEHT") return DetectorKind::Deht;
  if (name == "mp" || name == "MP") return DetectorKind::Mp;
  throw Error(ErrorCode::Config, "unknown detector '" + name + "'");
}

}  // namespace fisherwatch
