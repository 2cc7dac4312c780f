#pragma once

// File formats: channel-major CSV for data, JSON for configuration,
// scenarios, ground truth and every report the CLI emits.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fisherwatch/core.hpp"
#include "fisherwatch/simgen.hpp"
#include "fisherwatch/validation.hpp"

namespace fisherwatch::io {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1.0";

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Rows are channels, the first field of each row is the channel id. An
/// optional header row starts with "channel" (or is empty in that cell).
/// With `transpose`, rows are samples, the first field is a sample label,
/// and an optional header row (non-numeric first field) carries channel ids.
StateMatrix parse_csv(std::string_view text, bool transpose = false);
StateMatrix read_csv(const std::filesystem::path& path, bool transpose = false);

/// Channel-major CSV; the header row holds 1-based sample indices.
std::string format_csv(const StateMatrix& X, bool header = true);

std::string read_text(const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);

DetectionConfig config_from_json(const json& doc);
json config_to_json(const CheckedConfig& cfg);

simgen::Scenario scenario_from_json(const json& doc);
json truth_to_json(const simgen::GroundTruth& truth);
std::vector<std::size_t> change_times_from_json(const json& doc);

validation::NullValidationConfig null_config_from_json(const json& doc);
json calibration_to_json(const validation::NullCalibration& cal);

json screen_to_json(const ScreenResult& result);

/// report.json document. `command` is "screen" or "detect".
json report_to_json(const FaultReport& report, const std::string& command);

/// boundary_index,t_i,L_i,threshold,reject
std::string series_csv(const ScreenResult& result);

/// interval_id,k,value,threshold,flag
std::string traces_csv(const std::vector<DetectorTrace>& traces);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string checksum(std::string_view bytes);

}  // namespace fisherwatch::io
