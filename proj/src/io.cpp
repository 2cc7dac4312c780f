#include "fisherwatch/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fisherwatch::io {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos
                                                                           : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    const auto line = trim(text.substr(start, nl == text.npos ? text.npos : nl - start));
    if (!line.empty()) lines.push_back(line);
    if (nl == text.npos) break;
    start = nl + 1;
  }
  return lines;
}

bool parse_number(std::string_view field, double& out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc() && res.ptr == field.data() + field.size();
}

double require_number(std::string_view field, std::size_t line_no, std::size_t col) {
  double v = 0.0;
  if (!parse_number(field, v)) {
    throw Error(ErrorCode::Input, "line " + std::to_string(line_no) + ", field " +
                                      std::to_string(col) + ": '" + std::string(field) +
                                      "' is not a number");
  }
  return v;
}

template <typename Fn>
auto guarded(const char* what, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Input, std::string(what) + ": " + e.what());
  }
}

std::size_t get_size(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorCode::Input, std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

RowMatrix matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::Input, "matrix must be an array");
  const auto n = static_cast<Eigen::Index>(rows.size());
  RowMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (!row.is_array() || row.size() != rows.size()) {
      throw Error(ErrorCode::Scenario, "matrix must be square");
    }
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
  }
  return m;
}

json interval_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

json intervals_json(const std::vector<Interval>& ivs) {
  json arr = json::array();
  for (const auto& iv : ivs) arr.push_back(interval_json(iv));
  return arr;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

StateMatrix parse_csv(std::string_view text, bool transpose) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::Input, "CSV input is empty");

  std::vector<std::vector<std::string_view>> table;
  table.reserve(lines.size());
  for (auto line : lines) table.push_back(split_fields(line));

  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::size_t first = 0;

  if (!transpose) {
    const auto head = table.front().front();
    if (head.empty() || head == "channel" || head == "Channel" || head == "channel_id") first = 1;
    for (std::size_t r = first; r < table.size(); ++r) {
      const auto& fields = table[r];
      if (fields.size() < 2) {
        throw Error(ErrorCode::Input, "line " + std::to_string(r + 1) + " has no data fields");
      }
      ids.emplace_back(fields.front());
      std::vector<double> row;
      row.reserve(fields.size() - 1);
      for (std::size_t c = 1; c < fields.size(); ++c) {
        row.push_back(require_number(fields[c], r + 1, c + 1));
      }
      rows.push_back(std::move(row));
    }
  } else {
    double probe = 0.0;
    const bool has_header = !parse_number(table.front().front(), probe) ||
                            (table.front().size() > 1 && !parse_number(table.front()[1], probe));
    const std::size_t width = table.front().size();
    if (width < 2) throw Error(ErrorCode::Input, "transposed CSV needs a label and data columns");
    if (has_header) {
      first = 1;
      for (std::size_t c = 1; c < width; ++c) ids.emplace_back(table.front()[c]);
    }
    rows.assign(width - 1, {});
    for (std::size_t r = first; r < table.size(); ++r) {
      const auto& fields = table[r];
      if (fields.size() != width) {
        throw Error(ErrorCode::Shape, "line " + std::to_string(r + 1) + " has " +
                                          std::to_string(fields.size()) + " fields, expected " +
                                          std::to_string(width));
      }
      for (std::size_t c = 1; c < width; ++c) {
        rows[c - 1].push_back(require_number(fields[c], r + 1, c + 1));
      }
    }
  }
  if (rows.empty()) throw Error(ErrorCode::Input, "CSV input has no data rows");
  return build_state_matrix(rows, std::move(ids));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Input, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

StateMatrix read_csv(const std::filesystem::path& path, bool transpose) {
  return parse_csv(read_text(path), transpose);
}

std::string format_csv(const StateMatrix& X, bool header) {
  std::string out;
  if (header) {
    out += "channel";
    for (std::size_t t = 1; t <= X.samples(); ++t) {
      out += ',';
      out += std::to_string(t);
    }
    out += '\n';
  }
  const auto& v = X.values();
  for (std::size_t i = 0; i < X.channels(); ++i) {
    out += X.channel_ids()[i];
    for (std::size_t t = 0; t < X.samples(); ++t) {
      out += ',';
      out += format_double(v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)));
    }
    out += '\n';
  }
  return out;
}

json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Input, path.string() + ": malformed JSON: " + e.what());
  }
}

DetectionConfig config_from_json(const json& doc) {
  return guarded("config", [&] {
    if (!doc.is_object()) throw Error(ErrorCode::Input, "config must be a JSON object");
    DetectionConfig cfg;
    if (doc.contains("profile")) cfg.profile = profile_from_string(doc.at("profile").get<std::string>());
    if (doc.contains("D")) cfg.D = get_size(doc, "D");
    if (doc.contains("d1")) cfg.d1 = get_size(doc, "d1");
    if (doc.contains("d2")) cfg.d2 = get_size(doc, "d2");
    if (doc.contains("s")) cfg.s = get_size(doc, "s");
    if (doc.contains("alpha")) cfg.alpha = doc.at("alpha").get<double>();
    if (doc.contains("kappa")) cfg.kappa = doc.at("kappa").get<int>();
    if (doc.contains("beta1")) cfg.beta1 = doc.at("beta1").get<double>();
    if (doc.contains("beta2")) cfg.beta2 = doc.at("beta2").get<double>();
    return cfg;
  });
}

json config_to_json(const CheckedConfig& cfg) {
  return json{{"p", cfg.p},         {"D", cfg.D},         {"d1", cfg.d1},
              {"d2", cfg.d2},       {"s", cfg.s},         {"alpha", cfg.alpha},
              {"kappa", cfg.kappa}, {"beta1", cfg.beta1}, {"beta2", cfg.beta2},
              {"profile", to_string(cfg.profile)}};
}

simgen::Scenario scenario_from_json(const json& doc) {
  return guarded("scenario", [&] {
    if (!doc.is_object()) throw Error(ErrorCode::Input, "scenario must be a JSON object");
    simgen::Scenario sc;
    sc.p = get_size(doc, "p");
    sc.T = get_size(doc, "T");
    if (doc.contains("seed")) sc.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("noise_sigma")) sc.noise_sigma = doc.at("noise_sigma").get<double>();
    if (doc.contains("ar1")) sc.ar1 = doc.at("ar1").get<double>();
    if (doc.contains("sample_rate_hz")) sc.sample_rate_hz = doc.at("sample_rate_hz").get<double>();
    if (doc.contains("marginal")) {
      const auto m = doc.at("marginal").get<std::string>();
      if (m == "gaussian") {
        sc.marginal = simgen::Marginal::Gaussian;
      } else if (m == "uniform") {
        sc.marginal = simgen::Marginal::Uniform;
      } else {
        throw Error(ErrorCode::Scenario, "unknown marginal '" + m + "'");
      }
    }
    if (doc.contains("base_cov")) {
      const auto& b = doc.at("base_cov");
      const auto kind = b.at("kind").get<std::string>();
      if (kind == "identity") {
        sc.base.kind = simgen::CovKind::Identity;
      } else if (kind == "toeplitz") {
        sc.base.kind = simgen::CovKind::Toeplitz;
        sc.base.rho = b.at("rho").get<double>();
      } else if (kind == "matrix") {
        sc.base.kind = simgen::CovKind::Matrix;
        sc.base.matrix = matrix_from_json(b.at("values"));
      } else {
        throw Error(ErrorCode::Scenario, "unknown base_cov kind '" + kind + "'");
      }
    }
    if (doc.contains("events")) {
      for (const auto& e : doc.at("events")) {
        simgen::Event ev;
        const auto kind = e.at("kind").get<std::string>();
        ev.tau = get_size(e, "tau");
        if (e.contains("end") && !e.at("end").is_null()) ev.end = get_size(e, "end");
        if (e.contains("channels")) ev.channels = e.at("channels").get<std::vector<std::size_t>>();
        if (kind == "scale_subset") {
          ev.kind = simgen::EventKind::ScaleSubset;
          ev.factor = e.at("factor").get<double>();
        } else if (kind == "spike") {
          ev.kind = simgen::EventKind::Spike;
          ev.strength = e.at("strength").get<double>();
          if (e.contains("direction")) ev.direction = e.at("direction").get<std::vector<double>>();
        } else if (kind == "full_replace") {
          ev.kind = simgen::EventKind::FullReplace;
          ev.matrix = matrix_from_json(e.at("matrix"));
        } else {
          throw Error(ErrorCode::Scenario, "unknown event kind '" + kind + "'");
        }
        sc.events.push_back(std::move(ev));
      }
    }
    return sc;
  });
}

json truth_to_json(const simgen::GroundTruth& truth) {
  return json{{"schema_version", kSchemaVersion},
              {"change_times", truth.change_times},
              {"end_times", truth.end_times}};
}

std::vector<std::size_t> change_times_from_json(const json& doc) {
  return guarded("truth", [&] { return doc.at("change_times").get<std::vector<std::size_t>>(); });
}

validation::NullValidationConfig null_config_from_json(const json& doc) {
  return guarded("config", [&] {
    if (!doc.is_object()) throw Error(ErrorCode::Input, "config must be a JSON object");
    validation::NullValidationConfig cfg;
    if (doc.contains("alpha")) cfg.alpha = doc.at("alpha").get<double>();
    if (doc.contains("kappa")) cfg.kappa = doc.at("kappa").get<int>();
    if (doc.contains("beta1")) cfg.beta1 = doc.at("beta1").get<double>();
    if (doc.contains("beta2")) cfg.beta2 = doc.at("beta2").get<double>();
    const json& v = doc.contains("validation") ? doc.at("validation") : json::object();
    if (v.contains("p")) cfg.p = get_size(v, "p");
    if (v.contains("n1")) cfg.n1 = get_size(v, "n1");
    if (v.contains("n2")) cfg.n2 = get_size(v, "n2");
    if (v.contains("esd_p")) cfg.esd_p = get_size(v, "esd_p");
    if (v.contains("esd_n1")) cfg.esd_n1 = get_size(v, "esd_n1");
    if (v.contains("esd_n2")) cfg.esd_n2 = get_size(v, "esd_n2");
    return cfg;
  });
}

json calibration_to_json(const validation::NullCalibration& cal) {
  const auto& c = cal.config;
  return json{
      {"schema_version", kSchemaVersion},
      {"null_statistic",
       {{"p", c.p},
        {"n1", c.n1},
        {"n2", c.n2},
        {"reps", c.reps},
        {"alpha", c.alpha},
        {"kappa", c.kappa},
        {"beta1", c.beta1},
        {"beta2", c.beta2},
        {"mean", cal.mean_L},
        {"sd", cal.sd_L},
        {"threshold", cal.threshold},
        {"empirical_size", cal.empirical_size},
        {"ks_vs_gaussian", cal.ks_L_gaussian}}},
      {"spectral_law",
       {{"p", c.esd_p}, {"n1", c.esd_n1}, {"n2", c.esd_n2}, {"ks_esd_vs_lsd", cal.ks_esd_lsd}}},
      {"seed", c.seed}};
}

json screen_to_json(const ScreenResult& r) {
  json rejections = json::array();
  for (bool v : r.rejections) rejections.push_back(v);
  return json{{"threshold", r.threshold},
              {"boundaries", r.boundaries},
              {"statistics", r.statistics},
              {"rejections", rejections},
              {"raw_intervals", intervals_json(r.raw_intervals)},
              {"merged_intervals", intervals_json(r.merged_intervals)}};
}

json report_to_json(const FaultReport& report, const std::string& command) {
  json detections = json::array();
  for (const auto& d : report.detections) {
    json item{{"interval", interval_json(d.interval)},
              {"fault_time", d.fault_time},
              {"detector", to_string(d.detector)},
              {"trigger_window", d.trigger_window},
              {"consecutive_count", d.consecutive_count}};
    if (d.delay_samples) {
      item["delay_samples"] = *d.delay_samples;
      if (report.sample_rate_hz) {
        item["delay_seconds"] = static_cast<double>(*d.delay_samples) / *report.sample_rate_hz;
      }
    }
    detections.push_back(std::move(item));
  }
  json traces = json::array();
  for (const auto& t : report.traces) {
    std::size_t flagged = 0;
    for (bool f : t.flags) flagged += f ? 1 : 0;
    traces.push_back({{"interval", interval_json(t.interval)},
                      {"detector", to_string(t.kind)},
                      {"threshold", t.threshold},
                      {"windows", t.values.size()},
                      {"flagged", flagged}});
  }
  json doc{{"schema_version", kSchemaVersion},
           {"command", command},
           {"channels", report.channels},
           {"samples", report.samples},
           {"config", config_to_json(report.config)},
           {"screening", screen_to_json(report.screening)},
           {"screened_intervals", intervals_json(report.screened_intervals)},
           {"detections", detections},
           {"traces", traces}};
  doc["detector"] = command == "detect" ? json(to_string(report.detector)) : json(nullptr);
  doc["sample_rate_hz"] = report.sample_rate_hz ? json(*report.sample_rate_hz) : json(nullptr);
  return doc;
}

std::string series_csv(const ScreenResult& r) {
  std::string out = "boundary_index,t_i,L_i,threshold,reject\n";
  for (std::size_t i = 0; i < r.boundaries.size(); ++i) {
    out += std::to_string(i + 1) + ',' + std::to_string(r.boundaries[i]) + ',' +
           format_double(r.statistics[i]) + ',' + format_double(r.threshold) + ',' +
           (r.rejections[i] ? "1" : "0") + '\n';
  }
  return out;
}

std::string traces_csv(const std::vector<DetectorTrace>& traces) {
  std::string out = "interval_id,k,value,threshold,flag\n";
  for (std::size_t j = 0; j < traces.size(); ++j) {
    const auto& t = traces[j];
    const std::string thr = format_double(t.threshold);
    for (std::size_t k = 0; k < t.values.size(); ++k) {
      out += std::to_string(j + 1) + ',' + std::to_string(k + 1) + ',' +
             format_double(t.values[k]) + ',' + thr + ',' + (t.flags[k] ? "1" : "0") + '\n';
    }
  }
  return out;
}

std::string checksum(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fisherwatch::io
