#include "fisherwatch/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <utility>

#include "CLI11/CLI11.hpp"

#include "fisherwatch/detect.hpp"
#include "fisherwatch/io.hpp"
#include "fisherwatch/screening.hpp"
#include "fisherwatch/simgen.hpp"
#include "fisherwatch/validation.hpp"

namespace fisherwatch::cli {
namespace fs = std::filesystem;
using io::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240101;

struct Artifact {
  fs::path path;
  std::string content;
};

// Collects outputs and writes them only once every computation has succeeded,
// followed by the manifest describing the run.
class RunManifest {
 public:
  RunManifest(std::string subcommand, std::uint64_t seed) : subcommand_(std::move(subcommand)), seed_(seed) {}

  void add_input(const fs::path& path) {
    inputs_.push_back({{"path", path.generic_string()}, {"checksum", io::checksum(io::read_text(path))}});
  }
  void set_config(json cfg) { config_ = std::move(cfg); }
  void add(fs::path path, std::string content) { artifacts_.push_back({std::move(path), std::move(content)}); }

  void commit(const fs::path& manifest_path) {
    json listed = json::array();
    for (const auto& a : artifacts_) {
      write_file(a.path, a.content);
      listed.push_back({{"path", a.path.filename().generic_string()},
                        {"checksum", io::checksum(a.content)},
                        {"bytes", a.content.size()}});
    }
    json doc{{"schema_version", io::kSchemaVersion},
             {"subcommand", subcommand_},
             {"seed", seed_},
             {"inputs", inputs_},
             {"config", config_},
             {"output_directory", manifest_path.parent_path().generic_string()},
             {"artifacts", listed}};
    write_file(manifest_path, doc.dump(2) + "\n");
  }

 private:
  static void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::Input, "cannot write " + path.string());
      out << content;
      if (!out) throw Error(ErrorCode::Input, "failed writing " + path.string());
    }
    fs::rename(tmp, path);
  }

  std::string subcommand_;
  std::uint64_t seed_;
  json inputs_ = json::array();
  json config_ = nullptr;
  std::vector<Artifact> artifacts_;
};

struct DataOptions {
  std::string data;
  std::string config;
  bool transpose = false;
  std::optional<double> sample_rate;
};

StateMatrix load_data(const DataOptions& opt) {
  StateMatrix raw = io::read_csv(opt.data, opt.transpose);
  if (!opt.sample_rate) return raw;
  return StateMatrix(raw.values(), raw.channel_ids(), opt.sample_rate);
}

CheckedConfig load_config(const DataOptions& opt, std::size_t p) {
  const DetectionConfig user =
      opt.config.empty() ? DetectionConfig{} : io::config_from_json(io::read_json(opt.config));
  try {
    return validate_config(user, p);
  } catch (const Error& e) {
    // Parameter problems are configuration errors regardless of their cause.
    throw Error(ErrorCode::Config, e.what());
  }
}

void add_data_options(CLI::App* cmd, DataOptions& opt) {
  cmd->add_option("--data", opt.data, "Channel-major CSV (rows = channels)")->required();
  cmd->add_option("--config", opt.config, "Detection parameters (JSON)");
  cmd->add_flag("--transpose", opt.transpose, "Input CSV has rows = samples");
  cmd->add_option("--sample-rate", opt.sample_rate, "Sampling rate in Hz, for delays in seconds");
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_path,
                 std::string truth_path, std::optional<std::uint64_t> seed, bool header) {
  simgen::Scenario sc = io::scenario_from_json(io::read_json(scenario_path));
  if (seed) sc.seed = *seed;
  const auto sim = simgen::generate(sc);

  if (truth_path.empty()) truth_path = fs::path(out_path).replace_extension(".truth.json").string();
  RunManifest manifest("simulate", sc.seed);
  manifest.add_input(scenario_path);
  manifest.add(out_path, io::format_csv(sim.data, header));
  manifest.add(truth_path, io::truth_to_json(sim.truth).dump(2) + "\n");
  manifest.commit(fs::path(out_path).replace_extension(".manifest.json"));
  return kOk;
}

int cmd_screen(const DataOptions& opt, const fs::path& out_dir, std::uint64_t seed) {
  const StateMatrix X = load_data(opt);
  const CheckedConfig cfg = load_config(opt, X.channels());

  FaultReport report;
  report.config = cfg;
  report.channels = X.channels();
  report.samples = X.samples();
  report.sample_rate_hz = X.sample_rate_hz();
  report.screening = screening::screen(X, cfg);
  report.screened_intervals = report.screening.merged_intervals;

  RunManifest manifest("screen", seed);
  manifest.add_input(opt.data);
  if (!opt.config.empty()) manifest.add_input(opt.config);
  manifest.set_config(io::config_to_json(cfg));
  manifest.add(out_dir / "report.json", io::report_to_json(report, "screen").dump(2) + "\n");
  manifest.add(out_dir / "series.csv", io::series_csv(report.screening));
  manifest.commit(out_dir / "manifest.json");
  return kOk;
}

int cmd_detect(const DataOptions& opt, const std::string& method, const std::string& truth_path,
               const fs::path& out_dir, std::uint64_t seed) {
  const StateMatrix X = load_data(opt);
  const CheckedConfig cfg = load_config(opt, X.channels());
  const DetectorKind kind = detector_from_string(method);
  std::vector<std::size_t> truth;
  if (!truth_path.empty()) truth = io::change_times_from_json(io::read_json(truth_path));

  const FaultReport report = detect::localize(X, cfg, kind, truth);

  RunManifest manifest("detect", seed);
  manifest.add_input(opt.data);
  if (!opt.config.empty()) manifest.add_input(opt.config);
  if (!truth_path.empty()) manifest.add_input(truth_path);
  manifest.set_config(io::config_to_json(cfg));
  manifest.add(out_dir / "report.json", io::report_to_json(report, "detect").dump(2) + "\n");
  manifest.add(out_dir / "traces.csv", io::traces_csv(report.traces));
  manifest.commit(out_dir / "manifest.json");
  return kOk;
}

int cmd_validate_null(const std::string& config_path, std::size_t reps, const fs::path& out_dir,
                      std::uint64_t seed) {
  validation::NullValidationConfig cfg =
      config_path.empty() ? validation::NullValidationConfig{}
                          : io::null_config_from_json(io::read_json(config_path));
  cfg.reps = reps;
  cfg.seed = seed;
  const auto cal = validation::validate_null(cfg);

  RunManifest manifest("validate-null", seed);
  if (!config_path.empty()) manifest.add_input(config_path);
  manifest.add(out_dir / "calibration.json", io::calibration_to_json(cal).dump(2) + "\n");
  manifest.commit(out_dir / "manifest.json");
  return kOk;
}

int cmd_bench(const DataOptions& opt, std::size_t runs, const fs::path& out_dir,
              std::uint64_t seed) {
  const StateMatrix X = load_data(opt);
  const CheckedConfig cfg = load_config(opt, X.channels());

  json methods = json::array();
  for (DetectorKind kind : {DetectorKind::Dele, DetectorKind::Deht, DetectorKind::Mp}) {
    std::vector<double> times;
    for (std::size_t r = 0; r < runs; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto report = detect::localize(X, cfg, kind);
      const auto t1 = std::chrono::steady_clock::now();
      times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::vector<double> sorted = times;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted.size() % 2 == 1
                              ? sorted[sorted.size() / 2]
                              : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    methods.push_back({{"method", to_string(kind)}, {"median_ms", median}, {"times_ms", times}});
  }
  json doc{{"schema_version", io::kSchemaVersion},
           {"runs", runs},
           {"channels", X.channels()},
           {"samples", X.samples()},
           {"config", io::config_to_json(cfg)},
           {"methods", methods}};

  RunManifest manifest("bench", seed);
  manifest.add_input(opt.data);
  if (!opt.config.empty()) manifest.add_input(opt.config);
  manifest.set_config(io::config_to_json(cfg));
  manifest.add(out_dir / "timings.json", doc.dump(2) + "\n");
  manifest.commit(out_dir / "manifest.json");
  return kOk;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int report_error(std::ostream& err, const std::string& reason, int code, const std::string& msg) {
  err << "fisherwatch: error reason=" << reason << " exit=" << code << " message=" << one_line(msg)
      << "\n";
  return code;
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Shape:
    case ErrorCode::TooShort:
    case ErrorCode::Data:
    case ErrorCode::DegenerateChannel:
    case ErrorCode::Singular:
      return kShapeError;
    case ErrorCode::Config:
    case ErrorCode::Domain:
    case ErrorCode::Scenario:
    case ErrorCode::Input:
      return kInputError;
  }
  return kUnexpected;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Covariance change-point detection with Fisher random matrices", "fisherwatch"};
  app.require_subcommand(1);

  std::uint64_t seed = kDefaultSeed;
  std::optional<std::uint64_t> seed_override;
  std::string out_dir = ".";

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic record from a scenario");
  std::string scenario_path, sim_out, truth_out;
  bool no_header = false;
  sim->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  sim->add_option("--out", sim_out, "Output CSV")->required();
  sim->add_option("--truth-out", truth_out, "Ground-truth JSON (default: <stem>.truth.json beside --out)");
  sim->add_option("--seed", seed_override, "Override the scenario seed");
  sim->add_flag("--no-header", no_header, "Omit the sample-index header row");

  DataOptions screen_opt;
  auto* scr = app.add_subcommand("screen", "Screen the record for candidate fault intervals");
  add_data_options(scr, screen_opt);
  scr->add_option("--out-dir", out_dir, "Output directory");
  scr->add_option("--seed", seed, "Run seed (recorded in the manifest)");

  DataOptions detect_opt;
  std::string method = "dele", truth_in;
  auto* det = app.add_subcommand("detect", "Screen, then localize faults point by point");
  add_data_options(det, detect_opt);
  det->add_option("--method", method, "Detector")
      ->check(CLI::IsMember({"dele", "deht", "mp"}));
  det->add_option("--truth", truth_in, "Ground-truth JSON for delay reporting");
  det->add_option("--out-dir", out_dir, "Output directory");
  det->add_option("--seed", seed, "Run seed (recorded in the manifest)");

  std::string null_config;
  std::size_t reps = 2000;
  auto* val = app.add_subcommand("validate-null", "Monte Carlo calibration of the test statistic");
  val->add_option("--config", null_config, "Parameters (JSON)");
  val->add_option("--reps", reps, "Replications (at least 100)");
  val->add_option("--out-dir", out_dir, "Output directory");
  val->add_option("--seed", seed, "Base seed");

  DataOptions bench_opt;
  std::size_t runs = 5;
  auto* bench = app.add_subcommand("bench", "Time DELE, DEHT and MP on the same input");
  add_data_options(bench, bench_opt);
  bench->add_option("--runs", runs, "Repetitions per method")->check(CLI::PositiveNumber);
  bench->add_option("--out-dir", out_dir, "Output directory");
  bench->add_option("--seed", seed, "Run seed (recorded in the manifest)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return kOk;
    }
    return report_error(err, "usage", kInputError, e.what());
  }

  try {
    if (*sim) return cmd_simulate(scenario_path, sim_out, truth_out, seed_override, !no_header);
    if (*scr) return cmd_screen(screen_opt, out_dir, seed);
    if (*det) return cmd_detect(detect_opt, method, truth_in, out_dir, seed);
    if (*val) return cmd_validate_null(null_config, reps, out_dir, seed);
    if (*bench) return cmd_bench(bench_opt, runs, out_dir, seed);
  } catch (const Error& e) {
    return report_error(err, to_string(e.code()), exit_code_for(e.code()), e.what());
  } catch (const std::exception& e) {
    return report_error(err, "unexpected", kUnexpected, e.what());
  }
  return kUnexpected;
}

}  // namespace fisherwatch::cli
