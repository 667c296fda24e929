#pragma once

// Batch experiments behind the command-line tool. Every function here is a
// deterministic function of its config; the CLI only parses arguments and
// writes the returned artifacts.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cbcc {

/// Slope-vs-target acceptance band for simulated d.o.f.
inline constexpr double kSlopeTolerance = 0.05;

struct ExperimentConfig {
  std::string model = "gaussian";  // "gaussian" or "ergodic"
  std::size_t M = 4;
  std::size_t N1 = 1;
  std::size_t N2 = 1;
  std::size_t J1 = 2;
  std::size_t J2 = 2;
  std::size_t r1 = 1;
  std::size_t r2 = 1;
  std::vector<double> snr_db_grid{60.0, 80.0, 100.0};
  std::size_t trials = 1;
  std::size_t blocks = 10000;
  std::uint64_t seed = 1;
  std::vector<std::string> power_policy{"full1", "full2", "equal"};
  std::size_t common_state_count = 4;
  std::string out = ".";

  /// Grid strictly increasing and >= 0 dB; trials and blocks >= 1.
  void validate() const;
};

/// Reads a config document; keys mirror the field names. "power_policy" may
/// be a single string or an array. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Artifacts of one run. Empty rates_csv / null region means "not emitted".
struct RunOutputs {
  std::string rates_csv;
  nlohmann::json region;
  nlohmann::json summary;
  nlohmann::json channel;  // channel.json, only for generated channels
  bool pass = true;
};

/// Null-space superposition scheme on `trials` channels (seeds seed,
/// seed+1, ...). CSV columns: snr_db,R0,R1,R2,leakage_max with rates
/// averaged over trials and the leakage maximized over them.
RunOutputs run_gaussian(const ExperimentConfig& cfg);

/// Zero-forcing block-fading scheme for each power policy. CSV columns:
/// snr_db,policy,R1m,R2m,leak_violation_freq, averaged over trials.
RunOutputs run_ergodic(const ExperimentConfig& cfg);

/// Analytic regions of both models for single-antenna receivers, with the
/// dominance verdict and the ergodic vertices the constant-state region
/// misses.
RunOutputs compare_models(const ExperimentConfig& cfg);

/// Generic-rank check of a stored channel, or of one generated from the
/// config when `channel_path` is empty (that channel is also emitted).
RunOutputs verify_channel(const ExperimentConfig& cfg,
                          const std::optional<std::filesystem::path>& channel_path);

/// Analytic region for cfg.model.
RunOutputs analytic_region(const ExperimentConfig& cfg);

/// Writes rates.csv (when non-empty), region.json and channel.json (when
/// non-null) and summary.json into `dir`, creating it if needed.
void write_outputs(const RunOutputs& outputs, const std::filesystem::path& dir);

/// %.12g
std::string format_number(double x);

}  // namespace cbcc
