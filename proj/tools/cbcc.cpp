// cbcc: batch runner for the compound broadcast-channel experiments.
//
//   cbcc gaussian [--config cfg.json] [--seed N] [--out DIR] [--M 4 ...]
//   cbcc ergodic | compare | region | verify-channel [--channel ch.json]
//
// Exit status: 0 pass, 2 slope/rank check failed, 1 error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cbcc/experiment.hpp"

namespace {

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> model;
  std::optional<std::size_t> M, N1, N2, J1, J2, r1, r2, trials, blocks, common_state_count;
  std::optional<std::uint64_t> seed;
  std::vector<double> snr_db_grid;
  std::vector<std::string> power_policy;
  std::optional<std::string> out;
  std::optional<std::string> channel;

  void add_to(CLI::App& app, bool with_channel) {
    app.add_option("--config", config, "JSON config file");
    app.add_option("--seed", seed, "base seed");
    app.add_option("--out", out, "output directory");
    app.add_option("--model", model, "gaussian or ergodic");
    app.add_option("--M", M);
    app.add_option("--N1", N1);
    app.add_option("--N2", N2);
    app.add_option("--J1", J1);
    app.add_option("--J2", J2);
    app.add_option("--r1", r1);
    app.add_option("--r2", r2);
    app.add_option("--snr_db_grid", snr_db_grid, "SNR points in dB")->delimiter(',');
    app.add_option("--trials", trials);
    app.add_option("--blocks", blocks);
    app.add_option("--power_policy", power_policy, "full1, full2, equal or split(x)")
        ->delimiter(',');
    app.add_option("--common_state_count", common_state_count);
    if (with_channel) app.add_option("--channel", channel, "channel JSON to check");
  }

  cbcc::ExperimentConfig resolve() const {
    cbcc::ExperimentConfig cfg = config ? cbcc::load_config(*config) : cbcc::ExperimentConfig{};
    auto set = [](auto& field, const auto& value) {
      if (value) field = *value;
    };
    set(cfg.model, model);
    set(cfg.M, M);
    set(cfg.N1, N1);
    set(cfg.N2, N2);
    set(cfg.J1, J1);
    set(cfg.J2, J2);
    set(cfg.r1, r1);
    set(cfg.r2, r2);
    set(cfg.trials, trials);
    set(cfg.blocks, blocks);
    set(cfg.common_state_count, common_state_count);
    set(cfg.seed, seed);
    set(cfg.out, out);
    if (!snr_db_grid.empty()) cfg.snr_db_grid = snr_db_grid;
    if (!power_policy.empty()) cfg.power_policy = power_policy;
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compound broadcast channel with confidential messages: experiments"};
  app.require_subcommand(1);

  Overrides ov;
  auto* gaussian = app.add_subcommand("gaussian", "null-space superposition scheme, constant channel");
  auto* ergodic = app.add_subcommand("ergodic", "zero-forcing scheme, block fading");
  auto* compare = app.add_subcommand("compare", "analytic regions of both models side by side");
  auto* verify = app.add_subcommand("verify-channel", "generic-rank check of a compound channel");
  auto* region = app.add_subcommand("region", "analytic s.d.o.f. region for --model");
  for (auto* sub : {gaussian, ergodic, compare, region}) ov.add_to(*sub, false);
  ov.add_to(*verify, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const cbcc::ExperimentConfig cfg = ov.resolve();
    cbcc::RunOutputs outputs;
    if (gaussian->parsed()) {
      outputs = cbcc::run_gaussian(cfg);
    } else if (ergodic->parsed()) {
      outputs = cbcc::run_ergodic(cfg);
    } else if (compare->parsed()) {
      outputs = cbcc::compare_models(cfg);
    } else if (verify->parsed()) {
      std::optional<std::filesystem::path> path;
      if (ov.channel) path = *ov.channel;
      outputs = cbcc::verify_channel(cfg, path);
    } else {
      outputs = cbcc::analytic_region(cfg);
    }
    cbcc::write_outputs(outputs, cfg.out);
    if (!outputs.pass) {
      std::fprintf(stderr, "cbcc: check failed, see %s\n",
                   (std::filesystem::path(cfg.out) / "summary.json").string().c_str());
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cbcc: %s\n", e.what());
    return 1;
  }
}
