#include "cbcc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cbcc/channel.hpp"
#include "cbcc/ergodic_scheme.hpp"
#include "cbcc/gaussian_scheme.hpp"
#include "cbcc/region.hpp"
#include "cbcc/sdof.hpp"

namespace cbcc {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void ExperimentConfig::validate() const {
  if (model != "gaussian" && model != "ergodic") {
    throw InvalidInput("model must be 'gaussian' or 'ergodic', got '" + model + "'");
  }
  if (M < 1 || N1 < 1 || N2 < 1 || J1 < 1 || J2 < 1) {
    throw InvalidInput("M, N1, N2, J1, J2 must all be >= 1");
  }
  if (snr_db_grid.empty()) throw InvalidInput("snr_db_grid must not be empty");
  for (std::size_t i = 0; i < snr_db_grid.size(); ++i) {
    if (!std::isfinite(snr_db_grid[i]) || snr_db_grid[i] < 0.0) {
      throw InvalidInput("snr_db_grid values must be finite and >= 0 dB");
    }
    if (i > 0 && snr_db_grid[i] <= snr_db_grid[i - 1]) {
      throw InvalidInput("snr_db_grid must be strictly increasing");
    }
  }
  if (trials < 1) throw InvalidInput("trials must be >= 1");
  if (blocks < 1) throw InvalidInput("blocks must be >= 1");
  if (common_state_count < 1) throw InvalidInput("common_state_count must be >= 1");
  if (power_policy.empty()) throw InvalidInput("power_policy must name at least one policy");
  for (const auto& p : power_policy) PowerPolicy::parse(p);
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("config must be a JSON object");
  static const std::set<std::string> known{
      "model", "M",      "N1",   "N2",           "J1",                 "J2",  "r1", "r2",
      "snr_db_grid", "trials", "blocks", "seed", "power_policy", "common_state_count", "out"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ParseError("unknown config field '" + key + "'");
  }
  ExperimentConfig cfg;
  auto read = [&](const char* key, auto& field) {
    if (!doc.contains(key)) return;
    try {
      doc.at(key).get_to(field);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("config field '") + key + "': " + e.what());
    }
  };
  read("model", cfg.model);
  read("M", cfg.M);
  read("N1", cfg.N1);
  read("N2", cfg.N2);
  read("J1", cfg.J1);
  read("J2", cfg.J2);
  read("r1", cfg.r1);
  read("r2", cfg.r2);
  read("snr_db_grid", cfg.snr_db_grid);
  read("trials", cfg.trials);
  read("blocks", cfg.blocks);
  read("seed", cfg.seed);
  read("common_state_count", cfg.common_state_count);
  read("out", cfg.out);
  if (doc.contains("power_policy")) {
    const auto& p = doc.at("power_policy");
    if (p.is_string()) {
      cfg.power_policy = {p.get<std::string>()};
    } else {
      read("power_policy", cfg.power_policy);
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path.string() + "'");
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  // The output directory is left out so that reruns into different
  // directories produce identical summaries.
  return {{"model", cfg.model},
          {"M", cfg.M},
          {"N1", cfg.N1},
          {"N2", cfg.N2},
          {"J1", cfg.J1},
          {"J2", cfg.J2},
          {"r1", cfg.r1},
          {"r2", cfg.r2},
          {"snr_db_grid", cfg.snr_db_grid},
          {"trials", cfg.trials},
          {"blocks", cfg.blocks},
          {"seed", cfg.seed},
          {"power_policy", cfg.power_policy},
          {"common_state_count", cfg.common_state_count}};
}

namespace {

bool grid_supports_sdof(const std::vector<double>& grid) {
  try {
    validate_sdof_grid(grid);
    return true;
  } catch (const InvalidGrid&) {
    return false;
  }
}

nlohmann::json estimate_json(const SdofEstimate& e) {
  return {{"slope", e.slope}, {"intercept", e.intercept}, {"residual", e.residual}};
}

nlohmann::json point_json(const Point<Rational>& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& x : p) out.push_back(rational_to_json(x));
  return out;
}

}  // namespace

RunOutputs run_gaussian(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& grid = cfg.snr_db_grid;
  const std::size_t G = grid.size();

  // rates[trial][grid point] = (R0, R1, R2)
  std::vector<std::vector<RateTriple>> rates(cfg.trials, std::vector<RateTriple>(G));
  std::vector<double> leak_max(G, 0.0);
  std::size_t K = 0;
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    const ChannelGenSpec spec{cfg.M, cfg.N1, cfg.N2, cfg.J1, cfg.J2, cfg.seed + trial};
    const CompoundChannelSet ch = generate_compound(spec);
    const BeamformerSet bf = build_beamformers(ch, cfg.r1, cfg.r2);
    K = bf.K;
    for (std::size_t g = 0; g < G; ++g) {
      const PowerAllocation pa = equal_power(bf, power_from_db(grid[g]));
      rates[trial][g] = worst_case_rates(ch, bf, pa);
      leak_max[g] = std::max(leak_max[g], max_leakage(ch, bf, pa));
    }
  }

  std::vector<std::array<double, 3>> mean(G, {0.0, 0.0, 0.0});
  for (std::size_t g = 0; g < G; ++g) {
    for (const auto& trial : rates) {
      mean[g][0] += trial[g].R0;
      mean[g][1] += trial[g].R1;
      mean[g][2] += trial[g].R2;
    }
    for (double& v : mean[g]) v /= static_cast<double>(cfg.trials);
  }

  RunOutputs out;
  std::ostringstream csv;
  csv << "snr_db,R0,R1,R2,leakage_max\n";
  for (std::size_t g = 0; g < G; ++g) {
    csv << format_number(grid[g]) << ',' << format_number(mean[g][0]) << ','
        << format_number(mean[g][1]) << ',' << format_number(mean[g][2]) << ','
        << format_number(leak_max[g]) << '\n';
  }
  out.rates_csv = csv.str();

  const RateRegion<Rational> region = gaussian_dof_region(cfg.M, cfg.N1, cfg.N2, cfg.J1, cfg.J2);
  out.region = to_json(region);

  const long r0_target = common_dof_target(cfg.M, cfg.N1, cfg.N2, cfg.r1, cfg.r2);
  const std::array<double, 3> target{static_cast<double>(r0_target), static_cast<double>(cfg.r1),
                                     static_cast<double>(cfg.r2)};
  const Point<Rational> target_point{Rational(r0_target), Rational(static_cast<std::int64_t>(cfg.r1)),
                                     Rational(static_cast<std::int64_t>(cfg.r2))};

  nlohmann::json summary;
  summary["command"] = "gaussian";
  summary["config"] = to_json(cfg);
  summary["common_streams"] = K;
  summary["target_dof"] = {{"r0", target[0]}, {"r1", target[1]}, {"r2", target[2]}};
  summary["target_in_region"] = contains(region, target_point);
  summary["tolerance"] = kSlopeTolerance;

  if (grid_supports_sdof(grid)) {
    static const char* names[3] = {"r0", "r1", "r2"};
    nlohmann::json per_trial = nlohmann::json::array();
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      nlohmann::json row;
      for (int c = 0; c < 3; ++c) {
        std::vector<double> y;
        for (const auto& r : rates[trial]) y.push_back(c == 0 ? r.R0 : c == 1 ? r.R1 : r.R2);
        row[names[c]] = fit_sdof(grid, y).slope;
      }
      row["seed"] = cfg.seed + trial;
      per_trial.push_back(row);
    }
    nlohmann::json estimates;
    bool pass = true;
    for (int c = 0; c < 3; ++c) {
      std::vector<double> y;
      for (const auto& m : mean) y.push_back(m[c]);
      const SdofEstimate e = fit_sdof(grid, y);
      const bool ok = std::abs(e.slope - target[c]) <= kSlopeTolerance;
      pass = pass && ok;
      auto j = estimate_json(e);
      j["target"] = target[c];
      j["pass"] = ok;
      estimates[names[c]] = j;
    }
    summary["sdof"] = estimates;
    summary["sdof_per_trial"] = per_trial;
    summary["pass"] = pass;
    out.pass = pass;
  } else {
    summary["sdof"] = nullptr;
    summary["pass"] = nullptr;
  }
  out.summary = summary;
  return out;
}

RunOutputs run_ergodic(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.N1 != 1 || cfg.N2 != 1) {
    throw InvalidInput("the block-fading model has single-antenna receivers (N1 = N2 = 1)");
  }
  const auto& grid = cfg.snr_db_grid;
  const std::size_t G = grid.size();

  std::vector<FadingProcess> processes;
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    FadingParams fp{cfg.M, cfg.J1, cfg.J2, cfg.common_state_count, cfg.blocks, cfg.seed + trial};
    processes.push_back(FadingProcess::generate(fp));
  }

  RunOutputs out;
  std::ostringstream csv;
  csv << "snr_db,policy,R1m,R2m,leak_violation_freq\n";
  nlohmann::json policies = nlohmann::json::object();
  std::vector<std::string> order;
  bool pass = true;
  const bool fit = grid_supports_sdof(grid);

  for (const auto& policy_text : cfg.power_policy) {
    const PowerPolicy policy = PowerPolicy::parse(policy_text);
    std::vector<double> r1(G, 0.0), r2(G, 0.0);
    std::array<double, 2> max_leak{};
    for (std::size_t g = 0; g < G; ++g) {
      double violation = 0.0;
      for (const auto& fp : processes) {
        const AveragedRates a = averaged_secrecy_rates(fp, policy, power_from_db(grid[g]));
        r1[g] += a.R[0];
        r2[g] += a.R[1];
        violation += a.leak_violation_freq;
        max_leak[0] = std::max(max_leak[0], a.max_leakage[0]);
        max_leak[1] = std::max(max_leak[1], a.max_leakage[1]);
      }
      const auto n = static_cast<double>(processes.size());
      r1[g] /= n;
      r2[g] /= n;
      csv << format_number(grid[g]) << ',' << policy.name() << ',' << format_number(r1[g]) << ','
          << format_number(r2[g]) << ',' << format_number(violation / n) << '\n';
    }
    const auto target = expected_policy_dof(cfg.M, cfg.J1, cfg.J2, policy);
    nlohmann::json entry;
    entry["target_dof"] = {rational_to_json(target[0]), rational_to_json(target[1])};
    entry["max_leakage"] = max_leak;
    if (fit) {
      const SdofEstimate e1 = fit_sdof(grid, r1);
      const SdofEstimate e2 = fit_sdof(grid, r2);
      const bool ok1 = std::abs(e1.slope - ScalarTraits<Rational>::to_double(target[0])) <= kSlopeTolerance;
      const bool ok2 = std::abs(e2.slope - ScalarTraits<Rational>::to_double(target[1])) <= kSlopeTolerance;
      auto j1 = estimate_json(e1);
      j1["pass"] = ok1;
      auto j2 = estimate_json(e2);
      j2["pass"] = ok2;
      entry["sdof"] = {{"r1", j1}, {"r2", j2}};
      entry["pass"] = ok1 && ok2;
      pass = pass && ok1 && ok2;
    }
    policies[policy.name()] = entry;
    order.push_back(policy.name());
  }
  out.rates_csv = csv.str();

  const RateRegion<Rational> region = ergodic_region(cfg.M, cfg.J1, cfg.J2);
  out.region = to_json(region);

  nlohmann::json summary;
  summary["command"] = "ergodic";
  summary["config"] = to_json(cfg);
  summary["policies"] = policies;
  summary["policy_order"] = order;
  summary["tolerance"] = kSlopeTolerance;
  if (cfg.J1 >= cfg.M && cfg.J2 >= cfg.M) {
    const FClassification f = f_classifier(cfg.M, cfg.J1, cfg.J2);
    summary["f"] = {{"value", rational_to_json(f.f)}, {"text", to_string(f.f)}, {"positive", f.positive}};
  } else {
    summary["f"] = nullptr;
  }
  summary["pass"] = fit ? nlohmann::json(pass) : nlohmann::json(nullptr);
  out.summary = summary;
  out.pass = pass;
  return out;
}

RunOutputs compare_models(const ExperimentConfig& cfg) {
  if (cfg.N1 != 1 || cfg.N2 != 1) {
    throw DimensionMismatch("compare needs single-antenna receivers to match the MISO model, got N1 = " +
                            std::to_string(cfg.N1) + ", N2 = " + std::to_string(cfg.N2));
  }
  if (cfg.M < 1 || cfg.J1 < 1 || cfg.J2 < 1) throw InvalidInput("M, J1, J2 must be >= 1");
  const RateRegion<Rational> ergodic = ergodic_region(cfg.M, cfg.J1, cfg.J2);
  const RateRegion<Rational> gaussian3 = gaussian_dof_region(cfg.M, 1, 1, cfg.J1, cfg.J2);
  const RateRegion<Rational> gaussian = slice_at_zero(gaussian3, 0);

  const bool e_dom = dominates(ergodic, gaussian);
  const bool g_dom = dominates(gaussian, ergodic);
  auto missing = witnesses(ergodic, gaussian);
  // Most balanced missing vertex first, then larger sum.
  std::sort(missing.begin(), missing.end(), [](const Point<Rational>& a, const Point<Rational>& b) {
    const Rational ma = std::min(a[0], a[1]);
    const Rational mb = std::min(b[0], b[1]);
    if (ma != mb) return ma > mb;
    if (a[0] + a[1] != b[0] + b[1]) return a[0] + a[1] > b[0] + b[1];
    return a < b;
  });

  nlohmann::json summary;
  summary["command"] = "compare";
  summary["config"] = to_json(cfg);
  summary["ergodic_region"] = to_json(ergodic);
  summary["gaussian_region"] = to_json(gaussian);
  summary["ergodic_dominates_gaussian"] = e_dom;
  summary["gaussian_dominates_ergodic"] = g_dom;
  summary["strictly_larger"] = e_dom && !g_dom;
  nlohmann::json wit = nlohmann::json::array();
  for (const auto& w : missing) wit.push_back(point_json(w));
  summary["witnesses"] = wit;
  summary["witness"] = missing.empty() ? nlohmann::json(nullptr) : point_json(missing.front());
  if (cfg.J1 >= cfg.M && cfg.J2 >= cfg.M) {
    const FClassification f = f_classifier(cfg.M, cfg.J1, cfg.J2);
    summary["f"] = {{"value", rational_to_json(f.f)}, {"text", to_string(f.f)}, {"positive", f.positive}};
  } else {
    summary["f"] = nullptr;
  }

  RunOutputs out;
  out.region = {{"ergodic", to_json(ergodic)}, {"gaussian", to_json(gaussian)},
                {"gaussian_3d", to_json(gaussian3)}};
  out.summary = summary;
  out.pass = true;
  return out;
}

RunOutputs verify_channel(const ExperimentConfig& cfg,
                          const std::optional<std::filesystem::path>& channel_path) {
  RunOutputs out;
  std::optional<CompoundChannelSet> ch;
  if (channel_path) {
    ch = load_channel(*channel_path);
  } else {
    const ChannelGenSpec spec{cfg.M, cfg.N1, cfg.N2, cfg.J1, cfg.J2, cfg.seed};
    ch = generate_compound(spec);
    out.channel = to_json(*ch);
  }
  const GenericRankReport report = verify_generic_rank(*ch);
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& subset : report.failures) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r : subset) rows.push_back({{"row", r}, {"label", ch->row_label(r)}});
    failures.push_back(rows);
  }
  out.summary = {{"command", "verify-channel"},
                 {"M", ch->M()},
                 {"N1", ch->N(User::kOne)},
                 {"N2", ch->N(User::kTwo)},
                 {"J1", ch->J(User::kOne)},
                 {"J2", ch->J(User::kTwo)},
                 {"digest", digest(*ch)},
                 {"pass", report.pass},
                 {"exhaustive", report.exhaustive},
                 {"subset_size", report.subset_size},
                 {"total_rows", report.total_rows},
                 {"subsets_checked", report.subsets_checked},
                 {"failures", failures}};
  out.pass = report.pass;
  return out;
}

RunOutputs analytic_region(const ExperimentConfig& cfg) {
  RunOutputs out;
  nlohmann::json summary{{"command", "region"}, {"model", cfg.model}};
  if (cfg.model == "gaussian") {
    const auto region = gaussian_dof_region(cfg.M, cfg.N1, cfg.N2, cfg.J1, cfg.J2);
    out.region = to_json(region);
    summary["parameters"] = {{"M", cfg.M}, {"N1", cfg.N1}, {"N2", cfg.N2}, {"J1", cfg.J1}, {"J2", cfg.J2}};
    summary["coordinates"] = {"r0", "r1", "r2"};
  } else if (cfg.model == "ergodic") {
    const auto region = ergodic_region(cfg.M, cfg.J1, cfg.J2);
    out.region = to_json(region);
    summary["parameters"] = {{"M", cfg.M}, {"J1", cfg.J1}, {"J2", cfg.J2}};
    summary["coordinates"] = {"r1", "r2"};
    if (cfg.J1 >= cfg.M && cfg.J2 >= cfg.M) {
      const FClassification f = f_classifier(cfg.M, cfg.J1, cfg.J2);
      summary["f"] = {{"value", rational_to_json(f.f)}, {"text", to_string(f.f)}, {"positive", f.positive}};
    }
  } else {
    throw InvalidInput("model must be 'gaussian' or 'ergodic', got '" + cfg.model + "'");
  }
  summary["region"] = out.region;
  out.summary = summary;
  return out;
}

void write_outputs(const RunOutputs& outputs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write '" + path.string() + "'");
    f << text;
  };
  if (!outputs.rates_csv.empty()) write("rates.csv", outputs.rates_csv);
  if (!outputs.region.is_null()) write("region.json", outputs.region.dump(2) + "\n");
  if (!outputs.channel.is_null()) write("channel.json", outputs.channel.dump(2) + "\n");
  write("summary.json", outputs.summary.dump(2) + "\n");
}

}  // namespace cbcc
