// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cbcc/channel.hpp"
#include "cbcc/ergodic_scheme.hpp"
#include "cbcc/errors.hpp"
#include "cbcc/experiment.hpp"
#include "cbcc/gaussian_scheme.hpp"
#include "cbcc/region.hpp"
#include "cbcc/sdof.hpp"

using namespace cbcc;
using R = Rational;
using P = Point<Rational>;

namespace {

constexpr double kTol = kSlopeTolerance;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<P> nonzero_vertices(const RateRegion<R>& r) {
  std::vector<P> out;
  for (const auto& v : r.vertices) {
    bool zero = true;
    for (const auto& x : v) zero = zero && x == R(0);
    if (!zero) out.push_back(v);
  }
  return out;
}

std::array<double, 3> gaussian_slopes(const CompoundChannelSet& ch, const BeamformerSet& bf) {
  const auto est = estimate_sdof_components(
      [&](double p) {
        const auto r = worst_case_rates(ch, bf, equal_power(bf, p));
        Eigen::VectorXd v(3);
        v << r.R0, r.R1, r.R2;
        return v;
      },
      kDefaultSnrGridDb);
  return {est[0].slope, est[1].slope, est[2].slope};
}

std::array<double, 2> ergodic_slopes(const FadingProcess& fp, const PowerPolicy& policy) {
  const auto est = estimate_sdof_components(
      [&](double p) {
        const auto a = averaged_secrecy_rates(fp, policy, p);
        Eigen::VectorXd v(2);
        v << a.R[0], a.R[1];
        return v;
      },
      kDefaultSnrGridDb);
  return {est[0].slope, est[1].slope};
}

Outcome certificates() {
  Outcome o;
  std::size_t ok = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto ch = generate_compound({4, 1, 1, 2, 2, seed});
    try {
      const auto bf = build_confidential_beamformers(ch, 1, 1);
      bool good = true;
      for (User k : {User::kOne, User::kTwo}) {
        const User u = other(k);
        for (std::size_t l = 1; l <= ch.J(u); ++l)
          good = good && (ch.H(u, l) * bf.V(k)).norm() <= 1e-9 * ch.H(u, l).norm();
        for (std::size_t j = 1; j <= ch.J(k); ++j) good = good && numerical_rank(ch.H(k, j) * bf.V(k)) == 1;
      }
      ok += good ? 1 : 0;
    } catch (const std::exception&) {
    }
  }
  o.detail = std::to_string(ok) + "/200 certified";
  o.pass = ok == 200;
  return o;
}

Outcome gaussian_slope_law() {
  Outcome o;
  std::array<double, 3> mean{};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ch = generate_compound({4, 1, 1, 2, 2, seed});
    const auto s = gaussian_slopes(ch, build_beamformers(ch, 1, 1));
    for (int c = 0; c < 3; ++c) mean[c] += s[c] / 20.0;
  }
  o.detail = fmt("mean slopes (%.4f, %.4f, %.4f)", mean[0], mean[1], mean[2]);
  o.pass = std::abs(mean[0]) <= kTol && std::abs(mean[1] - 1) <= kTol && std::abs(mean[2] - 1) <= kTol;
  return o;
}

Outcome common_message_slope() {
  Outcome o;
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ch = generate_compound({4, 2, 1, 1, 1, seed});
    mean += gaussian_slopes(ch, build_beamformers(ch, 1, 0))[0] / 20.0;
  }
  const long target = common_dof_target(4, 2, 1, 1, 0);
  o.detail = fmt("r0 slope %.4f, target %.0f", mean, static_cast<double>(target));
  o.pass = target == 1 && std::abs(mean - 1.0) <= kTol;
  return o;
}

Outcome degenerate_region() {
  Outcome o;
  const auto region = gaussian_dof_region(7, 1, 1, 8, 8);
  const auto expected = region_from_inequalities<R>(
      3, {{{R(1), R(0), R(0)}, R(1)}, {{R(0), R(1), R(0)}, R(0)}, {{R(0), R(0), R(1)}, R(0)}});
  o.require(region.vertices == std::vector<P>{{R(0), R(0), R(0)}, {R(1), R(0), R(0)}}, "vertex set");
  o.require(equivalent(region, expected), "region differs");
  int raised = 0, attempts = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ch = generate_compound({7, 1, 1, 8, 8, seed});
    for (auto [r1, r2] : {std::pair<std::size_t, std::size_t>{1, 0}, {0, 1}, {1, 1}}) {
      ++attempts;
      try {
        build_confidential_beamformers(ch, r1, r2);
      } catch (const FeasibilityError&) {
        ++raised;
      }
    }
  }
  o.require(raised == attempts, "construction did not raise");
  if (o.pass) o.detail = "region {(r0,0,0): r0 <= 1}; " + std::to_string(raised) + "/" +
                         std::to_string(attempts) + " constructions raised";
  return o;
}

Outcome all_nulled_regime() {
  Outcome o;
  const auto fp = FadingProcess::generate({3, 2, 2, 4, 10000, 1});
  const auto s = ergodic_slopes(fp, PowerPolicy::equal());
  std::size_t leaky = 0;
  for (double db : kDefaultSnrGridDb) {
    const PowerSplit p = PowerPolicy::equal().at(power_from_db(db));
    for (std::size_t t = 1; t <= 10000; ++t) {
      const auto& st = fp.common_state(sample_block(fp, t).common_state);
      const auto rec = block_secrecy_rates(block_gains(st, zf_beamformers(fp, t)), p, t);
      leaky += (rec.leakage[0] != 0.0 || rec.leakage[1] != 0.0) ? 1 : 0;
    }
  }
  o.detail = fmt("slopes (%.4f, %.4f); ", s[0], s[1]) + std::to_string(leaky) + " leaking blocks";
  o.pass = std::abs(s[0] - 1) <= kTol && std::abs(s[1] - 1) <= kTol && leaky == 0;
  return o;
}

Outcome partial_nulling_regime() {
  Outcome o;
  const auto fp = FadingProcess::generate({3, 2, 4, 4, 10000, 1});
  const auto f1 = ergodic_slopes(fp, PowerPolicy::full_to_one());
  const auto f2 = ergodic_slopes(fp, PowerPolicy::full_to_two());
  const auto eq = ergodic_slopes(fp, PowerPolicy::equal());
  o.require(std::abs(f1[0] - 0.5) <= kTol && std::abs(f1[1]) <= kTol, fmt("full1 (%.4f, %.4f)", f1[0], f1[1]));
  o.require(std::abs(f2[0]) <= kTol && std::abs(f2[1] - 1) <= kTol, fmt("full2 (%.4f, %.4f)", f2[0], f2[1]));
  o.require(std::abs(eq[0] - 0.5) <= kTol && std::abs(eq[1] - 0.5) <= kTol, fmt("equal (%.4f, %.4f)", eq[0], eq[1]));
  const auto region = ergodic_region(3, 2, 4);
  const auto expected = region_from_inequalities<R>(2, {{{R(1), R(0)}, R(1, 2)}, {{R(1), R(1)}, R(1)}});
  o.require(region.vertices == expected.vertices && region.inequalities == expected.inequalities,
            "region differs from {r1 <= 1/2, r1 + r2 <= 1}");
  if (o.pass) {
    o.detail = fmt("full1 (%.4f, %.4f), ", f1[0], f1[1]) + fmt("full2 (%.4f, %.4f), ", f2[0], f2[1]) +
               fmt("equal (%.4f, %.4f); region exact", eq[0], eq[1]);
  }
  return o;
}

Outcome positive_f_regime() {
  Outcome o;
  const auto f = f_classifier(7, 8, 8);
  o.require(f.f == R(1, 8) && f.positive, "f = " + to_string(f.f));
  const auto fp = FadingProcess::generate({7, 8, 8, 4, 10000, 1});
  const auto eq = ergodic_slopes(fp, PowerPolicy::equal());
  o.require(std::abs(eq[0] - 0.5) <= kTol && std::abs(eq[1] - 0.5) <= kTol, fmt("equal (%.4f, %.4f)", eq[0], eq[1]));
  const std::vector<P> expected{{R(0), R(3, 4)}, {R(1, 2), R(1, 2)}, {R(3, 4), R(0)}};
  o.require(nonzero_vertices(ergodic_region(7, 8, 8)) == expected, "vertex set");
  ExperimentConfig cfg;
  cfg.M = 7;
  cfg.J1 = 8;
  cfg.J2 = 8;
  const auto cmp = compare_models(cfg).summary;
  o.require(cmp["strictly_larger"] == true, "compare: not strictly larger");
  o.require(cmp["witness"] == nlohmann::json::parse("[[1,2],[1,2]]"), "compare witness " + cmp["witness"].dump());
  if (o.pass) o.detail = "f = 1/8; " + fmt("equal (%.4f, %.4f); ", eq[0], eq[1]) + "witness (1/2, 1/2)";
  return o;
}

Outcome nonpositive_f_regime() {
  Outcome o;
  const auto f = f_classifier(2, 4, 4);
  o.require(f.f == R(-5, 8) && !f.positive, "f = " + to_string(f.f));
  const auto region = ergodic_region(2, 4, 4);
  const std::vector<P> expected{{R(0), R(1, 4)}, {R(1, 4), R(0)}};
  o.require(nonzero_vertices(region) == expected, "vertex set");
  const R rs = R(1, 4) + R(1, 4) - R(1);
  o.require(rs == R(-1, 2), "r_s = " + to_string(rs));
  o.require(!has_vertex(region, P{rs, rs}) && !contains(region, P{rs, rs}), "(r_s, r_s) accepted");
  if (o.pass) o.detail = "f = -5/8; vertices {(1/4,0), (0,1/4)}; (-1/2,-1/2) omitted";
  return o;
}

Outcome monte_carlo_vs_exact() {
  Outcome o;
  int ok = 0;
  const double P = power_from_db(60.0);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto fp = FadingProcess::generate({7, 8, 8, 4, 100000, seed});
    const auto avg = averaged_secrecy_rates(fp, PowerPolicy::equal(), P);
    const auto exact = expected_secrecy_rates(fp, PowerPolicy::equal(), P);
    bool good = true;
    for (int k = 0; k < 2; ++k) {
      const double z = std::abs(avg.R[k] - exact[k]) / avg.std_error[k];
      worst = std::max(worst, z);
      good = good && z <= 3.0;
    }
    ok += good ? 1 : 0;
  }
  o.detail = std::to_string(ok) + "/10 seeds within 3 SE" + fmt(" (max %.2f SE)", worst);
  o.pass = ok == 10;
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const auto root = std::filesystem::temp_directory_path() / "cbcc_acceptance_determinism";
  std::filesystem::remove_all(root);
  ExperimentConfig g;
  g.trials = 3;
  ExperimentConfig e;
  e.model = "ergodic";
  e.M = 7;
  e.J1 = 8;
  e.J2 = 8;
  e.blocks = 2000;
  const std::vector<std::pair<std::string, std::function<RunOutputs()>>> runs{
      {"gaussian", [&] { return run_gaussian(g); }},
      {"ergodic", [&] { return run_ergodic(e); }},
      {"compare", [&] { return compare_models(e); }},
      {"verify-channel", [&] { return verify_channel(g, std::nullopt); }},
      {"region", [&] { return analytic_region(e); }}};
  for (const auto& [name, run] : runs) {
    write_outputs(run(), root / name / "a");
    write_outputs(run(), root / name / "b");
    for (const char* file : {"rates.csv", "summary.json"}) {
      const auto a = root / name / "a" / file;
      const auto b = root / name / "b" / file;
      if (!std::filesystem::exists(a)) continue;
      o.require(slurp(a) == slurp(b), name + "/" + file + " differs");
    }
  }
  std::filesystem::remove_all(root);
  if (o.pass) o.detail = "5 commands, repeated outputs byte-identical";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double time_limit_s;  // 0 = none
  };
  const std::vector<Criterion> criteria{
      {"beamformer certificates, 200 channels", certificates, 10.0},
      {"constant-channel slope law, 20 channels", gaussian_slope_law, 30.0},
      {"common-message slope", common_message_slope, 0.0},
      {"degenerate constant-channel region", degenerate_region, 0.0},
      {"block fading, every state nulled", all_nulled_regime, 60.0},
      {"block fading, partial nulling", partial_nulling_regime, 0.0},
      {"block fading, f > 0", positive_f_regime, 0.0},
      {"block fading, f <= 0", nonpositive_f_regime, 0.0},
      {"Monte Carlo vs exact expectation", monte_carlo_vs_exact, 0.0},
      {"determinism", determinism, 0.0},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].time_limit_s > 0 && secs >= criteria[i].time_limit_s) {
      o.require(false, fmt("took %.1f s, limit %.0f s", secs, criteria[i].time_limit_s));
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] criterion %zu: %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
