#pragma once

// Ergodic block-fading compound MISO broadcast channel with confidential
// messages (no common message): per-block zero-forcing, variable-rate
// secrecy accounting, Monte Carlo averaging and the analytic regions.

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cbcc/channel.hpp"
#include "cbcc/region.hpp"

namespace cbcc {

/// Gains at or below this magnitude count as nulled.
inline constexpr double kNullGainTolerance = 1e-9;

struct FadingParams {
  std::size_t M = 2;
  std::size_t J1 = 1;
  std::size_t J2 = 1;
  std::size_t common_state_count = 4;  // size of the H[t] alphabet
  std::size_t blocks = 1;              // m
  std::uint64_t seed = 0;
  std::size_t max_resamples = 16;

  void validate() const;
};

/// The fading alphabet: for every common state H = 1..N a MISO compound
/// channel whose rows are h_k^j[H]^H. Each one passes the generic-rank check.
class FadingProcess {
 public:
  static FadingProcess generate(const FadingParams& params, RankTolerance tol = {});

  const FadingParams& params() const noexcept { return params_; }
  /// Channel vectors of common state n (1-based), as a CompoundChannelSet.
  const CompoundChannelSet& common_state(std::size_t n) const;

 private:
  FadingProcess(FadingParams params, std::vector<CompoundChannelSet> states)
      : params_(params), states_(std::move(states)) {}

  FadingParams params_;
  std::vector<CompoundChannelSet> states_;
};

struct BlockDraw {
  std::size_t t = 0;
  std::size_t common_state = 1;  // H[t]
  std::size_t a1 = 1;            // A_1[t]
  std::size_t a2 = 1;            // A_2[t]
};

/// Independent uniform draws of (H[t], A1[t], A2[t]); a pure function of
/// (seed, t). Requires 1 <= t <= blocks.
BlockDraw sample_block(const FadingProcess& fp, std::size_t t);

struct ZfBeamformers {
  ComplexVector v1;
  ComplexVector v2;
};

/// Number of user k's states that the other user's beamformer nulls.
inline std::size_t nulled_state_count(std::size_t M, std::size_t J_k) {
  return std::min(J_k, M - 1);
}

/// Unit-norm v1 orthogonal to h_2^1..h_2^{min(J2, M-1)} and v2 orthogonal to
/// h_1^1..h_1^{min(J1, M-1)}. When some direct gain h_k^j^H v_k is not above
/// 1e-9 the choice is rotated once inside the null space (normalized sum of
/// its basis vectors); if that also fails, DegenerateBlock is thrown with
/// `block` as the index.
ZfBeamformers zf_beamformers_for_state(const CompoundChannelSet& state, RankTolerance tol = {},
                                       std::size_t block = 0);
ZfBeamformers zf_beamformers(const FadingProcess& fp, std::size_t t, RankTolerance tol = {});

/// phi[k][i][j] = h_k^j^H v_i for receiver k, stream i, state j (0-based
/// here). States j < nulled[k] of receiver k do not see the other stream.
struct ZfBlockGains {
  std::array<std::size_t, 2> J{};
  std::array<std::size_t, 2> nulled{};
  std::array<std::array<std::vector<std::complex<double>>, 2>, 2> phi;

  const std::complex<double>& gain(User rx, User stream, std::size_t j) const {
    return phi[index_of(rx)][index_of(stream)][j - 1];
  }
};

ZfBlockGains block_gains(const CompoundChannelSet& state, const ZfBeamformers& bf);

/// Per-user transmit powers within a block.
struct PowerSplit {
  double p1 = 0.0;
  double p2 = 0.0;

  double p(User k) const { return k == User::kOne ? p1 : p2; }
};

/// Constant per-block power policy; p1 + p2 = P.
class PowerPolicy {
 public:
  enum class Kind { kFullToOne, kFullToTwo, kEqual, kSplit };

  static PowerPolicy full_to_one() { return PowerPolicy(Kind::kFullToOne, 1.0); }
  static PowerPolicy full_to_two() { return PowerPolicy(Kind::kFullToTwo, 0.0); }
  static PowerPolicy equal() { return PowerPolicy(Kind::kEqual, 0.5); }
  /// p1 = fraction * P, p2 = (1 - fraction) * P.
  static PowerPolicy split(double fraction_to_one);
  /// Accepts "full1", "full2", "equal" and "split(<fraction>)".
  static PowerPolicy parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  double fraction_to_one() const noexcept { return fraction_; }
  PowerSplit at(double total_power) const;
  std::string name() const;

 private:
  PowerPolicy(Kind kind, double fraction) : kind_(kind), fraction_(fraction) {}
  Kind kind_;
  double fraction_;
};

/// R_k,tx = (1/J_k) sum_j log2(1 + p_k |phi_kk^j|^2 / (1 + p_k' |phi_kk'^j|^2)),
/// where the interference term only enters for states that are not nulled.
double tx_rate(const ZfBlockGains& gains, User k, const PowerSplit& p);

/// (1/J_k') sum over the non-nulled states j of receiver k' of
/// log2(1 + p_k |phi_k'k^j|^2).
double leakage(const ZfBlockGains& gains, User k, const PowerSplit& p);

struct BlockRateRecord {
  std::size_t t = 0;
  std::array<double, 2> tx_rate{};
  std::array<double, 2> leakage{};
  std::array<double, 2> secrecy_rate{};  // [tx_rate - leakage]_+
};

BlockRateRecord block_secrecy_rates(const ZfBlockGains& gains, const PowerSplit& p,
                                    std::size_t t = 0);

struct AveragedRates {
  std::array<double, 2> R{};          // R_k^m
  std::array<double, 2> std_error{};  // sample standard error of the block mean
  std::array<double, 2> max_leakage{};
  double leak_violation_freq = 0.0;   // fraction of (block, user) with leakage > tx_rate
  std::size_t blocks = 0;
};

/// Mean of the per-block secrecy rates over blocks 1..m, summed in block
/// order. `blocks` = 0 uses the process's own block count.
AveragedRates averaged_secrecy_rates(const FadingProcess& fp, const PowerPolicy& policy,
                                     double total_power, std::size_t blocks = 0,
                                     RankTolerance tol = {});

/// Exact expectation of the per-block secrecy rates over the uniform
/// common-state distribution of this process.
std::array<double, 2> expected_secrecy_rates(const FadingProcess& fp, const PowerPolicy& policy,
                                             double total_power, RankTolerance tol = {});

struct FClassification {
  Rational f;
  bool positive = false;
};

/// f = (M-1)/J1 + (M-1)/J2 - 1 - (M-1)/(J1+J2); requires J1, J2 >= M.
FClassification f_classifier(std::size_t M, std::size_t J1, std::size_t J2);

/// Analytic (r1, r2) region of the zero-forcing scheme.
RateRegion<Rational> ergodic_region(std::size_t M, std::size_t J1, std::size_t J2);

/// s.d.o.f. pair the zero-forcing scheme attains under a constant power
/// policy: full power to one user, or any split with both powers positive.
std::array<Rational, 2> expected_policy_dof(std::size_t M, std::size_t J1, std::size_t J2,
                                            const PowerPolicy& policy);

}  // namespace cbcc
