#include "cbcc/ergodic_scheme.hpp"

#include <cmath>
#include <cstdio>
#include <optional>

#include "cbcc/random.hpp"

namespace cbcc {

void FadingParams::validate() const {
  if (M < 1 || J1 < 1 || J2 < 1 || common_state_count < 1) {
    throw InvalidInput("fading process counts M, J1, J2, common_state_count must be >= 1");
  }
  if (blocks < 1) throw InvalidInput("fading process needs at least one block");
}

FadingProcess FadingProcess::generate(const FadingParams& params, RankTolerance tol) {
  params.validate();
  ChannelGenSpec spec{params.M, 1, 1, params.J1, params.J2, params.seed, params.max_resamples};
  std::vector<CompoundChannelSet> states;
  states.reserve(params.common_state_count);
  for (std::size_t n = 0; n < params.common_state_count; ++n) {
    states.push_back(generate_compound_keyed(spec, tol, StreamDomain::kFadingStates, n));
  }
  return FadingProcess(params, std::move(states));
}

const CompoundChannelSet& FadingProcess::common_state(std::size_t n) const {
  if (n < 1 || n > states_.size()) {
    throw InvalidInput("common state " + std::to_string(n) + " out of range");
  }
  return states_[n - 1];
}

BlockDraw sample_block(const FadingProcess& fp, std::size_t t) {
  const auto& p = fp.params();
  if (t < 1 || t > p.blocks) {
    throw InvalidInput("block index " + std::to_string(t) + " outside 1.." + std::to_string(p.blocks));
  }
  CounterRng rng(p.seed, StreamDomain::kBlocks, t);
  BlockDraw d;
  d.t = t;
  d.common_state = 1 + static_cast<std::size_t>(rng.uniform_index(p.common_state_count));
  d.a1 = 1 + static_cast<std::size_t>(rng.uniform_index(p.J1));
  d.a2 = 1 + static_cast<std::size_t>(rng.uniform_index(p.J2));
  return d;
}

namespace {

std::complex<double> gain_of(const CompoundChannelSet& state, User k, std::size_t j,
                             const ComplexVector& v) {
  return (state.H(k, j).row(0) * v).value();
}

}  // namespace

ZfBeamformers zf_beamformers_for_state(const CompoundChannelSet& state, RankTolerance tol,
                                       std::size_t block) {
  if (state.N(User::kOne) != 1 || state.N(User::kTwo) != 1) {
    throw InvalidInput("zero-forcing block model needs single-antenna receivers");
  }
  const std::size_t M = state.M();
  ZfBeamformers out;
  for (User k : {User::kOne, User::kTwo}) {
    const User o = other(k);
    const std::size_t nulled = nulled_state_count(M, state.J(o));
    const std::vector<ComplexMatrix> rows(state.states(o).begin(),
                                          state.states(o).begin() + static_cast<long>(nulled));
    const ComplexMatrix basis =
        null_space_basis(stack_rows<std::complex<double>>(rows, static_cast<Eigen::Index>(M)), tol);

    auto serves_all = [&](const ComplexVector& v) {
      for (std::size_t j = 1; j <= state.J(k); ++j) {
        if (std::abs(gain_of(state, k, j, v)) <= kNullGainTolerance) return false;
      }
      return true;
    };

    ComplexVector v = basis.col(0);
    if (!serves_all(v)) {
      if (basis.cols() < 2) {
        throw DegenerateBlock("block " + std::to_string(block) + ": no direction in the null space gives user " +
                                  std::to_string(static_cast<int>(k)) + " a nonzero gain in every state",
                              block);
      }
      v = basis.rowwise().sum().normalized();
      if (!serves_all(v)) {
        throw DegenerateBlock("block " + std::to_string(block) + ": rotated beamformer for user " +
                                  std::to_string(static_cast<int>(k)) + " still has a vanishing gain",
                              block);
      }
    }
    (k == User::kOne ? out.v1 : out.v2) = std::move(v);
  }
  return out;
}

ZfBeamformers zf_beamformers(const FadingProcess& fp, std::size_t t, RankTolerance tol) {
  const BlockDraw d = sample_block(fp, t);
  return zf_beamformers_for_state(fp.common_state(d.common_state), tol, t);
}

ZfBlockGains block_gains(const CompoundChannelSet& state, const ZfBeamformers& bf) {
  ZfBlockGains g;
  for (User k : {User::kOne, User::kTwo}) {
    const int ki = index_of(k);
    g.J[ki] = state.J(k);
    g.nulled[ki] = nulled_state_count(state.M(), state.J(k));
    for (User i : {User::kOne, User::kTwo}) {
      const ComplexVector& v = i == User::kOne ? bf.v1 : bf.v2;
      auto& row = g.phi[ki][index_of(i)];
      row.clear();
      for (std::size_t j = 1; j <= state.J(k); ++j) row.push_back(gain_of(state, k, j, v));
    }
  }
  return g;
}

PowerPolicy PowerPolicy::split(double fraction_to_one) {
  if (!(fraction_to_one >= 0.0 && fraction_to_one <= 1.0)) {
    throw InvalidInput("split fraction must lie in [0, 1]");
  }
  return PowerPolicy(Kind::kSplit, fraction_to_one);
}

PowerPolicy PowerPolicy::parse(const std::string& text) {
  if (text == "full1") return full_to_one();
  if (text == "full2") return full_to_two();
  if (text == "equal") return equal();
  if (text.rfind("split(", 0) == 0 && text.size() > 7 && text.back() == ')') {
    const std::string inner = text.substr(6, text.size() - 7);
    std::size_t used = 0;
    double f = 0.0;
    try {
      f = std::stod(inner, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == inner.size() && used > 0) return split(f);
  }
  throw InvalidInput("unknown power policy '" + text + "' (expected full1, full2, equal or split(<fraction>))");
}

PowerSplit PowerPolicy::at(double total_power) const {
  if (!(total_power >= 0.0)) throw InvalidInput("total power must be nonnegative");
  switch (kind_) {
    case Kind::kFullToOne: return {total_power, 0.0};
    case Kind::kFullToTwo: return {0.0, total_power};
    case Kind::kEqual: return {total_power / 2, total_power / 2};
    case Kind::kSplit: return {fraction_ * total_power, (1.0 - fraction_) * total_power};
  }
  return {};
}

std::string PowerPolicy::name() const {
  switch (kind_) {
    case Kind::kFullToOne: return "full1";
    case Kind::kFullToTwo: return "full2";
    case Kind::kEqual: return "equal";
    case Kind::kSplit: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "split(%.12g)", fraction_);
      return buf;
    }
  }
  return "";
}

double tx_rate(const ZfBlockGains& g, User k, const PowerSplit& p) {
  const User o = other(k);
  const int ki = index_of(k);
  const double pk = p.p(k);
  const double po = p.p(o);
  if (pk == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 1; j <= g.J[ki]; ++j) {
    const double signal = pk * std::norm(g.gain(k, k, j));
    const double interference = j > g.nulled[ki] ? po * std::norm(g.gain(k, o, j)) : 0.0;
    sum += std::log2(1.0 + signal / (1.0 + interference));
  }
  return sum / static_cast<double>(g.J[ki]);
}

double leakage(const ZfBlockGains& g, User k, const PowerSplit& p) {
  const User o = other(k);
  const int oi = index_of(o);
  const double pk = p.p(k);
  if (pk == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t j = g.nulled[oi] + 1; j <= g.J[oi]; ++j) {
    sum += std::log2(1.0 + pk * std::norm(g.gain(o, k, j)));
  }
  return sum / static_cast<double>(g.J[oi]);
}

BlockRateRecord block_secrecy_rates(const ZfBlockGains& gains, const PowerSplit& p, std::size_t t) {
  BlockRateRecord rec;
  rec.t = t;
  for (User k : {User::kOne, User::kTwo}) {
    const int ki = index_of(k);
    rec.tx_rate[ki] = tx_rate(gains, k, p);
    rec.leakage[ki] = leakage(gains, k, p);
    rec.secrecy_rate[ki] = std::max(0.0, rec.tx_rate[ki] - rec.leakage[ki]);
  }
  return rec;
}

namespace {

// Block rates depend on the block only through its common state, so they are
// evaluated once per state and looked up by H[t].
class StateRateCache {
 public:
  StateRateCache(const FadingProcess& fp, const PowerSplit& p, RankTolerance tol)
      : fp_(fp), p_(p), tol_(tol), cache_(fp.params().common_state_count) {}

  const BlockRateRecord& at(std::size_t state, std::size_t block) {
    auto& slot = cache_[state - 1];
    if (!slot) {
      const auto& ch = fp_.common_state(state);
      slot = block_secrecy_rates(block_gains(ch, zf_beamformers_for_state(ch, tol_, block)), p_);
    }
    return *slot;
  }

 private:
  const FadingProcess& fp_;
  PowerSplit p_;
  RankTolerance tol_;
  std::vector<std::optional<BlockRateRecord>> cache_;
};

}  // namespace

AveragedRates averaged_secrecy_rates(const FadingProcess& fp, const PowerPolicy& policy,
                                     double total_power, std::size_t blocks, RankTolerance tol) {
  const std::size_t m = blocks == 0 ? fp.params().blocks : blocks;
  if (m > fp.params().blocks) {
    throw InvalidInput("requested " + std::to_string(m) + " blocks from a process of " +
                       std::to_string(fp.params().blocks));
  }
  StateRateCache cache(fp, policy.at(total_power), tol);
  std::array<double, 2> sum{}, sum_sq{};
  std::size_t violations = 0;
  AveragedRates out;
  for (std::size_t t = 1; t <= m; ++t) {
    const BlockRateRecord& rec = cache.at(sample_block(fp, t).common_state, t);
    for (int k = 0; k < 2; ++k) {
      sum[k] += rec.secrecy_rate[k];
      sum_sq[k] += rec.secrecy_rate[k] * rec.secrecy_rate[k];
      out.max_leakage[k] = std::max(out.max_leakage[k], rec.leakage[k]);
      if (rec.leakage[k] > rec.tx_rate[k]) ++violations;
    }
  }
  const double n = static_cast<double>(m);
  for (int k = 0; k < 2; ++k) {
    out.R[k] = sum[k] / n;
    const double var = m > 1 ? std::max(0.0, (sum_sq[k] - n * out.R[k] * out.R[k]) / (n - 1)) : 0.0;
    out.std_error[k] = std::sqrt(var / n);
  }
  out.leak_violation_freq = static_cast<double>(violations) / (2.0 * n);
  out.blocks = m;
  return out;
}

std::array<double, 2> expected_secrecy_rates(const FadingProcess& fp, const PowerPolicy& policy,
                                             double total_power, RankTolerance tol) {
  StateRateCache cache(fp, policy.at(total_power), tol);
  const std::size_t n = fp.params().common_state_count;
  std::array<double, 2> mean{};
  for (std::size_t s = 1; s <= n; ++s) {
    const auto& rec = cache.at(s, 0);
    for (int k = 0; k < 2; ++k) mean[k] += rec.secrecy_rate[k];
  }
  for (double& v : mean) v /= static_cast<double>(n);
  return mean;
}

FClassification f_classifier(std::size_t M, std::size_t J1, std::size_t J2) {
  if (J1 < M || J2 < M) {
    throw DomainError("f(J1, J2) is defined for J1 >= M and J2 >= M; got M = " + std::to_string(M) +
                      ", J1 = " + std::to_string(J1) + ", J2 = " + std::to_string(J2));
  }
  const Rational m1(static_cast<std::int64_t>(M) - 1);
  const auto j1 = static_cast<std::int64_t>(J1);
  const auto j2 = static_cast<std::int64_t>(J2);
  const Rational f = m1 / j1 + m1 / j2 - 1 - m1 / (j1 + j2);
  return {f, f > 0};
}

RateRegion<Rational> ergodic_region(std::size_t M, std::size_t J1, std::size_t J2) {
  if (M < 1 || J1 < 1 || J2 < 1) throw InvalidInput("ergodic_region: counts must be >= 1");
  const Rational m1(static_cast<std::int64_t>(M) - 1);
  const Rational one(1), zero(0);
  const Rational a = m1 / static_cast<std::int64_t>(J2);  // r1 reach when J2 >= M
  const Rational b = m1 / static_cast<std::int64_t>(J1);
  if (J1 < M && J2 < M) return time_share<Rational>({{one, zero}, {zero, one}, {one, one}});
  if (J1 < M) return time_share<Rational>({{a, zero}, {zero, one}, {a, a}});
  if (J2 < M) return time_share<Rational>({{one, zero}, {zero, b}, {b, b}});

  std::vector<Point<Rational>> pts{{a, zero}, {zero, b}};
  if (f_classifier(M, J1, J2).positive) {
    const Rational rs = b + a - 1;
    pts.push_back({rs, rs});
  }
  return time_share(pts);
}

std::array<Rational, 2> expected_policy_dof(std::size_t M, std::size_t J1, std::size_t J2,
                                            const PowerPolicy& policy) {
  const auto j1 = static_cast<std::int64_t>(J1);
  const auto j2 = static_cast<std::int64_t>(J2);
  const auto n1 = static_cast<std::int64_t>(nulled_state_count(M, J1));
  const auto n2 = static_cast<std::int64_t>(nulled_state_count(M, J2));
  const Rational clear1(n1, j1);  // fraction of user 1's states free of stream 2
  const Rational clear2(n2, j2);
  auto pos = [](Rational x) { return x > 0 ? x : Rational(0); };

  const PowerSplit s = policy.at(1.0);
  if (s.p2 == 0.0 && s.p1 == 0.0) return {Rational(0), Rational(0)};
  if (s.p2 == 0.0) return {pos(clear2), Rational(0)};
  if (s.p1 == 0.0) return {Rational(0), pos(clear1)};
  return {pos(clear1 - (1 - clear2)), pos(clear2 - (1 - clear1))};
}

}  // namespace cbcc
