#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cbcc/matcore.hpp"
#include "cbcc/random.hpp"

namespace cbcc {

/// Receiver index, 1 or 2.
enum class User : int { kOne = 1, kTwo = 2 };

constexpr User other(User k) noexcept { return k == User::kOne ? User::kTwo : User::kOne; }
constexpr int index_of(User k) noexcept { return static_cast<int>(k) - 1; }

/// The finite family of channel matrices H_k^j (N_k x M) of a compound
/// two-receiver broadcast channel. Noise is unit variance per receive
/// antenna, so transmit power carries all SNR scaling. Immutable once built.
class CompoundChannelSet {
 public:
  CompoundChannelSet(std::size_t M, std::size_t N1, std::size_t N2,
                     std::vector<ComplexMatrix> user1_states,
                     std::vector<ComplexMatrix> user2_states);

  std::size_t M() const noexcept { return M_; }
  std::size_t N(User k) const noexcept { return k == User::kOne ? N1_ : N2_; }
  std::size_t J(User k) const noexcept { return states(k).size(); }

  /// H_k^j with 1-based state index j.
  const ComplexMatrix& H(User k, std::size_t j) const;
  const std::vector<ComplexMatrix>& states(User k) const noexcept {
    return k == User::kOne ? user1_ : user2_;
  }

  /// [H_k^1; ...; H_k^{J_k}], (J_k N_k) x M.
  ComplexMatrix stacked(User k) const;
  /// Rows of every state of user 1 followed by every state of user 2.
  ComplexMatrix all_rows() const;
  /// Human-readable origin of a row of all_rows(), e.g. "H_2_3 row 1".
  std::string row_label(std::size_t row) const;

  /// Same channel with the two receivers exchanged.
  CompoundChannelSet swapped() const;

  friend bool operator==(const CompoundChannelSet& a, const CompoundChannelSet& b);

 private:
  std::size_t M_, N1_, N2_;
  std::vector<ComplexMatrix> user1_;
  std::vector<ComplexMatrix> user2_;
};

struct ChannelGenSpec {
  std::size_t M = 2;
  std::size_t N1 = 1;
  std::size_t N2 = 1;
  std::size_t J1 = 1;
  std::size_t J2 = 1;
  std::uint64_t seed = 0;
  std::size_t max_resamples = 16;

  void validate() const;
};

struct GenericRankReport {
  bool pass = true;
  std::size_t subset_size = 0;    // min(M, total rows)
  std::size_t total_rows = 0;
  bool exhaustive = true;
  std::size_t subsets_checked = 0;
  std::vector<std::vector<std::size_t>> failures;  // row indices into all_rows()
};

/// Row count up to which every subset is enumerated.
inline constexpr std::size_t kExhaustiveRowLimit = 24;
/// Number of subsets drawn when the row count exceeds the limit.
inline constexpr std::size_t kSampledSubsetCount = 10000;

/// Checks that every selection of min(M, rows) stacked rows has full rank.
///
/// With at most 24 stacked rows every subset is enumerated in lexicographic
/// order. Above that, 10,000 subsets are drawn from a fixed stream keyed on
/// (row count, subset size, draw index) so the sample is reproducible.
GenericRankReport verify_generic_rank(const CompoundChannelSet& ch, RankTolerance tol = {});

/// Draws i.i.d. CN(0,1) entries, user 1 states first, each matrix row-major.
/// Attempt a uses the stream keyed (seed, a); attempts continue until the
/// rank check passes or max_resamples attempts have failed.
CompoundChannelSet generate_compound(const ChannelGenSpec& spec, RankTolerance tol = {});

/// As generate_compound, drawing attempt a from the stream keyed
/// (seed, domain, {sub_index, a}). Used for families of independent channels
/// sharing one seed.
CompoundChannelSet generate_compound_keyed(const ChannelGenSpec& spec, RankTolerance tol,
                                           StreamDomain domain, std::uint64_t sub_index);

/// FNV-1a over dimensions and the IEEE-754 bits of every entry.
std::uint64_t digest(const CompoundChannelSet& ch);

nlohmann::json to_json(const CompoundChannelSet& ch);
CompoundChannelSet channel_from_json(const nlohmann::json& doc);

void save_channel(const CompoundChannelSet& ch, const std::filesystem::path& path);
CompoundChannelSet load_channel(const std::filesystem::path& path);

}  // namespace cbcc
