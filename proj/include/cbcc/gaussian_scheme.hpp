#pragma once

// Constant-state compound MIMO broadcast channel with confidential messages:
// null-space beamformers, Gaussian superposition rates, and the analytic
// s.d.o.f. regions.

#include <cstddef>

#include <Eigen/Core>

#include "cbcc/channel.hpp"
#include "cbcc/matcore.hpp"
#include "cbcc/region.hpp"

namespace cbcc {

/// Orthogonality residuals are certified relative to the channel norm at this level.
inline constexpr double kOrthogonalityTolerance = 1e-9;

struct BeamformerSet {
  ComplexMatrix V0;  // M x K, common stream directions
  ComplexMatrix V1;  // M x r1, confidential to receiver 1
  ComplexMatrix V2;  // M x r2, confidential to receiver 2
  std::size_t K = 0;
  std::size_t r1 = 0;
  std::size_t r2 = 0;

  const ComplexMatrix& V(User k) const { return k == User::kOne ? V1 : V2; }
  std::size_t r(User k) const { return k == User::kOne ? r1 : r2; }
};

struct PowerAllocation {
  double total_power = 0.0;
  Eigen::VectorXd p0;  // one entry per column of V0
  Eigen::VectorXd p1;
  Eigen::VectorXd p2;

  const Eigen::VectorXd& p(User k) const { return k == User::kOne ? p1 : p2; }
  /// Throws InvalidInput on negative powers or when the sum exceeds the total.
  void validate() const;
};

struct RateTriple {
  double R0 = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;

  double R(User k) const { return k == User::kOne ? R1 : R2; }
};

using DofPoint = Point<Rational>;  // (r0, r1, r2)

/// min(N_k, M - J_k' N_k'); may be negative.
long confidential_stream_bound(std::size_t M, std::size_t N_k, std::size_t J_other,
                               std::size_t N_other);

/// V1 from the null space of user 2's stacked states and V2 from user 1's.
///
/// A zero stream count is always feasible (empty V_k). A positive count must
/// respect confidential_stream_bound, otherwise FeasibilityError. The result
/// is certified: ||H_k'^l V_k||_F <= 1e-9 ||H_k'^l||_F for every state of the
/// other user and rank(H_k^j V_k) = r_k for every own state, else
/// ConstructionFailed.
BeamformerSet build_confidential_beamformers(const CompoundChannelSet& ch, std::size_t r1,
                                             std::size_t r2, RankTolerance tol = {});

/// Adds V0, an orthonormal basis of the orthogonal complement of [V1 V2].
BeamformerSet build_common_beamformer(BeamformerSet partial, std::size_t M,
                                      RankTolerance tol = {});

inline BeamformerSet build_beamformers(const CompoundChannelSet& ch, std::size_t r1, std::size_t r2,
                                       RankTolerance tol = {}) {
  return build_common_beamformer(build_confidential_beamformers(ch, r1, r2, tol), ch.M(), tol);
}

/// Same power on every beamforming direction; all zero when there are none.
PowerAllocation equal_power(const BeamformerSet& bf, double total_power);

/// I(U; Y_{k,j}) in bits.
double rate_common(const CompoundChannelSet& ch, const BeamformerSet& bf,
                   const PowerAllocation& pa, User k, std::size_t j);

/// I(V_k; Y_{k,j} | U) in bits.
double rate_confidential(const CompoundChannelSet& ch, const BeamformerSet& bf,
                         const PowerAllocation& pa, User k, std::size_t j);

/// Information about stream k gathered by state l of the other receiver,
/// given the common stream and its own stream, in bits.
double rate_leakage(const CompoundChannelSet& ch, const BeamformerSet& bf,
                    const PowerAllocation& pa, User k, std::size_t l);

/// Worst case over every state pair: R0 = min_{k,j} I(U;Y_{k,j}) and
/// R_k = [min_j I(V_k;Y_{k,j}|U) - max_l leakage(k,l)]_+.
RateTriple worst_case_rates(const CompoundChannelSet& ch, const BeamformerSet& bf,
                            const PowerAllocation& pa);

/// Largest leakage over both users and every state of the other receiver.
double max_leakage(const CompoundChannelSet& ch, const BeamformerSet& bf,
                   const PowerAllocation& pa);

/// Analytic d.o.f. region over (r0, r1, r2), exact rationals. Covers the
/// case where both J_k N_k < M, the two mixed cases (one user's confidential
/// d.o.f. collapses to zero), and the case where both products reach M.
RateRegion<Rational> gaussian_dof_region(std::size_t M, std::size_t N1, std::size_t N2,
                                     std::size_t J1, std::size_t J2);

/// Common-message d.o.f. reached by the superposition scheme with generic
/// channels and K = M - r1 - r2: min over k of min(N_k, K + r_k) - r_k.
long common_dof_target(std::size_t M, std::size_t N1, std::size_t N2, std::size_t r1,
                       std::size_t r2);

}  // namespace cbcc
