#include "cbcc/gaussian_scheme.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace cbcc {

namespace {

std::string uname(User k) { return std::to_string(static_cast<int>(k)); }

// I + G G^H with G = H [V_a diag(sqrt p_a), V_b diag(sqrt p_b), ...].
ComplexMatrix noise_plus_signal(const ComplexMatrix& H,
                                std::initializer_list<std::pair<const ComplexMatrix*,
                                                                const Eigen::VectorXd*>> streams) {
  Eigen::Index cols = 0;
  for (const auto& [V, p] : streams) cols += V->cols();
  ComplexMatrix precoded(H.cols(), cols);
  Eigen::Index at = 0;
  for (const auto& [V, p] : streams) {
    if (p->size() != V->cols()) throw InvalidInput("power vector length does not match beamformer");
    precoded.middleCols(at, V->cols()) = *V * p->cwiseSqrt().cast<std::complex<double>>().asDiagonal();
    at += V->cols();
  }
  const ComplexMatrix G = H * precoded;
  ComplexMatrix cov = ComplexMatrix::Identity(H.rows(), H.rows());
  cov.noalias() += G * G.adjoint();
  return cov;
}

void check_user_state(const CompoundChannelSet& ch, User k, std::size_t j) {
  if (j < 1 || j > ch.J(k)) {
    throw InvalidInput("state " + std::to_string(j) + " out of range for user " + uname(k));
  }
}

}  // namespace

void PowerAllocation::validate() const {
  const double sum = p0.sum() + p1.sum() + p2.sum();
  if ((p0.size() && p0.minCoeff() < 0) || (p1.size() && p1.minCoeff() < 0) ||
      (p2.size() && p2.minCoeff() < 0)) {
    throw InvalidInput("per-stream powers must be nonnegative");
  }
  if (sum > total_power * (1.0 + 1e-12)) {
    throw InvalidInput("per-stream powers sum to " + std::to_string(sum) + ", exceeding P = " +
                       std::to_string(total_power));
  }
}

long confidential_stream_bound(std::size_t M, std::size_t N_k, std::size_t J_other,
                               std::size_t N_other) {
  return std::min(static_cast<long>(N_k),
                  static_cast<long>(M) - static_cast<long>(J_other * N_other));
}

BeamformerSet build_confidential_beamformers(const CompoundChannelSet& ch, std::size_t r1,
                                             std::size_t r2, RankTolerance tol) {
  const std::size_t M = ch.M();
  BeamformerSet bf;
  bf.r1 = r1;
  bf.r2 = r2;

  for (User k : {User::kOne, User::kTwo}) {
    const User o = other(k);
    const std::size_t r = bf.r(k);
    const long bound = confidential_stream_bound(M, ch.N(k), ch.J(o), ch.N(o));
    if (r > 0 && static_cast<long>(r) > bound) {
      throw FeasibilityError("r" + uname(k) + " = " + std::to_string(r) + " exceeds min(N" +
                             uname(k) + ", M - J" + uname(o) + "*N" + uname(o) + ") = min(" +
                             std::to_string(ch.N(k)) + ", " + std::to_string(M) + " - " +
                             std::to_string(ch.J(o) * ch.N(o)) + ") = " + std::to_string(bound));
    }
    ComplexMatrix V(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(r));
    if (r > 0) {
      const ComplexMatrix basis = null_space_basis(ch.stacked(o), tol);
      if (static_cast<std::size_t>(basis.cols()) < r) {
        throw ConstructionFailed("null space of user " + uname(o) + "'s stacked states has dimension " +
                                 std::to_string(basis.cols()) + " < r" + uname(k) + " = " +
                                 std::to_string(r));
      }
      V = basis.leftCols(static_cast<Eigen::Index>(r));
    }
    (k == User::kOne ? bf.V1 : bf.V2) = std::move(V);
  }

  // Certificates.
  for (User k : {User::kOne, User::kTwo}) {
    const User o = other(k);
    const ComplexMatrix& V = bf.V(k);
    for (std::size_t l = 1; l <= ch.J(o); ++l) {
      const ComplexMatrix& H = ch.H(o, l);
      const double resid = (H * V).norm();
      if (resid > kOrthogonalityTolerance * H.norm()) {
        throw ConstructionFailed("V" + uname(k) + " leaks into H_" + uname(o) + "_" +
                                 std::to_string(l) + ": residual " + std::to_string(resid));
      }
    }
    for (std::size_t j = 1; j <= ch.J(k); ++j) {
      const std::size_t rank = numerical_rank(ch.H(k, j) * V, tol);
      if (rank != bf.r(k)) {
        throw ConstructionFailed("rank(H_" + uname(k) + "_" + std::to_string(j) + " V" + uname(k) +
                                 ") = " + std::to_string(rank) + ", expected " +
                                 std::to_string(bf.r(k)));
      }
    }
  }
  return bf;
}

BeamformerSet build_common_beamformer(BeamformerSet bf, std::size_t M, RankTolerance tol) {
  const auto m = static_cast<Eigen::Index>(M);
  if (bf.V1.rows() != m || bf.V2.rows() != m) {
    throw DimensionMismatch("confidential beamformers must have M = " + std::to_string(M) + " rows");
  }
  ComplexMatrix W(m, bf.V1.cols() + bf.V2.cols());
  W << bf.V1, bf.V2;
  bf.V0 = null_space_basis(W.adjoint(), tol);
  bf.K = M - numerical_rank(W, tol);
  if (static_cast<std::size_t>(bf.V0.cols()) != bf.K) {
    throw ConstructionFailed("common beamformer dimension " + std::to_string(bf.V0.cols()) +
                             " disagrees with K = " + std::to_string(bf.K));
  }
  if (W.cols() > 0 && bf.V0.cols() > 0 &&
      (bf.V0.adjoint() * W).norm() > kOrthogonalityTolerance) {
    throw ConstructionFailed("V0 is not orthogonal to [V1 V2]");
  }
  return bf;
}

PowerAllocation equal_power(const BeamformerSet& bf, double total_power) {
  if (!(total_power >= 0.0)) throw InvalidInput("total power must be nonnegative");
  const auto streams = static_cast<double>(bf.V0.cols() + bf.V1.cols() + bf.V2.cols());
  const double each = streams > 0 ? total_power / streams : 0.0;
  PowerAllocation pa;
  pa.total_power = total_power;
  pa.p0 = Eigen::VectorXd::Constant(bf.V0.cols(), each);
  pa.p1 = Eigen::VectorXd::Constant(bf.V1.cols(), each);
  pa.p2 = Eigen::VectorXd::Constant(bf.V2.cols(), each);
  return pa;
}

double rate_common(const CompoundChannelSet& ch, const BeamformerSet& bf,
                   const PowerAllocation& pa, User k, std::size_t j) {
  check_user_state(ch, k, j);
  const ComplexMatrix& H = ch.H(k, j);
  const double with_common =
      logdet2_hpd(noise_plus_signal(H, {{&bf.V0, &pa.p0}, {&bf.V(k), &pa.p(k)}}));
  const double own_only = logdet2_hpd(noise_plus_signal(H, {{&bf.V(k), &pa.p(k)}}));
  return std::max(0.0, with_common - own_only);
}

double rate_confidential(const CompoundChannelSet& ch, const BeamformerSet& bf,
                         const PowerAllocation& pa, User k, std::size_t j) {
  check_user_state(ch, k, j);
  return std::max(0.0, logdet2_hpd(noise_plus_signal(ch.H(k, j), {{&bf.V(k), &pa.p(k)}})));
}

double rate_leakage(const CompoundChannelSet& ch, const BeamformerSet& bf,
                    const PowerAllocation& pa, User k, std::size_t l) {
  const User o = other(k);
  check_user_state(ch, o, l);
  return std::max(0.0, logdet2_hpd(noise_plus_signal(ch.H(o, l), {{&bf.V(k), &pa.p(k)}})));
}

RateTriple worst_case_rates(const CompoundChannelSet& ch, const BeamformerSet& bf,
                            const PowerAllocation& pa) {
  pa.validate();
  RateTriple out;
  out.R0 = std::numeric_limits<double>::infinity();
  for (User k : {User::kOne, User::kTwo}) {
    double worst_rx = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= ch.J(k); ++j) {
      out.R0 = std::min(out.R0, rate_common(ch, bf, pa, k, j));
      worst_rx = std::min(worst_rx, rate_confidential(ch, bf, pa, k, j));
    }
    double worst_leak = 0.0;
    for (std::size_t l = 1; l <= ch.J(other(k)); ++l) {
      worst_leak = std::max(worst_leak, rate_leakage(ch, bf, pa, k, l));
    }
    (k == User::kOne ? out.R1 : out.R2) = std::max(0.0, worst_rx - worst_leak);
  }
  return out;
}

double max_leakage(const CompoundChannelSet& ch, const BeamformerSet& bf,
                   const PowerAllocation& pa) {
  double worst = 0.0;
  for (User k : {User::kOne, User::kTwo}) {
    for (std::size_t l = 1; l <= ch.J(other(k)); ++l) {
      worst = std::max(worst, rate_leakage(ch, bf, pa, k, l));
    }
  }
  return worst;
}

RateRegion<Rational> gaussian_dof_region(std::size_t M, std::size_t N1, std::size_t N2,
                                     std::size_t J1, std::size_t J2) {
  if (M < 1 || N1 < 1 || N2 < 1 || J1 < 1 || J2 < 1) {
    throw InvalidInput("gaussian_dof_region: all counts must be >= 1");
  }
  using H = Halfspace<Rational>;
  auto R = [](long v) { return Rational(v); };
  const long m = static_cast<long>(M);
  const long n1 = static_cast<long>(N1);
  const long n2 = static_cast<long>(N2);
  const bool one_ok = J1 * N1 < M;  // user 2's confidential stream can avoid all of user 1's states
  const bool two_ok = J2 * N2 < M;
  const long b1 = confidential_stream_bound(M, N1, J2, N2);
  const long b2 = confidential_stream_bound(M, N2, J1, N1);

  // Coordinates are (r0, r1, r2).
  std::vector<H> ineqs;
  if (one_ok && two_ok) {
    ineqs = {H{{R(0), R(1), R(0)}, R(b1)}, H{{R(0), R(0), R(1)}, R(b2)},
             H{{R(1), R(1), R(0)}, R(n1)}, H{{R(1), R(0), R(1)}, R(n2)}};
  } else if (one_ok) {
    ineqs = {H{{R(0), R(1), R(0)}, R(0)}, H{{R(0), R(0), R(1)}, R(b2)},
             H{{R(1), R(0), R(0)}, R(n1)}, H{{R(1), R(0), R(1)}, R(n2)}};
  } else if (two_ok) {
    ineqs = {H{{R(0), R(0), R(1)}, R(0)}, H{{R(0), R(1), R(0)}, R(b1)},
             H{{R(1), R(0), R(0)}, R(n2)}, H{{R(1), R(1), R(0)}, R(n1)}};
  } else {
    ineqs = {H{{R(0), R(1), R(0)}, R(0)}, H{{R(0), R(0), R(1)}, R(0)},
             H{{R(1), R(0), R(0)}, R(std::min({m, n1, n2}))}};
  }
  return region_from_inequalities<Rational>(3, std::move(ineqs));
}

long common_dof_target(std::size_t M, std::size_t N1, std::size_t N2, std::size_t r1,
                       std::size_t r2) {
  const long K = static_cast<long>(M) - static_cast<long>(r1 + r2);
  auto per_user = [K](std::size_t N, std::size_t r) {
    return std::min(static_cast<long>(N), K + static_cast<long>(r)) - static_cast<long>(r);
  };
  return std::max(0L, std::min(per_user(N1, r1), per_user(N2, r2)));
}

}  // namespace cbcc
