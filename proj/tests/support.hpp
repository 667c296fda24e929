#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "cbcc/matcore.hpp"
#include "cbcc/random.hpp"

namespace cbcc::test {

// Test-side draws use their own domain so they never alias library streams.
inline constexpr auto kTestDomain = static_cast<StreamDomain>(0x7e57);

inline ComplexMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                                     std::uint64_t salt = 0) {
  RandomStream rs(seed, kTestDomain, {salt, static_cast<std::uint64_t>(rows),
                                      static_cast<std::uint64_t>(cols)});
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rs.complex_gaussian();
  return m;
}

/// Haar-ish unitary from the QR factor of a Gaussian matrix.
inline ComplexMatrix random_unitary(Eigen::Index n, std::uint64_t seed, std::uint64_t salt = 1) {
  Eigen::HouseholderQR<ComplexMatrix> qr(gaussian_matrix(n, n, seed, salt));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

}  // namespace cbcc::test
