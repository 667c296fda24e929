#pragma once

// Dense complex linear-algebra kernel: singular values, numerical rank,
// orthonormal null-space bases and base-2 log-determinants of Hermitian
// positive-definite matrices. Everything here is a pure function template
// over Eigen dense expressions and works for real and complex scalars.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "cbcc/errors.hpp"

namespace cbcc {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Relative singular-value cutoff used wherever an exact rank is needed.
class RankTolerance {
 public:
  static constexpr double kDefault = 1e-10;

  constexpr RankTolerance() = default;
  explicit RankTolerance(double relative_threshold) : value_(relative_threshold) {
    if (!(relative_threshold > 0.0 && relative_threshold < 1.0)) {
      throw InvalidInput("rank tolerance must lie in (0, 1), got " +
                         std::to_string(relative_threshold));
    }
  }

  constexpr double relative_threshold() const noexcept { return value_; }

 private:
  double value_ = kDefault;
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* who) {
  if (!m.allFinite()) {
    throw InvalidInput(std::string(who) + ": matrix has non-finite entries");
  }
}

// Multiplies each column by a unit-modulus scalar so that its first entry of
// non-negligible magnitude is real and positive.
template <typename Scalar>
void normalize_column_phases(MatrixX<Scalar>& basis) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  const Real cutoff = Real(1e-12);
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    for (Eigen::Index r = 0; r < basis.rows(); ++r) {
      const Scalar x = basis(r, c);
      const Real mag = std::abs(x);
      if (mag > cutoff) {
        basis.col(c) *= Eigen::numext::conj(x) / mag;
        basis(r, c) = Scalar(mag);
        break;
      }
    }
  }
}

}  // namespace detail

/// Singular values in descending order; min(rows, cols) of them.
template <typename Derived>
VectorX<typename Derived::RealScalar> singular_values(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  detail::require_finite(m, "singular_values");
  if (m.rows() == 0 || m.cols() == 0) return VectorX<Real>(0);
  Eigen::JacobiSVD<MatrixX<typename Derived::Scalar>> svd(m.eval());
  return svd.singularValues();
}

/// Number of singular values strictly above `tol` times the largest one.
template <typename Derived>
std::size_t numerical_rank(const Eigen::MatrixBase<Derived>& m, RankTolerance tol = {}) {
  const auto sv = singular_values(m);
  if (sv.size() == 0 || sv(0) == 0) return 0;
  const double cutoff = tol.relative_threshold() * static_cast<double>(sv(0));
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (static_cast<double>(sv(i)) > cutoff) ++rank;
  }
  return rank;
}

/// Orthonormal basis (cols x (cols - rank)) for the right null space of `m`.
///
/// The basis comes from the trailing right singular vectors of a full SVD and
/// is phase-normalized column by column, so identical input bits always give
/// identical output bits. A matrix with no rows has the whole space as its
/// null space (identity basis).
template <typename Derived>
MatrixX<typename Derived::Scalar> null_space_basis(const Eigen::MatrixBase<Derived>& m,
                                                   RankTolerance tol = {}) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(m, "null_space_basis");
  if (m.cols() < 1) throw InvalidInput("null_space_basis: matrix must have at least one column");

  const Eigen::Index n = m.cols();
  MatrixX<Scalar> basis;
  if (m.rows() == 0) {
    basis = MatrixX<Scalar>::Identity(n, n);
  } else {
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(m.eval(), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    if (sv(0) > 0) {
      const double cutoff = tol.relative_threshold() * static_cast<double>(sv(0));
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (static_cast<double>(sv(i)) > cutoff) ++rank;
      }
    }
    basis = svd.matrixV().rightCols(n - rank);
  }
  detail::normalize_column_phases(basis);
  return basis;
}

/// log2 det(m) for Hermitian positive-definite `m`, via Cholesky.
///
/// Throws DomainError when the Hermitian residual exceeds 1e-10 * ||m||_F or
/// when a Cholesky pivot is not strictly positive; in the latter case the
/// error carries the order of the failing leading minor.
template <typename Derived>
double logdet2_hpd(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(m, "logdet2_hpd");
  if (m.rows() != m.cols()) throw InvalidInput("logdet2_hpd: matrix must be square");

  const MatrixX<Scalar> a = m.eval();
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;

  const double scale = static_cast<double>(a.norm());
  const double residual = static_cast<double>((a - a.adjoint()).norm());
  if (residual > 1e-10 * scale) {
    throw DomainError("logdet2_hpd: matrix is not Hermitian (residual " + std::to_string(residual) +
                      ")");
  }

  MatrixX<Scalar> chol = MatrixX<Scalar>::Zero(n, n);
  double log2det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = static_cast<double>(Eigen::numext::real(a(j, j)));
    for (Eigen::Index k = 0; k < j; ++k) pivot -= static_cast<double>(std::norm(chol(j, k)));
    if (!(pivot > 0.0)) {
      throw DomainError("logdet2_hpd: leading minor of order " + std::to_string(j + 1) +
                            " is not positive definite",
                        static_cast<std::size_t>(j + 1));
    }
    const double d = std::sqrt(pivot);
    chol(j, j) = Scalar(d);
    log2det += 2.0 * std::log2(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      Scalar s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= chol(i, k) * Eigen::numext::conj(chol(j, k));
      chol(i, j) = s / d;
    }
  }
  return log2det;
}

/// Vertically stacks matrices sharing a column count.
template <typename Scalar, typename Range>
MatrixX<Scalar> stack_rows(const Range& blocks, Eigen::Index cols) {
  Eigen::Index rows = 0;
  for (const auto& b : blocks) rows += b.rows();
  MatrixX<Scalar> out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    if (b.cols() != cols) throw DimensionMismatch("stack_rows: column count mismatch");
    out.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return out;
}

}  // namespace cbcc
