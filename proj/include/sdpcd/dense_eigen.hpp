#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sdpcd {

/// Row-major dense square matrix.
struct DenseMatrix {
  std::size_t dim = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t d) : dim(d), data(d * d, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) noexcept { return data[r * dim + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data[r * dim + c]; }

  static DenseMatrix identity(std::size_t d);
  double trace() const noexcept;
  /// max |a_ij - a_ji|
  double asymmetry() const noexcept;
};

/// Eigen-decomposition of a symmetric matrix. values ascending; vectors(r, k)
/// is component r of the eigenvector for values[k].
struct SymmetricEigen {
  std::vector<double> values;
  DenseMatrix vectors;
};

/// Cyclic Jacobi rotations. Intended for m x m matrices with m up to a few
/// hundred.
SymmetricEigen jacobi_eigen(const DenseMatrix& a);

/// Implicit-shift QL on a symmetric tridiagonal matrix with diagonal `diag`
/// and off-diagonal `offdiag` (offdiag[i] couples i and i+1).
SymmetricEigen tridiagonal_eigen(std::span<const double> diag, std::span<const double> offdiag);

}  // namespace sdpcd
