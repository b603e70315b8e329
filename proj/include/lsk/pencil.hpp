#pragma once

#include "lsk/common.hpp"

#include <complex>
#include <vector>

namespace lsk {

/// A - xi B, both of the same shape.
struct MatrixPencil {
  Matrix A;
  Matrix B;

  MatrixPencil() = default;
  MatrixPencil(Matrix a, Matrix b);

  Eigen::Index rows() const noexcept { return A.rows(); }
  Eigen::Index cols() const noexcept { return A.cols(); }
};

struct PencilOptions {
  RankTolerance rank;
  /// Singular values below zero_tol * max(|A|, |B|) are exact zeros.
  double zero_tol = 1e-10;
  /// A complex value counts as real when |Im| <= imag_tol (1 + |Re|).
  double imag_tol = 1e-8;
  /// Eigenvalues closer than cluster_tol (1 + |xi|) are one root.
  double cluster_tol = 1e-6;
};

struct RealEigenvalue {
  double value = 0.0;
  int multiplicity = 1;
};

/// Finite eigenvalues of the regular part of the pencil, i.e. the values of xi
/// at which the rank of A - xi B drops below its normal rank. Rectangular and
/// singular pencils are deflated by repeated column/row compression with SVDs
/// until a square block with invertible B remains.
std::vector<std::complex<double>> pencil_eigenvalues(const MatrixPencil& p,
                                                     const PencilOptions& opt = {});

/// Real roots, with clusters of nearby (possibly complex-conjugate) values
/// merged into one root whose multiplicity is the cluster size. Sorted.
std::vector<RealEigenvalue> pencil_real_eigenvalues(const MatrixPencil& p,
                                                    const PencilOptions& opt = {});

/// Groups a raw eigenvalue list the same way pencil_real_eigenvalues does.
std::vector<RealEigenvalue> classify_real(const std::vector<std::complex<double>>& values,
                                          const PencilOptions& opt = {});

}  // namespace lsk
