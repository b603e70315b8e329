#pragma once

#include "lsk/bezier.hpp"

namespace lsk {

/// Bi-degree of the auxiliary Bernstein basis. Curves use {d, 0}.
struct AuxBasisSpec {
  std::array<int, 2> degree{0, 0};

  int size() const noexcept { return (degree[0] + 1) * (degree[1] + 1); }

  /// (2p-1, q-1) for a (p, q) patch; (p-1, 0) for a degree-p curve.
  static AuxBasisSpec minimal(const RationalBezierPatch& patch);
};

/// Throws std::invalid_argument if the patch degree is outside [1, 4] or the
/// aux degree is below the minimum (in either orientation).
void validate_aux(const RationalBezierPatch& patch, const AuxBasisSpec& aux);

/// Orthogonality matrix: row k indexes the product basis of degree
/// patch + aux (first index fastest); column 4*j + c pairs aux basis function j
/// with homogeneous component c in (wx, wy, wz, w).
Matrix assemble_C(const RationalBezierPatch& patch, const AuxBasisSpec& aux);

/// Right null vectors of C (as columns) by the consecutive singular value ratio
/// rule. Rows are scaled by their max-abs entry first; this leaves the null
/// space unchanged.
Matrix null_space(const Matrix& C, RankTolerance tol = {});

struct MRep {
  std::array<int, 2> source_degree{0, 0};
  AuxBasisSpec aux;
  /// gamma^(i) as columns; 4 * aux.size() rows.
  Matrix gamma;
  RankTolerance tol;
  /// Coefficients of M(x) = G[0] x1 + G[1] x2 + G[2] x3 + G[3].
  std::array<Matrix, 4> G;

  int rows() const noexcept { return aux.size(); }
  int cols() const noexcept { return static_cast<int>(gamma.cols()); }
};

MRep build_mrep(const RationalBezierPatch& patch, const AuxBasisSpec& aux, RankTolerance tol = {});
MRep build_mrep(const RationalBezierPatch& patch, RankTolerance tol = {});

/// Assemble an MRep from an explicit null basis (columns of gamma).
MRep mrep_from_gamma(std::array<int, 2> source_degree, const AuxBasisSpec& aux, Matrix gamma,
                     RankTolerance tol = {});

/// M(x): aux-size rows, one column per null vector.
Matrix mrep_eval(const MRep& m, const Vec3& x);

/// Linear part of M, i.e. M(x) - M(0).
Matrix mrep_linear(const MRep& m, const Vec3& v);

/// Numerical rank by the ratio rule; singular values <= floor count as zero.
int matrix_rank(const Matrix& M, RankTolerance tol = {}, double floor = 0.0);

/// True iff the numerical rank is below min(rows, cols).
bool rank_drop_test(const Matrix& M, RankTolerance tol = {});

}  // namespace lsk
