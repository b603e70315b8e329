#include "lsk/implicitize.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace lsk {

AuxBasisSpec AuxBasisSpec::minimal(const RationalBezierPatch& patch) {
  const auto [p, q] = patch.degree();
  if (q == 0) return AuxBasisSpec{{std::max(p - 1, 0), 0}};
  return AuxBasisSpec{{2 * p - 1, q - 1}};
}

void validate_aux(const RationalBezierPatch& patch, const AuxBasisSpec& aux) {
  const auto [p, q] = patch.degree();
  if (p < 1 || p > 4 || q < 0 || q > 4) {
    std::ostringstream msg;
    msg << "implicitisation supports degrees 1..4, got (" << p << ", " << q << ")";
    throw std::invalid_argument(msg.str());
  }
  if (aux.degree[0] < 0 || aux.degree[1] < 0)
    throw std::invalid_argument("aux degree must be non-negative");
  const AuxBasisSpec lo = AuxBasisSpec::minimal(patch);
  const bool direct = aux.degree[0] >= lo.degree[0] && aux.degree[1] >= lo.degree[1];
  const bool swapped = q > 0 && aux.degree[0] >= q - 1 && aux.degree[1] >= 2 * p - 1 && p == q;
  if (q == 0 && aux.degree[1] != 0)
    throw std::invalid_argument("a curve takes a univariate aux basis");
  if (!direct && !swapped) throw std::invalid_argument("aux degree below the minimum");
  if (p + aux.degree[0] > kMaxBinomialDegree || q + aux.degree[1] > kMaxBinomialDegree)
    throw std::invalid_argument("aux degree too large");
}

Matrix assemble_C(const RationalBezierPatch& patch, const AuxBasisSpec& aux) {
  validate_aux(patch, aux);
  const auto [p1, p2] = patch.degree();
  const auto [a1, a2] = aux.degree;
  const int r1 = p1 + a1 + 1;
  const int r2 = p2 + a2 + 1;

  Matrix C = Matrix::Zero(r1 * r2, 4 * aux.size());
  for (int i2 = 0; i2 <= p2; ++i2)
    for (int i1 = 0; i1 <= p1; ++i1) {
      const Vec4 h = patch.homogeneous(i1, i2);
      for (int j2 = 0; j2 <= a2; ++j2) {
        const auto b2 = bernstein_product({i2 + 1, p2}, {j2 + 1, a2});
        for (int j1 = 0; j1 <= a1; ++j1) {
          const auto b1 = bernstein_product({i1 + 1, p1}, {j1 + 1, a1});
          const int row = (b2.index.i - 1) * r1 + (b1.index.i - 1);
          const int col = 4 * (j2 * (a1 + 1) + j1);
          C.block<1, 4>(row, col) += b1.coefficient * b2.coefficient * h.transpose();
        }
      }
    }
  return C;
}

Matrix null_space(const Matrix& C, RankTolerance tol) {
  if (C.size() == 0) throw std::invalid_argument("null space of an empty matrix");
  Matrix S = C;
  for (Eigen::Index r = 0; r < S.rows(); ++r) {
    const double m = S.row(r).cwiseAbs().maxCoeff();
    if (m > 0.0) S.row(r) /= m;
  }
  Eigen::JacobiSVD<Matrix> svd(S, Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw NumericalFailure("SVD of C did not converge");
  const Vector& s = svd.singularValues();
  const double floor = s.size() > 0 ? s(0) * 1e-14 * static_cast<double>(S.cols()) : 0.0;
  const int r = numerical_rank(s, tol.epsilon, floor);
  return svd.matrixV().rightCols(S.cols() - r);
}

MRep mrep_from_gamma(std::array<int, 2> source_degree, const AuxBasisSpec& aux, Matrix gamma,
                     RankTolerance tol) {
  if (gamma.rows() != 4 * aux.size())
    throw std::invalid_argument("gamma rows must equal 4 x aux basis size");
  MRep m;
  m.source_degree = source_degree;
  m.aux = aux;
  m.tol = tol;
  m.gamma = std::move(gamma);
  const int n = aux.size();
  for (int c = 0; c < 4; ++c) {
    m.G[c].resize(n, m.gamma.cols());
    for (int j = 0; j < n; ++j) m.G[c].row(j) = m.gamma.row(4 * j + c);
  }
  return m;
}

MRep build_mrep(const RationalBezierPatch& patch, const AuxBasisSpec& aux, RankTolerance tol) {
  return mrep_from_gamma(patch.degree(), aux, null_space(assemble_C(patch, aux), tol), tol);
}

MRep build_mrep(const RationalBezierPatch& patch, RankTolerance tol) {
  return build_mrep(patch, AuxBasisSpec::minimal(patch), tol);
}

Matrix mrep_eval(const MRep& m, const Vec3& x) {
  return m.G[0] * x(0) + m.G[1] * x(1) + m.G[2] * x(2) + m.G[3];
}

Matrix mrep_linear(const MRep& m, const Vec3& v) {
  return m.G[0] * v(0) + m.G[1] * v(1) + m.G[2] * v(2);
}

int matrix_rank(const Matrix& M, RankTolerance tol, double floor) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return numerical_rank(svd.singularValues(), tol.epsilon, floor);
}

bool rank_drop_test(const Matrix& M, RankTolerance tol) {
  if (M.size() == 0) return false;
  return matrix_rank(M, tol) < std::min(M.rows(), M.cols());
}

}  // namespace lsk
