#include "lsk/pencil.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace lsk {

MatrixPencil::MatrixPencil(Matrix a, Matrix b) : A(std::move(a)), B(std::move(b)) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("pencil matrices must have equal shape");
}

namespace {

double norm2(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

std::vector<std::complex<double>> square_eigenvalues(const Matrix& A, const Matrix& B) {
  std::vector<std::complex<double>> out;
  if (A.rows() == 1) {
    out.emplace_back(A(0, 0) / B(0, 0), 0.0);
    return out;
  }
  Eigen::GeneralizedEigenSolver<Matrix> ges(A, B, false);
  if (ges.info() != Eigen::Success) throw NumericalFailure("generalised eigensolver failed");
  const auto& alpha = ges.alphas();
  const auto& beta = ges.betas();
  const double bscale = std::max(1.0, B.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    if (std::abs(beta(k)) <= 1e-14 * bscale) continue;
    out.push_back(alpha(k) / beta(k));
  }
  return out;
}

}  // namespace

std::vector<std::complex<double>> pencil_eigenvalues(const MatrixPencil& p,
                                                     const PencilOptions& opt) {
  Matrix A = p.A;
  Matrix B = p.B;
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("pencil matrices must have equal shape");
  const double scale = std::max(norm2(A), norm2(B));
  if (A.size() == 0 || scale == 0.0) return {};
  const double floor = opt.zero_tol * scale;
  const double eps = opt.rank.epsilon;

  const Eigen::Index cap = A.rows() + A.cols() + 1;
  for (Eigen::Index depth = 0; depth <= cap; ++depth) {
    if (A.rows() == 0 || A.cols() == 0) return {};
    if (A.rows() > A.cols()) {
      Matrix At = A.transpose();
      Matrix Bt = B.transpose();
      A = std::move(At);
      B = std::move(Bt);
    }
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();

    Eigen::JacobiSVD<Matrix> svd_b(B, Eigen::ComputeFullV);
    if (svd_b.info() != Eigen::Success) throw NumericalFailure("SVD did not converge");
    const int rb = numerical_rank(svd_b.singularValues(), eps, floor);
    if (m == n && rb == n) return square_eigenvalues(A, B);
    if (rb == 0) return {};

    const Matrix& Vb = svd_b.matrixV();
    const Matrix AV = A * Vb;
    const Matrix BV = B * Vb;
    const Matrix A12 = AV.rightCols(n - rb);

    Eigen::JacobiSVD<Matrix> svd_a(A12, Eigen::ComputeFullU);
    if (svd_a.info() != Eigen::Success) throw NumericalFailure("SVD did not converge");
    const int ra = A12.size() == 0 ? 0 : numerical_rank(svd_a.singularValues(), eps, floor);
    const Matrix Ut = svd_a.matrixU().transpose();

    const Eigen::Index keep = m - ra;
    if (keep == 0) return {};
    A = (Ut.bottomRows(keep) * AV.leftCols(rb)).eval();
    B = (Ut.bottomRows(keep) * BV.leftCols(rb)).eval();
  }
  throw NumericalFailure("pencil reduction did not terminate");
}

std::vector<RealEigenvalue> classify_real(const std::vector<std::complex<double>>& values,
                                          const PencilOptions& opt) {
  std::vector<std::complex<double>> v;
  for (const auto& z : values)
    if (std::isfinite(z.real()) && std::isfinite(z.imag())) v.push_back(z);
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });

  std::vector<bool> used(v.size(), false);
  std::vector<RealEigenvalue> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::complex<double> sum = v[i];
    int count = 1;
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (used[j]) continue;
      if (v[j].real() - v[i].real() > opt.cluster_tol * (1.0 + std::abs(v[i].real()))) break;
      if (std::abs(v[j] - v[i]) <= opt.cluster_tol * (1.0 + std::abs(v[i]))) {
        used[j] = true;
        sum += v[j];
        ++count;
      }
    }
    const std::complex<double> c = sum / static_cast<double>(count);
    if (std::abs(c.imag()) <= opt.imag_tol * (1.0 + std::abs(c.real())))
      out.push_back({c.real(), count});
  }
  std::sort(out.begin(), out.end(),
            [](const RealEigenvalue& a, const RealEigenvalue& b) { return a.value < b.value; });
  return out;
}

std::vector<RealEigenvalue> pencil_real_eigenvalues(const MatrixPencil& p,
                                                    const PencilOptions& opt) {
  return classify_real(pencil_eigenvalues(p, opt), opt);
}

}  // namespace lsk
