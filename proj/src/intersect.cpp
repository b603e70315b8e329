#include "lsk/intersect.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>

namespace lsk {

ParametricLine::ParametricLine(Vec3 origin, Vec3 direction, std::array<double, 2> dom)
    : c0(std::move(origin)), c1(std::move(direction)), domain(dom) {
  if (!(c1.norm() > 0.0)) throw std::invalid_argument("line direction must be non-zero");
  if (!(domain[0] <= domain[1])) throw std::invalid_argument("line domain must be ordered");
}

ParametricLine ParametricLine::through(const Vec3& a, const Vec3& b) {
  return ParametricLine(a, b - a);
}

ParametricQuadratic::ParametricQuadratic(Vec3 a0, Vec3 a1, Vec3 a2, std::array<double, 2> dom)
    : c0(std::move(a0)), c1(std::move(a1)), c2(std::move(a2)), domain(dom) {
  if (!(c1.norm() > 0.0) && !(c2.norm() > 0.0))
    throw std::invalid_argument("quadratic must not be constant");
  if (!(domain[0] <= domain[1])) throw std::invalid_argument("quadratic domain must be ordered");
}

MatrixPencil pencil_from_line(const MRep& m, const ParametricLine& line) {
  if (!(line.c1.norm() > 0.0)) throw std::invalid_argument("line direction must be non-zero");
  Matrix A = mrep_eval(m, line.c0);
  Matrix B = -mrep_linear(m, line.c1);
  return MatrixPencil(std::move(A), std::move(B));
}

MatrixPencil pencil_from_quadratic(const MRep& m, const ParametricQuadratic& q) {
  const Eigen::Index R = m.rows();
  Matrix M0 = mrep_eval(m, q.c0);
  Matrix M1 = mrep_linear(m, q.c1);
  Matrix M2 = mrep_linear(m, q.c2);

  // Drop the common right kernel of the three coefficients.
  Matrix S(3 * R, m.cols());
  S << M0, M1, M2;
  const Eigen::JacobiSVD<Matrix> svd(S, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index n = 0;
  while (n < sv.size() && sv(n) > 1e-13 * std::max(1.0, sv(0))) ++n;
  if (n == 0) n = m.cols();
  const Matrix Q = svd.matrixV().leftCols(n);
  M0 = M0 * Q;
  M1 = M1 * Q;
  M2 = M2 * Q;

  Matrix A = Matrix::Zero(n + R, 2 * n);
  Matrix B = Matrix::Zero(n + R, 2 * n);
  A.topRightCorner(n, n).setIdentity();
  A.bottomLeftCorner(R, n) = M0;
  A.bottomRightCorner(R, n) = M1;
  B.topLeftCorner(n, n).setIdentity();
  B.bottomRightCorner(R, n) = -M2;
  return MatrixPencil(std::move(A), std::move(B));
}

namespace {

// Row j1 + (a1+1) j2 of a left null vector holds B_j1(t1) B_j2(t2) up to scale.
double entry(const Vector& N, const AuxBasisSpec& aux, int d, int j, int other) {
  const int stride = aux.degree[0] + 1;
  return d == 0 ? N(other * stride + j) : N(j * stride + other);
}

// Adjacent-ratio solve along direction d for a single null vector.
double ratio_parameter(const Vector& N, const AuxBasisSpec& aux, int d) {
  const int a = aux.degree[d];
  Eigen::Index kmax = 0;
  N.cwiseAbs().maxCoeff(&kmax);
  const int stride = aux.degree[0] + 1;
  const int jstar = d == 0 ? static_cast<int>(kmax) % stride : static_cast<int>(kmax) / stride;
  const int other = d == 0 ? static_cast<int>(kmax) / stride : static_cast<int>(kmax) % stride;

  double best_den = 0.0;
  double best_num = 0.0;
  for (int j : {jstar - 1, jstar}) {
    if (j < 0 || j + 1 > a) continue;
    const double num = (j + 1) * entry(N, aux, d, j + 1, other);
    const double den = num + (a - j) * entry(N, aux, d, j, other);
    if (std::abs(den) > std::abs(best_den)) {
      best_den = den;
      best_num = num;
    }
  }
  if (std::abs(best_den) <= 1e-12 * N.cwiseAbs().maxCoeff())
    throw DegenerateParameterization("no usable Bernstein ratio in the left null vector");
  return best_num / best_den;
}

// Least-squares position on the degree-1 isoparametric line in direction d.
double linear_fallback(const RationalBezierPatch& patch, int d, double other, const Vec3& x) {
  const int q = patch.degree()[1 - d];
  const Vector bo = bernstein_all(q, other);
  std::array<Vec4, 2> F{Vec4::Zero(), Vec4::Zero()};
  for (int e = 0; e < 2; ++e)
    for (int k = 0; k <= q; ++k)
      F[e] += bo(k) * (d == 0 ? patch.homogeneous(e, k) : patch.homogeneous(k, e));
  const Vec3 u = F[0].head<3>() - x * F[0](3);
  const Vec3 v = F[1].head<3>() - x * F[1](3);
  const double den = (v - u).squaredNorm();
  if (!(den > 0.0)) throw DegenerateParameterization("degenerate isoparametric line");
  return -u.dot(v - u) / den;
}

// Candidate values along direction d for a multi-dimensional left null space.
std::vector<double> pencil_parameters(const Matrix& Nmat, const AuxBasisSpec& aux, int d) {
  const int a = aux.degree[d];
  const int b = aux.degree[1 - d];
  const Eigen::Index k = Nmat.cols();
  Matrix A(static_cast<Eigen::Index>(a) * (b + 1), k);
  Matrix B(A.rows(), k);
  Eigen::Index row = 0;
  for (int other = 0; other <= b; ++other)
    for (int j = 0; j < a; ++j) {
      for (Eigen::Index c = 0; c < k; ++c) {
        const Vector col = Nmat.col(c);
        const double hi = (j + 1) * entry(col, aux, d, j + 1, other);
        const double lo = (a - j) * entry(col, aux, d, j, other);
        A(row, c) = -hi;
        B(row, c) = -(lo + hi);
      }
      ++row;
    }
  std::vector<double> out;
  for (const auto& r : pencil_real_eigenvalues(MatrixPencil(A, B))) out.push_back(r.value);
  return out;
}

}  // namespace

ThetaCandidates param_from_point(const MRep& m, const RationalBezierPatch& patch,
                                 const Vec3& x_star, RankTolerance tol) {
  const Matrix M = mrep_eval(m, x_star);
  const Eigen::Index R = M.rows();
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU);
  const Vector& s = svd.singularValues();
  double scale = m.G[3].norm();
  for (int c = 0; c < 3; ++c) scale += m.G[c].norm() * std::abs(x_star(c));
  const int r = numerical_rank(s, tol.epsilon, 1e-12 * scale);
  const Eigen::Index full = std::min(M.rows(), M.cols());
  if (r >= full) throw NotOnSurface("M(x) has full numerical rank");

  const Matrix Nmat = svd.matrixU().rightCols(R - r);
  const AuxBasisSpec& aux = m.aux;
  const auto deg = m.source_degree;

  ThetaCandidates out;
  out.self_intersection = full - r > 1;

  if (Nmat.cols() == 1) {
    const Vector N = Nmat.col(0);
    std::array<std::optional<double>, 2> t;
    for (int d = 0; d < 2; ++d) {
      if (deg[d] == 0)
        t[d] = 0.0;
      else if (aux.degree[d] >= 1)
        t[d] = ratio_parameter(N, aux, d);
    }
    for (int d = 0; d < 2; ++d) {
      if (t[d]) continue;
      if (!t[1 - d] || deg[d] != 1)
        throw DegenerateParameterization("cannot recover the parameter from a constant aux basis");
      t[d] = linear_fallback(patch, d, *t[1 - d], x_star);
    }
    out.thetas.emplace_back(*t[0], *t[1]);
    return out;
  }

  std::array<std::vector<double>, 2> cand;
  for (int d = 0; d < 2; ++d) {
    if (deg[d] == 0)
      cand[d] = {0.0};
    else if (aux.degree[d] >= 1)
      cand[d] = pencil_parameters(Nmat, aux, d);
  }
  std::vector<Vec2> pairs;
  if (cand[0].empty() && cand[1].empty())
    throw DegenerateParameterization("cannot recover parameters from the null space");
  for (int d = 0; d < 2; ++d) {
    if (!cand[d].empty() || deg[d] != 1) continue;
    for (double o : cand[1 - d]) {
      const double t = linear_fallback(patch, d, o, x_star);
      pairs.push_back(d == 0 ? Vec2(t, o) : Vec2(o, t));
    }
  }
  if (pairs.empty())
    for (double t0 : cand[0])
      for (double t1 : cand[1]) pairs.emplace_back(t0, t1);

  const double gate = 1e-6 * std::max(patch.diameter(), 1e-300);
  for (const Vec2& th : pairs) {
    try {
      if ((patch_eval(patch, th) - x_star).norm() > gate) continue;
    } catch (const BasePointError&) {
      continue;
    }
    const bool dup = std::any_of(out.thetas.begin(), out.thetas.end(),
                                 [&](const Vec2& o) { return (o - th).norm() < 1e-8; });
    if (!dup) out.thetas.push_back(th);
  }
  if (out.thetas.empty())
    throw DegenerateParameterization("no parameter pair reproduces the point");
  out.self_intersection = out.self_intersection || out.thetas.size() > 1;
  return out;
}

namespace {

bool line_in_surface(const MRep& m, const std::function<Vec3(double)>& r,
                     const std::array<double, 2>& dom, RankTolerance tol) {
  const double w = dom[1] - dom[0];
  for (double f : {0.2718281828, 0.6180339887})
    if (!rank_drop_test(mrep_eval(m, r(dom[0] + f * w)), tol)) return false;
  return true;
}

std::vector<IntersectionRecord> finish(const RationalBezierPatch& patch, const MRep& m,
                                       const std::vector<RealEigenvalue>& roots,
                                       const std::function<Vec3(double)>& r,
                                       const std::array<double, 2>& dom,
                                       const IntersectOptions& opt, int patch_id) {
  std::vector<IntersectionRecord> out;
  const double dt = opt.domain_tol;
  const double gate = opt.roundtrip_tol * std::max(patch.diameter(), 1e-300);
  for (const RealEigenvalue& root : roots) {
    const double xi = root.value;
    if (xi < dom[0] - dt || xi > dom[1] + dt) continue;
    const Vec3 x = r(xi);
    ThetaCandidates cand;
    try {
      cand = param_from_point(m, patch, x, opt.pencil.rank);
    } catch (const NotOnSurface&) {
      continue;
    } catch (const DegenerateParameterization&) {
      continue;
    }
    for (const Vec2& th : cand.thetas) {
      if (th.minCoeff() < -dt || th.maxCoeff() > 1.0 + dt) continue;
      try {
        if ((patch_eval(patch, th) - x).norm() > gate) continue;
      } catch (const BasePointError&) {
        continue;
      }
      IntersectionRecord rec;
      rec.xi = xi;
      rec.theta = th;
      rec.point = x;
      rec.patch_id = patch_id;
      rec.multiplicity_hint = root.multiplicity;
      rec.self_intersection = cand.self_intersection;
      out.push_back(rec);
    }
  }
  std::vector<IntersectionRecord> merged;
  for (const auto& rec : out) {
    const bool dup = std::any_of(merged.begin(), merged.end(), [&](const IntersectionRecord& o) {
      return std::abs(o.xi - rec.xi) <= opt.dedup_tol * (1.0 + std::abs(rec.xi)) &&
             (o.theta - rec.theta).norm() <= 1e-6;
    });
    if (!dup) merged.push_back(rec);
  }
  return merged;
}

}  // namespace

std::vector<IntersectionRecord> intersect_patch_line(const RationalBezierPatch& patch,
                                                     const MRep& m,
                                                     const ParametricLine& line,
                                                     const IntersectOptions& opt,
                                                     int patch_id) {
  const auto r = [&line](double xi) { return line(xi); };
  if (line_in_surface(m, r, line.domain, opt.pencil.rank)) return {};
  const auto roots = pencil_real_eigenvalues(pencil_from_line(m, line), opt.pencil);
  return finish(patch, m, roots, r, line.domain, opt, patch_id);
}

std::vector<IntersectionRecord> intersect_patch_line(const RationalBezierPatch& patch,
                                                     const ParametricLine& line,
                                                     const IntersectOptions& opt,
                                                     int patch_id) {
  return intersect_patch_line(patch, build_mrep(patch, opt.pencil.rank), line, opt, patch_id);
}

std::vector<IntersectionRecord> intersect_patch_quadratic(const RationalBezierPatch& patch,
                                                          const MRep& m,
                                                          const ParametricQuadratic& q,
                                                          const IntersectOptions& opt,
                                                          int patch_id) {
  const auto r = [&q](double xi) { return q(xi); };
  if (line_in_surface(m, r, q.domain, opt.pencil.rank)) return {};
  const auto roots = pencil_real_eigenvalues(pencil_from_quadratic(m, q), opt.pencil);
  return finish(patch, m, roots, r, q.domain, opt, patch_id);
}

std::vector<IntersectionRecord> intersect_curve_line(const BezierCurve& curve,
                                                     const AuxBasisSpec& aux,
                                                     const ParametricLine& line,
                                                     const IntersectOptions& opt) {
  const auto& patch = curve.as_patch();
  return intersect_patch_line(patch, build_mrep(patch, aux, opt.pencil.rank), line, opt);
}

std::vector<IntersectionRecord> intersect_curve_line(const BezierCurve& curve,
                                                     const ParametricLine& line,
                                                     const IntersectOptions& opt) {
  return intersect_curve_line(curve, AuxBasisSpec::minimal(curve.as_patch()), line, opt);
}

std::vector<IntersectionRecord> dedup_records(std::vector<IntersectionRecord> records,
                                              double dedup_tol, double point_tol) {
  std::stable_sort(records.begin(), records.end(),
                   [](const IntersectionRecord& a, const IntersectionRecord& b) {
                     return a.xi < b.xi;
                   });
  std::vector<IntersectionRecord> out;
  for (const auto& rec : records) {
    bool dup = false;
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      if (rec.xi - it->xi > dedup_tol * (1.0 + std::abs(rec.xi))) break;
      if ((rec.point - it->point).norm() <= point_tol) {
        it->multiplicity_hint = std::max(it->multiplicity_hint, rec.multiplicity_hint);
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(rec);
  }
  return out;
}

}  // namespace lsk
