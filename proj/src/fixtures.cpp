#include "lsk/fixtures.hpp"

namespace lsk {

std::vector<RationalBezierPatch> cube_sphere(const Vec3& centre, double radius, int n) {
  if (n < 1) throw std::invalid_argument("cube sphere needs n >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  std::vector<RationalBezierPatch> out;
  const int m = 2 * n;
  for (int axis = 0; axis < 3; ++axis)
    for (int sign : {-1, 1}) {
      const int u = (axis + 1) % 3;
      const int v = (axis + 2) % 3;
      const auto grid = [&](int a, int b) {
        Vec3 c;
        c(axis) = sign;
        c(u) = -1.0 + 2.0 * a / m;
        c(v) = -1.0 + 2.0 * b / m;
        if (sign < 0) c(u) = -c(u);  // keep outward orientation
        return Vec3(centre + radius * c.normalized());
      };
      for (int pb = 0; pb < n; ++pb)
        for (int pa = 0; pa < n; ++pa) {
          std::vector<Vec3> pts;
          for (int j = 0; j <= 2; ++j)
            for (int i = 0; i <= 2; ++i) pts.push_back(grid(2 * pa + i, 2 * pb + j));
          out.push_back(RationalBezierPatch::polynomial({2, 2}, std::move(pts)));
        }
    }
  return out;
}

RationalBezierPatch random_cubic_patch(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Vec3> pts;
  std::vector<double> w;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      const double x = i / 3.0 + 0.1 * (U(rng) - 0.5);
      const double y = j / 3.0 + 0.1 * (U(rng) - 0.5);
      const double z = 0.3 * (U(rng) - 0.5);
      pts.emplace_back(x, y, z);
      w.push_back(0.5 + 1.5 * U(rng));
    }
  return RationalBezierPatch({3, 3}, std::move(pts), std::move(w));
}

TransversalCase random_transversal_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  RationalBezierPatch p = random_cubic_patch(rng);
  const Vec2 th(0.05 + 0.9 * U(rng), 0.05 + 0.9 * U(rng));
  const auto d = patch_derivatives(p, th);
  const Vec3 n = d.d1.cross(d.d2).normalized();
  const Vec3 noise(U(rng) - 0.5, U(rng) - 0.5, U(rng) - 0.5);
  const Vec3 dir = (n + 0.5 * noise).normalized();
  const double before = 0.3 + 0.4 * U(rng);
  return {p, ParametricLine::through(d.point - before * dir, d.point + (1.0 - before) * dir), th};
}

}  // namespace lsk
