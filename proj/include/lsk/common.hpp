#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsk {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error categories. InputError maps to CLI exit code 1, NumericalError to 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedInput : InputError {
  using InputError::InputError;
};

struct NumericalFailure : NumericalError {
  using NumericalError::NumericalError;
};

/// Raised when all four homogeneous coordinates of a patch vanish.
class BasePointError : public NumericalError {
 public:
  BasePointError(const std::string& what, Vec2 theta)
      : NumericalError(what), theta_(std::move(theta)) {}
  const Vec2& theta() const noexcept { return theta_; }

 private:
  Vec2 theta_;
};

struct NotOnSurface : NumericalError {
  using NumericalError::NumericalError;
};

struct DegenerateParameterization : NumericalError {
  using NumericalError::NumericalError;
};

struct ToleranceUnreachable : NumericalError {
  using NumericalError::NumericalError;
};

class OpenSurfaceError : public InputError {
 public:
  OpenSurfaceError(const std::string& what, int line)
      : InputError(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class MechanismError : public NumericalError {
 public:
  MechanismError(const std::string& what, int zero_energy_modes)
      : NumericalError(what), modes_(zero_energy_modes) {}
  int zero_energy_modes() const noexcept { return modes_; }

 private:
  int modes_;
};

/// Numerical-rank tolerance for the consecutive singular value ratio test.
struct RankTolerance {
  double epsilon = 1e-6;

  RankTolerance() = default;
  explicit RankTolerance(double eps) : epsilon(eps) {
    if (!(eps > 0.0 && eps < 1.0))
      throw std::invalid_argument("rank tolerance must lie in (0, 1)");
  }
};

/// r = min{k : s[k]/s[k-1] < eps} over singular values sorted in descending
/// order. Values at or below `floor` count as exact zeros.
int numerical_rank(const Vector& singular_values, double eps, double floor = 0.0);

}  // namespace lsk
