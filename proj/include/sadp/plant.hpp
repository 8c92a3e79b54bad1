#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace sadp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Deterministic discrete-time system x_{k+1} = f(x_k, u_k).
struct PlantModel {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  std::function<Vector(const Vector&, const Vector&)> step;
  std::string name;
};

/// The two-state benchmark plant
///   x1+ = -sin(0.5 x2)
///   x2+ = -cos(1.4 x2) sin(0.9 x1) + u
PlantModel lewis2d();

/// Looks up a preset by name. Throws std::invalid_argument for unknown names.
PlantModel make_plant(std::string_view preset);

Vector step_true(const PlantModel& plant, const Vector& x, const Vector& u);

/// Quadratic running cost r(x, u) = 0.5 xᵀQx + 0.5 uᵀRu.
class RunningCost {
 public:
  /// Throws std::invalid_argument unless both matrices are square, symmetric
  /// and positive definite.
  RunningCost(Matrix state_weight, Matrix control_weight);

  const Matrix& state_weight() const { return q_; }
  const Matrix& control_weight() const { return r_; }
  Eigen::Index n() const { return q_.rows(); }
  Eigen::Index m() const { return r_.rows(); }

  double operator()(const Vector& x, const Vector& u) const;
  Vector grad_x(const Vector& x) const;
  Vector grad_u(const Vector& u) const;

 private:
  Matrix q_;
  Matrix r_;
};

double running_cost(const RunningCost& cost, const Vector& x, const Vector& u);

/// Additive Gaussian measurement noise y = x + sigma * eta.
///
/// Draws come from std::mt19937_64 (whose output sequence is fixed by the
/// standard) mapped to standard normals with the Box-Muller transform:
///   u1 = (1 + (w1 >> 11)) * 2^-53   in (0, 1]
///   u2 = (w2 >> 11) * 2^-53         in [0, 1)
///   eta = sqrt(-2 ln u1) * (cos(2 pi u2), sin(2 pi u2))
/// Both values of a pair are used, cosine first. std::normal_distribution is
/// avoided because its algorithm differs between standard libraries.
class MeasurementChannel {
 public:
  MeasurementChannel(double sigma, std::uint64_t seed);

  Vector measure(const Vector& x);
  double standard_normal();

  double sigma() const { return sigma_; }
  std::uint64_t seed() const { return seed_; }

 private:
  double sigma_;
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

Vector measure(MeasurementChannel& chan, const Vector& x);

}  // namespace sadp
