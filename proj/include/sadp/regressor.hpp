#pragma once

#include "sadp/plant.hpp"

namespace sadp {

/// Quadratic basis over z = (x, u): every monomial z_i z_j with i <= j, in
/// row-major order of the upper triangle of z zᵀ (diagonal included):
///   (0,0), (0,1), ..., (0,d-1), (1,1), ..., (d-1,d-1),   d = n + m.
/// Off-diagonal products appear once, without a factor of two.
struct Regressor {
  Regressor(Eigen::Index state_dim, Eigen::Index control_dim);

  Eigen::Index n;
  Eigen::Index m;
  Eigen::Index p;

  static Eigen::Index feature_count(Eigen::Index n, Eigen::Index m) {
    return (n + m) * (n + m + 1) / 2;
  }
};

Vector phi(const Regressor& reg, const Vector& x, const Vector& u);

/// Analytic Jacobians of phi, p×m and p×n.
Matrix dphi_du(const Regressor& reg, const Vector& x, const Vector& u);
Matrix dphi_dx(const Regressor& reg, const Vector& x, const Vector& u);

/// Symmetric M with Wᵀφ(x,u) = zᵀMz. Off-diagonal weights are split in half.
Matrix quadratic_form(const Regressor& reg, const Vector& weights);

/// Inverse of quadratic_form: reads the upper triangle, doubling off-diagonals.
Vector weights_from_quadratic_form(const Regressor& reg, const Matrix& m);

}  // namespace sadp
