#include "sadp/regressor.hpp"

#include <stdexcept>

namespace sadp {

namespace {

void check_dims(const Regressor& reg, const Vector& x, const Vector& u, const char* op) {
  if (x.size() != reg.n || u.size() != reg.m) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch");
  }
}

Vector stack(const Vector& x, const Vector& u) {
  Vector z(x.size() + u.size());
  z << x, u;
  return z;
}

// Jacobian of phi with respect to z columns [first, first + count).
Matrix dphi_dz_block(const Vector& z, Eigen::Index first, Eigen::Index count) {
  const Eigen::Index d = z.size();
  Matrix jac = Matrix::Zero(d * (d + 1) / 2, count);
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j, ++row) {
      // d(z_i z_j)/dz_c = [c == i] z_j + [c == j] z_i
      if (i >= first && i < first + count) jac(row, i - first) += z(j);
      if (j >= first && j < first + count) jac(row, j - first) += z(i);
    }
  }
  return jac;
}

}  // namespace

Regressor::Regressor(Eigen::Index state_dim, Eigen::Index control_dim)
    : n(state_dim), m(control_dim), p(feature_count(state_dim, control_dim)) {
  if (n < 1 || m < 1) throw std::invalid_argument("Regressor: dimensions must be positive");
}

Vector phi(const Regressor& reg, const Vector& x, const Vector& u) {
  check_dims(reg, x, u, "phi");
  const Vector z = stack(x, u);
  const Eigen::Index d = z.size();
  Vector features(reg.p);
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) features(row++) = z(i) * z(j);
  }
  return features;
}

Matrix dphi_du(const Regressor& reg, const Vector& x, const Vector& u) {
  check_dims(reg, x, u, "dphi_du");
  return dphi_dz_block(stack(x, u), reg.n, reg.m);
}

Matrix dphi_dx(const Regressor& reg, const Vector& x, const Vector& u) {
  check_dims(reg, x, u, "dphi_dx");
  return dphi_dz_block(stack(x, u), 0, reg.n);
}

Matrix quadratic_form(const Regressor& reg, const Vector& weights) {
  if (weights.size() != reg.p) throw std::invalid_argument("quadratic_form: weight size mismatch");
  const Eigen::Index d = reg.n + reg.m;
  Matrix m(d, d);
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    m(i, i) = weights(row++);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      m(i, j) = m(j, i) = 0.5 * weights(row++);
    }
  }
  return m;
}

Vector weights_from_quadratic_form(const Regressor& reg, const Matrix& m) {
  const Eigen::Index d = reg.n + reg.m;
  if (m.rows() != d || m.cols() != d) {
    throw std::invalid_argument("weights_from_quadratic_form: matrix size mismatch");
  }
  Vector weights(reg.p);
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    weights(row++) = m(i, i);
    for (Eigen::Index j = i + 1; j < d; ++j) weights(row++) = 2.0 * m(i, j);
  }
  return weights;
}

}  // namespace sadp
