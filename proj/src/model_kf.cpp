#include "sadp/model_kf.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sadp {

namespace {

constexpr double kJitter = 1e-12;

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

ModelEstimate ModelEstimate::initial(Eigen::Index n, Eigen::Index m, Eigen::Index stack_size,
                                     double p0, double q_kf, double r_kf) {
  if (n < 1 || m < 1 || stack_size < 1) {
    throw std::invalid_argument("ModelEstimate: dimensions and stack size must be positive");
  }
  if (!(p0 > 0.0) || !(q_kf >= 0.0) || !(r_kf > 0.0)) {
    throw std::invalid_argument("ModelEstimate: need p0 > 0, q_kf >= 0, r_kf > 0");
  }
  const Eigen::Index params = n * n + n * m;
  ModelEstimate est;
  est.A = Matrix::Identity(n, n);
  est.B = Matrix::Zero(n, m);
  est.P = p0 * Matrix::Identity(params, params);
  est.Q_kf = q_kf * Matrix::Identity(params, params);
  est.R_kf = r_kf * Matrix::Identity(n * stack_size, n * stack_size);
  return est;
}

Vector row_major(const Matrix& m) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  return Eigen::Map<const Vector>(rm.data(), rm.size());
}

Vector vec_model(const Matrix& A, const Matrix& B) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  if (A.cols() != n || B.rows() != n) throw std::invalid_argument("vec_model: shape mismatch");
  Vector theta(n * n + n * m);
  for (Eigen::Index r = 0; r < n; ++r) {
    theta.segment(r * n, n) = A.row(r).transpose();
    theta.segment(n * n + r * m, m) = B.row(r).transpose();
  }
  return theta;
}

std::pair<Matrix, Matrix> unvec_model(const Vector& theta, Eigen::Index n, Eigen::Index m) {
  if (theta.size() != n * n + n * m) throw std::invalid_argument("unvec_model: size mismatch");
  Matrix A(n, n);
  Matrix B(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    A.row(r) = theta.segment(r * n, n).transpose();
    B.row(r) = theta.segment(n * n + r * m, m).transpose();
  }
  return {A, B};
}

SampleStack::SampleStack(Eigen::Index n, Eigen::Index m, Eigen::Index stack_size)
    : n_(n), m_(m), capacity_(stack_size) {
  if (n < 1 || m < 1 || stack_size < 1) {
    throw std::invalid_argument("SampleStack: dimensions and stack size must be positive");
  }
}

void SampleStack::push_state(const Vector& x) {
  if (x.size() != n_) throw std::invalid_argument("SampleStack: state dimension mismatch");
  if (!states_.empty() && controls_.size() != states_.size()) {
    throw std::logic_error("SampleStack: push_control must follow push_state");
  }
  states_.push_back(x);
  while (states_.size() > static_cast<std::size_t>(capacity_) + 1) {
    states_.pop_front();
    controls_.pop_front();
  }
}

void SampleStack::push_control(const Vector& u) {
  if (u.size() != m_) throw std::invalid_argument("SampleStack: control dimension mismatch");
  if (states_.empty() || controls_.size() != states_.size() - 1) {
    throw std::logic_error("SampleStack: push_state must precede push_control");
  }
  controls_.push_back(u);
}

Eigen::Index SampleStack::transition_count() const {
  if (states_.empty()) return 0;
  return static_cast<Eigen::Index>(
      std::min(states_.size() - 1, controls_.size()));
}

Regression regression_matrices(const SampleStack& stack) {
  const Eigen::Index count = stack.transition_count();
  if (count == 0) throw std::invalid_argument("regression_matrices: empty sample stack");
  const Eigen::Index n = stack.n();
  const Eigen::Index m = stack.m();
  Regression reg{Matrix::Zero(n * count, n * n + n * m), Vector(n * count)};
  for (Eigen::Index i = 0; i < count; ++i) {
    const Vector& x = stack.state(i);
    const Vector& u = stack.control(i);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Eigen::Index row = i * n + r;
      reg.H.block(row, r * n, 1, n) = x.transpose();
      reg.H.block(row, n * n + r * m, 1, m) = u.transpose();
    }
    reg.y.segment(i * n, n) = stack.state(i + 1);
  }
  return reg;
}

ModelEstimate kf_predict(const ModelEstimate& est) {
  ModelEstimate next = est;
  next.P = est.P + est.Q_kf;
  return next;
}

ModelEstimate kf_correct(const ModelEstimate& est, const SampleStack& stack) {
  if (stack.n() != est.n() || stack.m() != est.m()) {
    throw std::invalid_argument("kf_correct: stack and estimate dimensions differ");
  }
  const Regression reg = regression_matrices(stack);
  const Eigen::Index rows = reg.H.rows();
  if (rows > est.R_kf.rows()) {
    throw std::invalid_argument("kf_correct: sample stack larger than R_kf");
  }
  const Vector theta = vec_model(est.A, est.B);
  const Vector innovation = reg.y - reg.H * theta;
  const Matrix PHt = est.P * reg.H.transpose();
  Matrix S = reg.H * PHt + est.R_kf.topLeftCorner(rows, rows);
  S = symmetrized(S);

  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success) {
    llt.compute(S + kJitter * Matrix::Identity(rows, rows));
    if (llt.info() != Eigen::Success) {
      Eigen::JacobiSVD<Matrix> svd(S);
      const auto& sv = svd.singularValues();
      std::ostringstream msg;
      msg << "kf_correct: innovation covariance is singular (condition number "
          << sv(0) / sv(sv.size() - 1) << ")";
      throw std::runtime_error(msg.str());
    }
  }
  // K = P Hᵀ S⁻¹, obtained as (S⁻¹ H P)ᵀ without forming S⁻¹.
  const Matrix gain = llt.solve(PHt.transpose()).transpose();

  ModelEstimate next = est;
  const auto [A, B] = unvec_model(theta + gain * innovation, est.n(), est.m());
  next.A = A;
  next.B = B;
  const Eigen::Index params = est.parameter_count();
  next.P = symmetrized((Matrix::Identity(params, params) - gain * reg.H) * est.P);
  return next;
}

Vector predict_state(const ModelEstimate& est, const Vector& x, const Vector& u) {
  if (x.size() != est.n() || u.size() != est.m()) {
    throw std::invalid_argument("predict_state: dimension mismatch");
  }
  return est.A * x + est.B * u;
}

std::vector<Vector> rollout(const ModelEstimate& est, const Vector& x0, const Vector& controls) {
  const Eigen::Index m = est.m();
  if (controls.size() == 0 || controls.size() % m != 0) {
    throw std::invalid_argument("rollout: control stack length must be a positive multiple of m");
  }
  const Eigen::Index horizon = controls.size() / m;
  std::vector<Vector> states;
  states.reserve(static_cast<std::size_t>(horizon));
  Vector x = x0;
  for (Eigen::Index i = 0; i < horizon; ++i) {
    x = predict_state(est, x, controls.segment(i * m, m));
    states.push_back(x);
  }
  return states;
}

}  // namespace sadp
