#pragma once

#include <deque>
#include <utility>
#include <vector>

#include "sadp/plant.hpp"

namespace sadp {

/// Linear prediction model x⁺ = A x + B u with its Kalman-filter covariance.
///
/// The parameter vector is vec(A|B): the rows of A, then the rows of B,
///   θ = (a11 … a1n, …, an1 … ann, b11 … b1m, …, bn1 … bnm).
/// That ordering matches the block rows (I_n ⊗ xᵀ | I_n ⊗ uᵀ) of the
/// regression matrix.
struct ModelEstimate {
  Matrix A;
  Matrix B;
  Matrix P;     // covariance of θ
  Matrix Q_kf;  // random-walk covariance added by kf_predict
  Matrix R_kf;  // measurement covariance for a full stack (nL × nL)

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
  Eigen::Index parameter_count() const { return n() * n() + n() * m(); }

  /// A = I, B = 0, P = p0·I, Q_kf = q_kf·I, R_kf = r_kf·I.
  static ModelEstimate initial(Eigen::Index n, Eigen::Index m, Eigen::Index stack_size,
                               double p0, double q_kf, double r_kf);
};

/// Entries of m row by row.
Vector row_major(const Matrix& m);

Vector vec_model(const Matrix& A, const Matrix& B);
std::pair<Matrix, Matrix> unvec_model(const Vector& theta, Eigen::Index n, Eigen::Index m);

/// Sliding window of the most recent L transitions (x_i, u_i) → x_{i+1}.
///
/// States and controls are pushed alternately: push_state(x_k) then, once the
/// control for step k is known, push_control(u_k). Pushing a state beyond
/// L + 1 drops the oldest transition.
class SampleStack {
 public:
  SampleStack(Eigen::Index n, Eigen::Index m, Eigen::Index stack_size);

  void push_state(const Vector& x);
  void push_control(const Vector& u);

  Eigen::Index stack_size() const { return capacity_; }
  Eigen::Index transition_count() const;
  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }

  const Vector& state(Eigen::Index i) const { return states_[static_cast<std::size_t>(i)]; }
  const Vector& control(Eigen::Index i) const { return controls_[static_cast<std::size_t>(i)]; }

 private:
  Eigen::Index n_;
  Eigen::Index m_;
  Eigen::Index capacity_;
  std::deque<Vector> states_;
  std::deque<Vector> controls_;
};

struct Regression {
  Matrix H;  // (n·count) × (n² + nm)
  Vector y;  // stacked successor states
};

/// Stacked regression over every stored transition, oldest first. Throws
/// std::invalid_argument when the stack holds no transition.
Regression regression_matrices(const SampleStack& stack);

/// Random-walk prediction: parameters unchanged, P ← P + Q_kf.
ModelEstimate kf_predict(const ModelEstimate& est);

/// Measurement update against the stacked regression. Throws
/// std::runtime_error when the innovation covariance cannot be factored even
/// after diagonal jitter.
ModelEstimate kf_correct(const ModelEstimate& est, const SampleStack& stack);

Vector predict_state(const ModelEstimate& est, const Vector& x, const Vector& u);

/// x̂_{i+1} = A x̂_i + B u_i from x̂_0 = x0; returns x̂_1 … x̂_N for the N
/// controls packed in `controls` (length N·m).
std::vector<Vector> rollout(const ModelEstimate& est, const Vector& x0, const Vector& controls);

}  // namespace sadp
