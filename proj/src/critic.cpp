#include "sadp/critic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sadp/errors.hpp"

namespace sadp {

CriticWeights CriticWeights::ones(const Regressor& reg, double alpha, int n_iter) {
  return CriticWeights{Vector::Ones(reg.p), alpha, n_iter};
}

double q_value(const Regressor& reg, const Vector& w, const Vector& x, const Vector& u) {
  if (w.size() != reg.p) throw std::invalid_argument("q_value: weight size mismatch");
  return w.dot(phi(reg, x, u));
}

double bellman_error(const Regressor& reg, const Vector& w_plus, const Vector& w_minus,
                     const Transition& t) {
  if (w_plus.size() != reg.p || w_minus.size() != reg.p) {
    throw std::invalid_argument("bellman_error: weight size mismatch");
  }
  return w_plus.dot(phi(reg, t.x_k, t.u_k)) -
         w_minus.dot(phi(reg, t.x_k1, t.successor_action())) - t.r_k;
}

CriticEpisode critic_descend(const Regressor& reg, const Vector& w_plus, const Vector& w_minus,
                             const Transition& t, double alpha, int n_iter) {
  if (n_iter < 1) throw std::invalid_argument("critic: n_iter must be >= 1");
  if (w_plus.size() != reg.p || w_minus.size() != reg.p) {
    throw std::invalid_argument("critic: weight size mismatch");
  }
  const Vector features = phi(reg, t.x_k, t.u_k);
  const double target = w_minus.dot(phi(reg, t.x_k1, t.successor_action())) + t.r_k;

  CriticEpisode episode{CriticWeights{w_plus, alpha, n_iter}, {}, 0.0};
  episode.errors.reserve(static_cast<std::size_t>(n_iter));
  Vector& w = episode.weights.w;
  for (int i = 0; i < n_iter; ++i) {
    const double e = w.dot(features) - target;
    if (!std::isfinite(e) || std::abs(e) > kBellmanErrorLimit) {
      throw DivergenceError("critic: Bellman error " + std::to_string(e) + " at iteration " +
                            std::to_string(i));
    }
    episode.errors.push_back(e);
    w -= alpha * e * features;
  }
  episode.final_error = w.dot(features) - target;
  return episode;
}

CriticEpisode critic_update(const Regressor& reg, const CriticWeights& weights,
                            const Transition& t) {
  return critic_descend(reg, weights.w, weights.w, t, weights.alpha, weights.n_iter);
}

Vector greedy_control(const Regressor& reg, const Vector& w, const Vector& x) {
  if (x.size() != reg.n) throw std::invalid_argument("greedy_control: dimension mismatch");
  const Matrix m = quadratic_form(reg, w);
  const Matrix m_uu = m.bottomRightCorner(reg.m, reg.m);
  const Matrix m_ux = m.bottomLeftCorner(reg.m, reg.n);
  Eigen::LLT<Matrix> llt(m_uu);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("greedy_control: control block of the Q-form is not positive definite");
  }
  return llt.solve(-m_ux * x);
}

}  // namespace sadp
