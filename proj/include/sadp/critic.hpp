#pragma once

#include <optional>
#include <vector>

#include "sadp/regressor.hpp"

namespace sadp {

/// Parameters of Q̂(x,u) = Wᵀφ(x,u) and the gradient-descent settings used to
/// fit them.
struct CriticWeights {
  Vector w;
  double alpha = 0.1;
  int n_iter = 20;

  /// All-ones initial weights.
  static CriticWeights ones(const Regressor& reg, double alpha, int n_iter);
};

/// One observed or predicted step of the closed loop.
struct Transition {
  Vector x_k;
  Vector u_k;   // action before the policy update
  Vector x_k1;  // successor state
  double r_k = 0.0;
  /// Action paired with x_k1 in the target term. Unset means u_k, which is the
  /// form the controllers use; the greedy successor action turns the same
  /// update into Q-value iteration.
  std::optional<Vector> u_k1;

  const Vector& successor_action() const { return u_k1 ? *u_k1 : u_k; }
};

/// Result of one critic episode.
struct CriticEpisode {
  CriticWeights weights;
  std::vector<double> errors;  // e before each of the n_iter descent steps
  double final_error = 0.0;    // e after the last step
};

/// |e| above this aborts the episode with DivergenceError.
inline constexpr double kBellmanErrorLimit = 1e9;

double q_value(const Regressor& reg, const Vector& w, const Vector& x, const Vector& u);

/// e = W⁺ᵀφ(x_k,u_k) − W⁻ᵀφ(x_k1,u_k1) − r_k
double bellman_error(const Regressor& reg, const Vector& w_plus, const Vector& w_minus,
                     const Transition& t);

/// n_iter steps of W⁺ ← W⁺ − α e φ(x_k,u_k) with W⁻ frozen, starting from
/// w_plus.
CriticEpisode critic_descend(const Regressor& reg, const Vector& w_plus, const Vector& w_minus,
                             const Transition& t, double alpha, int n_iter);

/// Critic episode with W⁻ = W⁺(start) = weights.w.
CriticEpisode critic_update(const Regressor& reg, const CriticWeights& weights,
                            const Transition& t);

/// argmin_u Wᵀφ(x,u) for the quadratic approximant: solves M_uu u = −M_ux x.
/// Throws std::domain_error when M_uu is not positive definite.
Vector greedy_control(const Regressor& reg, const Vector& w, const Vector& x);

}  // namespace sadp
