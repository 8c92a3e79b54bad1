#pragma once

#include <string_view>

#include "sadp/critic.hpp"
#include "sadp/model_kf.hpp"

namespace sadp {

/// Receding-horizon stack of N future controls (u_k | … | u_{k+N−1}).
struct ControlStack {
  Vector u;  // length N·m
  Eigen::Index horizon = 1;
  double beta = 1e-4;
  int n_actor_iter = 1;

  /// Every slot set to `value`.
  static ControlStack filled(Eigen::Index m, Eigen::Index horizon, double value, double beta,
                             int n_actor_iter);

  Eigen::Index m() const { return u.size() / horizon; }
  Vector first() const { return u.head(m()); }
  /// Slots 1..N−1 move to 0..N−2; the last slot keeps its value.
  void shift();
};

/// How the stacked gradient treats the model-predicted states.
enum class GradientMode {
  direct,  // x̂_i held constant
  total,   // chain rule through x̂_i = A x̂_{i−1} + B u_{i−1}
};

GradientMode parse_gradient_mode(std::string_view name);
std::string_view to_string(GradientMode mode);

enum class ControllerKind { gd, adpq, sadpq, mpc };

ControllerKind parse_controller(std::string_view name);
std::string_view to_string(ControllerKind kind);
bool uses_critic(ControllerKind kind);
bool uses_stack(ControllerKind kind);

/// u ← u − β (∂φ(x_next,u)/∂u)ᵀ W, n_actor_iter times, x_next fixed.
Vector adpq_update(const Regressor& reg, const Vector& u, const Vector& x_next, const Vector& w,
                   double beta, int n_actor_iter);

/// Σ_{i=1..N} Wᵀφ(x̂_i, u_{i−1}) along the model rollout from x_k.
double stacked_objective(const Regressor& reg, const Vector& w, const ModelEstimate& est,
                         const Vector& x_k, const ControlStack& stack);

Vector stacked_gradient(const Regressor& reg, const Vector& w, const ModelEstimate& est,
                        const Vector& x_k, const ControlStack& stack, GradientMode mode);

/// n_actor_iter steps of ū ← ū − β ∇; the caller applies only the first slot.
ControlStack sadpq_update(const Regressor& reg, const ControlStack& stack, const Vector& w,
                          const ModelEstimate& est, const Vector& x_k, GradientMode mode);

/// Σ_{i=1..N} r(x̂_i, u_{i−1}) along the model rollout; no terminal cost.
double mpc_objective(const RunningCost& cost, const ModelEstimate& est, const Vector& x_k,
                     const ControlStack& stack);

/// Full gradient of mpc_objective.
Vector mpc_gradient(const RunningCost& cost, const ModelEstimate& est, const Vector& x_k,
                    const ControlStack& stack);

ControlStack mpc_update(const ControlStack& stack, const RunningCost& cost,
                        const ModelEstimate& est, const Vector& x_k);

/// u ← u − β (B̂ᵀ x_next + u), one step.
Vector gd_update(const Vector& u, const Vector& x_next, const Matrix& b_est, double beta);

}  // namespace sadp
