#include "sadp/policy.hpp"

#include <functional>
#include <stdexcept>
#include <string>

#include "sadp/errors.hpp"

namespace sadp {

namespace {

void require_finite(const Vector& v, const char* who) {
  if (!v.allFinite()) throw DivergenceError(std::string(who) + ": control became non-finite");
}

// Gradient of Σ_i ℓ(x̂_i, u_{i−1}) over the rollout. stage(x, u, gx, gu) writes
// the partial derivatives of ℓ. In total mode the state partials are carried
// backwards through the adjoint λ_i = g_x(i) + Aᵀ λ_{i+1}, so that u_{i−1}
// collects Bᵀλ_i.
template <typename StageGrad>
Vector rollout_gradient(const ModelEstimate& est, const Vector& x_k, const ControlStack& stack,
                        GradientMode mode, StageGrad&& stage) {
  const Eigen::Index m = est.m();
  const Eigen::Index horizon = stack.horizon;
  if (stack.u.size() != horizon * m) throw std::invalid_argument("control stack size mismatch");
  const std::vector<Vector> states = rollout(est, x_k, stack.u);

  Vector grad = Vector::Zero(stack.u.size());
  Vector adjoint = Vector::Zero(est.n());
  Vector gx(est.n());
  Vector gu(m);
  for (Eigen::Index i = horizon; i >= 1; --i) {
    const auto slot = stack.u.segment((i - 1) * m, m);
    stage(states[static_cast<std::size_t>(i - 1)], Vector(slot), gx, gu);
    grad.segment((i - 1) * m, m) += gu;
    if (mode == GradientMode::total) {
      adjoint += gx;
      grad.segment((i - 1) * m, m) += est.B.transpose() * adjoint;
      adjoint = est.A.transpose() * adjoint;
    }
  }
  return grad;
}

ControlStack descend(ControlStack stack, const char* who,
                     const std::function<Vector(const ControlStack&)>& gradient) {
  for (int it = 0; it < stack.n_actor_iter; ++it) {
    const Vector grad = gradient(stack);
    stack.u = stack.u - stack.beta * grad;
    require_finite(stack.u, who);
  }
  return stack;
}

}  // namespace

ControlStack ControlStack::filled(Eigen::Index m, Eigen::Index horizon, double value, double beta,
                                  int n_actor_iter) {
  if (m < 1 || horizon < 1) throw std::invalid_argument("ControlStack: m and N must be >= 1");
  if (n_actor_iter < 1) throw std::invalid_argument("ControlStack: n_actor_iter must be >= 1");
  return ControlStack{Vector::Constant(m * horizon, value), horizon, beta, n_actor_iter};
}

void ControlStack::shift() {
  const Eigen::Index width = m();
  const Eigen::Index tail = u.size() - width;
  if (tail > 0) {
    const Vector moved = u.tail(tail);
    u.head(tail) = moved;
  }
}

GradientMode parse_gradient_mode(std::string_view name) {
  if (name == "direct") return GradientMode::direct;
  if (name == "total") return GradientMode::total;
  throw std::invalid_argument("unknown gradient mode '" + std::string(name) + "'");
}

std::string_view to_string(GradientMode mode) {
  return mode == GradientMode::direct ? "direct" : "total";
}

ControllerKind parse_controller(std::string_view name) {
  if (name == "gd") return ControllerKind::gd;
  if (name == "adpq") return ControllerKind::adpq;
  if (name == "sadpq") return ControllerKind::sadpq;
  if (name == "mpc") return ControllerKind::mpc;
  throw std::invalid_argument("unknown controller '" + std::string(name) + "'");
}

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::gd: return "gd";
    case ControllerKind::adpq: return "adpq";
    case ControllerKind::sadpq: return "sadpq";
    case ControllerKind::mpc: return "mpc";
  }
  return "?";
}

bool uses_critic(ControllerKind kind) {
  return kind == ControllerKind::adpq || kind == ControllerKind::sadpq;
}

bool uses_stack(ControllerKind kind) {
  return kind == ControllerKind::sadpq || kind == ControllerKind::mpc;
}

Vector adpq_update(const Regressor& reg, const Vector& u, const Vector& x_next, const Vector& w,
                   double beta, int n_actor_iter) {
  if (w.size() != reg.p) throw std::invalid_argument("adpq_update: weight size mismatch");
  Vector next = u;
  for (int it = 0; it < n_actor_iter; ++it) {
    const Vector grad = dphi_du(reg, x_next, next).transpose() * w;
    next = next - beta * grad;
    require_finite(next, "adpq_update");
  }
  return next;
}

double stacked_objective(const Regressor& reg, const Vector& w, const ModelEstimate& est,
                         const Vector& x_k, const ControlStack& stack) {
  const std::vector<Vector> states = rollout(est, x_k, stack.u);
  const Eigen::Index m = est.m();
  double total = 0.0;
  for (Eigen::Index i = 0; i < stack.horizon; ++i) {
    total += q_value(reg, w, states[static_cast<std::size_t>(i)], stack.u.segment(i * m, m));
  }
  return total;
}

Vector stacked_gradient(const Regressor& reg, const Vector& w, const ModelEstimate& est,
                        const Vector& x_k, const ControlStack& stack, GradientMode mode) {
  if (w.size() != reg.p) throw std::invalid_argument("stacked_gradient: weight size mismatch");
  return rollout_gradient(est, x_k, stack, mode,
                          [&](const Vector& x, const Vector& u, Vector& gx, Vector& gu) {
                            gu = dphi_du(reg, x, u).transpose() * w;
                            if (mode == GradientMode::total) gx = dphi_dx(reg, x, u).transpose() * w;
                          });
}

ControlStack sadpq_update(const Regressor& reg, const ControlStack& stack, const Vector& w,
                          const ModelEstimate& est, const Vector& x_k, GradientMode mode) {
  return descend(stack, "sadpq_update", [&](const ControlStack& s) {
    return stacked_gradient(reg, w, est, x_k, s, mode);
  });
}

double mpc_objective(const RunningCost& cost, const ModelEstimate& est, const Vector& x_k,
                     const ControlStack& stack) {
  const std::vector<Vector> states = rollout(est, x_k, stack.u);
  const Eigen::Index m = est.m();
  double total = 0.0;
  for (Eigen::Index i = 0; i < stack.horizon; ++i) {
    total += cost(states[static_cast<std::size_t>(i)], stack.u.segment(i * m, m));
  }
  return total;
}

Vector mpc_gradient(const RunningCost& cost, const ModelEstimate& est, const Vector& x_k,
                    const ControlStack& stack) {
  return rollout_gradient(est, x_k, stack, GradientMode::total,
                          [&](const Vector& x, const Vector& u, Vector& gx, Vector& gu) {
                            gx = cost.grad_x(x);
                            gu = cost.grad_u(u);
                          });
}

ControlStack mpc_update(const ControlStack& stack, const RunningCost& cost,
                        const ModelEstimate& est, const Vector& x_k) {
  return descend(stack, "mpc_update",
                 [&](const ControlStack& s) { return mpc_gradient(cost, est, x_k, s); });
}

Vector gd_update(const Vector& u, const Vector& x_next, const Matrix& b_est, double beta) {
  if (b_est.rows() != x_next.size() || b_est.cols() != u.size()) {
    throw std::invalid_argument("gd_update: dimension mismatch");
  }
  return u - beta * (b_est.transpose() * x_next + u);
}

}  // namespace sadp
