#include "sadp/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sadp {

namespace {

void require_square_spd(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + " must be a non-empty square matrix");
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.norm())) {
    throw std::invalid_argument(std::string(what) + " must be symmetric");
  }
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(std::string(what) + " must be positive definite");
  }
}

}  // namespace

PlantModel lewis2d() {
  PlantModel plant;
  plant.n = 2;
  plant.m = 1;
  plant.name = "lewis2d";
  plant.step = [](const Vector& x, const Vector& u) {
    Vector next(2);
    next(0) = -std::sin(0.5 * x(1));
    next(1) = -std::cos(1.4 * x(1)) * std::sin(0.9 * x(0)) + u(0);
    return next;
  };
  return plant;
}

PlantModel make_plant(std::string_view preset) {
  if (preset == "lewis2d") return lewis2d();
  throw std::invalid_argument("unknown plant preset '" + std::string(preset) + "'");
}

Vector step_true(const PlantModel& plant, const Vector& x, const Vector& u) {
  if (x.size() != plant.n || u.size() != plant.m) {
    throw std::invalid_argument("step_true: dimension mismatch");
  }
  Vector next = plant.step(x, u);
  if (next.size() != plant.n) {
    throw std::logic_error("step_true: plant returned a state of the wrong size");
  }
  return next;
}

RunningCost::RunningCost(Matrix state_weight, Matrix control_weight)
    : q_(std::move(state_weight)), r_(std::move(control_weight)) {
  require_square_spd(q_, "state cost weight");
  require_square_spd(r_, "control cost weight");
}

double RunningCost::operator()(const Vector& x, const Vector& u) const {
  if (x.size() != n() || u.size() != m()) {
    throw std::invalid_argument("running_cost: dimension mismatch");
  }
  return 0.5 * x.dot(q_ * x) + 0.5 * u.dot(r_ * u);
}

Vector RunningCost::grad_x(const Vector& x) const { return q_ * x; }
Vector RunningCost::grad_u(const Vector& u) const { return r_ * u; }

double running_cost(const RunningCost& cost, const Vector& x, const Vector& u) {
  return cost(x, u);
}

MeasurementChannel::MeasurementChannel(double sigma, std::uint64_t seed)
    : sigma_(sigma), seed_(seed), engine_(seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("measurement sigma must be >= 0");
}

double MeasurementChannel::standard_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * kScale;
  const double u2 = static_cast<double>(engine_() >> 11) * kScale;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

Vector MeasurementChannel::measure(const Vector& x) {
  Vector y = x;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sigma_ * standard_normal();
  return y;
}

Vector measure(MeasurementChannel& chan, const Vector& x) { return chan.measure(x); }

}  // namespace sadp
