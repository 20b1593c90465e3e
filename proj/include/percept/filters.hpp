#pragma once

#include "percept/geometry.hpp"

#include <Eigen/Dense>

namespace percept {

struct FilterParams {
  double accel_noise{1.0};        // m/s^2, CV and CA process noise
  double yaw_accel_noise{1.5};    // rad/s^2, CTRV process noise
  double imm_stay_prob{0.95};
  double pos_meas_sigma{0.15};    // m
  double yaw_meas_sigma{deg_to_rad(5.0)};
  double init_speed_sigma{6.0};   // m/s, velocity prior of a new track
};

/// Symmetrize, and repair the eigenvalues only when a Cholesky probe says
/// the matrix stopped being positive definite.
template <int N>
void condition_covariance(Eigen::Matrix<double, N, N>& p, double floor = 1e-9) {
  p = (0.5 * (p + p.transpose())).eval();
  const Eigen::LLT<Eigen::Matrix<double, N, N>> llt(p);
  if (llt.info() == Eigen::Success && p.diagonal().minCoeff() > floor) return;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es(p);
  Eigen::Matrix<double, N, 1> vals = es.eigenvalues().cwiseMax(floor);
  p = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

/// Linear constant-velocity filter for unclassified targets. State (x, y,
/// vx, vy), position-only measurements.
class CvFilter {
 public:
  using State = Eigen::Vector4d;
  using Cov = Eigen::Matrix4d;

  void init(const Vec2& pos, const FilterParams& params);
  void predict(double dt, const FilterParams& params);
  void update(const Vec2& pos_meas, const FilterParams& params);
  /// Squared Mahalanobis distance of a position measurement.
  double gating_distance(const Vec2& pos_meas, const FilterParams& params) const;

  const State& state() const { return x_; }
  const Cov& covariance() const { return p_; }
  Vec2 position() const { return {x_(0), x_(1)}; }
  Vec2 velocity() const { return {x_(2), x_(3)}; }
  void set_position(const Vec2& p) {
    x_(0) = p.x();
    x_(1) = p.y();
  }
  bool finite() const { return x_.allFinite() && p_.allFinite(); }

 private:
  State x_{State::Zero()};
  Cov p_{Cov::Identity()};
};

/// Unified 6D state shared by the CA and CTRV models:
/// (x, y, yaw, speed, accel, yaw_rate).
struct ModelState {
  Eigen::Matrix<double, 6, 1> x{Eigen::Matrix<double, 6, 1>::Zero()};
  Eigen::Matrix<double, 6, 6> p{Eigen::Matrix<double, 6, 6>::Identity()};
};

enum class MotionModel { kConstantAccel, kConstantTurn };

/// Closed-form propagation of one model; the turn model switches to its
/// analytic zero-rate limit below 1e-4 rad/s.
void propagate(ModelState& m, MotionModel model, double dt, const FilterParams& params);

/// Two-model interacting filter (CA + CTRV) with a shared (x, y, yaw)
/// measurement.
class ImmFilter {
 public:
  void init(const Vec2& pos, double yaw, double speed, const FilterParams& params);

  void predict(double dt, const FilterParams& params);
  void update(const Vec2& pos_meas, double yaw_meas, const FilterParams& params);
  double gating_distance(const Vec2& pos_meas, double yaw_meas, const FilterParams& params) const;

  Eigen::Matrix<double, 6, 1> combined_state() const;
  Eigen::Matrix<double, 6, 6> combined_covariance() const;
  Vec2 position() const {
    const auto x = combined_state();
    return {x(0), x(1)};
  }
  Vec2 velocity() const {
    const auto x = combined_state();
    return x(3) * Vec2(std::cos(x(2)), std::sin(x(2)));
  }
  double yaw() const { return combined_state()(2); }
  double speed() const { return combined_state()(3); }
  double turn_rate() const { return combined_state()(5); }
  const Eigen::Vector2d& model_probabilities() const { return mu_; }
  void shift_position(const Vec2& delta);
  bool finite() const;

 private:
  void mix(const FilterParams& params);

  ModelState models_[2];  // [0] CA, [1] CTRV
  Eigen::Vector2d mu_{0.5, 0.5};
};

}  // namespace percept
