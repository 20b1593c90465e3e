#include "percept/filters.hpp"

namespace percept {

void CvFilter::init(const Vec2& pos, const FilterParams& params) {
  x_ << pos.x(), pos.y(), 0.0, 0.0;
  p_.setZero();
  p_(0, 0) = p_(1, 1) = params.pos_meas_sigma * params.pos_meas_sigma;
  p_(2, 2) = p_(3, 3) = params.init_speed_sigma * params.init_speed_sigma;
}

void CvFilter::predict(double dt, const FilterParams& params) {
  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 2) = dt;
  f(1, 3) = dt;
  x_ = f * x_;
  const double q = params.accel_noise * params.accel_noise;
  Eigen::Matrix<double, 4, 2> g = Eigen::Matrix<double, 4, 2>::Zero();
  g(0, 0) = g(1, 1) = 0.5 * dt * dt;
  g(2, 0) = g(3, 1) = dt;
  p_ = f * p_ * f.transpose() + q * g * g.transpose();
  condition_covariance<4>(p_);
}

void CvFilter::update(const Vec2& pos_meas, const FilterParams& params) {
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = h(1, 1) = 1.0;
  const double r = params.pos_meas_sigma * params.pos_meas_sigma;
  const Eigen::Matrix2d s = h * p_ * h.transpose() + r * Eigen::Matrix2d::Identity();
  const Eigen::Matrix<double, 4, 2> k = p_ * h.transpose() * s.inverse();
  const Eigen::Vector2d innov(pos_meas.x() - x_(0), pos_meas.y() - x_(1));
  x_ += k * innov;
  const Eigen::Matrix4d ikh = Eigen::Matrix4d::Identity() - k * h;
  p_ = ikh * p_ * ikh.transpose() + k * (r * Eigen::Matrix2d::Identity()) * k.transpose();
  condition_covariance<4>(p_);
}

double CvFilter::gating_distance(const Vec2& pos_meas, const FilterParams& params) const {
  const double r = params.pos_meas_sigma * params.pos_meas_sigma;
  Eigen::Matrix2d s = p_.topLeftCorner<2, 2>() + r * Eigen::Matrix2d::Identity();
  const Eigen::Vector2d innov(pos_meas.x() - x_(0), pos_meas.y() - x_(1));
  return innov.dot(s.inverse() * innov);
}

void propagate(ModelState& m, MotionModel model, double dt, const FilterParams& params) {
  const double yaw = m.x(2);
  const double v = m.x(3);
  const double a = m.x(4);
  const double w = m.x(5);
  Eigen::Matrix<double, 6, 6> f = Eigen::Matrix<double, 6, 6>::Identity();
  Eigen::Matrix<double, 6, 1> x = m.x;

  if (model == MotionModel::kConstantAccel) {
    const double c = std::cos(yaw), s = std::sin(yaw);
    const double dist = v * dt + 0.5 * a * dt * dt;
    x(0) += dist * c;
    x(1) += dist * s;
    x(3) += a * dt;
    x(5) = 0.0;  // the straight-line model carries no turn rate
    f(0, 2) = -dist * s;
    f(0, 3) = dt * c;
    f(0, 4) = 0.5 * dt * dt * c;
    f(1, 2) = dist * c;
    f(1, 3) = dt * s;
    f(1, 4) = 0.5 * dt * dt * s;
    f(3, 4) = dt;
    f(5, 5) = 0.0;
  } else {
    const double yaw1 = yaw + w * dt;
    if (std::abs(w) < 1e-4) {
      // analytic zero-rate limit: straight motion at constant speed
      const double c = std::cos(yaw), s = std::sin(yaw);
      x(0) += v * dt * c;
      x(1) += v * dt * s;
      x(2) = yaw1;
      x(4) = 0.0;
      f(0, 2) = -v * dt * s;
      f(0, 3) = dt * c;
      f(0, 5) = -0.5 * v * dt * dt * s;
      f(1, 2) = v * dt * c;
      f(1, 3) = dt * s;
      f(1, 5) = 0.5 * v * dt * dt * c;
      f(2, 5) = dt;
      f(4, 4) = 0.0;
    } else {
      const double s0 = std::sin(yaw), c0 = std::cos(yaw);
      const double s1 = std::sin(yaw1), c1 = std::cos(yaw1);
      x(0) += (v / w) * (s1 - s0);
      x(1) += (v / w) * (c0 - c1);
      x(2) = yaw1;
      x(4) = 0.0;
      f(0, 2) = (v / w) * (c1 - c0);
      f(0, 3) = (s1 - s0) / w;
      f(0, 5) = (v * dt / w) * c1 - (v / (w * w)) * (s1 - s0);
      f(1, 2) = (v / w) * (s1 - s0);
      f(1, 3) = (c0 - c1) / w;
      f(1, 5) = (v * dt / w) * s1 - (v / (w * w)) * (c0 - c1);
      f(2, 5) = dt;
      f(4, 4) = 0.0;
    }
  }

  Eigen::Matrix<double, 6, 6> q = Eigen::Matrix<double, 6, 6>::Zero();
  if (model == MotionModel::kConstantAccel) {
    const double qa = params.accel_noise * params.accel_noise;
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    g(0) = 0.5 * dt * dt * std::cos(yaw);
    g(1) = 0.5 * dt * dt * std::sin(yaw);
    g(3) = dt;
    g(4) = 1.0;
    q = qa * g * g.transpose();
    q(2, 2) = 1e-4 * dt * dt;  // small heading drift
    q(5, 5) = 1e-6;
  } else {
    const double qw = params.yaw_accel_noise * params.yaw_accel_noise;
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    g(2) = 0.5 * dt * dt;
    g(5) = dt;
    q = qw * g * g.transpose();
    const double qa = 0.25 * params.accel_noise * params.accel_noise;
    q(3, 3) += qa * dt * dt;
    q(0, 0) += 1e-4 * dt * dt;
    q(1, 1) += 1e-4 * dt * dt;
    q(4, 4) = 1e-6;
  }

  m.x = x;
  m.x(2) = wrap_rad_pi(m.x(2));
  m.p = f * m.p * f.transpose() + q;
  condition_covariance<6>(m.p);
}

void ImmFilter::init(const Vec2& pos, double yaw, double speed, const FilterParams& params) {
  for (ModelState& m : models_) {
    m.x.setZero();
    m.x(0) = pos.x();
    m.x(1) = pos.y();
    m.x(2) = wrap_rad_pi(yaw);
    m.x(3) = speed;
    m.p.setZero();
    m.p(0, 0) = m.p(1, 1) = params.pos_meas_sigma * params.pos_meas_sigma;
    m.p(2, 2) = params.yaw_meas_sigma * params.yaw_meas_sigma * 4.0;
    m.p(3, 3) = params.init_speed_sigma * params.init_speed_sigma;
    m.p(4, 4) = 4.0;
    m.p(5, 5) = 0.25;
  }
  mu_ << 0.5, 0.5;
}

void ImmFilter::mix(const FilterParams& params) {
  const double stay = params.imm_stay_prob;
  Eigen::Matrix2d pi;
  pi << stay, 1.0 - stay, 1.0 - stay, stay;

  Eigen::Vector2d cbar = pi.transpose() * mu_;
  cbar = cbar.cwiseMax(1e-12);
  Eigen::Matrix2d w;  // w(i, j): weight of model i in mixed input of model j
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) w(i, j) = pi(i, j) * mu_(i) / cbar(j);

  ModelState mixed[2];
  for (int j = 0; j < 2; ++j) {
    Eigen::Matrix<double, 6, 1> x = Eigen::Matrix<double, 6, 1>::Zero();
    // average yaw on the circle
    double sy = 0.0, cy = 0.0;
    for (int i = 0; i < 2; ++i) {
      x += w(i, j) * models_[i].x;
      sy += w(i, j) * std::sin(models_[i].x(2));
      cy += w(i, j) * std::cos(models_[i].x(2));
    }
    x(2) = std::atan2(sy, cy);
    Eigen::Matrix<double, 6, 6> p = Eigen::Matrix<double, 6, 6>::Zero();
    for (int i = 0; i < 2; ++i) {
      Eigen::Matrix<double, 6, 1> d = models_[i].x - x;
      d(2) = wrap_rad_pi(d(2));
      p += w(i, j) * (models_[i].p + d * d.transpose());
    }
    mixed[j].x = x;
    mixed[j].p = p;
  }
  models_[0] = mixed[0];
  models_[1] = mixed[1];
}

void ImmFilter::predict(double dt, const FilterParams& params) {
  mix(params);
  propagate(models_[0], MotionModel::kConstantAccel, dt, params);
  propagate(models_[1], MotionModel::kConstantTurn, dt, params);
}

void ImmFilter::update(const Vec2& pos_meas, double yaw_meas, const FilterParams& params) {
  Eigen::Matrix<double, 3, 6> h = Eigen::Matrix<double, 3, 6>::Zero();
  h(0, 0) = h(1, 1) = h(2, 2) = 1.0;
  Eigen::Matrix3d r = Eigen::Matrix3d::Zero();
  r(0, 0) = r(1, 1) = params.pos_meas_sigma * params.pos_meas_sigma;
  r(2, 2) = params.yaw_meas_sigma * params.yaw_meas_sigma;

  Eigen::Vector2d likelihood;
  for (int i = 0; i < 2; ++i) {
    ModelState& m = models_[i];
    Eigen::Matrix3d s = h * m.p * h.transpose() + r;
    const Eigen::Matrix3d s_inv = s.inverse();
    Eigen::Vector3d innov(pos_meas.x() - m.x(0), pos_meas.y() - m.x(1),
                          wrap_rad_pi(yaw_meas - m.x(2)));
    const Eigen::Matrix<double, 6, 3> k = m.p * h.transpose() * s_inv;
    m.x += k * innov;
    m.x(2) = wrap_rad_pi(m.x(2));
    const Eigen::Matrix<double, 6, 6> ikh = Eigen::Matrix<double, 6, 6>::Identity() - k * h;
    m.p = ikh * m.p * ikh.transpose() + k * r * k.transpose();
    condition_covariance<6>(m.p);

    const double md2 = innov.dot(s_inv * innov);
    const double det = std::max(s.determinant(), 1e-30);
    likelihood(i) = std::exp(-0.5 * md2) / std::sqrt(std::pow(2.0 * kPi, 3) * det);
    likelihood(i) = std::max(likelihood(i), 1e-30);
  }

  const double stay = params.imm_stay_prob;
  Eigen::Matrix2d pi;
  pi << stay, 1.0 - stay, 1.0 - stay, stay;
  Eigen::Vector2d cbar = pi.transpose() * mu_;
  mu_ = likelihood.cwiseProduct(cbar);
  const double norm = mu_.sum();
  if (norm > 0.0) mu_ /= norm;
  else mu_ << 0.5, 0.5;
}

double ImmFilter::gating_distance(const Vec2& pos_meas, double yaw_meas,
                                  const FilterParams& params) const {
  const auto x = combined_state();
  const auto p = combined_covariance();
  Eigen::Matrix3d s = p.topLeftCorner<3, 3>();
  s(0, 0) += params.pos_meas_sigma * params.pos_meas_sigma;
  s(1, 1) += params.pos_meas_sigma * params.pos_meas_sigma;
  s(2, 2) += params.yaw_meas_sigma * params.yaw_meas_sigma;
  Eigen::Vector3d innov(pos_meas.x() - x(0), pos_meas.y() - x(1), wrap_rad_pi(yaw_meas - x(2)));
  return innov.dot(s.inverse() * innov);
}

Eigen::Matrix<double, 6, 1> ImmFilter::combined_state() const {
  Eigen::Matrix<double, 6, 1> x = mu_(0) * models_[0].x + mu_(1) * models_[1].x;
  const double sy = mu_(0) * std::sin(models_[0].x(2)) + mu_(1) * std::sin(models_[1].x(2));
  const double cy = mu_(0) * std::cos(models_[0].x(2)) + mu_(1) * std::cos(models_[1].x(2));
  x(2) = std::atan2(sy, cy);
  return x;
}

Eigen::Matrix<double, 6, 6> ImmFilter::combined_covariance() const {
  const auto x = combined_state();
  Eigen::Matrix<double, 6, 6> p = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 2; ++i) {
    Eigen::Matrix<double, 6, 1> d = models_[i].x - x;
    d(2) = wrap_rad_pi(d(2));
    p += mu_(i) * (models_[i].p + d * d.transpose());
  }
  return p;
}

void ImmFilter::shift_position(const Vec2& delta) {
  for (ModelState& m : models_) {
    m.x(0) += delta.x();
    m.x(1) += delta.y();
  }
}

bool ImmFilter::finite() const {
  return models_[0].x.allFinite() && models_[0].p.allFinite() && models_[1].x.allFinite() &&
         models_[1].p.allFinite() && mu_.allFinite();
}

}  // namespace percept
