#include "kirchdelay/memory.hpp"

#include <algorithm>
#include <cmath>

#include "kirchdelay/errors.hpp"

namespace kirchdelay {

MemoryState::MemoryState(KernelSpec kernel, Eigen::MatrixXd metric, const Eigen::VectorXd& a0,
                         double dt, double window)
    : kernel_(std::move(kernel)), metric_(std::move(metric)), dt_(dt), window_(window) {
  if (!(dt > 0.0)) throw UsageError("MemoryState: dt must be > 0");
  if (!(window >= dt)) throw ConfigError("memory window shorter than one step");
  if (metric_.rows() != a0.size() || metric_.cols() != a0.size()) {
    throw UsageError("MemoryState: metric does not match the modal dimension");
  }
  recursive_ = kernel_.shape == KernelShape::exponential;
  const Eigen::Index n = a0.size();
  values_.y1 = Eigen::VectorXd::Zero(n);
  values_.y1d = Eigen::VectorXd::Zero(n);
  history_.push_back(a0);
  quad_.push_back(a0.dot(metric_ * a0));
  if (recursive_) {
    decay_ = std::exp(-kernel_.rate * dt);
    h_dt_ = kernel_.evaluate(dt);
    h_0_ = kernel_.evaluate(0.0);
    hd_dt_ = kernel_.derivative(dt);
    hd_0_ = kernel_.derivative(0.0);
  }
}

void MemoryState::advance(const Eigen::VectorXd& a_next) {
  if (a_next.size() != history_.back().size()) {
    throw UsageError("MemoryState::advance: dimension mismatch");
  }
  const double q_next = a_next.dot(metric_ * a_next);
  if (recursive_) {
    const Eigen::VectorXd& a_prev = history_.back();
    const double q_prev = quad_.back();
    const double half = 0.5 * dt_;
    MemoryValues& m = values_;
    m.H = decay_ * m.H + half * (h_dt_ + h_0_);
    m.Hd = decay_ * m.Hd + half * (hd_dt_ + hd_0_);
    m.y1 = decay_ * m.y1 + half * (h_dt_ * a_prev + h_0_ * a_next);
    m.y1d = decay_ * m.y1d + half * (hd_dt_ * a_prev + hd_0_ * a_next);
    m.yq = decay_ * m.yq + half * (h_dt_ * q_prev + h_0_ * q_next);
    m.yqd = decay_ * m.yqd + half * (hd_dt_ * q_prev + hd_0_ * q_next);
  }
  history_.push_back(a_next);
  quad_.push_back(q_next);
  ++steps_;
  // keep one point at or beyond the window edge
  while (history_.size() > 2 &&
         static_cast<double>(history_.size() - 2) * dt_ >= window_) {
    history_.pop_front();
    quad_.pop_front();
  }
  if (!recursive_) values_ = window_sum(0.0, nullptr);
}

MemoryValues MemoryState::window_sum(double shift, const Eigen::VectorXd* a_stage) const {
  const Eigen::Index n = history_.back().size();
  MemoryValues m;
  m.y1 = Eigen::VectorXd::Zero(n);
  m.y1d = Eigen::VectorXd::Zero(n);
  const std::size_t count = history_.size();
  if (count >= 2) {
    const double t_end = time();
    const double first = retained_from();
    for (std::size_t j = 0; j < count; ++j) {
      const double s = first + static_cast<double>(j) * dt_;
      const double lag = t_end + shift - s;
      const double weight = (j == 0 || j + 1 == count) ? 0.5 * dt_ : dt_;
      const double k = weight * kernel_.evaluate(lag);
      const double kd = weight * kernel_.derivative(lag);
      m.H += k;
      m.Hd += kd;
      m.y1.noalias() += k * history_[j];
      m.y1d.noalias() += kd * history_[j];
      m.yq += k * quad_[j];
      m.yqd += kd * quad_[j];
    }
  }
  if (a_stage != nullptr && shift > 0.0) {
    const double half = 0.5 * shift;
    const double hc = kernel_.evaluate(shift);
    const double h0 = kernel_.evaluate(0.0);
    const double hdc = kernel_.derivative(shift);
    const double hd0 = kernel_.derivative(0.0);
    const double q_stage = a_stage->dot(metric_ * *a_stage);
    m.H += half * (hc + h0);
    m.Hd += half * (hdc + hd0);
    m.y1.noalias() += half * (hc * history_.back() + h0 * *a_stage);
    m.y1d.noalias() += half * (hdc * history_.back() + hd0 * *a_stage);
    m.yq += half * (hc * quad_.back() + h0 * q_stage);
    m.yqd += half * (hdc * quad_.back() + hd0 * q_stage);
  }
  return m;
}

void MemoryState::stage_y1(double c, const Eigen::VectorXd& a_stage, Eigen::VectorXd& out) const {
  if (c == 0.0) {
    out = values_.y1;
    return;
  }
  if (recursive_) {
    const double half = 0.5 * c;
    out = std::exp(-kernel_.rate * c) * values_.y1 +
          half * (kernel_.evaluate(c) * history_.back() + h_0_ * a_stage);
    return;
  }
  out = window_sum(c, &a_stage).y1;
}

MemoryValues MemoryState::from_history() const { return window_sum(0.0, nullptr); }

double MemoryState::cross_check() const {
  const MemoryValues direct = from_history();
  auto rel = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); };
  double worst = std::max(rel(values_.H, direct.H), rel(values_.yq, direct.yq));
  worst = std::max(worst, rel(values_.Hd, direct.Hd));
  worst = std::max(worst, rel(values_.yqd, direct.yqd));
  const double scale = std::max(1.0, direct.y1.lpNorm<Eigen::Infinity>());
  worst = std::max(worst, (values_.y1 - direct.y1).lpNorm<Eigen::Infinity>() / scale);
  const double scale_d = std::max(1.0, direct.y1d.lpNorm<Eigen::Infinity>());
  worst = std::max(worst, (values_.y1d - direct.y1d).lpNorm<Eigen::Infinity>() / scale_d);
  return worst;
}

double MemoryState::box() const {
  const Eigen::VectorXd& a = history_.back();
  const Eigen::VectorXd ca = metric_ * a;
  return std::max(0.0, values_.yq - 2.0 * ca.dot(values_.y1) + values_.H * quad_.back());
}

double MemoryState::box_derivative() const {
  const Eigen::VectorXd& a = history_.back();
  const Eigen::VectorXd ca = metric_ * a;
  // h' <= 0, so this one is nonpositive
  return std::min(0.0, values_.yqd - 2.0 * ca.dot(values_.y1d) + values_.Hd * quad_.back());
}

}  // namespace kirchdelay
