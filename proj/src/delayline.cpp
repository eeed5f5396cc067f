#include "kirchdelay/delayline.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "kirchdelay/errors.hpp"

namespace kirchdelay {

HistoryBuffer::HistoryBuffer(double tau, Interpolation interpolation, bool evict)
    : tau_(tau), interpolation_(interpolation), evict_(evict) {
  if (!(tau > 0.0)) throw DomainError("HistoryBuffer: tau must be > 0");
}

HistoryBuffer HistoryBuffer::initialize(std::span<const double> times,
                                        const std::vector<Eigen::VectorXd>& samples,
                                        const Eigen::VectorXd& u1, double tau,
                                        Interpolation interpolation, double tolerance) {
  if (times.size() != samples.size() || times.size() < 2) {
    throw UsageError("HistoryBuffer::initialize: need at least two history samples");
  }
  const double slack = 1e-12 * tau;
  if (times.front() > -tau + slack || std::abs(times.back()) > slack) {
    throw UsageError("HistoryBuffer::initialize: samples must cover [-tau, 0]");
  }
  const double scale = std::max(1.0, u1.norm());
  const double mismatch = (samples.back() - u1).norm() / scale;
  if (mismatch > tolerance) {
    throw ConfigError("history incompatible with initial velocity: |f0(0) - u1| = " +
                      std::to_string(mismatch));
  }
  HistoryBuffer buffer(tau, interpolation);
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw UsageError("HistoryBuffer::initialize: times must be strictly increasing");
    }
    buffer.records_.push_back({times[k], samples[k]});
  }
  buffer.records_.back().t = 0.0;
  buffer.records_.back().v = u1;
  return buffer;
}

void HistoryBuffer::push(double t, const Eigen::VectorXd& v) {
  if (!records_.empty()) {
    if (!(t > records_.back().t)) {
      throw UsageError("HistoryBuffer::push: time " + std::to_string(t) +
                       " not after newest record " + std::to_string(records_.back().t));
    }
    if (v.size() != records_.back().v.size()) {
      throw UsageError("HistoryBuffer::push: dimension mismatch");
    }
  }
  const double step = records_.empty() ? 0.0 : t - records_.back().t;
  records_.push_back({t, v});
  if (!evict_) return;
  const double keep_from = t - tau_ - 2.0 * step;
  // keep the newest record at or before keep_from so that interval stays covered
  while (records_.size() > 2 && records_[1].t <= keep_from) records_.pop_front();
}

double HistoryBuffer::newest_time() const {
  if (records_.empty()) throw UsageError("HistoryBuffer: empty");
  return records_.back().t;
}

double HistoryBuffer::oldest_time() const {
  if (records_.empty()) throw UsageError("HistoryBuffer: empty");
  return records_.front().t;
}

Eigen::Index HistoryBuffer::dimension() const {
  return records_.empty() ? 0 : records_.front().v.size();
}

std::size_t HistoryBuffer::locate(double s) const {
  auto it = std::upper_bound(records_.begin(), records_.end(), s,
                             [](double value, const Record& r) { return value < r.t; });
  const auto k = static_cast<std::size_t>(it - records_.begin());
  return k == 0 ? 0 : std::min(k - 1, records_.size() - 2);
}

bool HistoryBuffer::snap(double s, std::size_t& index) const {
  const std::size_t k = locate(s);
  const double spacing = records_[k + 1].t - records_[k].t;
  const double tol = 1e-9 * spacing;
  if (std::abs(s - records_[k].t) <= tol) {
    index = k;
    return true;
  }
  if (std::abs(s - records_[k + 1].t) <= tol) {
    index = k + 1;
    return true;
  }
  return false;
}

Eigen::VectorXd HistoryBuffer::sample_at(double s) const {
  Eigen::VectorXd out;
  sample_at(s, out);
  return out;
}

void HistoryBuffer::sample_at(double s, Eigen::VectorXd& out) const {
  if (records_.empty()) throw CoverageError(s, 0.0, 0.0);
  if (records_.size() == 1) {
    if (s == records_.front().t) {
      out = records_.front().v;
      return;
    }
    throw CoverageError(s, records_.front().t, records_.front().t);
  }
  const double from = records_.front().t;
  const double to = records_.back().t;
  const double edge = 1e-9 * (records_[1].t - records_[0].t);
  const double edge_hi = 1e-9 * (to - records_[records_.size() - 2].t);
  if (s < from - edge || s > to + edge_hi) throw CoverageError(s, from, to);

  std::size_t exact;
  if (snap(s, exact)) {
    out = records_[exact].v;
    return;
  }
  const std::size_t k = locate(s);
  const Record& r0 = records_[k];
  const Record& r1 = records_[k + 1];
  if (interpolation_ == Interpolation::linear || records_.size() < 4) {
    const double theta = (s - r0.t) / (r1.t - r0.t);
    out = r0.v + theta * (r1.v - r0.v);
    return;
  }
  // 4-point Lagrange on k-1 .. k+2, shifted inward at the ends
  std::size_t first = k == 0 ? 0 : k - 1;
  if (first + 3 >= records_.size()) first = records_.size() - 4;
  double nodes[4];
  for (int j = 0; j < 4; ++j) nodes[j] = records_[first + static_cast<std::size_t>(j)].t;
  out.setZero(r0.v.size());
  for (int j = 0; j < 4; ++j) {
    double basis = 1.0;
    for (int m = 0; m < 4; ++m) {
      if (m != j) basis *= (s - nodes[m]) / (nodes[j] - nodes[m]);
    }
    out.noalias() += basis * records_[first + static_cast<std::size_t>(j)].v;
  }
}

Eigen::VectorXd HistoryBuffer::sample_delayed(double t, double rho) const {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("sample_delayed: rho outside [0, 1]");
  return sample_at(rho == 0.0 ? t : t - tau_ * rho);
}

void HistoryBuffer::dump(std::ostream& os) const {
  const auto old_precision = os.precision(17);
  os << "# tau = " << tau_ << '\n'
     << "# interpolation = " << (interpolation_ == Interpolation::linear ? "linear" : "cubic")
     << '\n'
     << "# records = " << records_.size() << '\n'
     << 't';
  for (Eigen::Index i = 0; i < dimension(); ++i) os << "\tv" << (i + 1);
  os << '\n';
  for (const auto& r : records_) {
    os << r.t;
    for (Eigen::Index i = 0; i < r.v.size(); ++i) os << '\t' << r.v[i];
    os << '\n';
  }
  os.precision(old_precision);
}

double transport_residual(const HistoryBuffer& buffer, double t, std::span<const double> rho_grid,
                          double eps_t, double eps_rho) {
  if (!(eps_t > 0.0) || !(eps_rho > 0.0)) {
    throw UsageError("transport_residual: finite-difference steps must be > 0");
  }
  const double tau = buffer.tau();
  auto z = [&](double rho, double time) { return buffer.sample_at(time - tau * rho); };
  double worst = 0.0;
  for (double rho : rho_grid) {
    const Eigen::VectorXd dzdt = (z(rho, t + eps_t) - z(rho, t - eps_t)) / (2.0 * eps_t);
    const Eigen::VectorXd dzdr = (z(rho + eps_rho, t) - z(rho - eps_rho, t)) / (2.0 * eps_rho);
    worst = std::max(worst, (tau * dzdt + dzdr).norm());
  }
  return worst;
}

}  // namespace kirchdelay
