#pragma once

// Running convolution state of the memory term. For a kernel k in {h, h'} and a
// modal displacement history a(s) on the uniform grid s_j = j dt:
//
//   K(t)  = int_0^t k(s) ds
//   y(t)  = int_0^t k(t - s) a(s) ds
//   yq(t) = int_0^t k(t - s) a(s)^T C a(s) ds      (C = metric of the operator)
//
// all by the trapezoid rule on the grid. Exponential kernels advance these
// recursively; tabulated kernels sum over a retained sliding window.

#include <Eigen/Dense>

#include <deque>

#include "kirchdelay/model.hpp"

namespace kirchdelay {

/// Which operator the memory acts on: Delta^2 u (metric diag(lambda)) or Delta u
/// (metric = gradient matrix).
enum class MemoryOperator { bilaplacian, laplacian };

struct MemoryValues {
  double H = 0.0;   // int_0^t h
  double Hd = 0.0;  // int_0^t h'
  Eigen::VectorXd y1;
  Eigen::VectorXd y1d;
  double yq = 0.0;
  double yqd = 0.0;
};

class MemoryState {
 public:
  /// window: length of retained displacement history. Must reach the kernel's
  /// effective support (or the whole run) for tabulated kernels.
  MemoryState(KernelSpec kernel, Eigen::MatrixXd metric, const Eigen::VectorXd& a0, double dt,
              double window);

  double time() const noexcept { return static_cast<double>(steps_) * dt_; }
  double dt() const noexcept { return dt_; }
  double window() const noexcept { return window_; }
  bool recursive() const noexcept { return recursive_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  const Eigen::MatrixXd& metric() const noexcept { return metric_; }
  const MemoryValues& values() const noexcept { return values_; }
  const Eigen::VectorXd& current() const { return history_.back(); }
  std::size_t retained() const noexcept { return history_.size(); }
  /// Time of the oldest retained displacement.
  double retained_from() const noexcept {
    return static_cast<double>(steps_ + 1 - history_.size()) * dt_;
  }

  /// Append a(t + dt) and advance every accumulator by one step.
  void advance(const Eigen::VectorXd& a_next);

  /// y1 at t + c given the displacement a_stage there, 0 <= c <= dt: the
  /// accumulated value plus a trapezoid over [t, t + c].
  void stage_y1(double c, const Eigen::VectorXd& a_stage, Eigen::VectorXd& out) const;

  /// Trapezoid over the retained history only (the cross-check path).
  MemoryValues from_history() const;
  /// max relative difference between values() and from_history().
  double cross_check() const;

  /// (k box phi)(t) = int k(t - s) |phi(s) - phi(t)|^2_C ds with phi = a, by
  /// expansion of the square: yq - 2 a^T C y1 + K a^T C a, floored at 0.
  double box() const;
  double box_derivative() const;

 private:
  MemoryValues window_sum(double shift, const Eigen::VectorXd* a_stage) const;

  KernelSpec kernel_;
  Eigen::MatrixXd metric_;
  double dt_;
  double window_;
  bool recursive_;
  long steps_ = 0;
  std::deque<Eigen::VectorXd> history_;
  std::deque<double> quad_;  // a^T C a alongside history_
  MemoryValues values_;
  // exponential recursion constants
  double decay_ = 0.0;
  double h_dt_ = 0.0, h_0_ = 0.0, hd_dt_ = 0.0, hd_0_ = 0.0;
};

}  // namespace kirchdelay
