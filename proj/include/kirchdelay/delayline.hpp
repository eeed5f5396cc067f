#pragma once

// The delayed velocity z(x, rho, t) = u'(x, t - tau rho) represented by its
// characteristic solution: a timestamped buffer of modal velocity vectors.

#include <Eigen/Dense>

#include <deque>
#include <iosfwd>
#include <span>
#include <vector>

namespace kirchdelay {

enum class Interpolation { linear = 1, cubic = 3 };

class HistoryBuffer {
 public:
  struct Record {
    double t;
    Eigen::VectorXd v;
  };

  /// Empty buffer. With evict = false nothing is ever dropped (reference use).
  HistoryBuffer(double tau, Interpolation interpolation = Interpolation::linear,
                bool evict = true);

  /// Buffer over [-tau, 0] from modal samples of f0. The sample at s = 0 must
  /// match u1 to `tolerance` (relative); it is then replaced by u1 exactly.
  static HistoryBuffer initialize(std::span<const double> times,
                                  const std::vector<Eigen::VectorXd>& samples,
                                  const Eigen::VectorXd& u1, double tau,
                                  Interpolation interpolation = Interpolation::linear,
                                  double tolerance = 1e-8);

  /// Append the velocity at time t (> newest). Evicts records older than
  /// t - tau - 2 * (t - previous newest).
  void push(double t, const Eigen::VectorXd& v);

  /// Interpolated velocity at t - tau * rho, rho in [0, 1].
  Eigen::VectorXd sample_delayed(double t, double rho) const;
  /// Interpolated velocity at absolute time s.
  Eigen::VectorXd sample_at(double s) const;
  /// Into a preallocated vector; no allocation on the hot path.
  void sample_at(double s, Eigen::VectorXd& out) const;

  double tau() const noexcept { return tau_; }
  Interpolation interpolation() const noexcept { return interpolation_; }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t size() const noexcept { return records_.size(); }
  double newest_time() const;
  double oldest_time() const;
  Eigen::Index dimension() const;
  const std::deque<Record>& records() const noexcept { return records_; }

  /// Tab-separated dump: t, v_1 ... v_n.
  void dump(std::ostream& os) const;

 private:
  std::size_t locate(double s) const;  // index k with t_k <= s < t_{k+1}
  bool snap(double s, std::size_t& index) const;

  double tau_;
  Interpolation interpolation_;
  bool evict_;
  std::deque<Record> records_;
};

/// max over the rho grid of || tau dz/dt + dz/drho || with central differences of
/// half-widths eps_t (time) and eps_rho. The characteristic solution makes the
/// exact residual vanish; what remains measures interpolation error.
double transport_residual(const HistoryBuffer& buffer, double t, std::span<const double> rho_grid,
                          double eps_t, double eps_rho);

}  // namespace kirchdelay
