#pragma once

// Clamped-clamped eigenbasis of d^4/dx^4 on (0, L): w'''' = lambda w with
// w = w' = 0 at both ends, lambda = beta^4 and cos(beta L) cosh(beta L) = 1.

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

#include "kirchdelay/model.hpp"
#include "kirchdelay/quadrature.hpp"

namespace kirchdelay {

/// One L2-normalized clamped mode, evaluated in the exponentially rebalanced
/// form so that large beta L never touches cosh/sinh directly.
class ClampedMode {
 public:
  ClampedMode(double beta, double length);

  double beta() const noexcept { return beta_; }
  double value(double x) const;
  double slope(double x) const;
  double curvature(double x) const;

 private:
  double beta_;
  double length_;
  double sigma_;  // (cosh bL - cos bL) / (sinh bL - sin bL)
  double tail_;   // coefficient of exp(-beta (L - x))
  double scale_;  // 1 / sqrt(L)
};

/// First n roots beta_i of cos(beta L) cosh(beta L) = 1, strictly increasing.
/// Each satisfies |cos(beta L) - 1/cosh(beta L)| / max(1, beta L) < tol.
std::vector<double> solve_characteristic_roots(int n, double length, double tol = 1e-14);

struct ModeSetOptions {
  int nodes_per_mode = 40;
  int panel_order = 8;
};

class ModeSet {
 public:
  ModeSet(int n_modes, double length, ModeSetOptions options = {});

  int size() const noexcept { return static_cast<int>(modes_.size()); }
  double length() const noexcept { return length_; }
  const ModeSetOptions& options() const noexcept { return options_; }

  const std::vector<double>& betas() const noexcept { return betas_; }
  const Eigen::VectorXd& lambdas() const noexcept { return lambdas_; }
  const ClampedMode& mode(int i) const { return modes_.at(static_cast<std::size_t>(i)); }

  const QuadratureRule& quadrature() const noexcept { return rule_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  /// Mode values, slopes and curvatures at the quadrature nodes (nodes x modes).
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const Eigen::MatrixXd& slopes() const noexcept { return slopes_; }
  const Eigen::MatrixXd& curvatures() const noexcept { return curvatures_; }

  /// G_ij = int w_i' w_j'.
  const Eigen::MatrixXd& grad_matrix() const noexcept { return grad_; }
  /// lambda_i, the diagonal of int w_i'' w_j''.
  const Eigen::VectorXd& stiffness_diag() const noexcept { return lambdas_; }
  /// max |int w_i w_j - delta_ij| over the quadrature.
  double mass_residual() const noexcept { return mass_residual_; }
  /// max |int w_i'' w_j'' - lambda_i delta_ij| / lambda_max.
  double stiffness_residual() const noexcept { return stiffness_residual_; }
  bool assembled() const noexcept { return assembled_; }

  /// Normalized w_i(x), i zero-based. Throws DomainError outside [0, L].
  double eval_mode(int i, double x) const;

  friend void assemble_matrices(ModeSet& modes);

 private:
  int n_;
  double length_;
  ModeSetOptions options_;
  std::vector<double> betas_;
  Eigen::VectorXd lambdas_;
  std::vector<ClampedMode> modes_;
  QuadratureRule rule_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd values_;
  Eigen::MatrixXd slopes_;
  Eigen::MatrixXd curvatures_;
  Eigen::MatrixXd grad_;
  double mass_residual_ = 0.0;
  double stiffness_residual_ = 0.0;
  bool assembled_ = false;
};

/// Fills G and the residual diagnostics. Throws AssemblyError if G is not
/// symmetric to 1e-12 or fails Cholesky factorization.
void assemble_matrices(ModeSet& modes);

/// Roots, quadrature and assembled matrices in one call.
ModeSet build_modes(int n_modes, double length, ModeSetOptions options = {});

/// c_i = int f w_i by the mode-set quadrature.
Eigen::VectorXd project(const FieldFn& f, const ModeSet& modes);

/// sum_i c_i w_i(x).
double reconstruct(const ModeSet& modes, const Eigen::VectorXd& coefficients, double x);

/// Plain-text matrix dump: '#' metadata lines, then one row per line, tab separated.
void write_matrix_dump(std::ostream& os, const Eigen::MatrixXd& matrix, const std::string& name,
                       const ModeSet& modes);

}  // namespace kirchdelay
