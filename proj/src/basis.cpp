#include "kirchdelay/basis.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>
#include <ostream>

#include "kirchdelay/errors.hpp"

namespace kirchdelay {

ClampedMode::ClampedMode(double beta, double length) : beta_(beta), length_(length) {
  const double bl = beta * length;
  const double e = std::exp(-bl);
  const double den = 1.0 - e * e - 2.0 * std::sin(bl) * e;
  sigma_ = (1.0 + e * e - 2.0 * std::cos(bl) * e) / den;
  tail_ = (std::cos(bl) - std::sin(bl) - e) / den;
  scale_ = 1.0 / std::sqrt(length);
}

// cosh(bx) - sigma sinh(bx) = tail exp(-b(L - x)) + (1 + sigma)/2 exp(-bx)
double ClampedMode::value(double x) const {
  const double bx = beta_ * x;
  const double grow = tail_ * std::exp(-beta_ * (length_ - x));
  const double decay = 0.5 * (1.0 + sigma_) * std::exp(-bx);
  return scale_ * (grow + decay - std::cos(bx) + sigma_ * std::sin(bx));
}

double ClampedMode::slope(double x) const {
  const double bx = beta_ * x;
  const double grow = tail_ * std::exp(-beta_ * (length_ - x));
  const double decay = 0.5 * (1.0 + sigma_) * std::exp(-bx);
  return scale_ * beta_ * (grow - decay + std::sin(bx) + sigma_ * std::cos(bx));
}

double ClampedMode::curvature(double x) const {
  const double bx = beta_ * x;
  const double grow = tail_ * std::exp(-beta_ * (length_ - x));
  const double decay = 0.5 * (1.0 + sigma_) * std::exp(-bx);
  return scale_ * beta_ * beta_ * (grow + decay + std::cos(bx) - sigma_ * std::sin(bx));
}

std::vector<double> solve_characteristic_roots(int n, double length, double tol) {
  if (n < 1) throw DomainError("solve_characteristic_roots: n must be >= 1");
  if (!(length > 0.0)) throw DomainError("solve_characteristic_roots: length must be > 0");
  if (!(tol > 0.0)) throw DomainError("solve_characteristic_roots: tol must be > 0");

  // cos(x) cosh(x) = 1  <=>  cos(x) - 1/cosh(x) = 0, bounded for large x.
  auto f = [](double x) { return std::cos(x) - 1.0 / std::cosh(x); };
  std::vector<double> roots;
  roots.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const double lo = (i + 0.25) * std::numbers::pi;
    const double hi = (i + 0.75) * std::numbers::pi;
    if (f(lo) * f(hi) > 0.0) throw RootFindingError(i, "no sign change in asymptotic bracket");
    boost::uintmax_t iterations = 200;
    auto result = boost::math::tools::toms748_solve(
        f, lo, hi, boost::math::tools::eps_tolerance<double>(), iterations);
    const double x = 0.5 * (result.first + result.second);
    // rounding of x alone leaves a residual of order eps * x
    if (!(std::abs(f(x)) / std::max(1.0, x) < tol)) {
      throw RootFindingError(i, "residual above tolerance");
    }
    roots.push_back(x / length);
  }
  return roots;
}

ModeSet::ModeSet(int n_modes, double length, ModeSetOptions options)
    : n_(n_modes), length_(length), options_(options) {
  if (n_modes < 1) throw DomainError("ModeSet: need at least one mode");
  if (options.panel_order < 1 || options.nodes_per_mode < options.panel_order) {
    throw DomainError("ModeSet: quadrature needs nodes_per_mode >= panel_order >= 1");
  }
  betas_ = solve_characteristic_roots(n_modes, length);
  lambdas_.resize(n_modes);
  for (int i = 0; i < n_modes; ++i) {
    lambdas_[i] = std::pow(betas_[static_cast<std::size_t>(i)], 4);
    modes_.emplace_back(betas_[static_cast<std::size_t>(i)], length);
  }
  const int total_nodes = options.nodes_per_mode * n_modes;
  const int panels = std::max(1, total_nodes / options.panel_order);
  rule_ = composite_gauss_legendre(panels, options.panel_order, 0.0, length);

  const auto nq = static_cast<Eigen::Index>(rule_.size());
  weights_ = Eigen::Map<const Eigen::VectorXd>(rule_.weights.data(), nq);
  values_.resize(nq, n_modes);
  slopes_.resize(nq, n_modes);
  curvatures_.resize(nq, n_modes);
  for (Eigen::Index q = 0; q < nq; ++q) {
    const double x = rule_.nodes[static_cast<std::size_t>(q)];
    for (int i = 0; i < n_modes; ++i) {
      const ClampedMode& m = modes_[static_cast<std::size_t>(i)];
      values_(q, i) = m.value(x);
      slopes_(q, i) = m.slope(x);
      curvatures_(q, i) = m.curvature(x);
    }
  }
}

double ModeSet::eval_mode(int i, double x) const {
  if (i < 0 || i >= n_) throw DomainError("eval_mode: mode index out of range");
  if (!(x >= 0.0 && x <= length_)) {
    throw DomainError("eval_mode: x = " + std::to_string(x) + " outside [0, L]");
  }
  return modes_[static_cast<std::size_t>(i)].value(x);
}

void assemble_matrices(ModeSet& modes) {
  const Eigen::MatrixXd& d1 = modes.slopes_;
  const Eigen::MatrixXd& d0 = modes.values_;
  const Eigen::MatrixXd& d2 = modes.curvatures_;
  const auto& w = modes.weights_;

  Eigen::MatrixXd grad = d1.transpose() * w.asDiagonal() * d1;
  const double asym = (grad - grad.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * grad.cwiseAbs().maxCoeff()) {
    throw AssemblyError("gradient matrix not symmetric");
  }
  grad = (0.5 * (grad + grad.transpose())).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(grad);
  if (llt.info() != Eigen::Success) {
    throw AssemblyError("gradient matrix not positive definite (under-resolved quadrature?)");
  }

  const int n = modes.size();
  const Eigen::MatrixXd mass = d0.transpose() * w.asDiagonal() * d0;
  modes.mass_residual_ = (mass - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd stiff = d2.transpose() * w.asDiagonal() * d2;
  const Eigen::MatrixXd lambda = modes.lambdas_.asDiagonal();
  modes.stiffness_residual_ = (stiff - lambda).cwiseAbs().maxCoeff() / modes.lambdas_.maxCoeff();
  modes.grad_ = std::move(grad);
  modes.assembled_ = true;
}

ModeSet build_modes(int n_modes, double length, ModeSetOptions options) {
  ModeSet modes(n_modes, length, options);
  assemble_matrices(modes);
  return modes;
}

Eigen::VectorXd project(const FieldFn& f, const ModeSet& modes) {
  const auto& nodes = modes.quadrature().nodes;
  Eigen::VectorXd samples(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double value = f(nodes[q]);
    if (!std::isfinite(value)) throw EvaluationError("projected field", nodes[q]);
    samples[static_cast<Eigen::Index>(q)] = value;
  }
  return modes.values().transpose() * modes.weights().cwiseProduct(samples);
}

double reconstruct(const ModeSet& modes, const Eigen::VectorXd& coefficients, double x) {
  double sum = 0.0;
  for (int i = 0; i < modes.size(); ++i) sum += coefficients[i] * modes.eval_mode(i, x);
  return sum;
}

void write_matrix_dump(std::ostream& os, const Eigen::MatrixXd& matrix, const std::string& name,
                       const ModeSet& modes) {
  const auto old_precision = os.precision(17);
  os << "# matrix = " << name << '\n'
     << "# rows = " << matrix.rows() << '\n'
     << "# cols = " << matrix.cols() << '\n'
     << "# n_modes = " << modes.size() << '\n'
     << "# length = " << modes.length() << '\n'
     << "# quadrature_nodes = " << modes.quadrature().size() << '\n';
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (c) os << '\t';
      os << matrix(r, c);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace kirchdelay
