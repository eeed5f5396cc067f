#pragma once

#include <vector>

namespace kirchdelay {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Composite Gauss-Legendre: `panels` equal panels of `order` points each on [a, b].
QuadratureRule composite_gauss_legendre(int panels, int order, double a, double b);

}  // namespace kirchdelay
