#pragma once

#include <vector>

namespace heatcloak {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached per n; computed by Newton iteration on Legendre polynomials.
const GaussRule& gauss_legendre(int n);

}  // namespace heatcloak
