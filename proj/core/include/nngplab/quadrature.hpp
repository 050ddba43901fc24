#pragma once

#include <memory>
#include <vector>

namespace nngp {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes and weights for the standard normal density; weights sum to 1.
std::shared_ptr<const QuadratureRule> gauss_hermite(int order);

// Nodes and weights for the weight (1 - t^2)^alpha on [-1, 1], alpha > -1.
std::shared_ptr<const QuadratureRule> gauss_gegenbauer(int order, double alpha);

}  // namespace nngp
