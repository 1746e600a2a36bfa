#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "linser/geometry.hpp"

namespace linser::testing {

// Sum of f(node) * weight over a quadrature rule.
template <class F>
cplx integrate(const QuadratureMeasure& mu, F&& f) {
  cplx acc{};
  for (std::size_t i = 0; i < mu.size(); ++i) acc += f(mu.nodes[i]) * mu.weights[i];
  return acc;
}

inline std::vector<cplx> random_coefficients(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal;
  std::vector<cplx> out(n);
  for (auto& c : out) c = {normal(rng), normal(rng)};
  return out;
}

inline double relative_error(double value, double expected) {
  return std::abs(value - expected) / std::max(std::abs(expected), 1e-300);
}

}  // namespace linser::testing
