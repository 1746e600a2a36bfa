#pragma once

#include <optional>
#include <span>
#include <vector>

#include "linser/geometry.hpp"
#include "linser/norms.hpp"

namespace linser {

// Frame-weighted kernel diagonal B_k(x,x) = sum_i |s_i(x)|^2 e^{-2k phi(x)}.
struct KernelEval {
  int k = 0;
  std::vector<Point> points;
  std::vector<double> values;
};

KernelEval kernel_diagonal(const OrthoBasis& ob, const Weight& w, std::span<const Point> points);

struct DensityMeasure {
  QuadratureMeasure measure;  // weights w_node * B_k / k^kappa
  int kappa = 0;
  double mass = 0.0;
};

DensityMeasure density_measure(const KernelEval& ke, const QuadratureMeasure& mu, int kappa);

struct ScanOptions {
  int kappa = 1;
  int moment_order = 4;
  bool push = false;  // push the normalised density through the series' base map
  bool record_timing = false;
};

struct ScanRow {
  int k = 0;
  double mass = 0.0;
  double discrepancy = 0.0;
  double runtime_ms = 0.0;
};

// For each k: Gram, orthonormalisation, kernel on the nodes of mu, probability-normalised
// density (optionally pushed forward), discrepancy against `target`.
std::vector<ScanRow> convergence_scan(const SeriesSpec& spec, const Weight& w, const QuadratureMeasure& mu,
                                      std::span<const int> k_list, const QuadratureMeasure& target,
                                      const ScanOptions& options = {});

// Probability-normalised Bergman density at degree k on the nodes of mu.
QuadratureMeasure normalized_density(const SeriesSpec& spec, int k, const Weight& w, const QuadratureMeasure& mu);

}  // namespace linser
