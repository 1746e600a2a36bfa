#include "linser/bergman.hpp"

#include <chrono>
#include <cmath>

#include "linser/error.hpp"

namespace linser {

KernelEval kernel_diagonal(const OrthoBasis& ob, const Weight& w, std::span<const Point> points) {
  const Eigen::MatrixXcd values = evaluation_rows(ob.basis, w, points) * ob.coefficients;
  KernelEval out;
  out.k = ob.basis.k;
  out.points.assign(points.begin(), points.end());
  out.values.resize(points.size());
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out.values[static_cast<std::size_t>(i)] = values.row(i).squaredNorm();
  }
  return out;
}

DensityMeasure density_measure(const KernelEval& ke, const QuadratureMeasure& mu, int kappa) {
  require(kappa >= 0, ErrorCode::invalid_argument, "kappa must be nonnegative");
  require(ke.points == mu.nodes, ErrorCode::invalid_argument, "kernel points differ from the measure nodes");
  require(kappa == 0 || ke.k >= 1, ErrorCode::invalid_argument, "density with kappa >= 1 needs k >= 1");
  const double norm = std::pow(static_cast<double>(ke.k), kappa);
  std::vector<double> weights(mu.weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = mu.weights[i] * ke.values[i] / norm;
  DensityMeasure out;
  out.measure = QuadratureMeasure::make(mu.nodes, std::move(weights), mu.descriptor + "/bergman-density",
                                        mu.components, mu.product);
  out.kappa = kappa;
  out.mass = out.measure.total_mass;
  return out;
}

QuadratureMeasure normalized_density(const SeriesSpec& spec, int k, const Weight& w, const QuadratureMeasure& mu) {
  const SectionBasis basis = section_basis(spec, k);
  const OrthoBasis ob = orthonormalize(gram_matrix(basis, w, mu));
  const KernelEval ke = kernel_diagonal(ob, w, mu.nodes);
  const DensityMeasure density = density_measure(ke, mu, 0);
  return density.measure.scaled(1.0 / density.mass);
}

std::vector<ScanRow> convergence_scan(const SeriesSpec& spec, const Weight& w, const QuadratureMeasure& mu,
                                      std::span<const int> k_list, const QuadratureMeasure& target,
                                      const ScanOptions& options) {
  std::vector<ScanRow> rows;
  rows.reserve(k_list.size());
  for (int k : k_list) {
    const auto start = std::chrono::steady_clock::now();
    const SectionBasis basis = section_basis(spec, k);
    const OrthoBasis ob = orthonormalize(gram_matrix(basis, w, mu));
    const KernelEval ke = kernel_diagonal(ob, w, mu.nodes);
    const DensityMeasure density = density_measure(ke, mu, options.kappa);
    QuadratureMeasure shape = density.measure.scaled(1.0 / density.mass);
    if (options.push) shape = pushforward_measure(shape, spec.space);
    ScanRow row{k, density.mass, weak_discrepancy(shape, target, options.moment_order), 0.0};
    if (options.record_timing) {
      row.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace linser
