#pragma once

#include <span>
#include <vector>

#include "linser/envelopes.hpp"
#include "linser/geometry.hpp"
#include "linser/norms.hpp"
#include "linser/series.hpp"
#include "linser/weights.hpp"

namespace linser {

// Slope increments of a piecewise-linear convex potential in t, as atoms on the
// grid nodes. The slope left of the grid is 0 and right of it is d.
struct MAMeasure1D {
  std::vector<double> t;
  std::vector<double> masses;
  double total_mass = 0.0;
  int degree = 1;

  // sum_j f(t_j) m_j
  template <class F>
  double integrate(F&& f) const {
    CompensatedSum acc;
    for (std::size_t j = 0; j < t.size(); ++j) acc.add(f(t[j]) * masses[j]);
    return acc.value();
  }
};

MAMeasure1D ma_measure_radial(const EnvelopeGrid& env, double tolerance = 1e-9);

// Oracle envelope on a uniform t-grid around the K-range (the finite range ends are
// added as nodes so that every kink sits on the grid). Unbounded sides stop at |t| = 12.
EnvelopeGrid radial_limit_envelope(const Weight& w, const SampleSet& set, int grid_points = 4001, double margin = 2.0);

// value = E(P_0) - E(P_1) = (1 / (2 (kappa+1) fd)) sum_i components_i, with
// components_i = fd * int log(P_1/P_0) MA_0^i MA_1^{kappa-i} and log(P_1/P_0) = -2 (psi_1 - psi_0).
struct EnergyDiff {
  double value = 0.0;
  int kappa = 1;
  FiberDegree fiber_degree;
  std::vector<double> components;
};

EnergyDiff kappa_energy_diff(const EnvelopeGrid& env0, const EnvelopeGrid& env1, int kappa, FiberDegree fd);

// log v(B_0) / v(B_1) = log det G_1 - log det G_0 for the Hermitian unit balls.
double volume_log_ratio(const GramMatrix& g0, const GramMatrix& g1);
double volume_log_ratio(const OrthoBasis& ob0, const OrthoBasis& ob1);

struct VolumeRatioRow {
  int k = 0;
  double log_ratio = 0.0;
  double raw_normalized = 0.0;  // log_ratio / k^{kappa+1}
  double normalized = 0.0;      // (kappa!/2) * raw_normalized, comparable with EnergyDiff
  double error_budget = 0.0;    // bound on the Hilbert-for-sup substitution, same scale as normalized
};

struct VolumeRatioSeries {
  int kappa = 1;
  std::vector<VolumeRatioRow> rows;
};

struct VolumeRatioCheck {
  VolumeRatioSeries series;
  EnergyDiff oracle;
};

// Hilbert Grams use `mu` (a Bernstein-Markov measure supported on K).
VolumeRatioCheck volume_ratio_limit_check(const SeriesSpec& spec, const Weight& w0, const Weight& w1,
                                          const SampleSet& set, const QuadratureMeasure& mu,
                                          std::span<const int> k_list, int kappa, FiberDegree fd);

struct DerivativeOptions {
  std::vector<double> steps{0.02, 0.04};
  int fiber_points = 64;
  double t_lo = -12.0;
  double t_hi = 12.0;
  int grid_points = 2401;
};

struct DerivativeScan {
  std::vector<double> t;
  std::vector<double> energy;  // E(P_t) - E(P_0)
  double slope_minus = 0.0;
  double slope_plus = 0.0;
  double slope_gap = 0.0;
  double expected_slope = 0.0;  // int f dMA_0; for fiber-sign directions f is the base factor
  bool pulled_back = false;
};

// Product families are reduced through the fiber sup to the base sphere.
DerivativeScan energy_derivative_scan(const WeightFamily& family, const SampleSet& set, FiberDegree fd,
                                      const DerivativeOptions& options = {});

// Radial envelope of one family member on the base, as used by the derivative scan.
EnvelopeGrid reduced_envelope(const Weight& member, const SampleSet& set, const DerivativeOptions& options);

// f_k(t) = k^{-(kappa+1)} log v(B_k(t)) / v(B_k(0)) for Hilbert balls along the family.
std::vector<double> volume_functional_scan(const SeriesSpec& spec, const WeightFamily& family,
                                           const QuadratureMeasure& mu, int k, int kappa,
                                           std::span<const double> t_values);

struct SingularityCheck {
  int kappa_series = 0;  // kappa of W(phi) from dimension growth
  int numerical_dimension = 0;
  double vol_series = 0.0;
  double mass_bound = 0.0;  // non-pluripolar mass of T, the volume bound
};

// W(phi) for a radial psh potential given by its asymptotic slopes and interior MA mass.
SingularityCheck kappa_vs_numerical_dimension(const EnvelopeGrid& env, double tolerance = 1e-9, int k_max = 256);

}  // namespace linser
