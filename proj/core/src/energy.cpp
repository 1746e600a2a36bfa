#include "linser/energy.hpp"

#include <algorithm>
#include <cmath>

#include "linser/error.hpp"

namespace linser {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Uniform grid on [lo, hi] with the finite ends of the K-range inserted, so that
// every kink of an oracle envelope sits on a node.
std::vector<double> oracle_grid(RadialRange range, double lo, double hi, int n) {
  std::vector<double> grid = uniform_grid(lo, hi, n);
  for (double end : {range.lo, range.hi}) {
    if (std::isfinite(end) && end > lo && end < hi) grid.push_back(end);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

EnvelopeGrid radial_limit_envelope(const Weight& w, const SampleSet& set, int grid_points, double margin) {
  const auto range = set.radial_range();
  require(range.has_value(), ErrorCode::not_radial, "compact set is not radial");
  const double lo = std::isfinite(range->lo) ? range->lo - margin : -12.0;
  const double hi = std::isfinite(range->hi) ? range->hi + margin : 12.0;
  const auto grid = oracle_grid(*range, lo, hi, grid_points);
  return radial_envelope_oracle(radial_profile(w, grid), *range, grid);
}

MAMeasure1D ma_measure_radial(const EnvelopeGrid& env, double tolerance) {
  const std::size_t n = env.t.size();
  require(n >= 2 && env.values.size() == n, ErrorCode::invalid_argument, "envelope grid needs two samples");
  MAMeasure1D out;
  out.t = env.t;
  out.degree = env.degree;
  out.masses.resize(n);
  double previous = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double slope = (env.values[j + 1] - env.values[j]) / (env.t[j + 1] - env.t[j]);
    out.masses[j] = slope - previous;
    previous = slope;
  }
  out.masses[n - 1] = env.degree - previous;
  CompensatedSum total;
  for (double m : out.masses) {
    if (m < -tolerance) fail(ErrorCode::invalid_envelope, "envelope is not convex with slopes in [0, d]");
    total.add(m);
  }
  out.total_mass = total.value();
  return out;
}

EnergyDiff kappa_energy_diff(const EnvelopeGrid& env0, const EnvelopeGrid& env1, int kappa, FiberDegree fd) {
  require(kappa == 1, ErrorCode::invalid_argument, "energy differences are implemented for kappa = 1");
  require(fd.value > 0.0, ErrorCode::invalid_argument, "fiber degree must be positive");
  require(env0.t == env1.t && env0.values.size() == env1.values.size(), ErrorCode::invalid_argument,
          "envelopes live on different grids");
  require(env0.degree == env1.degree, ErrorCode::invalid_argument, "envelopes of different bundles");
  const MAMeasure1D ma0 = ma_measure_radial(env0);
  const MAMeasure1D ma1 = ma_measure_radial(env1);

  // log(P_1 / P_0) with P = e^{-2 psi}
  std::vector<double> log_ratio(env0.t.size());
  for (std::size_t j = 0; j < log_ratio.size(); ++j) log_ratio[j] = -2.0 * (env1.values[j] - env0.values[j]);
  const auto integrate = [&](const MAMeasure1D& ma) {
    CompensatedSum acc;
    for (std::size_t j = 0; j < log_ratio.size(); ++j) acc.add(log_ratio[j] * ma.masses[j]);
    return fd.value * acc.value();
  };

  EnergyDiff out;
  out.kappa = kappa;
  out.fiber_degree = fd;
  out.components = {integrate(ma1), integrate(ma0)};  // i = 0, 1 factors of MA_0
  out.value = (out.components[0] + out.components[1]) / (2.0 * (kappa + 1) * fd.value);
  return out;
}

double volume_log_ratio(const OrthoBasis& ob0, const OrthoBasis& ob1) {
  require(ob0.basis.k == ob1.basis.k && ob0.basis.basis.exponents == ob1.basis.basis.exponents,
          ErrorCode::invalid_argument, "Gram matrices use different bases");
  return ob1.log_det - ob0.log_det;
}

double volume_log_ratio(const GramMatrix& g0, const GramMatrix& g1) {
  return volume_log_ratio(orthonormalize(g0), orthonormalize(g1));
}

VolumeRatioCheck volume_ratio_limit_check(const SeriesSpec& spec, const Weight& w0, const Weight& w1,
                                          const SampleSet& set, const QuadratureMeasure& mu,
                                          std::span<const int> k_list, int kappa, FiberDegree fd) {
  VolumeRatioCheck out;
  out.series.kappa = kappa;
  const double half_factorial = factorial(kappa) / 2.0;
  const double log_mass = std::abs(std::log(mu.total_mass));
  for (int k : k_list) {
    require(k >= 1, ErrorCode::invalid_argument, "volume ratios need k >= 1");
    const SectionBasis basis = section_basis(spec, k);
    const OrthoBasis ob0 = orthonormalize(gram_matrix(basis, w0, mu));
    const OrthoBasis ob1 = orthonormalize(gram_matrix(basis, w1, mu));
    const auto log_constant = [&](const OrthoBasis& ob, const Weight& w) {
      const Eigen::MatrixXcd v = evaluation_rows(basis, w, mu.nodes) * ob.coefficients;
      return 0.5 * std::log(v.rowwise().squaredNorm().maxCoeff());
    };
    VolumeRatioRow row;
    row.k = k;
    row.log_ratio = volume_log_ratio(ob0, ob1);
    const double scale = std::pow(static_cast<double>(k), kappa + 1);
    row.raw_normalized = row.log_ratio / scale;
    row.normalized = half_factorial * row.raw_normalized;
    const double m = static_cast<double>(basis.size());
    row.error_budget = half_factorial * 2.0 * m *
                       (std::max(0.0, log_constant(ob0, w0)) + std::max(0.0, log_constant(ob1, w1)) + log_mass) /
                       scale;
    out.series.rows.push_back(row);
  }
  const EnvelopeGrid env0 = radial_limit_envelope(w0, set);
  const EnvelopeGrid env1 = radial_limit_envelope(w1, set);
  out.oracle = kappa_energy_diff(env0, env1, kappa, fd);
  return out;
}

EnvelopeGrid reduced_envelope(const Weight& member, const SampleSet& set, const DerivativeOptions& options) {
  const Weight base = member.on_product() ? fiber_sup_weight(member, options.fiber_points) : member;
  const auto range = set.radial_range();
  require(range.has_value(), ErrorCode::not_radial, "compact set is not radial");
  const auto grid = oracle_grid(*range, options.t_lo, options.t_hi, options.grid_points);
  return radial_envelope_oracle(radial_profile(base, grid), *range, grid);
}

DerivativeScan energy_derivative_scan(const WeightFamily& family, const SampleSet& set, FiberDegree fd,
                                      const DerivativeOptions& options) {
  require(options.steps.size() == 2 && options.steps[0] > 0 && options.steps[1] > options.steps[0],
          ErrorCode::invalid_argument, "derivative scan needs two increasing steps");
  const double h1 = options.steps[0];
  const double h2 = options.steps[1];

  const EnvelopeGrid env0 = reduced_envelope(family.base, set, options);
  const auto energy_at = [&](double t) {
    if (t == 0.0) return 0.0;
    const EnvelopeGrid env = reduced_envelope(shift_weight(family, t), set, options);
    return kappa_energy_diff(env, env0, 1, fd).value;
  };

  DerivativeScan out;
  out.t = {-h2, -h1, 0.0, h1, h2};
  for (double t : out.t) out.energy.push_back(energy_at(t));
  const double e0 = out.energy[2];
  const double plus1 = (out.energy[3] - e0) / h1;
  const double plus2 = (out.energy[4] - e0) / h2;
  const double minus1 = (e0 - out.energy[1]) / h1;
  const double minus2 = (e0 - out.energy[0]) / h2;
  // Richardson: the O(h) error cancels when h2 = 2 h1.
  const double r = h2 / h1;
  out.slope_plus = (r * plus1 - plus2) / (r - 1.0);
  out.slope_minus = (r * minus1 - minus2) / (r - 1.0);
  out.slope_gap = std::abs(out.slope_plus - out.slope_minus);

  out.pulled_back = family.direction.pulled_back();
  const Direction& f = family.direction.kind() == Direction::Kind::fiber_sign ? *family.direction.inner()
                                                                              : family.direction;
  const MAMeasure1D ma = ma_measure_radial(env0);
  out.expected_slope = ma.integrate([&](double t) { return f(Point::at(cplx{std::exp(t), 0.0})); });
  return out;
}

std::vector<double> volume_functional_scan(const SeriesSpec& spec, const WeightFamily& family,
                                           const QuadratureMeasure& mu, int k, int kappa,
                                           std::span<const double> t_values) {
  require(k >= 1, ErrorCode::invalid_argument, "volume functional needs k >= 1");
  const SectionBasis basis = section_basis(spec, k);
  const double reference = orthonormalize(gram_matrix(basis, family.base, mu)).log_det;
  const double scale = std::pow(static_cast<double>(k), kappa + 1);
  std::vector<double> out;
  out.reserve(t_values.size());
  for (double t : t_values) {
    const double log_det = orthonormalize(gram_matrix(basis, shift_weight(family, t), mu)).log_det;
    out.push_back((reference - log_det) / scale);
  }
  return out;
}

SingularityCheck kappa_vs_numerical_dimension(const EnvelopeGrid& env, double tolerance, int k_max) {
  const std::size_t n = env.t.size();
  require(n >= 2 && env.values.size() == n, ErrorCode::invalid_argument, "potential grid needs two samples");
  const double s_minus = (env.values[1] - env.values[0]) / (env.t[1] - env.t[0]);
  const double s_plus = (env.values[n - 1] - env.values[n - 2]) / (env.t[n - 1] - env.t[n - 2]);
  require(s_minus >= -tolerance && s_plus <= env.degree + tolerance && s_minus <= s_plus + tolerance,
          ErrorCode::invalid_envelope, "potential is not psh: slopes must increase inside [0, d]");
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double left = (env.values[j] - env.values[j - 1]) / (env.t[j] - env.t[j - 1]);
    const double right = (env.values[j + 1] - env.values[j]) / (env.t[j + 1] - env.t[j]);
    require(right >= left - tolerance, ErrorCode::invalid_envelope, "potential is not convex in t");
  }
  SingularityCheck out;
  out.mass_bound = std::max(0.0, s_plus - s_minus);
  out.numerical_dimension = out.mass_bound > tolerance ? 1 : 0;
  const SeriesSpec series = slope_range_series(std::clamp(s_minus, 0.0, 1.0 * env.degree),
                                               std::clamp(s_plus, 0.0, 1.0 * env.degree), env.degree);
  const GrowthFit fit = fit_growth(series, k_max);
  out.kappa_series = fit.kappa;
  out.vol_series = fit.vol;
  return out;
}

}  // namespace linser
