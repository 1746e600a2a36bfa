#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "linser/energy.hpp"
#include "linser/error.hpp"

using namespace linser;

namespace {

EnvelopeGrid grid_envelope(std::vector<double> t, std::vector<double> values, int degree = 1) {
  EnvelopeGrid env;
  env.t = std::move(t);
  env.values = std::move(values);
  env.degree = degree;
  return env;
}

GramMatrix handmade_gram(const Eigen::MatrixXcd& entries) {
  const int k = static_cast<int>(entries.rows()) - 1;
  return GramMatrix{section_basis(SeriesSpec::full(1), k), entries, 1.0};
}

Eigen::MatrixXcd random_gram(std::mt19937_64& rng, Eigen::Index n, double shift) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {normal(rng), normal(rng)};
  Eigen::MatrixXcd g = a.adjoint() * a / static_cast<double>(n);
  g.diagonal().array() += shift;
  return g;
}

}  // namespace

TEST_CASE("disk weight envelope has a unit atom on the circle") {
  const auto env = radial_limit_envelope(Weight::blended_disk(), SampleSet::disk(1.0, 4, 8));
  const auto ma = ma_measure_radial(env);
  CHECK(ma.total_mass == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t j = 0; j < ma.t.size(); ++j) {
    if (ma.t[j] == 0.0) {
      CHECK(ma.masses[j] == doctest::Approx(1.0).epsilon(1e-12));
    } else {
      CHECK(std::abs(ma.masses[j]) < 1e-12);
    }
  }
}

TEST_CASE("FS envelope measure matches the radial marginal of the FS area") {
  const auto env = radial_limit_envelope(Weight::fs(1), SampleSet::sphere(8, 8));
  const auto ma = ma_measure_radial(env);
  const auto area = sphere_quadrature(400, 8);
  for (double r : {0.5, 1.0, 2.0}) {
    const double log_r = std::log(r);
    const double ma_mass = ma.integrate([&](double t) { return t <= log_r + 1e-12 ? 1.0 : 0.0; });
    double area_mass = 0.0;
    for (std::size_t i = 0; i < area.size(); ++i) {
      if (!area.nodes[i].first.at_infinity && std::abs(area.nodes[i].first.value) < r) area_mass += area.weights[i];
    }
    // both approximate r^2 / (1 + r^2)
    CHECK(ma_mass == doctest::Approx(r * r / (1.0 + r * r)).epsilon(5e-3));
    CHECK(area_mass == doctest::Approx(ma_mass).epsilon(1e-2));
  }
}

TEST_CASE("a single kink produces a single interior atom") {
  // slopes 0, 0, 0.5, 0.5 on the grid and the asymptotic slope 1 to the right
  const auto ma = ma_measure_radial(grid_envelope({-2, -1, 0, 1, 2}, {0, 0, 0, 0.5, 1.0}));
  CHECK(ma.masses[0] == 0.0);
  CHECK(ma.masses[1] == 0.0);
  CHECK(ma.masses[2] == doctest::Approx(0.5));
  CHECK(ma.masses[3] == 0.0);
  CHECK(ma.masses[4] == doctest::Approx(0.5));  // boundary atom up to the degree
  CHECK(ma.total_mass == doctest::Approx(1.0));
}

TEST_CASE("non-convex envelopes are rejected") {
  CHECK_THROWS_AS(ma_measure_radial(grid_envelope({0, 1, 2}, {0, 1, 1})), Error);
}

TEST_CASE("energy difference of an envelope with itself vanishes") {
  const auto env = radial_limit_envelope(Weight::blended_disk(), SampleSet::disk(1.0, 4, 8));
  CHECK(kappa_energy_diff(env, env, 1, FiberDegree{1.0}).value == 0.0);
}

TEST_CASE("constant shift changes the energy by minus the shift") {
  const auto set = SampleSet::disk(1.0, 4, 8);
  const auto env0 = radial_limit_envelope(Weight::fs(1), set);
  for (double c : {-0.4, 0.3, 1.0}) {
    const auto env1 = radial_limit_envelope(Weight::shifted(Weight::fs(1), Direction::constant(1.0), c), set);
    const auto e = kappa_energy_diff(env0, env1, 1, FiberDegree{1.0});
    CHECK(e.value == doctest::Approx(-c).epsilon(1e-12));
    CHECK(e.value == doctest::Approx((e.components[0] + e.components[1]) / 4.0).epsilon(1e-15));
  }
}

TEST_CASE("energy cocycle and antisymmetry on three radial weights") {
  const auto set = SampleSet::disk(1.0, 4, 8);
  const auto a = radial_limit_envelope(Weight::fs(1), set);
  const auto b = radial_limit_envelope(Weight::blended_disk(), set);
  const auto c = radial_limit_envelope(Weight::shifted(Weight::fs(1), Direction::radial_bump(-0.5, 0.4, 0.3), 1.0), set);
  const FiberDegree fd{1.0};
  const double ab = kappa_energy_diff(a, b, 1, fd).value;
  const double bc = kappa_energy_diff(b, c, 1, fd).value;
  const double ac = kappa_energy_diff(a, c, 1, fd).value;
  CHECK(std::abs(ac - (ab + bc)) <= 1e-10);
  CHECK(std::abs(ab + kappa_energy_diff(b, a, 1, fd).value) <= 1e-10);
}

TEST_CASE("energy difference between the disk and FS weights on the disk") {
  const auto set = SampleSet::disk(1.0, 4, 8);
  const auto e = kappa_energy_diff(radial_limit_envelope(Weight::blended_disk(), set),
                                   radial_limit_envelope(Weight::fs(1), set), 1, FiberDegree{1.0});
  // tests/oracles/derive.py: disk vs fs energy
  CHECK(e.value == doctest::Approx(-0.298286795139986327).epsilon(1e-5));
}

TEST_CASE("energy differences are only defined for kappa one on a common grid") {
  const auto env = radial_limit_envelope(Weight::fs(1), SampleSet::disk(1.0, 4, 8));
  CHECK_THROWS_AS(kappa_energy_diff(env, env, 2, FiberDegree{1.0}), Error);
  const auto other = radial_limit_envelope(Weight::fs(1), SampleSet::disk(1.0, 4, 8), 1001);
  CHECK_THROWS_AS(kappa_energy_diff(env, other, 1, FiberDegree{1.0}), Error);
}

TEST_CASE("volume ratio of a Gram with itself and with a multiple") {
  std::mt19937_64 rng(17);
  const auto g = handmade_gram(random_gram(rng, 4, 0.5));
  CHECK(volume_log_ratio(g, g) == 0.0);
  const auto scaled = handmade_gram(4.0 * g.entries);
  CHECK(volume_log_ratio(g, scaled) == doctest::Approx(4.0 * std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("volume ratio is invariant under a common change of basis") {
  std::mt19937_64 rng(19);
  const Eigen::MatrixXcd g0 = random_gram(rng, 5, 0.5);
  const Eigen::MatrixXcd g1 = random_gram(rng, 5, 0.5);
  const Eigen::MatrixXcd p = random_gram(rng, 5, 1.0) + Eigen::MatrixXcd::Identity(5, 5) * cplx{0.0, 0.3};
  const double direct = volume_log_ratio(handmade_gram(g0), handmade_gram(g1));
  const double changed =
      volume_log_ratio(handmade_gram(p.adjoint() * g0 * p), handmade_gram(p.adjoint() * g1 * p));
  CHECK(changed == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("volume ratio agrees with a Monte Carlo ball volume estimate") {
  std::mt19937_64 rng(23);
  const Eigen::MatrixXcd g0 = random_gram(rng, 3, 0.6);
  const Eigen::MatrixXcd g1 = random_gram(rng, 3, 0.6);
  const double formula = volume_log_ratio(handmade_gram(g0), handmade_gram(g1));

  // Uniform samples in a box containing both unit balls of C^3 = R^6.
  const double lambda_min = std::min(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(g0).eigenvalues().minCoeff(),
                                     Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(g1).eigenvalues().minCoeff());
  const double half_side = 1.0 / std::sqrt(lambda_min);
  std::uniform_real_distribution<double> uniform(-half_side, half_side);
  const int samples = 1'000'000;
  long inside0 = 0;
  long inside1 = 0;
  Eigen::Vector3cd c;
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < 3; ++i) c(i) = {uniform(rng), uniform(rng)};
    inside0 += c.dot(g0 * c).real() <= 1.0;
    inside1 += c.dot(g1 * c).real() <= 1.0;
  }
  const double estimate = std::log(double(inside0) / double(inside1));
  const double p0 = double(inside0) / samples;
  const double p1 = double(inside1) / samples;
  const double sigma = std::sqrt((1.0 - p0) / (samples * p0) + (1.0 - p1) / (samples * p1));
  CHECK(std::abs(estimate - formula) <= 3.0 * sigma);
}

TEST_CASE("volume ratio check with identical weights is zero") {
  const std::vector<int> ks{4, 8};
  const auto check = volume_ratio_limit_check(SeriesSpec::full(1), Weight::fs(1), Weight::fs(1),
                                              SampleSet::disk(1.0, 4, 8), disk_quadrature(1.0, 12, 12), ks, 1,
                                              FiberDegree{1.0});
  for (const auto& row : check.series.rows) CHECK(row.log_ratio == 0.0);
  CHECK(check.oracle.value == 0.0);
}

TEST_CASE("derivative along a pulled-back constant direction") {
  const WeightFamily family{Weight::pullback_first(Weight::fs(1)), Direction::constant(1.0)};
  const auto scan = energy_derivative_scan(family, SampleSet::sphere(8, 16), FiberDegree{1.0});
  CHECK(scan.slope_plus == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(scan.slope_minus == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(scan.expected_slope == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(scan.pulled_back);
}

TEST_CASE("derivative along the fiber-sign direction has a kink") {
  const WeightFamily family{Weight::pullback_first(Weight::fs(1)), Direction::fiber_sign(Direction::constant(1.0))};
  const auto scan = energy_derivative_scan(family, SampleSet::sphere(8, 16), FiberDegree{1.0});
  CHECK(scan.slope_gap >= 0.5 * std::abs(scan.slope_plus));
  // E(t) = E(-t) for this family
  CHECK(std::abs(scan.slope_plus + scan.slope_minus) <= 1e-8);
  CHECK(!scan.pulled_back);
}

TEST_CASE("derivative does not depend on the fiber grid") {
  const WeightFamily family{Weight::pullback_first(Weight::fs(1)), Direction::fiber_sign(Direction::fs_bump(1.0))};
  DerivativeOptions coarse;
  coarse.fiber_points = 32;
  const auto a = energy_derivative_scan(family, SampleSet::sphere(8, 16), FiberDegree{1.0});
  const auto b = energy_derivative_scan(family, SampleSet::sphere(8, 16), FiberDegree{1.0}, coarse);
  CHECK(std::abs(a.slope_plus - b.slope_plus) <= 1e-6);
  CHECK(std::abs(a.slope_minus - b.slope_minus) <= 1e-6);
}
