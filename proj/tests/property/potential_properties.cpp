#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "linser/energy.hpp"
#include "linser/envelopes.hpp"
#include "linser/weights.hpp"

using namespace linser;

namespace {

Direction random_bump(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return Direction::radial_bump(u(rng), 0.3 + 0.7 * std::abs(u(rng)), u(rng));
}

Weight random_radial(std::mt19937_64& rng) {
  return Weight::shifted(Weight::shifted(Weight::fs(1), random_bump(rng), 1.0), random_bump(rng), 1.0);
}

std::vector<Point> random_points(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  std::vector<Point> out;
  for (int i = 0; i < n; ++i) out.push_back(Point::at({2.0 * normal(rng), 2.0 * normal(rng)}));
  out.push_back(Point::infinity());
  return out;
}

}  // namespace

TEST_CASE("shifts along one direction add their parameters") {
  std::mt19937_64 rng(301);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Weight base = random_radial(rng);
    const Direction f = random_bump(rng);
    const double s = u(rng);
    const double t = u(rng);
    const Weight twice = Weight::shifted(Weight::shifted(base, f, s), f, t);
    const Weight once = Weight::shifted(base, f, s + t);
    for (const Point& p : random_points(rng, 10)) CHECK(twice.potential(p) == doctest::Approx(once.potential(p)).epsilon(1e-13));
  }
}

TEST_CASE("pulled-back weights ignore the second coordinate") {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    const Weight base = random_radial(rng);
    const Weight up = Weight::pullback_first(base);
    for (const Point& p : random_points(rng, 10)) {
      const Coord w{cplx{normal(rng), normal(rng)}};
      CHECK(up.potential(Point::pair(p.first, w)) == doctest::Approx(base.potential(p)).epsilon(1e-14));
      CHECK(up.potential(Point::pair(p.first, Coord::infinity())) == doctest::Approx(base.potential(p)).epsilon(1e-14));
    }
  }
}

TEST_CASE("fiber reduction is monotone and undoes a pullback") {
  std::mt19937_64 rng(305);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Weight base = random_radial(rng);
    const Weight product = Weight::pullback_first(base);
    const Direction f = Direction::fiber_sign(random_bump(rng));
    const Weight lower = fiber_sup_weight(Weight::shifted(product, f, 0.5), 24);
    const Weight raised = fiber_sup_weight(Weight::shifted(Weight::shifted(product, f, 0.5), Direction::constant(1.0), u(rng)), 24);
    const Weight plain = fiber_sup_weight(product, 24);
    for (const Point& p : random_points(rng, 10)) {
      CHECK(lower.potential(p) <= raised.potential(p) + 1e-14);
      CHECK(plain.potential(p) == doctest::Approx(base.potential(p)).epsilon(1e-14));
    }
  }
}

TEST_CASE("Monge-Ampere mass of radial envelopes equals the degree") {
  std::mt19937_64 rng(307);
  for (int trial = 0; trial < 20; ++trial) {
    const auto set = trial % 2 ? SampleSet::disk(1.0, 4, 8) : SampleSet::annulus(0.5, 2.0, 4, 8);
    const auto ma = ma_measure_radial(radial_limit_envelope(random_radial(rng), set));
    CHECK(ma.total_mass == doctest::Approx(1.0).epsilon(1e-12));
    for (double m : ma.masses) CHECK(m >= -1e-9);
  }
}

TEST_CASE("energy differences are antisymmetric and satisfy the cocycle law") {
  std::mt19937_64 rng(309);
  const auto set = SampleSet::disk(1.0, 4, 8);
  const FiberDegree fd{1.0};
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = radial_limit_envelope(random_radial(rng), set);
    const auto b = radial_limit_envelope(random_radial(rng), set);
    const auto c = radial_limit_envelope(random_radial(rng), set);
    const double ab = kappa_energy_diff(a, b, 1, fd).value;
    const double bc = kappa_energy_diff(b, c, 1, fd).value;
    const double ac = kappa_energy_diff(a, c, 1, fd).value;
    CHECK(std::abs(ab + kappa_energy_diff(b, a, 1, fd).value) <= 1e-10);
    CHECK(std::abs(ac - ab - bc) <= 1e-10);
  }
}

TEST_CASE("the normalized volume functional is midpoint concave") {
  std::mt19937_64 rng(311);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto mu = disk_quadrature(1.0, 16, 24);
  for (int trial = 0; trial < 10; ++trial) {
    const WeightFamily family{random_radial(rng), random_bump(rng)};
    const double a = u(rng);
    const double b = u(rng);
    const std::vector<double> ts{a, 0.5 * (a + b), b};
    const auto f = volume_functional_scan(SeriesSpec::full(1), family, mu, 8, 1, ts);
    CHECK(f[1] >= 0.5 * (f[0] + f[2]) - 1e-9);
  }
}

TEST_CASE("series growth never exceeds the numerical dimension of the envelope") {
  std::mt19937_64 rng(313);
  for (int trial = 0; trial < 10; ++trial) {
    const auto env = radial_limit_envelope(random_radial(rng), SampleSet::disk(1.0, 4, 8));
    const auto check = kappa_vs_numerical_dimension(env, 1e-9, 96);
    CHECK(check.kappa_series <= check.numerical_dimension);
  }
  // slope 1/2 everywhere: no curvature, a bounded series
  EnvelopeGrid flat;
  flat.t = {-2.0, -1.0, 0.0, 1.0, 2.0};
  flat.values = {-1.0, -0.5, 0.0, 0.5, 1.0};
  const auto check = kappa_vs_numerical_dimension(flat, 1e-9, 96);
  CHECK(check.numerical_dimension == 0);
  CHECK(check.kappa_series <= 0);
}

TEST_CASE("envelope iterates approach the oracle as the degree doubles") {
  const std::vector<double> t_grid{-1.0, -0.5, 0.0, 0.5, 1.0};
  const SampleSet set = SampleSet::disk(1.0, 6, 64);
  const Weight w = Weight::blended_disk();
  const auto iterate = envelope_iterate(SeriesSpec::full(1), w, set, t_grid, 32);
  const auto oracle = radial_envelope_oracle(w, set, t_grid);
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& values : iterate.iterates) {
    double distance = 0.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) distance = std::max(distance, std::abs(values[i] - oracle.values[i]));
    CHECK(distance <= previous + 1e-3);
    previous = distance;
  }
}
