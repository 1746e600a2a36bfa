#include <doctest.h>

#include <cmath>

#include "linser/envelopes.hpp"
#include "linser/error.hpp"

using namespace linser;

namespace {

Weight flat_weight() { return Weight::radial(RadialProfile{{-1.0, 1.0}, {0.0, 0.0}, 1}); }

}  // namespace

TEST_CASE("Hermitian FS value of the FS Gram is constant") {
  const auto g = gram_matrix(SeriesSpec::full(1), 6, Weight::fs(1), sphere_quadrature(32, 24));
  for (const Point& x : {Point::at(0.0), Point::at({1.5, -0.5}), Point::infinity()}) {
    const auto fs = fs_hermitian(g, Weight::fs(1), x);
    CHECK(!fs.infinite);
    CHECK(fs.value == doctest::Approx(1.0 / std::sqrt(7.0)).epsilon(1e-10));
  }
}

TEST_CASE("Hermitian FS value is infinite on the base locus") {
  const auto vanishing = SeriesSpec::monomial(1, {{1, {1, 0}}}, {1, 0});
  const auto g = gram_matrix(vanishing, 3, Weight::fs(1), disk_quadrature(1.0, 8, 8));
  CHECK(fs_hermitian(g, Weight::fs(1), Point::at(0.0)).infinite);
  CHECK(!fs_hermitian(g, Weight::fs(1), Point::at(0.5)).infinite);
}

TEST_CASE("Hermitian FS value of a one-dimensional space is a norm ratio") {
  const auto single = SeriesSpec::monomial(1, {{1, {1, 0}}}, {1, 0});
  const int k = 2;
  const auto mu = disk_quadrature(1.0, 8, 8);
  const auto g = gram_matrix(single, k, Weight::blended_disk(), mu);
  // the only section is z^2; its frame-weighted length at x and its L2 norm
  const Point x = Point::at({0.3, 0.2});
  const double at_x = std::norm(x.first.value) * std::exp(-k * Weight::blended_disk().potential(x));
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double len = std::norm(mu.nodes[i].first.value) * std::exp(-k * Weight::blended_disk().potential(mu.nodes[i]));
    norm_sq += mu.weights[i] * len * len;
  }
  CHECK(fs_hermitian(g, Weight::blended_disk(), x).value == doctest::Approx(std::sqrt(norm_sq) / at_x).epsilon(1e-12));
}

TEST_CASE("Chebyshev value of a one-dimensional space is exact up to the facet factor") {
  const auto single = SeriesSpec::monomial(1, {{1, {0, 0}}}, {1, 0});
  const int k = 3;
  const auto set = SampleSet::disk(1.0, 6, 24);
  const auto h = make_sup_norm(single, k, Weight::blended_disk(), set);
  const Point x = Point::at(0.25);
  double sup = 0.0;
  for (const auto& p : set.points) sup = std::max(sup, std::exp(-k * Weight::blended_disk().potential(p)));
  const double exact = sup / std::exp(-k * Weight::blended_disk().potential(x));
  const auto r = fs_sup_chebyshev(h, x, 16);
  CHECK(r.lower <= exact * (1.0 + 1e-9));
  CHECK(exact <= r.upper * (1.0 + 1e-9));
  CHECK(r.lower == doctest::Approx(r.upper * std::cos(std::numbers::pi / 16)).epsilon(1e-12));
}

TEST_CASE("Chebyshev value agrees with a brute-force search in dimension three") {
  const auto set = SampleSet::circle(1.0, 64);
  const auto h = make_sup_norm(SeriesSpec::full(1), 2, flat_weight(), set);
  const cplx x0 = 0.5;
  const auto r = fs_sup_chebyshev(h, Point::at(x0), 16);

  // p(z) = 1 + a (z - x0) + b (z - x0)^2 has unit value at x0.
  double best = std::numeric_limits<double>::infinity();
  const int n = 20;
  const double step = 1.0 / n;
  for (int ar = -n; ar <= n; ++ar)
    for (int ai = -n; ai <= n; ++ai)
      for (int br = -n; br <= n; ++br)
        for (int bi = -n; bi <= n; ++bi) {
          const cplx a{ar * step, ai * step};
          const cplx b{br * step, bi * step};
          double sup = 0.0;
          for (const auto& p : set.points) {
            const cplx u = p.first.value - x0;
            sup = std::max(sup, std::abs(1.0 + a * u + b * u * u));
            if (sup >= best) break;
          }
          best = std::min(best, sup);
        }
  // The grid minimum bounds the true minimum from above; the LP brackets it.
  CHECK(r.lower <= best + 1e-12);
  CHECK(best <= r.upper + 0.05);
}

TEST_CASE("Chebyshev value sits between Hermitian values for the counting measure") {
  const auto set = SampleSet::circle(1.3, 24);
  std::vector<double> ones(set.points.size(), 1.0);
  const auto counting = QuadratureMeasure::make(set.points, ones, "counting");
  const int k = 5;
  const auto g = gram_matrix(SeriesSpec::full(1), k, Weight::fs(1), counting);
  const auto h = make_sup_norm(SeriesSpec::full(1), k, Weight::fs(1), set);
  const double n = static_cast<double>(set.points.size());
  for (const Point& x : {Point::at(0.0), Point::at({0.4, 0.9}), Point::at(2.0)}) {
    const double herm = fs_hermitian(g, Weight::fs(1), x).value;
    const auto r = fs_sup_chebyshev(h, x, 16);
    CHECK(r.upper >= herm / std::sqrt(n) * (1.0 - 1e-9));
    CHECK(r.lower <= herm * (1.0 + 1e-9));
  }
}

TEST_CASE("Chebyshev needs enough facets and a point off the base locus") {
  const auto h = make_sup_norm(SeriesSpec::full(1), 2, Weight::fs(1), SampleSet::circle(1.0, 16));
  CHECK_THROWS_AS(fs_sup_chebyshev(h, Point::at(0.0), 4), Error);
  const auto vanishing = make_sup_norm(SeriesSpec::monomial(1, {{1, {1, 0}}}, {1, 0}), 2, Weight::fs(1),
                                       SampleSet::circle(1.0, 16));
  CHECK_THROWS_AS(fs_sup_chebyshev(vanishing, Point::at(0.0), 16), Error);
}

TEST_CASE("envelope of the FS weight over the whole sphere is the FS weight") {
  const std::vector<double> grid{-1.0, 0.0, 1.0};
  const auto env = envelope_iterate(SeriesSpec::full(1), Weight::fs(1), SampleSet::sphere(16, 32), grid, 32);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(env.values[i] == doctest::Approx(Weight::fs(1).potential(Point::at(std::exp(grid[i])))).epsilon(2e-3));
  }
  CHECK(env.gap <= 1e-3);
}

TEST_CASE("envelope of the disk weight over the disk is flat inside") {
  const std::vector<double> grid{-1.0, -0.5, 0.0};
  const auto env = envelope_iterate(SeriesSpec::full(1), Weight::blended_disk(), SampleSet::disk(1.0, 8, 128), grid, 64);
  for (double v : env.values) CHECK(std::abs(v) < 0.05);
  CHECK(env.k_source == 64);
  CHECK(env.iterate_degrees == std::vector<int>{8, 16, 32, 64});
}

TEST_CASE("envelope of a constant shift is shifted") {
  const std::vector<double> grid{-0.5, 0.0, 0.5};
  const auto set = SampleSet::disk(1.0, 6, 64);
  const auto base = envelope_iterate(SeriesSpec::full(1), Weight::blended_disk(), set, grid, 16);
  const auto shifted = envelope_iterate(
      SeriesSpec::full(1), Weight::shifted(Weight::blended_disk(), Direction::constant(1.0), 0.4), set, grid, 16);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(shifted.values[i] == doctest::Approx(base.values[i] + 0.4).epsilon(1e-9));
}

TEST_CASE("envelope iterate needs a power of two") {
  const std::vector<double> grid{0.0};
  CHECK_THROWS_AS(envelope_iterate(SeriesSpec::full(1), Weight::fs(1), SampleSet::circle(1.0, 16), grid, 24), Error);
}

TEST_CASE("oracle envelope of the disk weight over the disk") {
  const auto grid = uniform_grid(-3.0, 2.0, 51);
  const auto env = radial_envelope_oracle(Weight::blended_disk(), SampleSet::disk(1.0, 4, 8), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(env.values[i] == doctest::Approx(std::max(0.0, grid[i])).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("oracle leaves a convex profile unchanged") {
  const auto grid = uniform_grid(-3.0, 3.0, 61);
  const auto env = radial_envelope_oracle(Weight::fs(1), SampleSet::sphere(8, 8), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(env.values[i] == doctest::Approx(0.5 * std::log1p(std::exp(2.0 * grid[i]))).epsilon(1e-6));
  }
}

TEST_CASE("oracle over the circle equals the oracle over the disk for the disk weight") {
  const auto grid = uniform_grid(-3.0, 2.0, 51);
  const auto disk = radial_envelope_oracle(Weight::blended_disk(), SampleSet::disk(1.0, 4, 8), grid);
  const auto circle = radial_envelope_oracle(Weight::blended_disk(), SampleSet::circle(1.0, 8), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(circle.values[i] == doctest::Approx(disk.values[i]).epsilon(1e-12));
}

TEST_CASE("oracle rejects non-radial input") {
  const auto grid = uniform_grid(-1.0, 1.0, 5);
  CHECK_THROWS_AS(radial_envelope_oracle(Weight::fs(1), SampleSet::interval(-1.0, 1.0, 9), grid), Error);
}

TEST_CASE("tautological check on the disk weight") {
  const std::vector<int> ks{16};
  const auto rows = tautological_check(Weight::blended_disk(), SampleSet::disk(1.0, 8, 64), ks, 5);
  CHECK(rows[0].relative_gap <= 1e-2);
}

TEST_CASE("tautological check is exact for a self-enveloped weight") {
  const std::vector<int> ks{4, 16};
  for (const auto& row : tautological_check(Weight::fs(1), SampleSet::disk(1.0, 8, 32), ks, 5)) {
    CHECK(row.relative_gap == 0.0);
  }
}

TEST_CASE("tautological check for a flat weight on the circle") {
  const std::vector<int> ks{4, 16};
  for (const auto& row : tautological_check(flat_weight(), SampleSet::circle(1.0, 32), ks, 5)) {
    CHECK(row.relative_gap <= 1e-10);
  }
}
