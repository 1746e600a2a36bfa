#include <doctest.h>

#include <Eigen/QR>
#include <random>

#include "linser/bergman.hpp"
#include "linser/error.hpp"

using namespace linser;

namespace {

KernelEval kernel(const SeriesSpec& spec, int k, const Weight& w, const QuadratureMeasure& mu,
                  std::span<const Point> points) {
  return kernel_diagonal(orthonormalize(gram_matrix(spec, k, w, mu)), w, points);
}

std::vector<Point> probes() {
  return {Point::at(0.0), Point::at({0.3, 0.4}), Point::at(0.95), Point::at({-2.0, 1.0}), Point::infinity()};
}

}  // namespace

TEST_CASE("FS kernel on the FS area form is constant") {
  const auto pts = probes();
  for (int k : {1, 4, 16}) {
    const auto ke = kernel(SeriesSpec::full(1), k, Weight::fs(1), sphere_quadrature(48, 40), pts);
    for (double v : ke.values) CHECK(v == doctest::Approx(k + 1.0).epsilon(1e-10));
  }
}

TEST_CASE("degree-zero kernel is the inverse measure mass") {
  const auto pts = probes();
  const auto mu = disk_quadrature(1.0, 6, 8).scaled(3.0);
  const auto ke = kernel(SeriesSpec::full(1), 0, Weight::blended_disk(), mu, pts);
  for (double v : ke.values) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("even-degree kernel is dominated by the full kernel") {
  const auto mu = disk_quadrature(1.0, 40, 48);
  const auto pts = probes();
  for (int k : {4, 9, 20}) {
    const auto even = kernel(SeriesSpec::even_degree(), k, Weight::blended_disk(), mu, pts);
    const auto full = kernel(SeriesSpec::full(1), k, Weight::blended_disk(), mu, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(even.values[i] <= full.values[i] * (1.0 + 1e-12));
  }
}

TEST_CASE("density mass of the full series is (k+1)/k") {
  const auto mu = disk_quadrature(1.0, 40, 48);
  for (int k : {4, 16, 32}) {
    const auto ke = kernel(SeriesSpec::full(1), k, Weight::blended_disk(), mu, mu.nodes);
    CHECK(density_measure(ke, mu, 1).mass == doctest::Approx((k + 1.0) / k).epsilon(1e-10));
  }
}

TEST_CASE("density mass of the even-degree series tends to one half") {
  const auto mu = disk_quadrature(1.0, 70, 68);
  double previous_gap = 1.0;
  for (int k : {8, 32, 64}) {
    const auto ke = kernel(SeriesSpec::even_degree(), k, Weight::fs(1), mu, mu.nodes);
    const double mass = density_measure(ke, mu, 1).mass;
    CHECK(mass == doctest::Approx((k / 2 + 1.0) / k).epsilon(1e-10));
    CHECK(std::abs(mass - 0.5) < previous_gap);
    previous_gap = std::abs(mass - 0.5);
  }
}

TEST_CASE("density mass on two sheets with split measures tends to one") {
  const auto disk = disk_quadrature(1.0, 40, 48);
  const auto split = combine({on_component(disk.scaled(0.5), 0, 2), on_component(disk.scaled(0.5), 1, 2)});
  const auto spec = SeriesSpec::pullback(SeriesSpec::full(1), SpaceModel::disjoint_union(2));
  const Weight w = Weight::per_component({Weight::blended_disk(), Weight::blended_disk()});
  for (int k : {8, 32}) {
    const auto ke = kernel(spec, k, w, split, split.nodes);
    CHECK(density_measure(ke, split, 1).mass == doctest::Approx((k + 1.0) / k).epsilon(1e-10));
  }
}

TEST_CASE("density needs the kernel on the measure nodes") {
  const auto mu = disk_quadrature(1.0, 6, 8);
  const auto pts = probes();
  const auto ke = kernel(SeriesSpec::full(1), 3, Weight::fs(1), mu, pts);
  CHECK_THROWS_AS(density_measure(ke, mu, 1), Error);
}

TEST_CASE("FS scan against its own area form has no discrepancy") {
  const auto mu = sphere_quadrature(48, 40);
  const std::vector<int> ks{4, 8, 16};
  for (const auto& row : convergence_scan(SeriesSpec::full(1), Weight::fs(1), mu, ks, mu)) {
    CHECK(row.discrepancy <= 1e-6);
  }
}

TEST_CASE("disk scan approaches the circle") {
  const std::vector<int> ks{16, 32, 64};
  const auto rows = convergence_scan(SeriesSpec::full(1), Weight::blended_disk(), disk_quadrature(1.0, 130, 132), ks,
                                     circle_quadrature(1.0, 64));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].discrepancy <= rows[0].discrepancy);
  CHECK(rows[2].discrepancy <= rows[1].discrepancy);
  CHECK(rows[2].discrepancy <= 0.1);
  for (const auto& r : rows) CHECK(r.runtime_ms == 0.0);
}

TEST_CASE("kernel is independent of the orthonormal basis") {
  const auto mu = disk_quadrature(1.0, 30, 36);
  const auto pts = probes();
  const auto ob = orthonormalize(gram_matrix(SeriesSpec::full(1), 12, Weight::blended_disk(), mu));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  const Eigen::Index n = ob.coefficients.cols();
  Eigen::MatrixXcd z(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) z(i, j) = {normal(rng), normal(rng)};
  const Eigen::MatrixXcd unitary = Eigen::HouseholderQR<Eigen::MatrixXcd>(z).householderQ();
  OrthoBasis remixed = ob;
  remixed.coefficients = ob.coefficients * unitary;
  const auto a = kernel_diagonal(ob, Weight::blended_disk(), pts);
  const auto b = kernel_diagonal(remixed, Weight::blended_disk(), pts);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(b.values[i] == doctest::Approx(a.values[i]).epsilon(1e-8));
}

TEST_CASE("scaling the measure scales the kernel inversely") {
  const auto mu = disk_quadrature(1.0, 30, 36);
  const auto pts = probes();
  const auto a = kernel(SeriesSpec::full(1), 10, Weight::fs(1), mu, pts);
  const auto b = kernel(SeriesSpec::full(1), 10, Weight::fs(1), mu.scaled(4.0), pts);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(b.values[i] * 4.0 - a.values[i]) <= 1e-12 * a.values[i]);
}
