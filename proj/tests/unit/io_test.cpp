#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "linser/io.hpp"

using namespace linser;
using io::Json;

namespace {

const std::vector<Point> probes{Point::at({0.3, -0.2}), Point::at({-1.7, 0.4}), Point::at({2.0, 2.0}),
                                Point::infinity()};

}  // namespace

TEST_CASE("series specs survive a JSON round trip") {
  const std::vector<SeriesSpec> specs{
      SeriesSpec::full(3),
      SeriesSpec::full_product(2, 1),
      SeriesSpec::even_degree(),
      SeriesSpec::monomial(2, {{1, {0, 0}}, {1, {1, 0}}, {2, {1, 2}}}, {1, 1}, true),
      SeriesSpec::pullback(SeriesSpec::full(1), SpaceModel::disjoint_union(3)),
      SeriesSpec::divisor_shift(SeriesSpec::full(2), {{cplx{0.5, -0.25}, 2}}),
      SeriesSpec::sym_power(SeriesSpec::full(1), 3),
  };
  for (const auto& spec : specs) {
    const Json j = io::to_json(spec);
    const SeriesSpec back = io::series_from_json(Json::parse(j.dump()));
    CHECK(io::to_json(back) == j);
    for (int k : {1, 2, 5}) CHECK(section_basis(back, k).size() == section_basis(spec, k).size());
  }
}

TEST_CASE("weights survive a JSON round trip with identical potentials") {
  const Weight fs_product = Weight::pullback_first(Weight::fs(1));
  const std::vector<Weight> weights{
      Weight::fs(2),
      Weight::blended_disk(),
      Weight::radial(RadialProfile{{-1.0, 0.0, 1.0}, {0.0, 0.1, 1.1}, 1}),
      Weight::shifted(Weight::fs(1), Direction::radial_bump(0.2, 0.5, -0.3), 0.7),
      Weight::shifted(Weight::blended_disk(), Direction::fs_bump(2.0), -0.4),
      Weight::per_component({Weight::fs(1), Weight::blended_disk()}),
      fiber_sup_weight(Weight::shifted(fs_product, Direction::fiber_sign(Direction::constant(1.0)), 0.5), 16),
  };
  for (const auto& w : weights) {
    const Json j = io::to_json(w);
    const Weight back = io::weight_from_json(Json::parse(j.dump()));
    CHECK(io::to_json(back) == j);
    for (Point p : probes) {
      if (std::holds_alternative<weight_model::PerComponent>(w.model())) p.component = 1;
      CHECK(back.potential(p) == w.potential(p));
    }
  }
}

TEST_CASE("directions survive a JSON round trip") {
  const std::vector<Direction> directions{
      Direction::constant(-2.5), Direction::component_indicator(1), Direction::radial_bump(0.0, 1.0, 0.5),
      Direction::fs_bump(1.5), Direction::fiber_sign(Direction::radial_bump(0.3, 0.2, 1.0))};
  for (const auto& d : directions) {
    const Json j = io::to_json(d);
    CHECK(io::to_json(io::direction_from_json(j)) == j);
  }
}

TEST_CASE("measures read from JSON match the direct constructions") {
  const auto disk = io::measure_from_json(Json{{"kind", "disk"}, {"n_radial", 12}, {"n_angular", 10}});
  const auto direct = disk_quadrature(1.0, 12, 10);
  CHECK(disk.weights == direct.weights);
  CHECK(disk.total_mass == direct.total_mass);

  const Json union_json{{"kind", "union"},
                        {"components", 2},
                        {"parts",
                         {{{"component", 0}, {"measure", {{"kind", "circle"}, {"n", 16}}}},
                          {{"component", 1}, {"scale", 2.0}, {"measure", {{"kind", "circle"}, {"n", 16}}}}}}};
  const auto split = io::measure_from_json(union_json);
  CHECK(split.components == 2);
  CHECK(split.total_mass == doctest::Approx(3.0 * circle_quadrature(1.0, 16).total_mass));
}

TEST_CASE("sample sets read from JSON") {
  const auto set = io::set_from_json(Json{{"kind", "annulus"}, {"inner", 0.5}, {"outer", 2.0}, {"n_radial", 4}, {"n_angular", 8}});
  const auto range = set.radial_range();
  REQUIRE(range.has_value());
  CHECK(range->lo == doctest::Approx(std::log(0.5)));
  CHECK(range->hi == doctest::Approx(std::log(2.0)));
}

TEST_CASE("schema violations raise schema errors") {
  CHECK_THROWS_AS(io::series_from_json(Json{{"degree", 2}}), io::SchemaError);
  CHECK_THROWS_AS(io::series_from_json(Json{{"kind", "nonsense"}}), io::SchemaError);
  CHECK_THROWS_AS(io::weight_from_json(Json{{"kind", "fs"}, {"degree", "two"}}), io::SchemaError);
  CHECK_THROWS_AS(io::weight_from_json(Json::array({1, 2})), io::SchemaError);
  CHECK_THROWS_AS(io::direction_from_json(Json{{"kind", "constant"}}), io::SchemaError);
  CHECK_THROWS_AS(io::set_from_json(Json{{"kind", "disk"}, {"n_radial", 4}}), io::SchemaError);
  CHECK_THROWS_AS(io::measure_from_json(Json{{"kind", "sphere"}, {"n_polar", 4}}), io::SchemaError);
  CHECK_THROWS_AS(io::weight_from_json(Json{{"kind", "fiber_inf"}, {"base", {{"kind", "fs"}}}, {"fiber", {"zero"}}}),
                  io::SchemaError);
}

TEST_CASE("formatted numbers read back exactly") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 2000; ++i) {
    double x = std::bit_cast<double>(bits(rng));
    if (!std::isfinite(x)) continue;
    CHECK(std::stod(io::format_number(x)) == x);
  }
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(io::format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(io::format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("CSV tables have a header and one line per row") {
  std::ostringstream os;
  io::write_csv(os, {{"k", "value"}, {{1.0, 0.5}, {2.0, -0.25}}});
  CHECK(os.str() == "k,value\n1,0.5\n2,-0.25\n");
}
