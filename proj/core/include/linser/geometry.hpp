#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace linser {

using cplx = std::complex<double>;

enum class Structure { single_sphere, disjoint_union, product };

// Base map rho: X -> Z. Only collapse (unions) and first_projection (products)
// lead somewhere other than X itself.
enum class BaseMap { none, identity, collapse, first_projection };

struct SpaceModel {
  Structure structure = Structure::single_sphere;
  int components = 1;
  BaseMap base_map = BaseMap::none;

  static SpaceModel sphere();
  static SpaceModel disjoint_union(int components);
  static SpaceModel product();

  SpaceModel with_base_map(BaseMap map) const;
  int coordinates() const noexcept { return structure == Structure::product ? 2 : 1; }
  void validate() const;

  bool operator==(const SpaceModel&) const = default;
};

// One affine-chart coordinate of a sphere, or the point at infinity.
struct Coord {
  cplx value{};
  bool at_infinity = false;

  static Coord infinity() { return Coord{cplx{}, true}; }
  bool operator==(const Coord&) const = default;
};

struct Point {
  int component = 0;
  Coord first;
  std::optional<Coord> second;  // present on product spaces

  static Point at(cplx z, int component = 0) { return Point{component, Coord{z, false}, std::nullopt}; }
  static Point infinity(int component = 0) { return Point{component, Coord::infinity(), std::nullopt}; }
  static Point pair(Coord a, Coord b) { return Point{0, a, b}; }

  bool operator==(const Point&) const = default;
};

enum class SetKind { circle, disk, annulus, interval, sphere, union_of, custom };

struct SetDescriptor {
  SetKind kind = SetKind::custom;
  double inner = 0.0;  // annulus inner radius; interval lower end
  double outer = 0.0;  // circle/disk/annulus outer radius; interval upper end
  int n_radial = 0;
  int n_angular = 0;
};

// Region in t = log|z| on which a radial compact set lives.
struct RadialRange {
  double lo;
  double hi;
};

// A compact set K represented by a finite sample cloud.
struct SampleSet {
  std::vector<Point> points;
  SetDescriptor descriptor;
  int refinement = 0;

  static SampleSet circle(double radius, int n, int refinement = 0);
  // Equispaced radii 0, R/n_r, ..., R times n_theta angles (center counted once).
  static SampleSet disk(double radius, int n_radial, int n_angular, int refinement = 0);
  static SampleSet annulus(double inner, double outer, int n_radial, int n_angular, int refinement = 0);
  // Real segment [lo, hi] on the chart.
  static SampleSet interval(double lo, double hi, int n, int refinement = 0);
  // Whole sphere: latitude circles plus both poles (0 and infinity).
  static SampleSet sphere(int n_polar, int n_azimuth, int refinement = 0);
  // Copies of a single-sphere set on each of `components` sheets.
  static SampleSet on_components(const SampleSet& base, int components);
  static SampleSet custom(std::vector<Point> points);

  // The same descriptor at the next refinement level (nested grid).
  SampleSet refined() const;
  std::optional<RadialRange> radial_range() const;
};

struct QuadratureMeasure {
  std::vector<Point> nodes;
  std::vector<double> weights;
  double total_mass = 0.0;
  std::string descriptor;
  int components = 1;
  bool product = false;

  static QuadratureMeasure make(std::vector<Point> nodes, std::vector<double> weights,
                                std::string descriptor, int components = 1, bool product = false);
  QuadratureMeasure scaled(double factor) const;
  std::size_t size() const noexcept { return nodes.size(); }
};

struct FiberDegree {
  double value = 1.0;
};

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

QuadratureMeasure circle_quadrature(double radius, int n);
// Normalized Lebesgue measure on the disk |z| <= radius.
QuadratureMeasure disk_quadrature(double radius, int n_radial, int n_angular);
// Normalized Fubini-Study area on the sphere (uniform in cos of the polar angle).
QuadratureMeasure sphere_quadrature(int n_polar, int n_azimuth);
QuadratureMeasure product_measure(const QuadratureMeasure& first, const QuadratureMeasure& second);
// Place a single-sphere measure on one sheet of a `components`-sheet union.
QuadratureMeasure on_component(const QuadratureMeasure& base, int component, int components);
// Disjoint sum of measures living on the same space.
QuadratureMeasure combine(const std::vector<QuadratureMeasure>& parts);

QuadratureMeasure pushforward_measure(const QuadratureMeasure& mu, const SpaceModel& space);

// Bounded chart map used for moments: identity on the unit disk, z/|z|^2 outside,
// 0 at infinity.
cplx compactify(const Coord& c);

double weak_discrepancy(const QuadratureMeasure& a, const QuadratureMeasure& b, int max_order);

// Neumaier-compensated accumulation with a fixed order.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

}  // namespace linser
