#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "linser/geometry.hpp"

namespace linser {

using Exponent = std::array<int, 2>;  // second entry unused for rank-1 series

// A graded element (k, a) of the exponent semigroup, with k >= 1.
struct Generator {
  int degree = 1;
  Exponent exponent{0, 0};
  bool operator==(const Generator&) const = default;
};

struct DivisorRoot {
  cplx root;
  int multiplicity = 1;
  bool operator==(const DivisorRoot&) const = default;
};

enum class SeriesVariant { full, monomial, pullback, even_degree, divisor_shift, sym_power };

// A graded linear series given by an explicit monomial rule per degree.
struct SeriesSpec {
  SeriesVariant variant = SeriesVariant::full;
  SpaceModel space;
  std::array<int, 2> line_degree{1, 0};
  int rank = 1;  // length of exponent vectors

  std::vector<Generator> generators;  // monomial
  bool saturated = false;             // monomial: use the real cone of the generators

  std::shared_ptr<const SeriesSpec> base;  // pullback, divisor_shift, sym_power
  std::vector<DivisorRoot> roots;          // divisor_shift
  int power = 1;                           // sym_power

  static SeriesSpec full(int degree = 1);
  static SeriesSpec full_product(int first_degree, int second_degree);
  static SeriesSpec even_degree();
  static SeriesSpec monomial(int rank, std::vector<Generator> generators, std::array<int, 2> line_degree,
                             bool saturated = false);
  static SeriesSpec pullback(const SeriesSpec& base, const SpaceModel& target);
  static SeriesSpec divisor_shift(const SeriesSpec& base, std::vector<DivisorRoot> roots);
  static SeriesSpec sym_power(const SeriesSpec& base, int m);

  // Degree of D for divisor shifts, 0 otherwise.
  int divisor_degree() const;
  bool is_monomial_type() const;
};

struct BasisList {
  int k = 0;
  int rank = 1;
  std::vector<Exponent> exponents;  // lexicographic
  std::size_t size() const noexcept { return exponents.size(); }
};

struct GrowthFit {
  int kappa = 0;
  double vol = 0.0;
  int window_lo = 0;
  int window_hi = 0;
  double slope = 0.0;
  double residual = 0.0;
};

struct SemigroupAnalysis {
  int hull_dimension = 0;
  int lattice_rank = 0;
  double body_volume = 0.0;        // Euclidean volume in the hull's affine span
  double normalized_volume = 0.0;  // kappa! * body_volume / generic_degree
  std::vector<std::array<double, 2>> hull_vertices;
  std::optional<SeriesSpec> saturation;
  std::int64_t generic_degree = 1;
  std::int64_t preimage_count = -1;  // -1 when the oracle does not apply
};

bool contains(const SeriesSpec& spec, int k, const Exponent& e);
BasisList dims_and_basis(const SeriesSpec& spec, int k);
// Bases for all degrees 0..k_max (shares the semigroup recursion).
std::vector<BasisList> basis_table(const SeriesSpec& spec, int k_max);
std::vector<std::int64_t> dimension_table(const SeriesSpec& spec, int k_max);

GrowthFit fit_growth(const SeriesSpec& spec, int k_max);
SemigroupAnalysis okounkov_body(const SeriesSpec& spec, int k_max);
SemigroupAnalysis monomial_closure_and_degree(const SeriesSpec& spec, std::uint64_t seed = 1, int reference_k = 48);
FiberDegree fiber_degree(const SeriesSpec& spec);

// Index of the Z-span of `vectors` inside its saturation (gcd of maximal minors).
struct LatticeIndex {
  int rank = 0;
  std::int64_t index = 1;
};
LatticeIndex lattice_index(const std::vector<std::array<std::int64_t, 2>>& vectors);

// Saturated rank-1 cone series k*lo <= a <= k*hi, slopes rounded inward to rationals.
SeriesSpec slope_range_series(double lo_slope, double hi_slope, int line_degree, int max_denominator = 1000);

}  // namespace linser
