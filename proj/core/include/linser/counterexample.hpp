#pragma once

#include <span>
#include <vector>

#include "linser/bergman.hpp"
#include "linser/geometry.hpp"
#include "linser/series.hpp"
#include "linser/weights.hpp"

namespace linser {

enum class AnnulusRole { a_set, c_set };

// inner < |z| < outer, chosen to hold `mass` of the normalized kernel density at `degree`.
struct Annulus {
  double inner = 0.0;
  double outer = 0.0;
  int degree = 0;
  AnnulusRole role = AnnulusRole::a_set;
  double mass = 0.0;
};

// Radially increasing annuli whose roles alternate A, C, A, ... and whose degrees increase.
struct AnnuliPlan {
  std::vector<Annulus> annuli;
  double target = 2.0 / 3.0;
  int requested = 0;
  int n_radial = 0;
  int n_angular = 0;

  bool complete() const noexcept;
  double min_mass() const noexcept;
  std::vector<int> degrees(AnnulusRole role) const;
};

struct AnnuliSearchOptions {
  double inner_radius = 0.5;
  double target = 2.0 / 3.0;
  std::vector<int> candidates{1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256};
  int n_radial = 192;
  int n_angular = 0;  // 0 picks k_budget + 2, enough for exact angular orthogonality
};

// Over all increasing degree sequences from the candidates, picks the one whose
// smallest annulus mass is largest; boundaries sit between quadrature rings.
// An unreachable target is reported through the masses, not raised.
AnnuliPlan find_annuli(const Weight& w, int count, int k_budget, const AnnuliSearchOptions& options = {});

// Mass of `density` on nodes with inner < |z| < outer (any component).
double annulus_mass(const QuadratureMeasure& density, double inner, double outer);

struct Counterexample {
  SeriesSpec spec;
  Weight weight;
  QuadratureMeasure measure;  // (2 + g)/4 and (2 - g)/4 times the disk measure on the two sheets
  QuadratureMeasure disk;     // the disk measure itself
  std::vector<double> g;      // indicator of the A-annuli on the disk nodes
  AnnuliPlan plan;
};

Counterexample build_counterexample(const AnnuliPlan& plan, const Weight& w = Weight::blended_disk());

struct OscillationRow {
  int k = 0;
  double first_sheet_mass = 0.0;  // F(k)
};

struct OscillationReport {
  std::vector<OscillationRow> rows;
  double max_on_a = 0.0;
  double min_on_c = 0.0;
  double amplitude = 0.0;
};

// F(k): normalized kernel mass on the first sheet. Requires k_list to contain every plan degree.
OscillationReport divergence_scan(const Counterexample& built, std::span<const int> k_list);

struct RescueReport {
  std::vector<ScanRow> rows;
  double final_discrepancy = 0.0;
  bool decreasing = false;  // nonincreasing along the list up to 10% slack
};

// Densities pushed to the base sphere against the uniform measure on the unit circle.
RescueReport pushforward_rescue(const Counterexample& built, std::span<const int> k_list, int moment_order = 4);

}  // namespace linser
