#pragma once

#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "linser/geometry.hpp"
#include "linser/series.hpp"
#include "linser/weights.hpp"

namespace linser {

// The monomial basis of W_k, each element pre-multiplied by the Fubini-Study
// normalisation sqrt((D+1) binom(D, a)) so that FS Grams are the identity.
struct SectionBasis {
  SeriesSpec spec;
  int k = 0;
  BasisList basis;
  std::vector<double> scale;

  std::size_t size() const noexcept { return basis.size(); }
};

SectionBasis section_basis(const SeriesSpec& spec, int k);

// Rows of frame-weighted values e_j(x) e^{-k phi(x)} of the scaled basis, one row per point.
Eigen::MatrixXcd evaluation_rows(const SectionBasis& basis, const Weight& w, std::span<const Point> points);

// Raw polynomial coefficients (length k*d+1, or the product analogue) of a section
// given in the scaled basis. Only for series whose basis elements are monomials.
std::vector<cplx> to_raw_coefficients(const SectionBasis& basis, std::span<const cplx> coeffs);

// ||s||^2 = c^H G c for coefficients c in the scaled basis.
struct GramMatrix {
  SectionBasis basis;
  Eigen::MatrixXcd entries;
  double measure_mass = 0.0;

  int k() const noexcept { return basis.k; }
  Eigen::Index dim() const noexcept { return entries.rows(); }
};

GramMatrix gram_matrix(const SeriesSpec& spec, int k, const Weight& w, const QuadratureMeasure& mu);
GramMatrix gram_matrix(const SectionBasis& basis, const Weight& w, const QuadratureMeasure& mu);

struct ConditioningReport {
  double min_pivot = 0.0;
  double max_pivot = 0.0;
  bool jittered = false;
};

// Columns of `coefficients` are an orthonormal basis of (W_k, Hilb) in the scaled basis.
struct OrthoBasis {
  SectionBasis basis;
  Eigen::MatrixXcd coefficients;
  ConditioningReport conditioning;
  double log_det = 0.0;  // log det of the Gram matrix in the scaled basis
  std::vector<int> pivot_order;
};

OrthoBasis orthonormalize(const GramMatrix& g);

struct HilbNorm {
  GramMatrix gram;
};

struct SupNorm {
  SectionBasis basis;
  Weight weight;
  SampleSet set;
  Eigen::MatrixXcd rows;  // evaluation_rows on set.points
};

using NormHandle = std::variant<HilbNorm, SupNorm>;

SupNorm make_sup_norm(const SeriesSpec& spec, int k, const Weight& w, const SampleSet& set);
double sup_norm_eval(const SupNorm& h, std::span<const cplx> coeffs);
double hilb_norm_eval(const HilbNorm& h, std::span<const cplx> coeffs);
double norm_eval(const NormHandle& h, std::span<const cplx> coeffs);

struct DistortionPoint {
  int k = 0;
  double epsilon = 0.0;       // (1/k) log C_k
  double log_constant = 0.0;  // log C_k = (1/2) log sup_K B_k
};

std::vector<DistortionPoint> distortion_profile(const SeriesSpec& spec, std::span<const int> k_list,
                                                const Weight& w, const SampleSet& set,
                                                const QuadratureMeasure& mu);

}  // namespace linser
