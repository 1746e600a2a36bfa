#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "linser/geometry.hpp"
#include "linser/norms.hpp"
#include "linser/weights.hpp"

namespace linser {

// Frame-weighted Fubini-Study value: the least norm of a section of unit length at x.
// `infinite` marks the base locus, where no section is nonzero at x.
struct FsValue {
  double value = 0.0;
  bool infinite = false;
};

FsValue fs_hermitian(const GramMatrix& g, const Weight& w, const Point& x);
FsValue fs_hermitian(const OrthoBasis& ob, const Weight& w, const Point& x);

struct ChebyshevResult {
  double value = 0.0;  // LP optimum; the true sup-norm minimum lies in [lower, upper]
  double log_value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int lp_iterations = 0;
  int active_constraints = 0;
  bool real_mode = false;
};

// min sup_K |s| e^{-k phi} over sections with unit length at x, each modulus constraint
// replaced by `facets` half-planes (inscribed polygon). Throws base-locus when no
// section is nonzero at x.
ChebyshevResult fs_sup_chebyshev(const SupNorm& h, const Point& x, int facets = 16);

enum class EnvelopeMode { sup_chebyshev, bm_equivalent };

// Potential samples psi(t) at z = e^t on component 0. Iterates store
// psi_k = phi - (1/k) log fs_k; oracles store the convexified profile.
struct EnvelopeGrid {
  std::vector<double> t;
  std::vector<double> values;
  int degree = 1;
  int k_source = 0;  // 0 for a limiting envelope
  double gap = 0.0;
  std::string mode;
  std::vector<int> iterate_degrees;
  std::vector<std::vector<double>> iterates;
  std::vector<DistortionPoint> distortion;     // bm_equivalent mode only
  std::vector<std::array<double, 2>> support;  // oracle: (slope, intercept) pairs

  bool is_limit() const noexcept { return k_source == 0; }
  // Oracle envelopes only: max over supporting lines.
  double evaluate(double s) const;
};

struct EnvelopeOptions {
  EnvelopeMode mode = EnvelopeMode::sup_chebyshev;
  int facets = 16;
  double monotone_tolerance = 1e-3;
  QuadratureMeasure bm_measure;  // used in bm_equivalent mode
};

EnvelopeGrid envelope_iterate(const SeriesSpec& spec, const Weight& w, const SampleSet& set,
                              std::span<const double> t_grid, int k_max, const EnvelopeOptions& options = {});

// Largest function <= the profile on the K-range that is convex in t with slopes in [0, d].
EnvelopeGrid radial_envelope_oracle(const RadialProfile& profile, RadialRange range);
EnvelopeGrid radial_envelope_oracle(const RadialProfile& profile, RadialRange range,
                                    std::span<const double> eval_grid);
EnvelopeGrid radial_envelope_oracle(const Weight& w, const SampleSet& set, std::span<const double> t_grid);

struct TautologicalRow {
  int k = 0;
  double relative_gap = 0.0;
};

// Compares sup-norms over K for the weight and for its radial envelope on random sections.
std::vector<TautologicalRow> tautological_check(const Weight& w, const SampleSet& set, std::span<const int> k_list,
                                                std::uint64_t seed = 1, int samples = 64);

}  // namespace linser
