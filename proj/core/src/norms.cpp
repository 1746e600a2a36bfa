#include "linser/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "linser/error.hpp"

namespace linser {

namespace {

double log_fs_scale(int top, int index) {
  return 0.5 * (std::log(top + 1.0) + std::lgamma(top + 1.0) - std::lgamma(index + 1.0) -
                std::lgamma(top - index + 1.0));
}

bool on_space(const Point& p, const SpaceModel& space) {
  const bool product = space.structure == Structure::product;
  return p.second.has_value() == product && p.component >= 0 && p.component < space.components;
}

// Frame-weighted evaluation data shared by all basis elements at one point.
struct PointFactors {
  double log_weight = 0.0;  // -k phi + k * sum m log|z - r|
  double divisor_phase = 0.0;
  double log_abs[2] = {0.0, 0.0};
  double arg[2] = {0.0, 0.0};
  bool zero[2] = {false, false};
  bool infinite[2] = {false, false};
};

}  // namespace

SectionBasis section_basis(const SeriesSpec& spec, int k) {
  require(k >= 0, ErrorCode::invalid_argument, "degree must be nonnegative");
  SectionBasis out{spec, k, dims_and_basis(spec, k), {}};
  require(out.basis.size() > 0, ErrorCode::empty_series, "W_k is zero");
  const int shift = k * spec.divisor_degree();
  const int top0 = k * spec.line_degree[0];
  const int top1 = k * spec.line_degree[1];
  out.scale.reserve(out.basis.size());
  for (const auto& e : out.basis.exponents) {
    double log_s = log_fs_scale(top0, e[0] + shift);
    if (spec.rank == 2) log_s += log_fs_scale(top1, e[1]);
    out.scale.push_back(std::exp(log_s));
  }
  return out;
}

Eigen::MatrixXcd evaluation_rows(const SectionBasis& basis, const Weight& w, std::span<const Point> points) {
  const SeriesSpec& spec = basis.spec;
  const int k = basis.k;
  require(w.degree()[0] == spec.line_degree[0] && w.degree()[1] == spec.line_degree[1],
          ErrorCode::invalid_argument, "weight and series live on different bundles");
  const int shift = k * spec.divisor_degree();
  const int top[2] = {k * spec.line_degree[0] - shift, k * spec.line_degree[1]};
  const auto n = static_cast<Eigen::Index>(points.size());
  const auto m = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd rows(n, m);

  std::vector<double> log_scale(basis.size());
  std::transform(basis.scale.begin(), basis.scale.end(), log_scale.begin(), [](double s) { return std::log(s); });

  for (Eigen::Index i = 0; i < n; ++i) {
    const Point& p = points[static_cast<std::size_t>(i)];
    require(on_space(p, spec.space), ErrorCode::invalid_argument, "point is not on the series' space");
    PointFactors f;
    f.log_weight = -k * w.potential(p);
    const Coord coords[2] = {p.first, p.second.value_or(Coord{})};
    const int used = spec.rank == 2 ? 2 : 1;
    for (int c = 0; c < used; ++c) {
      f.infinite[c] = coords[c].at_infinity;
      if (f.infinite[c]) continue;
      f.zero[c] = coords[c].value == cplx{};
      if (!f.zero[c]) {
        f.log_abs[c] = std::log(std::abs(coords[c].value));
        f.arg[c] = std::arg(coords[c].value);
      }
    }
    if (!p.first.at_infinity) {
      for (const auto& r : spec.roots) {
        const cplx diff = p.first.value - r.root;
        f.log_weight += k * r.multiplicity * std::log(std::abs(diff));
        f.divisor_phase += k * r.multiplicity * std::arg(diff);
      }
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& e = basis.basis.exponents[static_cast<std::size_t>(j)];
      double log_abs = log_scale[static_cast<std::size_t>(j)] + f.log_weight;
      double phase = f.divisor_phase;
      bool vanishes = false;
      for (int c = 0; c < used; ++c) {
        const int a = e[static_cast<std::size_t>(c)];
        if (f.infinite[c]) {
          vanishes = vanishes || a != top[c];
        } else if (a > 0) {
          if (f.zero[c]) {
            vanishes = true;
          } else {
            log_abs += a * f.log_abs[c];
            phase += a * f.arg[c];
          }
        }
      }
      rows(i, j) = vanishes ? cplx{} : std::polar(std::exp(log_abs), phase);
    }
  }
  return rows;
}

std::vector<cplx> to_raw_coefficients(const SectionBasis& basis, std::span<const cplx> coeffs) {
  require(coeffs.size() == basis.size(), ErrorCode::invalid_argument, "coefficient count mismatch");
  require(basis.spec.roots.empty(), ErrorCode::unsupported_series, "divisor shifts have no monomial basis");
  const int n1 = basis.k * basis.spec.line_degree[0] + 1;
  const int n2 = basis.k * basis.spec.line_degree[1] + 1;
  std::vector<cplx> raw(static_cast<std::size_t>(n1) * n2);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const auto& e = basis.basis.exponents[j];
    const int b = basis.spec.rank == 2 ? e[1] : 0;
    raw[static_cast<std::size_t>(e[0]) * n2 + b] += basis.scale[j] * coeffs[j];
  }
  return raw;
}

GramMatrix gram_matrix(const SeriesSpec& spec, int k, const Weight& w, const QuadratureMeasure& mu) {
  return gram_matrix(section_basis(spec, k), w, mu);
}

GramMatrix gram_matrix(const SectionBasis& basis, const Weight& w, const QuadratureMeasure& mu) {
  Eigen::MatrixXcd rows = evaluation_rows(basis, w, mu.nodes);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) rows.row(i) *= std::sqrt(mu.weights[static_cast<std::size_t>(i)]);
  Eigen::MatrixXcd g = rows.adjoint() * rows;
  g = 0.5 * (g + g.adjoint()).eval();
  return GramMatrix{basis, std::move(g), mu.total_mass};
}

namespace {

struct Factorization {
  Eigen::MatrixXcd lower;
  std::vector<int> perm;
  double min_pivot = std::numeric_limits<double>::infinity();
  double max_pivot = 0.0;
};

// Diagonally pivoted Cholesky: P^T A P = L L^H. Empty optional on a tiny pivot.
std::optional<Factorization> pivoted_cholesky(Eigen::MatrixXcd a) {
  const Eigen::Index n = a.rows();
  Factorization f;
  f.perm.resize(static_cast<std::size_t>(n));
  std::iota(f.perm.begin(), f.perm.end(), 0);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index p = j;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      if (a(i, i).real() > a(p, p).real()) p = i;
    }
    if (p != j) {
      a.row(j).swap(a.row(p));
      a.col(j).swap(a.col(p));
      std::swap(f.perm[static_cast<std::size_t>(j)], f.perm[static_cast<std::size_t>(p)]);
    }
    const double pivot = a(j, j).real();
    f.max_pivot = std::max(f.max_pivot, pivot);
    if (!(pivot >= 1e-14 * f.max_pivot) || pivot <= 0.0) return std::nullopt;
    f.min_pivot = std::min(f.min_pivot, pivot);
    const double root = std::sqrt(pivot);
    a(j, j) = root;
    const Eigen::Index rest = n - j - 1;
    if (rest > 0) {
      a.col(j).tail(rest) /= root;
      const Eigen::VectorXcd col = a.col(j).tail(rest);
      a.bottomRightCorner(rest, rest).noalias() -= col * col.adjoint();
    }
  }
  f.lower = a.triangularView<Eigen::Lower>();
  return f;
}

}  // namespace

OrthoBasis orthonormalize(const GramMatrix& g) {
  const Eigen::Index n = g.dim();
  require(n > 0, ErrorCode::empty_series, "empty Gram matrix");
  Eigen::VectorXd diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = g.entries(i, i).real();
    if (!(d > 0.0) || !std::isfinite(d)) fail(ErrorCode::degenerate_gram, "Gram matrix has a nonpositive diagonal");
    diag(i) = d;
  }
  const Eigen::VectorXd inv_sqrt = diag.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXcd equilibrated = inv_sqrt.asDiagonal() * g.entries * inv_sqrt.asDiagonal();

  bool jittered = false;
  auto factor = pivoted_cholesky(equilibrated);
  if (!factor) {
    jittered = true;
    const double jitter = 1e-12 * equilibrated.trace().real();
    equilibrated.diagonal().array() += jitter;
    factor = pivoted_cholesky(equilibrated);
    // A pivot of jitter size comes from the jitter itself: the matrix is singular.
    if (!factor || factor->min_pivot <= 10.0 * jitter) {
      fail(ErrorCode::degenerate_gram, "Gram matrix is singular after jitter");
    }
  }

  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd upper_inv = factor->lower.adjoint().triangularView<Eigen::Upper>().solve(identity);
  Eigen::MatrixXcd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int row = factor->perm[static_cast<std::size_t>(i)];
    c.row(row) = inv_sqrt(row) * upper_inv.row(i);
  }

  OrthoBasis out;
  out.basis = g.basis;
  out.coefficients = std::move(c);
  out.conditioning = {factor->min_pivot, factor->max_pivot, jittered};
  out.pivot_order = factor->perm;
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) log_det += 2.0 * std::log(factor->lower(i, i).real()) + std::log(diag(i));
  out.log_det = log_det;
  return out;
}

SupNorm make_sup_norm(const SeriesSpec& spec, int k, const Weight& w, const SampleSet& set) {
  require(!set.points.empty(), ErrorCode::invalid_argument, "sample set is empty");
  SectionBasis basis = section_basis(spec, k);
  Eigen::MatrixXcd rows = evaluation_rows(basis, w, set.points);
  return SupNorm{std::move(basis), w, set, std::move(rows)};
}

double sup_norm_eval(const SupNorm& h, std::span<const cplx> coeffs) {
  require(coeffs.size() == h.basis.size(), ErrorCode::invalid_argument, "coefficient count mismatch");
  const Eigen::Map<const Eigen::VectorXcd> c(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  return (h.rows * c).cwiseAbs().maxCoeff();
}

double hilb_norm_eval(const HilbNorm& h, std::span<const cplx> coeffs) {
  require(static_cast<Eigen::Index>(coeffs.size()) == h.gram.dim(), ErrorCode::invalid_argument,
          "coefficient count mismatch");
  const Eigen::Map<const Eigen::VectorXcd> c(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  const double sq = c.dot(h.gram.entries * c).real();
  return std::sqrt(std::max(sq, 0.0));
}

double norm_eval(const NormHandle& h, std::span<const cplx> coeffs) {
  if (const auto* hilb = std::get_if<HilbNorm>(&h)) return hilb_norm_eval(*hilb, coeffs);
  return sup_norm_eval(std::get<SupNorm>(h), coeffs);
}

std::vector<DistortionPoint> distortion_profile(const SeriesSpec& spec, std::span<const int> k_list,
                                                const Weight& w, const SampleSet& set,
                                                const QuadratureMeasure& mu) {
  std::vector<DistortionPoint> out;
  out.reserve(k_list.size());
  for (int k : k_list) {
    require(k >= 1, ErrorCode::invalid_argument, "distortion needs k >= 1");
    const SectionBasis basis = section_basis(spec, k);
    const OrthoBasis ob = orthonormalize(gram_matrix(basis, w, mu));
    const Eigen::MatrixXcd values = evaluation_rows(basis, w, set.points) * ob.coefficients;
    const double sup = values.rowwise().squaredNorm().maxCoeff();
    const double log_c = 0.5 * std::log(sup);
    out.push_back({k, log_c / k, log_c});
  }
  return out;
}

}  // namespace linser
