#include "linser/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <unordered_set>

#include "linser/error.hpp"
#include "linser/lp.hpp"

namespace linser {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

FsValue fs_from_kernel(double kernel) {
  if (!(kernel > 0.0)) return {inf, true};
  return {1.0 / std::sqrt(kernel), false};
}

bool conjugation_symmetric(const SupNorm& h, const Point& x) {
  const SeriesSpec& spec = h.basis.spec;
  if (spec.space.structure != Structure::single_sphere) return false;
  for (const auto& r : spec.roots) {
    if (r.root.imag() != 0.0) return false;
  }
  if (!x.first.at_infinity && x.first.value.imag() != 0.0) return false;
  switch (h.set.descriptor.kind) {
    case SetKind::circle:
    case SetKind::disk:
    case SetKind::annulus:
    case SetKind::interval:
    case SetKind::sphere:
      break;
    default:
      return false;
  }
  return is_radial(h.weight);
}

// Lower convex hull of points sorted by t.
std::vector<std::array<double, 2>> lower_hull(const std::vector<std::array<double, 2>>& pts) {
  std::vector<std::array<double, 2>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(p);
  }
  return hull;
}

}  // namespace

FsValue fs_hermitian(const GramMatrix& g, const Weight& w, const Point& x) {
  return fs_hermitian(orthonormalize(g), w, x);
}

FsValue fs_hermitian(const OrthoBasis& ob, const Weight& w, const Point& x) {
  const Eigen::RowVectorXcd values = evaluation_rows(ob.basis, w, std::span<const Point>(&x, 1)) * ob.coefficients;
  return fs_from_kernel(values.squaredNorm());
}

ChebyshevResult fs_sup_chebyshev(const SupNorm& h, const Point& x, int facets) {
  require(facets >= 8, ErrorCode::invalid_argument, "Chebyshev LP needs at least 8 facets");
  const Eigen::RowVectorXcd at_x = evaluation_rows(h.basis, h.weight, std::span<const Point>(&x, 1));
  if (!(at_x.cwiseAbs().maxCoeff() > 0.0)) fail(ErrorCode::base_locus, "no section is nonzero at the point");

  const bool real_mode = conjugation_symmetric(h, x);
  std::vector<Eigen::Index> nodes;
  for (Eigen::Index i = 0; i < h.rows.rows(); ++i) {
    const Point& p = h.set.points[static_cast<std::size_t>(i)];
    if (real_mode && !p.first.at_infinity && p.first.value.imag() < 0.0) continue;
    nodes.push_back(i);
  }
  const Eigen::Index m = h.rows.cols();
  const auto n_nodes = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXcd values(n_nodes, m);
  for (Eigen::Index i = 0; i < n_nodes; ++i) values.row(i) = h.rows.row(nodes[static_cast<std::size_t>(i)]);

  // Equilibrate the coefficient variables, then normalise the interpolation row.
  Eigen::VectorXd column_scale = values.cwiseAbs().colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!(column_scale(j) > 0.0)) column_scale(j) = 1.0;
  }
  values = values * column_scale.cwiseInverse().asDiagonal();
  Eigen::RowVectorXcd target = at_x * column_scale.cwiseInverse().asDiagonal();
  const double rho = target.cwiseAbs().maxCoeff();
  target /= rho;

  const Eigen::Index vars = real_mode ? m : 2 * m;
  Eigen::MatrixXd equality(real_mode ? 1 : 2, vars);
  Eigen::VectorXd rhs(real_mode ? 1 : 2);
  if (real_mode) {
    equality.row(0) = target.real();
    rhs << 1.0;
  } else {
    equality.row(0) << target.real(), -target.imag();
    equality.row(1) << target.imag(), target.real();
    rhs << 1.0, 0.0;
  }
  MinimaxLp lp(equality, rhs);

  const double widen = 1.0 / std::cos(std::numbers::pi / facets);
  const double step = 2.0 * std::numbers::pi / facets;
  Eigen::VectorXd row(vars);
  std::unordered_set<std::int64_t> active;
  const auto add = [&](Eigen::Index node, int facet) {
    if (!active.insert(static_cast<std::int64_t>(node) * facets + facet).second) return false;
    const double c = std::cos(step * facet) * widen;
    const double s = std::sin(step * facet) * widen;
    const Eigen::RowVectorXd re = values.row(node).real();
    const Eigen::RowVectorXd im = values.row(node).imag();
    if (real_mode) {
      row = (c * re + s * im).transpose();
    } else {
      row.head(m) = (c * re + s * im).transpose();
      row.tail(m) = (s * re - c * im).transpose();
    }
    lp.add_constraint(row);
    return true;
  };

  // Seed with well-conditioned nodes (pivoted QR on the real functionals, as for
  // approximate Fekete points) so the first LP is bounded, plus a strided sweep.
  Eigen::MatrixXd functionals(vars, 2 * n_nodes);
  for (Eigen::Index i = 0; i < n_nodes; ++i) {
    const Eigen::RowVectorXd re = values.row(i).real();
    const Eigen::RowVectorXd im = values.row(i).imag();
    if (real_mode) {
      functionals.col(2 * i) = re.transpose();
      functionals.col(2 * i + 1) = im.transpose();
    } else {
      functionals.col(2 * i) << re.transpose(), -im.transpose();
      functionals.col(2 * i + 1) << im.transpose(), re.transpose();
    }
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(functionals);
  const Eigen::Index picks = std::min<Eigen::Index>(qr.rank(), vars);
  const int quarter = std::max(1, facets / 4);
  for (Eigen::Index i = 0; i < picks; ++i) {
    const Eigen::Index node = qr.colsPermutation().indices()(i) / 2;
    for (int f = 0; f < facets; f += quarter) add(node, f);
  }
  const Eigen::Index initial = std::min<Eigen::Index>(n_nodes, 2 * vars + 8);
  for (Eigen::Index i = 0; i < initial; ++i) {
    const Eigen::Index node = i * n_nodes / initial;
    for (int f = 0; f < facets; f += quarter) add(node, f);
  }

  double t = 0.0;
  Eigen::VectorXcd coeffs(m);
  while (true) {
    const LpStatus status = lp.solve();
    if (status == LpStatus::infeasible) fail(ErrorCode::base_locus, "interpolation constraint is infeasible");
    if (status != LpStatus::optimal) {
      fail(ErrorCode::internal_error, status == LpStatus::unbounded ? "Chebyshev LP reported an unbounded ray"
                                                                    : "Chebyshev LP hit its iteration limit");
    }
    t = lp.value();
    const Eigen::VectorXd& u = lp.solution();
    if (real_mode) {
      coeffs = u.cast<cplx>();
    } else {
      coeffs.real() = u.head(m);
      coeffs.imag() = u.tail(m);
    }
    const Eigen::VectorXcd v = values * coeffs;
    std::vector<std::pair<double, Eigen::Index>> violated;
    const double tolerance = 1e-10 * std::max(std::abs(t), 1e-300);
    for (Eigen::Index i = 0; i < n_nodes; ++i) {
      const double modulus = std::abs(v(i));
      if (modulus * widen <= t + tolerance) continue;
      const double angle = std::arg(v(i));
      int facet = static_cast<int>(std::lround(angle / step));
      facet = ((facet % facets) + facets) % facets;
      const double reach = modulus * std::cos(angle - step * facet) * widen;
      if (reach > t + tolerance) violated.emplace_back(reach - t, i * facets + facet);
    }
    if (violated.empty()) break;
    std::sort(violated.begin(), violated.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t budget = static_cast<std::size_t>(std::max<Eigen::Index>(8, vars));
    bool added = false;
    for (std::size_t i = 0; i < violated.size() && i < budget; ++i) {
      const auto key = violated[i].second;
      added = add(key / facets, static_cast<int>(key % facets)) || added;
    }
    if (!added) break;
  }

  ChebyshevResult out;
  out.real_mode = real_mode;
  out.log_value = std::log(t) - std::log(rho);
  out.value = std::exp(out.log_value);
  out.upper = out.value;
  out.lower = out.value / widen;
  out.lp_iterations = lp.iterations();
  out.active_constraints = static_cast<int>(lp.constraint_count());
  return out;
}

double EnvelopeGrid::evaluate(double s) const {
  require(!support.empty(), ErrorCode::invalid_argument, "envelope has no supporting lines");
  double best = -inf;
  for (const auto& line : support) {
    const double v = std::isinf(s) ? (line[0] == 0.0 ? line[1] : line[0] * s) : line[1] + line[0] * s;
    best = std::max(best, v);
  }
  return best;
}

EnvelopeGrid envelope_iterate(const SeriesSpec& spec, const Weight& w, const SampleSet& set,
                              std::span<const double> t_grid, int k_max, const EnvelopeOptions& options) {
  require(k_max >= 8 && (k_max & (k_max - 1)) == 0, ErrorCode::invalid_argument,
          "k_max must be a power of two >= 8");
  require(!t_grid.empty(), ErrorCode::invalid_argument, "envelope grid is empty");
  const bool bm = options.mode == EnvelopeMode::bm_equivalent;
  if (bm) require(options.bm_measure.size() > 0, ErrorCode::invalid_argument, "BM mode needs a measure");

  EnvelopeGrid out;
  out.t.assign(t_grid.begin(), t_grid.end());
  out.degree = w.degree()[0];
  out.mode = bm ? "BM-equivalent mode" : "sup-chebyshev";

  std::vector<Point> points;
  std::vector<double> phi;
  for (double t : t_grid) {
    points.push_back(Point::at(cplx{std::exp(t), 0.0}));
    phi.push_back(w.potential(points.back()));
  }

  std::vector<int> degrees;
  for (int k = 8; k <= k_max; k *= 2) degrees.push_back(k);
  for (int k : degrees) {
    std::vector<double> psi(t_grid.size());
    if (bm) {
      const SectionBasis basis = section_basis(spec, k);
      const OrthoBasis ob = orthonormalize(gram_matrix(basis, w, options.bm_measure));
      const Eigen::MatrixXcd values = evaluation_rows(basis, w, points) * ob.coefficients;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const FsValue fs = fs_from_kernel(values.row(static_cast<Eigen::Index>(i)).squaredNorm());
        if (fs.infinite) fail(ErrorCode::base_locus, "envelope grid point lies in the base locus");
        psi[i] = phi[i] - std::log(fs.value) / k;
      }
    } else {
      const SupNorm h = make_sup_norm(spec, k, w, set);
      for (std::size_t i = 0; i < points.size(); ++i) {
        psi[i] = phi[i] - fs_sup_chebyshev(h, points[i], options.facets).log_value / k;
      }
    }
    if (!out.iterates.empty()) {
      const auto& prev = out.iterates.back();
      double gap = 0.0;
      for (std::size_t i = 0; i < psi.size(); ++i) {
        if (psi[i] < prev[i] - options.monotone_tolerance) {
          fail(ErrorCode::discretization_failure, "envelope iterates are not monotone; refine the sample set");
        }
        gap = std::max(gap, std::abs(psi[i] - prev[i]));
      }
      out.gap = gap;
    }
    out.iterate_degrees.push_back(k);
    out.iterates.push_back(std::move(psi));
  }
  if (bm) out.distortion = distortion_profile(spec, degrees, w, set, options.bm_measure);
  out.values = out.iterates.back();
  out.k_source = degrees.back();
  return out;
}

EnvelopeGrid radial_envelope_oracle(const RadialProfile& profile, RadialRange range) {
  return radial_envelope_oracle(profile, range, profile.t);
}

EnvelopeGrid radial_envelope_oracle(const RadialProfile& profile, RadialRange range,
                                    std::span<const double> eval_grid) {
  require(range.lo <= range.hi, ErrorCode::invalid_argument, "empty radial range");
  require(profile.t.size() >= 2, ErrorCode::invalid_argument, "profile needs two samples");
  std::vector<std::array<double, 2>> data;
  const auto include_end = [&](double s) {
    if (std::isfinite(s)) data.push_back({s, profile(s)});
  };
  include_end(range.lo);
  for (std::size_t i = 0; i < profile.t.size(); ++i) {
    if (profile.t[i] > range.lo && profile.t[i] < range.hi) data.push_back({profile.t[i], profile.values[i]});
  }
  if (range.hi > range.lo) include_end(range.hi);
  if (std::isinf(range.lo) && (data.empty() || data.front()[0] > profile.t.front())) {
    // The profile is constant left of its grid, so its first sample stands for the whole tail.
    if (profile.t.front() < range.hi) data.insert(data.begin(), {profile.t.front(), profile.values.front()});
  }
  require(!data.empty(), ErrorCode::invalid_argument, "no profile samples inside the radial range");
  std::sort(data.begin(), data.end());
  data.erase(std::unique(data.begin(), data.end(),
                         [](const auto& a, const auto& b) { return a[0] == b[0]; }),
             data.end());

  const auto hull = lower_hull(data);
  const double d = profile.degree;
  std::vector<double> slopes{0.0, d};
  for (std::size_t i = 1; i < hull.size(); ++i) {
    const double s = (hull[i][1] - hull[i - 1][1]) / (hull[i][0] - hull[i - 1][0]);
    if (s > 0.0 && s < d) slopes.push_back(s);
  }
  std::sort(slopes.begin(), slopes.end());
  slopes.erase(std::unique(slopes.begin(), slopes.end()), slopes.end());

  EnvelopeGrid out;
  out.degree = profile.degree;
  out.mode = "convex-hull oracle";
  for (double s : slopes) {
    double intercept = inf;
    for (const auto& v : hull) intercept = std::min(intercept, v[1] - s * v[0]);
    out.support.push_back({s, intercept});
  }
  out.t.assign(eval_grid.begin(), eval_grid.end());
  out.values.reserve(out.t.size());
  for (double s : out.t) out.values.push_back(out.evaluate(s));
  return out;
}

EnvelopeGrid radial_envelope_oracle(const Weight& w, const SampleSet& set, std::span<const double> t_grid) {
  const auto range = set.radial_range();
  require(range.has_value(), ErrorCode::not_radial, "compact set is not radial");
  return radial_envelope_oracle(radial_profile(w, t_grid), *range);
}

std::vector<TautologicalRow> tautological_check(const Weight& w, const SampleSet& set, std::span<const int> k_list,
                                                std::uint64_t seed, int samples) {
  const auto range = set.radial_range();
  require(range.has_value(), ErrorCode::not_radial, "compact set is not radial");
  require(samples >= 1, ErrorCode::invalid_argument, "need at least one random section");
  const double lo = std::isfinite(range->lo) ? range->lo - 1.0 : -12.0;
  const double hi = std::isfinite(range->hi) ? range->hi + 1.0 : 12.0;
  const auto grid = uniform_grid(lo, hi, 4001);
  const EnvelopeGrid env = radial_envelope_oracle(radial_profile(w, grid), *range, grid);
  const int d = w.degree()[0];

  // log of e^{-k env} / e^{-k phi} per unit k, never negative since env <= phi on K.
  std::vector<double> excess;
  excess.reserve(set.points.size());
  for (const auto& p : set.points) {
    const double phi = w.potential(p);
    double envelope;
    if (p.first.at_infinity) {
      envelope = env.support.back()[1];  // lim env - d t: intercept of the slope-d line
    } else if (p.first.value == cplx{}) {
      envelope = env.support.front()[1];
    } else {
      envelope = env.evaluate(std::log(std::abs(p.first.value)));
    }
    excess.push_back(phi - std::min(phi, envelope));
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<TautologicalRow> out;
  for (int k : k_list) {
    const SupNorm h = make_sup_norm(SeriesSpec::full(d), k, w, set);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      Eigen::VectorXcd c(h.rows.cols());
      for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = cplx{normal(rng), normal(rng)};
      const Eigen::VectorXd moduli = (h.rows * c).cwiseAbs();
      double sup_h = 0.0;
      double sup_env = 0.0;
      for (Eigen::Index i = 0; i < moduli.size(); ++i) {
        sup_h = std::max(sup_h, moduli(i));
        sup_env = std::max(sup_env, moduli(i) * std::exp(k * excess[static_cast<std::size_t>(i)]));
      }
      worst = std::max(worst, std::abs(sup_env / sup_h - 1.0));
    }
    out.push_back({k, worst});
  }
  return out;
}

}  // namespace linser
