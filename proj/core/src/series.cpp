#include "linser/series.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "linser/error.hpp"

namespace linser {

namespace {

using i64 = std::int64_t;
__extension__ typedef __int128 i128;

// --- exact homogeneous-rational points (x/w, y/w), w > 0 ----------------------

struct HPoint {
  i64 x = 0;
  i64 y = 0;
  i64 w = 1;
};

i128 orient(const HPoint& p, const HPoint& q, const HPoint& r) {
  // sign equals sign of (q - p) x (r - p) because all weights are positive
  const i128 det = static_cast<i128>(p.x) * (static_cast<i128>(q.y) * r.w - static_cast<i128>(r.y) * q.w) -
                   static_cast<i128>(p.y) * (static_cast<i128>(q.x) * r.w - static_cast<i128>(r.x) * q.w) +
                   static_cast<i128>(p.w) * (static_cast<i128>(q.x) * r.y - static_cast<i128>(r.x) * q.y);
  return det;
}

int compare_coord(i64 a, i64 wa, i64 b, i64 wb) {
  const i128 lhs = static_cast<i128>(a) * wb;
  const i128 rhs = static_cast<i128>(b) * wa;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

bool lex_less(const HPoint& p, const HPoint& q) {
  const int cx = compare_coord(p.x, p.w, q.x, q.w);
  if (cx != 0) return cx < 0;
  return compare_coord(p.y, p.w, q.y, q.w) < 0;
}

bool same_point(const HPoint& p, const HPoint& q) {
  return compare_coord(p.x, p.w, q.x, q.w) == 0 && compare_coord(p.y, p.w, q.y, q.w) == 0;
}

// Counter-clockwise hull without collinear points; degenerate inputs give 1 or 2 vertices.
std::vector<HPoint> convex_hull(std::vector<HPoint> pts) {
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end(), same_point), pts.end());
  if (pts.size() <= 2) return pts;
  std::vector<HPoint> hull(2 * pts.size());
  std::size_t n = 0;
  for (const auto& p : pts) {
    while (n >= 2 && orient(hull[n - 2], hull[n - 1], p) <= 0) --n;
    hull[n++] = p;
  }
  const std::size_t lower = n + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (n >= lower && orient(hull[n - 2], hull[n - 1], pts[i]) <= 0) --n;
    hull[n++] = pts[i];
  }
  hull.resize(n - 1);
  return hull;
}

bool polygon_contains(const std::vector<HPoint>& hull, const HPoint& p) {
  if (hull.empty()) return false;
  if (hull.size() == 1) return same_point(hull[0], p);
  if (hull.size() == 2) {
    if (orient(hull[0], hull[1], p) != 0) return false;
    // between the endpoints, coordinatewise
    auto between = [](i64 v, i64 wv, i64 a, i64 wa, i64 b, i64 wb) {
      return compare_coord(v, wv, a, wa) * compare_coord(v, wv, b, wb) <= 0;
    };
    return between(p.x, p.w, hull[0].x, hull[0].w, hull[1].x, hull[1].w) &&
           between(p.y, p.w, hull[0].y, hull[0].w, hull[1].y, hull[1].w);
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    if (orient(hull[i], hull[(i + 1) % hull.size()], p) < 0) return false;
  }
  return true;
}

// --- exponent grids ------------------------------------------------------------

struct Box {
  int a_max = 0;
  int b_max = 0;
};

struct Grid {
  Box box;
  std::vector<char> bits;

  explicit Grid(Box b) : box(b), bits(static_cast<std::size_t>(b.a_max + 1) * (b.b_max + 1), 0) {}
  std::size_t index(int a, int b) const { return static_cast<std::size_t>(a) * (box.b_max + 1) + b; }
  bool at(int a, int b) const {
    return a >= 0 && b >= 0 && a <= box.a_max && b <= box.b_max && bits[index(a, b)] != 0;
  }
  void set(int a, int b) { bits[index(a, b)] = 1; }
};

Box exponent_box(const SeriesSpec& spec, int k) {
  switch (spec.variant) {
    case SeriesVariant::pullback:
    case SeriesVariant::divisor_shift: return exponent_box(*spec.base, k);
    default: return Box{k * spec.line_degree[0], spec.rank == 2 ? k * spec.line_degree[1] : 0};
  }
}

std::vector<HPoint> generator_hull(const SeriesSpec& spec) {
  std::vector<HPoint> pts;
  for (const auto& g : spec.generators) pts.push_back({g.exponent[0], g.exponent[1], g.degree});
  return convex_hull(std::move(pts));
}

bool saturated_contains(const SeriesSpec& spec, int k, const Exponent& e) {
  if (k == 0) return e[0] == 0 && e[1] == 0;
  const auto hull = generator_hull(spec);
  return polygon_contains(hull, HPoint{e[0], spec.rank == 2 ? e[1] : 0, k});
}

// Calls `visit(k, grid)` for k = 0..k_max in order.
void for_each_degree(const SeriesSpec& spec, int k_max, const std::function<void(int, const Grid&)>& visit) {
  require(k_max >= 0, ErrorCode::invalid_argument, "degree must be >= 0");
  switch (spec.variant) {
    case SeriesVariant::pullback:
    case SeriesVariant::divisor_shift: for_each_degree(*spec.base, k_max, visit); return;
    case SeriesVariant::monomial:
      if (!spec.saturated) {
        int max_gen_degree = 1;
        for (const auto& g : spec.generators) max_gen_degree = std::max(max_gen_degree, g.degree);
        std::deque<Grid> recent;  // recent[j] = grid of degree k-1-j
        for (int k = 0; k <= k_max; ++k) {
          Grid grid(exponent_box(spec, k));
          if (k == 0) {
            grid.set(0, 0);
          } else {
            for (const auto& g : spec.generators) {
              if (g.degree > k) continue;
              const Grid& prev = recent[g.degree - 1];
              for (int a = 0; a <= prev.box.a_max; ++a)
                for (int b = 0; b <= prev.box.b_max; ++b)
                  if (prev.at(a, b)) grid.set(a + g.exponent[0], b + g.exponent[1]);
            }
          }
          visit(k, grid);
          recent.push_front(std::move(grid));
          if (static_cast<int>(recent.size()) > max_gen_degree) recent.pop_back();
        }
        return;
      }
      break;
    case SeriesVariant::sym_power: {
      const int m = spec.power;
      Grid generators_grid(exponent_box(*spec.base, m));
      for_each_degree(*spec.base, m, [&](int k, const Grid& g) {
        if (k == m) generators_grid = g;
      });
      Grid prev(Box{0, 0});
      prev.set(0, 0);
      for (int k = 0; k <= k_max; ++k) {
        if (k == 0) {
          visit(0, prev);
          continue;
        }
        Grid grid(exponent_box(spec, k));
        for (int a = 0; a <= prev.box.a_max; ++a)
          for (int b = 0; b <= prev.box.b_max; ++b) {
            if (!prev.at(a, b)) continue;
            for (int ga = 0; ga <= generators_grid.box.a_max; ++ga)
              for (int gb = 0; gb <= generators_grid.box.b_max; ++gb)
                if (generators_grid.at(ga, gb)) grid.set(a + ga, b + gb);
          }
        visit(k, grid);
        prev = std::move(grid);
      }
      return;
    }
    default: break;
  }
  const bool cone = spec.variant == SeriesVariant::monomial && spec.saturated;
  const std::vector<HPoint> hull = cone ? generator_hull(spec) : std::vector<HPoint>{};
  for (int k = 0; k <= k_max; ++k) {
    Grid grid(exponent_box(spec, k));
    for (int a = 0; a <= grid.box.a_max; ++a)
      for (int b = 0; b <= grid.box.b_max; ++b) {
        const bool member = cone ? (k == 0 ? (a == 0 && b == 0) : polygon_contains(hull, HPoint{a, b, k}))
                                 : contains(spec, k, {a, b});
        if (member) grid.set(a, b);
      }
    visit(k, grid);
  }
}

BasisList grid_to_basis(int k, int rank, const Grid& grid) {
  BasisList list;
  list.k = k;
  list.rank = rank;
  for (int a = 0; a <= grid.box.a_max; ++a)
    for (int b = 0; b <= grid.box.b_max; ++b)
      if (grid.at(a, b)) list.exponents.push_back({a, b});
  return list;
}

i64 gcd64(i64 a, i64 b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

// --- factories -------------------------------------------------------------------

SeriesSpec SeriesSpec::full(int degree) {
  require(degree >= 1, ErrorCode::invalid_argument, "line degree must be >= 1");
  SeriesSpec s;
  s.line_degree = {degree, 0};
  return s;
}

SeriesSpec SeriesSpec::full_product(int first_degree, int second_degree) {
  require(first_degree >= 0 && second_degree >= 0 && first_degree + second_degree > 0,
          ErrorCode::invalid_argument, "bad bidegree");
  SeriesSpec s;
  s.space = SpaceModel::product();
  s.line_degree = {first_degree, second_degree};
  s.rank = 2;
  return s;
}

SeriesSpec SeriesSpec::even_degree() {
  SeriesSpec s;
  s.variant = SeriesVariant::even_degree;
  return s;
}

SeriesSpec SeriesSpec::monomial(int rank, std::vector<Generator> generators, std::array<int, 2> line_degree,
                                bool saturated) {
  require(rank == 1 || rank == 2, ErrorCode::invalid_argument, "monomial rank must be 1 or 2");
  require(!generators.empty(), ErrorCode::invalid_argument, "monomial series needs generators");
  require(line_degree[0] >= 1 && (rank == 2 ? line_degree[1] >= 1 : true), ErrorCode::invalid_argument,
          "bad line degree");
  for (const auto& g : generators) {
    require(g.degree >= 1, ErrorCode::invalid_argument, "generator degree must be >= 1");
    require(g.exponent[0] >= 0 && g.exponent[0] <= g.degree * line_degree[0], ErrorCode::invalid_argument,
            "generator exponent outside the degree box");
    if (rank == 1) {
      require(g.exponent[1] == 0, ErrorCode::invalid_argument, "rank-1 generator with second exponent");
    } else {
      require(g.exponent[1] >= 0 && g.exponent[1] <= g.degree * line_degree[1], ErrorCode::invalid_argument,
              "generator exponent outside the degree box");
    }
  }
  SeriesSpec s;
  s.variant = SeriesVariant::monomial;
  s.space = rank == 2 ? SpaceModel::product() : SpaceModel::sphere();
  s.line_degree = rank == 2 ? line_degree : std::array<int, 2>{line_degree[0], 0};
  s.rank = rank;
  s.generators = std::move(generators);
  s.saturated = saturated;
  return s;
}

SeriesSpec SeriesSpec::pullback(const SeriesSpec& base, const SpaceModel& target) {
  require(base.space.structure == Structure::single_sphere && base.rank == 1, ErrorCode::unsupported_series,
          "pullback needs a single-sphere base series");
  target.validate();
  require(target.structure != Structure::single_sphere, ErrorCode::unsupported_space,
          "pullback target must be a union or a product");
  SeriesSpec s;
  s.variant = SeriesVariant::pullback;
  s.space = target;
  s.line_degree = {base.line_degree[0], 0};
  s.rank = 1;
  s.base = std::make_shared<const SeriesSpec>(base);
  return s;
}

SeriesSpec SeriesSpec::divisor_shift(const SeriesSpec& base, std::vector<DivisorRoot> roots) {
  require(base.space.structure == Structure::single_sphere && base.rank == 1, ErrorCode::unsupported_series,
          "divisor shift needs a single-sphere base series");
  require(!roots.empty(), ErrorCode::invalid_argument, "divisor needs at least one root");
  int degree = 0;
  for (const auto& r : roots) {
    require(r.multiplicity >= 1, ErrorCode::invalid_argument, "root multiplicity must be >= 1");
    degree += r.multiplicity;
  }
  SeriesSpec s;
  s.variant = SeriesVariant::divisor_shift;
  s.space = base.space;
  s.line_degree = {base.line_degree[0] + degree, 0};
  s.rank = 1;
  s.base = std::make_shared<const SeriesSpec>(base);
  s.roots = std::move(roots);
  return s;
}

SeriesSpec SeriesSpec::sym_power(const SeriesSpec& base, int m) {
  require(m >= 1, ErrorCode::invalid_argument, "symmetric power needs m >= 1");
  require(base.variant != SeriesVariant::divisor_shift && base.variant != SeriesVariant::pullback,
          ErrorCode::unsupported_series, "symmetric power of a monomial-type series only");
  SeriesSpec s;
  s.variant = SeriesVariant::sym_power;
  s.space = base.space;
  s.line_degree = {base.line_degree[0] * m, base.line_degree[1] * m};
  s.rank = base.rank;
  s.base = std::make_shared<const SeriesSpec>(base);
  s.power = m;
  return s;
}

int SeriesSpec::divisor_degree() const {
  int d = 0;
  for (const auto& r : roots) d += r.multiplicity;
  return d;
}

bool SeriesSpec::is_monomial_type() const {
  return variant == SeriesVariant::full || variant == SeriesVariant::monomial ||
         variant == SeriesVariant::even_degree;
}

// --- membership and bases -------------------------------------------------------

bool contains(const SeriesSpec& spec, int k, const Exponent& e) {
  require(k >= 0, ErrorCode::invalid_argument, "degree must be >= 0");
  const Box box = exponent_box(spec, k);
  if (e[0] < 0 || e[1] < 0 || e[0] > box.a_max || e[1] > box.b_max) return false;
  switch (spec.variant) {
    case SeriesVariant::full: return true;
    case SeriesVariant::even_degree: return e[0] % 2 == 0;
    case SeriesVariant::pullback:
    case SeriesVariant::divisor_shift: return contains(*spec.base, k, e);
    case SeriesVariant::monomial:
      if (spec.saturated) return saturated_contains(spec, k, e);
      break;
    case SeriesVariant::sym_power: break;
  }
  bool found = false;
  for_each_degree(spec, k, [&](int kk, const Grid& g) {
    if (kk == k) found = g.at(e[0], e[1]);
  });
  return found;
}

BasisList dims_and_basis(const SeriesSpec& spec, int k) {
  require(k >= 0, ErrorCode::invalid_argument, "degree must be >= 0");
  BasisList out;
  for_each_degree(spec, k, [&](int kk, const Grid& g) {
    if (kk == k) out = grid_to_basis(k, spec.rank, g);
  });
  return out;
}

std::vector<BasisList> basis_table(const SeriesSpec& spec, int k_max) {
  std::vector<BasisList> out;
  out.reserve(k_max + 1);
  for_each_degree(spec, k_max, [&](int k, const Grid& g) { out.push_back(grid_to_basis(k, spec.rank, g)); });
  return out;
}

std::vector<std::int64_t> dimension_table(const SeriesSpec& spec, int k_max) {
  std::vector<std::int64_t> dims;
  dims.reserve(k_max + 1);
  for_each_degree(spec, k_max, [&](int, const Grid& g) {
    dims.push_back(std::count(g.bits.begin(), g.bits.end(), char{1}));
  });
  return dims;
}

// --- growth ------------------------------------------------------------------------

GrowthFit fit_growth(const SeriesSpec& spec, int k_max) {
  require(k_max >= 16, ErrorCode::invalid_argument, "fit_growth needs k_max >= 16");
  const auto dims = dimension_table(spec, k_max);
  require(std::any_of(dims.begin(), dims.end(), [](auto d) { return d > 0; }), ErrorCode::empty_series,
          "all dimensions are zero");
  GrowthFit fit;
  fit.window_lo = k_max / 2;
  fit.window_hi = k_max;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int k = fit.window_lo; k <= fit.window_hi; ++k) {
    if (dims[k] <= 0) continue;
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(static_cast<double>(dims[k]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  require(n >= 2, ErrorCode::empty_series, "too few nonzero dimensions in the window");
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.kappa = std::clamp(static_cast<int>(std::lround(fit.slope)), 0, spec.space.coordinates());

  // Mean of the kappa-th forward difference over the window.
  std::vector<double> diff;
  for (int k = fit.window_lo; k <= fit.window_hi; ++k) diff.push_back(static_cast<double>(dims[k]));
  for (int order = 0; order < fit.kappa; ++order) {
    for (std::size_t i = 0; i + 1 < diff.size(); ++i) diff[i] = diff[i + 1] - diff[i];
    diff.pop_back();
  }
  double total = 0.0;
  for (double d : diff) total += d;
  fit.vol = total / static_cast<double>(diff.size());

  const double kf = factorial(fit.kappa);
  for (int k = fit.window_lo; k <= fit.window_hi; ++k) {
    if (dims[k] <= 0) continue;
    const double model = fit.vol * std::pow(static_cast<double>(k), fit.kappa) / kf;
    fit.residual = std::max(fit.residual, std::abs(static_cast<double>(dims[k]) - model) / dims[k]);
  }
  return fit;
}

// --- lattices ------------------------------------------------------------------------

LatticeIndex lattice_index(const std::vector<std::array<std::int64_t, 2>>& vectors) {
  // Row-reduce over Z (Euclid on columns) to a basis of the span.
  std::vector<std::array<i64, 2>> rows;
  for (const auto& v : vectors)
    if (v[0] != 0 || v[1] != 0) rows.push_back(v);
  LatticeIndex out;
  if (rows.empty()) return out;

  std::vector<std::array<i64, 2>> basis;
  std::size_t start = 0;
  for (int col = 0; col < 2 && start < rows.size(); ++col) {
    // gcd-combine column `col` into rows[start]
    for (std::size_t i = start + 1; i < rows.size(); ++i) {
      while (rows[i][col] != 0) {
        const i64 q = rows[start][col] / rows[i][col];
        for (int c = 0; c < 2; ++c) rows[start][c] -= q * rows[i][c];
        std::swap(rows[start], rows[i]);
      }
    }
    if (rows[start][col] != 0) {
      basis.push_back(rows[start]);
      ++start;
    }
  }
  out.rank = static_cast<int>(basis.size());
  if (out.rank == 2) {
    const i64 det = basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0];
    out.index = det < 0 ? -det : det;
  } else {
    out.index = gcd64(basis[0][0], basis[0][1]);
  }
  return out;
}

SemigroupAnalysis okounkov_body(const SeriesSpec& spec, int k_max) {
  require(spec.is_monomial_type(), ErrorCode::unsupported_series,
          "Okounkov body needs a Full, Monomial or EvenDegree series");
  require(k_max >= 16, ErrorCode::invalid_argument, "okounkov_body needs k_max >= 16");

  std::vector<HPoint> candidates;
  std::vector<std::array<i64, 2>> differences;
  for_each_degree(spec, k_max, [&](int k, const Grid& g) {
    if (k == 0) return;
    std::vector<HPoint> level;
    std::array<i64, 2> first{-1, -1};
    for (int a = 0; a <= g.box.a_max; ++a)
      for (int b = 0; b <= g.box.b_max; ++b) {
        if (!g.at(a, b)) continue;
        level.push_back({a, b, 1});
        if (k == k_max) {
          if (first[0] < 0) first = {a, b};
          differences.push_back({a - first[0], b - first[1]});
        }
      }
    for (auto p : convex_hull(std::move(level))) candidates.push_back({p.x, p.y, k});
  });
  require(!candidates.empty(), ErrorCode::empty_series, "series has no sections");

  const auto hull = convex_hull(candidates);
  SemigroupAnalysis out;
  const LatticeIndex li = lattice_index(differences);
  out.lattice_rank = li.rank;
  out.generic_degree = li.index;
  for (const auto& p : hull)
    out.hull_vertices.push_back({static_cast<double>(p.x) / p.w, static_cast<double>(p.y) / p.w});

  if (hull.size() == 1) {
    out.hull_dimension = 0;
    out.body_volume = 1.0;
  } else if (hull.size() == 2) {
    out.hull_dimension = 1;
    // length in units of the primitive lattice vector along the segment
    const long double dx = static_cast<long double>(hull[1].x) / hull[1].w - static_cast<long double>(hull[0].x) / hull[0].w;
    const long double dy = static_cast<long double>(hull[1].y) / hull[1].w - static_cast<long double>(hull[0].y) / hull[0].w;
    const i64 px = hull[1].x * hull[0].w - hull[0].x * hull[1].w;
    const i64 py = hull[1].y * hull[0].w - hull[0].y * hull[1].w;
    const i64 g = gcd64(px, py);
    const long double primitive = std::sqrt(static_cast<long double>(px / g) * (px / g) +
                                            static_cast<long double>(py / g) * (py / g));
    out.body_volume = static_cast<double>(std::sqrt(dx * dx + dy * dy) / primitive);
  } else {
    out.hull_dimension = 2;
    long double twice_area = 0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const auto& p = hull[i];
      const auto& q = hull[(i + 1) % hull.size()];
      twice_area += (static_cast<long double>(p.x) * q.y - static_cast<long double>(q.x) * p.y) /
                    (static_cast<long double>(p.w) * q.w);
    }
    out.body_volume = static_cast<double>(twice_area / 2);
  }
  out.normalized_volume = factorial(out.hull_dimension) * out.body_volume / static_cast<double>(out.generic_degree);
  return out;
}

SemigroupAnalysis monomial_closure_and_degree(const SeriesSpec& spec, std::uint64_t seed, int reference_k) {
  require(spec.is_monomial_type(), ErrorCode::unsupported_series,
          "integral closure needs a Full, Monomial or EvenDegree series");
  require(reference_k >= 2, ErrorCode::invalid_argument, "reference degree too small");
  SemigroupAnalysis out;

  std::vector<Generator> gens;
  switch (spec.variant) {
    case SeriesVariant::full:
      if (spec.rank == 1) {
        gens = {{1, {0, 0}}, {1, {spec.line_degree[0], 0}}};
      } else {
        gens = {{1, {0, 0}}, {1, {spec.line_degree[0], 0}}, {1, {0, spec.line_degree[1]}},
                {1, {spec.line_degree[0], spec.line_degree[1]}}};
      }
      break;
    case SeriesVariant::even_degree: gens = {{1, {0, 0}}, {2, {2, 0}}}; break;
    default: gens = spec.generators; break;
  }
  out.saturation = SeriesSpec::monomial(spec.rank, gens, spec.line_degree, true);

  const BasisList basis = dims_and_basis(spec, reference_k);
  require(basis.size() > 0, ErrorCode::empty_series, "series empty at the reference degree");
  std::vector<std::array<i64, 2>> differences;
  for (const auto& e : basis.exponents)
    differences.push_back({e[0] - basis.exponents[0][0], e[1] - basis.exponents[0][1]});
  const LatticeIndex li = lattice_index(differences);
  out.lattice_rank = li.rank;
  out.generic_degree = li.index;

  // Preimage count of a generic point under the monomial map at the reference degree.
  if (li.rank == spec.rank && li.rank > 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> radius(0.6, 1.6);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const cplx z0 = std::polar(radius(rng), angle(rng));
    const cplx w0 = std::polar(radius(rng), angle(rng));

    i64 order = 0;
    if (spec.rank == 1) {
      for (const auto& d : differences)
        if (d[0] != 0) {
          order = d[0] < 0 ? -d[0] : d[0];
          break;
        }
    } else {
      for (std::size_t i = 0; i < differences.size() && order == 0; ++i)
        for (std::size_t j = i + 1; j < differences.size(); ++j) {
          const i64 det = differences[i][0] * differences[j][1] - differences[i][1] * differences[j][0];
          if (det != 0) {
            order = det < 0 ? -det : det;
            break;
          }
        }
    }
    if (order > 0 && order <= 64) {
      auto image_matches = [&](cplx z, cplx w) {
        for (const auto& e : basis.exponents) {
          const int da = e[0] - basis.exponents[0][0];
          const int db = e[1] - basis.exponents[0][1];
          const cplx target = std::pow(z0, da) * (spec.rank == 2 ? std::pow(w0, db) : cplx{1.0});
          const cplx value = std::pow(z, da) * (spec.rank == 2 ? std::pow(w, db) : cplx{1.0});
          if (std::abs(value - target) > 1e-8 * std::max(1.0, std::abs(target))) return false;
        }
        return true;
      };
      i64 count = 0;
      const int second_range = spec.rank == 2 ? static_cast<int>(order) : 1;
      for (i64 i = 0; i < order; ++i)
        for (int j = 0; j < second_range; ++j) {
          const cplx zeta1 = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(i) / order);
          const cplx zeta2 = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / order);
          if (image_matches(z0 * zeta1, w0 * zeta2)) ++count;
        }
      out.preimage_count = count;
      if (count != out.generic_degree)
        fail(ErrorCode::internal_error, "lattice index disagrees with the preimage count");
    }
  }
  return out;
}

FiberDegree fiber_degree(const SeriesSpec& spec) {
  switch (spec.variant) {
    case SeriesVariant::full: return {1.0};
    case SeriesVariant::pullback:
      if (spec.space.structure == Structure::disjoint_union) return {static_cast<double>(spec.space.components)};
      return {1.0};
    default: fail(ErrorCode::unsupported_series, "fiber degree needs Full or Pullback");
  }
}

namespace {

// Best rational approximation with denominator <= max_den (continued fractions).
std::pair<i64, i64> best_rational(double x, i64 max_den) {
  i64 p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int iter = 0; iter < 64; ++iter) {
    const i64 a = static_cast<i64>(std::floor(v));
    const i64 p2 = a * p1 + p0;
    const i64 q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = v - static_cast<double>(a);
    if (frac < 1e-12) break;
    v = 1.0 / frac;
  }
  return {p1, q1};
}

}  // namespace

SeriesSpec slope_range_series(double lo_slope, double hi_slope, int line_degree, int max_denominator) {
  require(lo_slope <= hi_slope + 1e-12 && lo_slope >= -1e-12 && hi_slope <= line_degree + 1e-12,
          ErrorCode::invalid_argument, "slopes must satisfy 0 <= lo <= hi <= d");
  const i64 q = max_denominator;
  i64 lo_num = static_cast<i64>(std::ceil(std::max(0.0, lo_slope) * q - 1e-9));
  i64 hi_num = static_cast<i64>(std::floor(std::min<double>(line_degree, hi_slope) * q + 1e-9));
  std::vector<Generator> gens;
  if (lo_num <= hi_num) {
    const i64 g1 = gcd64(lo_num, q);
    const i64 g2 = gcd64(hi_num, q);
    gens.push_back({static_cast<int>(q / g1), {static_cast<int>(lo_num / g1), 0}});
    gens.push_back({static_cast<int>(q / g2), {static_cast<int>(hi_num / g2), 0}});
  } else {
    const auto [p, den] = best_rational(0.5 * (lo_slope + hi_slope), q);
    gens.push_back({static_cast<int>(den), {static_cast<int>(p), 0}});
  }
  return SeriesSpec::monomial(1, std::move(gens), {line_degree, 0}, true);
}

}  // namespace linser
