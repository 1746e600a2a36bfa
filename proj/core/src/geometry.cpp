#include "linser/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "linser/error.hpp"

namespace linser {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double merge_tolerance = 1e-12;

cplx polar_point(double radius, int index, int count) {
  const double angle = two_pi * index / count;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

int scaled_count(int base, int refinement) { return base << refinement; }

}  // namespace

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    correction_ += (sum_ - t) + x;
  } else {
    correction_ += (x - t) + sum_;
  }
  sum_ = t;
}

SpaceModel SpaceModel::sphere() { return {}; }

SpaceModel SpaceModel::disjoint_union(int components) {
  SpaceModel s{Structure::disjoint_union, components, BaseMap::collapse};
  s.validate();
  return s;
}

SpaceModel SpaceModel::product() { return {Structure::product, 1, BaseMap::first_projection}; }

SpaceModel SpaceModel::with_base_map(BaseMap map) const {
  SpaceModel s = *this;
  s.base_map = map;
  s.validate();
  return s;
}

void SpaceModel::validate() const {
  require(components >= 1, ErrorCode::invalid_argument, "space needs at least one component");
  if (structure == Structure::product) {
    require(components == 1, ErrorCode::invalid_argument, "a product space is one logical component");
    require(base_map != BaseMap::collapse, ErrorCode::unsupported_space,
            "collapse map is only defined on disjoint unions");
  }
  if (structure == Structure::disjoint_union) {
    require(base_map != BaseMap::first_projection, ErrorCode::unsupported_space,
            "first projection is only defined on products");
  }
  if (structure == Structure::single_sphere) {
    require(components == 1, ErrorCode::invalid_argument, "single sphere has one component");
    require(base_map == BaseMap::none || base_map == BaseMap::identity, ErrorCode::unsupported_space,
            "single sphere only supports the identity base map");
  }
}

// --- sample sets -----------------------------------------------------------

SampleSet SampleSet::circle(double radius, int n, int refinement) {
  require(radius > 0 && n >= 1 && refinement >= 0, ErrorCode::invalid_argument, "bad circle samples");
  const int count = scaled_count(n, refinement);
  SampleSet s;
  s.descriptor = {SetKind::circle, 0.0, radius, 0, n};
  s.refinement = refinement;
  s.points.reserve(count);
  for (int j = 0; j < count; ++j) s.points.push_back(Point::at(polar_point(radius, j, count)));
  return s;
}

SampleSet SampleSet::disk(double radius, int n_radial, int n_angular, int refinement) {
  require(radius > 0 && n_radial >= 1 && n_angular >= 1 && refinement >= 0,
          ErrorCode::invalid_argument, "bad disk samples");
  const int nr = scaled_count(n_radial, refinement);
  const int na = scaled_count(n_angular, refinement);
  SampleSet s;
  s.descriptor = {SetKind::disk, 0.0, radius, n_radial, n_angular};
  s.refinement = refinement;
  s.points.reserve(1 + static_cast<std::size_t>(nr) * na);
  s.points.push_back(Point::at(0.0));
  for (int i = 1; i <= nr; ++i) {
    const double r = radius * i / nr;
    for (int j = 0; j < na; ++j) s.points.push_back(Point::at(polar_point(r, j, na)));
  }
  return s;
}

SampleSet SampleSet::annulus(double inner, double outer, int n_radial, int n_angular, int refinement) {
  require(inner > 0 && outer > inner && n_radial >= 1 && n_angular >= 1 && refinement >= 0,
          ErrorCode::invalid_argument, "bad annulus samples");
  const int nr = scaled_count(n_radial, refinement);
  const int na = scaled_count(n_angular, refinement);
  SampleSet s;
  s.descriptor = {SetKind::annulus, inner, outer, n_radial, n_angular};
  s.refinement = refinement;
  for (int i = 0; i <= nr; ++i) {
    const double r = inner + (outer - inner) * i / nr;
    for (int j = 0; j < na; ++j) s.points.push_back(Point::at(polar_point(r, j, na)));
  }
  return s;
}

SampleSet SampleSet::interval(double lo, double hi, int n, int refinement) {
  require(hi > lo && n >= 1 && refinement >= 0, ErrorCode::invalid_argument, "bad interval samples");
  const int count = scaled_count(n, refinement);
  SampleSet s;
  s.descriptor = {SetKind::interval, lo, hi, n, 0};
  s.refinement = refinement;
  for (int i = 0; i <= count; ++i) s.points.push_back(Point::at(lo + (hi - lo) * i / count));
  return s;
}

SampleSet SampleSet::sphere(int n_polar, int n_azimuth, int refinement) {
  require(n_polar >= 2 && n_azimuth >= 1 && refinement >= 0, ErrorCode::invalid_argument,
          "bad sphere samples");
  const int np = scaled_count(n_polar, refinement);
  const int na = scaled_count(n_azimuth, refinement);
  SampleSet s;
  s.descriptor = {SetKind::sphere, 0.0, 0.0, n_polar, n_azimuth};
  s.refinement = refinement;
  s.points.push_back(Point::at(0.0));
  for (int i = 1; i < np; ++i) {
    const double r = std::tan(0.5 * std::numbers::pi * i / np);
    for (int j = 0; j < na; ++j) s.points.push_back(Point::at(polar_point(r, j, na)));
  }
  s.points.push_back(Point::infinity());
  return s;
}

SampleSet SampleSet::on_components(const SampleSet& base, int components) {
  require(components >= 1, ErrorCode::invalid_argument, "need at least one component");
  SampleSet s;
  s.descriptor = base.descriptor;
  s.descriptor.kind = SetKind::union_of;
  s.refinement = base.refinement;
  for (int c = 0; c < components; ++c) {
    for (Point p : base.points) {
      p.component = c;
      s.points.push_back(p);
    }
  }
  return s;
}

SampleSet SampleSet::custom(std::vector<Point> points) {
  require(!points.empty(), ErrorCode::invalid_argument, "sample set must be nonempty");
  SampleSet s;
  s.points = std::move(points);
  return s;
}

SampleSet SampleSet::refined() const {
  const auto& d = descriptor;
  switch (d.kind) {
    case SetKind::circle: return circle(d.outer, d.n_angular, refinement + 1);
    case SetKind::disk: return disk(d.outer, d.n_radial, d.n_angular, refinement + 1);
    case SetKind::annulus: return annulus(d.inner, d.outer, d.n_radial, d.n_angular, refinement + 1);
    case SetKind::interval: return interval(d.inner, d.outer, d.n_radial, refinement + 1);
    case SetKind::sphere: return sphere(d.n_radial, d.n_angular, refinement + 1);
    default: fail(ErrorCode::invalid_argument, "set has no refinement rule");
  }
}

std::optional<RadialRange> SampleSet::radial_range() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto& d = descriptor;
  switch (d.kind) {
    case SetKind::circle: return RadialRange{std::log(d.outer), std::log(d.outer)};
    case SetKind::disk: return RadialRange{-inf, std::log(d.outer)};
    case SetKind::annulus: return RadialRange{std::log(d.inner), std::log(d.outer)};
    case SetKind::sphere: return RadialRange{-inf, inf};
    default: return std::nullopt;
  }
}

// --- quadrature ------------------------------------------------------------

QuadratureMeasure QuadratureMeasure::make(std::vector<Point> nodes, std::vector<double> weights,
                                          std::string descriptor, int components, bool product) {
  require(nodes.size() == weights.size(), ErrorCode::invalid_argument, "nodes/weights length mismatch");
  require(!nodes.empty(), ErrorCode::invalid_argument, "empty quadrature");
  CompensatedSum total;
  for (double w : weights) {
    require(std::isfinite(w) && w >= 0.0, ErrorCode::invalid_argument, "weights must be finite and >= 0");
    total.add(w);
  }
  QuadratureMeasure m;
  m.nodes = std::move(nodes);
  m.weights = std::move(weights);
  m.total_mass = total.value();
  m.descriptor = std::move(descriptor);
  m.components = components;
  m.product = product;
  return m;
}

QuadratureMeasure QuadratureMeasure::scaled(double factor) const {
  require(factor > 0, ErrorCode::invalid_argument, "scale factor must be positive");
  std::vector<double> w(weights);
  for (double& x : w) x *= factor;
  return make(nodes, std::move(w), descriptor, components, product);
}

GaussRule gauss_legendre(int n) {
  require(n >= 1, ErrorCode::invalid_argument, "Gauss-Legendre needs n >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      derivative = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / derivative;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    derivative = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureMeasure circle_quadrature(double radius, int n) {
  require(radius > 0, ErrorCode::invalid_argument, "radius must be positive");
  require(n >= 4, ErrorCode::invalid_argument, "circle quadrature needs n >= 4");
  std::vector<Point> nodes;
  nodes.reserve(n);
  for (int j = 0; j < n; ++j) nodes.push_back(Point::at(polar_point(radius, j, n)));
  return QuadratureMeasure::make(std::move(nodes), std::vector<double>(n, 1.0 / n), "circle");
}

QuadratureMeasure disk_quadrature(double radius, int n_radial, int n_angular) {
  require(radius > 0, ErrorCode::invalid_argument, "radius must be positive");
  require(n_radial >= 2 && n_angular >= 4, ErrorCode::invalid_argument, "disk quadrature grid too small");
  const GaussRule gl = gauss_legendre(n_radial);
  std::vector<Point> nodes;
  std::vector<double> weights;
  nodes.reserve(static_cast<std::size_t>(n_radial) * n_angular);
  weights.reserve(nodes.capacity());
  for (int i = 0; i < n_radial; ++i) {
    const double r = 0.5 * radius * (gl.nodes[i] + 1.0);
    // 2 r dr / R^2 with dr = (R/2) dx
    const double radial_weight = gl.weights[i] * r / radius;
    for (int j = 0; j < n_angular; ++j) {
      nodes.push_back(Point::at(polar_point(r, j, n_angular)));
      weights.push_back(radial_weight / n_angular);
    }
  }
  return QuadratureMeasure::make(std::move(nodes), std::move(weights), "disk");
}

QuadratureMeasure sphere_quadrature(int n_polar, int n_azimuth) {
  require(n_polar >= 1 && n_azimuth >= 4, ErrorCode::invalid_argument, "sphere quadrature grid too small");
  const GaussRule gl = gauss_legendre(n_polar);
  std::vector<Point> nodes;
  std::vector<double> weights;
  for (int i = 0; i < n_polar; ++i) {
    const double x = gl.nodes[i];
    const double r = std::sqrt((1.0 + x) / (1.0 - x));
    for (int j = 0; j < n_azimuth; ++j) {
      nodes.push_back(Point::at(polar_point(r, j, n_azimuth)));
      weights.push_back(0.5 * gl.weights[i] / n_azimuth);
    }
  }
  return QuadratureMeasure::make(std::move(nodes), std::move(weights), "sphere-fs");
}

QuadratureMeasure product_measure(const QuadratureMeasure& first, const QuadratureMeasure& second) {
  require(!first.product && !second.product && first.components == 1 && second.components == 1,
          ErrorCode::invalid_argument, "product of single-sphere measures only");
  std::vector<Point> nodes;
  std::vector<double> weights;
  nodes.reserve(first.size() * second.size());
  weights.reserve(nodes.capacity());
  for (std::size_t i = 0; i < first.size(); ++i) {
    for (std::size_t j = 0; j < second.size(); ++j) {
      nodes.push_back(Point::pair(first.nodes[i].first, second.nodes[j].first));
      weights.push_back(first.weights[i] * second.weights[j]);
    }
  }
  return QuadratureMeasure::make(std::move(nodes), std::move(weights),
                                 first.descriptor + "x" + second.descriptor, 1, true);
}

QuadratureMeasure on_component(const QuadratureMeasure& base, int component, int components) {
  require(!base.product && base.components == 1, ErrorCode::invalid_argument,
          "lift expects a single-sphere measure");
  require(component >= 0 && component < components, ErrorCode::invalid_argument, "component out of range");
  std::vector<Point> nodes(base.nodes);
  for (Point& p : nodes) p.component = component;
  return QuadratureMeasure::make(std::move(nodes), base.weights, base.descriptor, components, false);
}

QuadratureMeasure combine(const std::vector<QuadratureMeasure>& parts) {
  require(!parts.empty(), ErrorCode::invalid_argument, "nothing to combine");
  std::vector<Point> nodes;
  std::vector<double> weights;
  int components = 0;
  for (const auto& m : parts) {
    require(m.product == parts.front().product, ErrorCode::invalid_argument, "mixed product flags");
    nodes.insert(nodes.end(), m.nodes.begin(), m.nodes.end());
    weights.insert(weights.end(), m.weights.begin(), m.weights.end());
    components = std::max(components, m.components);
  }
  return QuadratureMeasure::make(std::move(nodes), std::move(weights), "combined", components,
                                 parts.front().product);
}

QuadratureMeasure pushforward_measure(const QuadratureMeasure& mu, const SpaceModel& space) {
  space.validate();
  require(mu.product == (space.structure == Structure::product), ErrorCode::invalid_argument,
          "measure does not live on this space");
  switch (space.base_map) {
    case BaseMap::none: fail(ErrorCode::unsupported_space, "space has no base map");
    case BaseMap::identity: return mu;
    case BaseMap::collapse:
    case BaseMap::first_projection: break;
  }

  std::vector<Point> images;
  images.reserve(mu.size());
  for (const Point& p : mu.nodes) images.push_back(Point{0, p.first, std::nullopt});

  std::vector<std::size_t> order(images.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key_less = [&](std::size_t a, std::size_t b) {
    const Coord& ca = images[a].first;
    const Coord& cb = images[b].first;
    if (ca.at_infinity != cb.at_infinity) return cb.at_infinity;
    if (ca.value.real() != cb.value.real()) return ca.value.real() < cb.value.real();
    return ca.value.imag() < cb.value.imag();
  };
  std::stable_sort(order.begin(), order.end(), key_less);

  std::vector<Point> nodes;
  std::vector<double> weights;
  for (std::size_t idx : order) {
    const Coord& c = images[idx].first;
    if (!nodes.empty()) {
      const Coord& last = nodes.back().first;
      const bool same = (c.at_infinity && last.at_infinity) ||
                        (!c.at_infinity && !last.at_infinity &&
                         std::abs(c.value.real() - last.value.real()) <= merge_tolerance &&
                         std::abs(c.value.imag() - last.value.imag()) <= merge_tolerance);
      if (same) {
        weights.back() += mu.weights[idx];
        continue;
      }
    }
    nodes.push_back(images[idx]);
    weights.push_back(mu.weights[idx]);
  }
  return QuadratureMeasure::make(std::move(nodes), std::move(weights), mu.descriptor + "-pushed");
}

cplx compactify(const Coord& c) {
  if (c.at_infinity) return {0.0, 0.0};
  const double r2 = std::norm(c.value);
  return r2 <= 1.0 ? c.value : c.value / r2;
}

namespace {

// Moments of w^p conj(w)^q per (component, coordinate slot), p,q in [0, M].
std::vector<cplx> moment_table(const QuadratureMeasure& mu, int max_order) {
  const int slots = mu.product ? 2 : 1;
  const std::size_t per_block = static_cast<std::size_t>(max_order + 1) * (max_order + 1);
  const std::size_t blocks = static_cast<std::size_t>(mu.components) * slots;
  std::vector<CompensatedSum> re(blocks * per_block);
  std::vector<CompensatedSum> im(blocks * per_block);
  std::vector<cplx> powers(max_order + 1);
  std::vector<cplx> conj_powers(max_order + 1);
  for (std::size_t n = 0; n < mu.size(); ++n) {
    const Point& p = mu.nodes[n];
    for (int s = 0; s < slots; ++s) {
      const Coord& c = s == 0 ? p.first : *p.second;
      const cplx w = compactify(c);
      powers[0] = conj_powers[0] = 1.0;
      for (int j = 1; j <= max_order; ++j) {
        powers[j] = powers[j - 1] * w;
        conj_powers[j] = std::conj(powers[j]);
      }
      const std::size_t base = (static_cast<std::size_t>(p.component) * slots + s) * per_block;
      for (int a = 0; a <= max_order; ++a) {
        for (int b = 0; b <= max_order; ++b) {
          const cplx v = mu.weights[n] * powers[a] * conj_powers[b];
          const std::size_t idx = base + static_cast<std::size_t>(a) * (max_order + 1) + b;
          re[idx].add(v.real());
          im[idx].add(v.imag());
        }
      }
    }
  }
  std::vector<cplx> out(re.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {re[i].value(), im[i].value()};
  return out;
}

}  // namespace

double weak_discrepancy(const QuadratureMeasure& a, const QuadratureMeasure& b, int max_order) {
  require(max_order >= 1, ErrorCode::invalid_argument, "moment order must be >= 1");
  require(a.components == b.components && a.product == b.product, ErrorCode::invalid_argument,
          "measures live on different component sets");
  const auto ma = moment_table(a, max_order);
  const auto mb = moment_table(b, max_order);
  double worst = 0.0;
  for (std::size_t i = 0; i < ma.size(); ++i) worst = std::max(worst, std::abs(ma[i] - mb[i]));
  return worst;
}

}  // namespace linser
