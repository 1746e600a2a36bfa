#include "linser/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "linser/error.hpp"

namespace linser {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

double fs_potential(const Coord& c, int degree) {
  if (c.at_infinity) return 0.0;
  return 0.5 * degree * std::log1p(std::norm(c.value));
}

// Potential of the disk weight as a function of r = |z|.
double blended_disk_radial(double r) {
  const double inner = -std::log((1.0 + r) / 2.0);
  const double outer = 0.5 * std::log((1.0 + r * r) / 2.0);
  if (r <= 1.0) return inner;
  if (r >= 2.0) return outer;
  const double blend = r - 1.0;
  return (1.0 - blend) * inner + blend * outer;
}

// (1 - |w|^2)/(1 + |w|^2): +1 at 0, -1 at infinity.
double fiber_sign_factor(const Coord& w) {
  if (w.at_infinity) return -1.0;
  const double n = std::norm(w.value);
  return (1.0 - n) / (1.0 + n);
}

}  // namespace

double RadialProfile::operator()(double s) const {
  if (s <= t.front()) return values.front();
  if (s >= t.back()) return values.back() + degree * (s - t.back());
  const auto it = std::upper_bound(t.begin(), t.end(), s);
  const auto hi = static_cast<std::size_t>(it - t.begin());
  const std::size_t lo = hi - 1;
  const double lambda = (s - t[lo]) / (t[hi] - t[lo]);
  return (1.0 - lambda) * values[lo] + lambda * values[hi];
}

// --- directions ------------------------------------------------------------

Direction Direction::constant(double value) {
  require(std::isfinite(value), ErrorCode::invalid_argument, "direction must be bounded");
  Direction d;
  d.kind_ = Kind::constant;
  d.params_[0] = value;
  return d;
}

Direction Direction::component_indicator(int component) {
  require(component >= 0, ErrorCode::invalid_argument, "component index must be nonnegative");
  Direction d;
  d.kind_ = Kind::component_indicator;
  d.component_ = component;
  return d;
}

Direction Direction::radial_bump(double center, double half_width, double height) {
  require(std::isfinite(center) && half_width > 0 && std::isfinite(height), ErrorCode::invalid_argument,
          "radial bump needs finite center/height and positive width");
  Direction d;
  d.kind_ = Kind::radial_bump;
  d.params_ = {center, half_width, height};
  return d;
}

Direction Direction::fs_bump(double height) {
  require(std::isfinite(height), ErrorCode::invalid_argument, "direction must be bounded");
  Direction d;
  d.kind_ = Kind::fs_bump;
  d.params_[0] = height;
  return d;
}

Direction Direction::fiber_sign(const Direction& base) {
  require(base.pulled_back(), ErrorCode::invalid_argument, "fiber sign needs a base direction");
  Direction d;
  d.kind_ = Kind::fiber_sign;
  d.inner_ = std::make_shared<const Direction>(base);
  return d;
}

double Direction::operator()(const Point& p) const {
  switch (kind_) {
    case Kind::constant:
      return params_[0];
    case Kind::component_indicator:
      return p.component == component_ ? 1.0 : 0.0;
    case Kind::radial_bump: {
      if (p.first.at_infinity || p.first.value == cplx{}) return 0.0;
      const double u = (std::log(std::abs(p.first.value)) - params_[0]) / params_[1];
      if (std::abs(u) >= 1.0) return 0.0;
      const double v = 1.0 - u * u;
      return params_[2] * v * v;
    }
    case Kind::fs_bump:
      if (p.first.at_infinity) return 0.0;
      return params_[0] / (1.0 + std::norm(p.first.value));
    case Kind::fiber_sign:
      require(p.second.has_value(), ErrorCode::invalid_argument, "fiber sign direction needs a product point");
      return (*inner_)(p) * fiber_sign_factor(*p.second);
  }
  return 0.0;
}

double Direction::bound() const {
  switch (kind_) {
    case Kind::constant:
      return std::abs(params_[0]);
    case Kind::component_indicator:
      return 1.0;
    case Kind::radial_bump:
      return std::abs(params_[2]);
    case Kind::fs_bump:
      return std::abs(params_[0]);
    case Kind::fiber_sign:
      return inner_->bound();
  }
  return std::numeric_limits<double>::infinity();
}

bool Direction::pulled_back() const {
  return kind_ == Kind::constant || kind_ == Kind::radial_bump || kind_ == Kind::fs_bump;
}

bool Direction::radial() const { return kind_ != Kind::fiber_sign; }

bool Direction::operator==(const Direction& other) const {
  if (kind_ != other.kind_ || params_ != other.params_ || component_ != other.component_) return false;
  if (!inner_ || !other.inner_) return !inner_ && !other.inner_;
  return *inner_ == *other.inner_;
}

// --- grid correction -------------------------------------------------------

double GridCorrection::operator()(cplx z) const {
  const double x = z.real();
  const double y = z.imag();
  if (x <= x0 || x >= x1 || y <= y0 || y >= y1) return boundary_value();
  const double fx = (x - x0) / (x1 - x0) * (nx - 1);
  const double fy = (y - y0) / (y1 - y0) * (ny - 1);
  const int i = std::min(static_cast<int>(fx), nx - 2);
  const int j = std::min(static_cast<int>(fy), ny - 2);
  const double u = fx - i;
  const double v = fy - j;
  const auto at = [&](int a, int b) { return values[static_cast<std::size_t>(b) * nx + a]; };
  return (1 - u) * (1 - v) * at(i, j) + u * (1 - v) * at(i + 1, j) + (1 - u) * v * at(i, j + 1) +
         u * v * at(i + 1, j + 1);
}

// --- weights ---------------------------------------------------------------

Weight Weight::fs(int degree) {
  require(degree >= 1, ErrorCode::invalid_argument, "weight degree must be positive");
  return Weight(weight_model::Fs{degree});
}

Weight Weight::blended_disk() { return Weight(weight_model::BlendedDisk{}); }

Weight Weight::radial(RadialProfile profile) {
  require(profile.t.size() >= 2 && profile.t.size() == profile.values.size(), ErrorCode::invalid_argument,
          "radial profile needs matching t/value samples");
  require(profile.degree >= 1, ErrorCode::invalid_argument, "weight degree must be positive");
  require(std::is_sorted(profile.t.begin(), profile.t.end()) &&
              std::adjacent_find(profile.t.begin(), profile.t.end()) == profile.t.end(),
          ErrorCode::invalid_argument, "radial profile grid must be strictly increasing");
  for (double v : profile.values) require(std::isfinite(v), ErrorCode::invalid_argument, "profile values must be finite");
  return Weight(weight_model::Radial{std::move(profile)});
}

Weight Weight::grid(GridCorrection correction, int degree) {
  require(degree >= 1, ErrorCode::invalid_argument, "weight degree must be positive");
  require(correction.nx >= 2 && correction.ny >= 2 && correction.x0 < correction.x1 && correction.y0 < correction.y1,
          ErrorCode::invalid_argument, "grid weight needs a nondegenerate box");
  require(correction.values.size() == static_cast<std::size_t>(correction.nx) * correction.ny,
          ErrorCode::invalid_argument, "grid weight value count mismatch");
  const double edge = correction.values.front();
  for (int j = 0; j < correction.ny; ++j) {
    for (int i = 0; i < correction.nx; ++i) {
      const bool boundary = i == 0 || j == 0 || i == correction.nx - 1 || j == correction.ny - 1;
      const double v = correction.values[static_cast<std::size_t>(j) * correction.nx + i];
      require(std::isfinite(v), ErrorCode::invalid_argument, "grid weight values must be finite");
      if (boundary) {
        require(std::abs(v - edge) <= 1e-12, ErrorCode::invalid_argument,
                "grid correction must be constant on the box boundary");
      }
    }
  }
  return Weight(weight_model::Grid{std::move(correction), degree});
}

Weight Weight::pullback_first(const Weight& base) {
  require(!base.on_product(), ErrorCode::invalid_argument, "pullback base must live on one sphere");
  return Weight(weight_model::PullbackFirst{std::make_shared<const Weight>(base)});
}

Weight Weight::per_component(const std::vector<Weight>& parts) {
  require(!parts.empty(), ErrorCode::invalid_argument, "need at least one component weight");
  weight_model::PerComponent model;
  for (const auto& p : parts) {
    require(p.degree() == parts.front().degree(), ErrorCode::invalid_argument,
            "component weights must share the bundle degree");
    model.parts.push_back(std::make_shared<const Weight>(p));
  }
  return Weight(std::move(model));
}

Weight Weight::shifted(const Weight& base, const Direction& direction, double t) {
  require(std::isfinite(t), ErrorCode::invalid_argument, "shift parameter must be finite");
  if (const auto* s = std::get_if<weight_model::Shifted>(&base.model_); s && s->direction == direction) {
    return Weight(weight_model::Shifted{s->base, direction, s->t + t});
  }
  return Weight(weight_model::Shifted{std::make_shared<const Weight>(base), direction, t});
}

Weight Weight::fiber_inf(const Weight& product_weight, std::vector<Coord> fiber) {
  require(product_weight.on_product(), ErrorCode::unsupported_space, "fiber sup needs a product weight");
  require(!fiber.empty(), ErrorCode::invalid_argument, "fiber grid must be nonempty");
  require(product_weight.degree()[1] == 0, ErrorCode::unsupported_space,
          "fiber sup needs a bundle pulled back from the first factor");
  return Weight(weight_model::FiberInf{std::make_shared<const Weight>(product_weight), std::move(fiber)});
}

double Weight::potential(const Point& p) const {
  using namespace weight_model;
  return std::visit(
      overloaded{
          [&](const Fs& m) { return fs_potential(p.first, m.degree); },
          [&](const BlendedDisk&) {
            if (p.first.at_infinity) return -0.5 * std::numbers::ln2;
            return blended_disk_radial(std::abs(p.first.value));
          },
          [&](const Radial& m) {
            if (p.first.at_infinity) return m.profile.infinity_value();
            const double r = std::abs(p.first.value);
            if (r == 0.0) return m.profile.left_value();
            return m.profile(std::log(r));
          },
          [&](const Grid& m) {
            if (p.first.at_infinity) return m.correction.boundary_value();
            return fs_potential(p.first, m.degree) + m.correction(p.first.value);
          },
          [&](const Shifted& m) { return m.base->potential(p) + m.t * m.direction(p); },
          [&](const FiberInf& m) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& w : m.fiber) best = std::min(best, m.base->potential(Point::pair(p.first, w)));
            return best;
          },
          [&](const PullbackFirst& m) { return m.base->potential(Point{0, p.first, std::nullopt}); },
          [&](const PerComponent& m) {
            require(p.component >= 0 && static_cast<std::size_t>(p.component) < m.parts.size(),
                    ErrorCode::invalid_argument, "point component outside the weight");
            return m.parts[static_cast<std::size_t>(p.component)]->potential(p);
          },
      },
      model_);
}

std::array<int, 2> Weight::degree() const {
  using namespace weight_model;
  return std::visit(overloaded{
                        [](const Fs& m) { return std::array<int, 2>{m.degree, 0}; },
                        [](const BlendedDisk&) { return std::array<int, 2>{1, 0}; },
                        [](const Radial& m) { return std::array<int, 2>{m.profile.degree, 0}; },
                        [](const Grid& m) { return std::array<int, 2>{m.degree, 0}; },
                        [](const Shifted& m) { return m.base->degree(); },
                        [](const FiberInf& m) { return m.base->degree(); },
                        [](const PullbackFirst& m) { return m.base->degree(); },
                        [](const PerComponent& m) { return m.parts.front()->degree(); },
                    },
                    model_);
}

bool Weight::on_product() const {
  using namespace weight_model;
  if (std::holds_alternative<PullbackFirst>(model_)) return true;
  if (const auto* s = std::get_if<Shifted>(&model_)) return s->base->on_product();
  return false;
}

// --- evaluation ------------------------------------------------------------

double eval_section_norm(const Weight& w, std::span<const cplx> coeffs, const Point& x, int k) {
  require(k >= 0, ErrorCode::invalid_argument, "degree must be nonnegative");
  const auto deg = w.degree();
  const int n1 = k * deg[0] + 1;
  const int n2 = k * deg[1] + 1;
  const bool product = x.second.has_value();
  require(product == w.on_product(), ErrorCode::invalid_argument, "point and weight live on different spaces");
  require(coeffs.size() == static_cast<std::size_t>(n1) * n2, ErrorCode::invalid_argument,
          "coefficient count does not match the bundle degree");

  const Coord second = product ? *x.second : Coord{};
  // Evaluate sum c_{ab} z^a w^b, restricted to the top row/column in a coordinate at infinity.
  const auto eval_row = [&](int a) {
    const std::size_t row = static_cast<std::size_t>(a) * n2;
    if (second.at_infinity) return coeffs[row + n2 - 1];
    cplx acc{};
    for (int b = n2 - 1; b >= 0; --b) acc = acc * second.value + coeffs[row + b];
    return acc;
  };
  cplx value{};
  if (x.first.at_infinity) {
    value = eval_row(n1 - 1);
  } else {
    for (int a = n1 - 1; a >= 0; --a) value = value * x.first.value + eval_row(a);
  }
  return std::abs(value) * std::exp(-k * w.potential(x));
}

Weight shift_weight(const WeightFamily& family, double t) {
  require(std::abs(t) <= 1.0, ErrorCode::invalid_argument, "family parameter must satisfy |t| <= 1");
  require(std::isfinite(family.direction.bound()), ErrorCode::invalid_argument, "direction must be bounded");
  return Weight::shifted(family.base, family.direction, t);
}

std::vector<Coord> fiber_grid(int n) {
  require(n >= 2, ErrorCode::invalid_argument, "fiber grid needs at least the two poles");
  std::vector<Coord> grid{Coord{cplx{}, false}, Coord::infinity()};
  const int m = n - 2;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < m; ++i) {
    const double x = 1.0 - 2.0 * (i + 0.5) / m;  // cos of the polar angle, never +-1
    const double r = std::sqrt((1.0 + x) / (1.0 - x));
    const double angle = golden * i;
    grid.push_back(Coord{std::polar(r, angle), false});
  }
  return grid;
}

Weight fiber_sup_weight(const Weight& product_weight, int fiber_points) {
  return fiber_sup_weight(product_weight, fiber_grid(fiber_points));
}

Weight fiber_sup_weight(const Weight& product_weight, std::vector<Coord> fiber) {
  return Weight::fiber_inf(product_weight, std::move(fiber));
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  require(n >= 2 && lo < hi, ErrorCode::invalid_argument, "uniform grid needs n >= 2 and lo < hi");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return g;
}

bool is_radial(const Weight& w, double lo, double hi) {
  if (w.on_product()) return false;
  constexpr int circles = 8;
  constexpr int angles = 16;
  const auto radii = uniform_grid(lo, hi, circles);
  for (double t : radii) {
    const double r = std::exp(t);
    const double ref = w.potential(Point::at(cplx{r, 0.0}));
    const double tol = 1e-10 * std::max(1.0, std::abs(ref));
    for (int j = 1; j < angles; ++j) {
      const double v = w.potential(Point::at(std::polar(r, 2.0 * std::numbers::pi * j / angles)));
      if (std::abs(v - ref) > tol) return false;
    }
  }
  return true;
}

RadialProfile radial_profile(const Weight& w, std::span<const double> t_grid) {
  require(t_grid.size() >= 2, ErrorCode::invalid_argument, "profile grid needs two points");
  require(w.degree()[1] == 0, ErrorCode::not_radial, "product weights are not radial");
  require(is_radial(w, t_grid.front(), t_grid.back()), ErrorCode::not_radial,
          "weight is not rotation invariant on the probe circles");
  RadialProfile profile;
  profile.degree = w.degree()[0];
  profile.t.assign(t_grid.begin(), t_grid.end());
  profile.values.reserve(t_grid.size());
  for (double t : t_grid) profile.values.push_back(w.potential(Point::at(cplx{std::exp(t), 0.0})));
  return profile;
}

double admissibility_sup(const Weight& w, int level) {
  require(level >= 0, ErrorCode::invalid_argument, "refinement level must be nonnegative");
  const int d = w.degree()[0];
  const int radial = 64 << level;
  const int angular = 16 << level;
  const bool product = w.on_product();
  const auto probe = [&](Coord c) {
    return product ? Point::pair(c, Coord{cplx{0.5, 0.25}, false}) : Point{0, c, std::nullopt};
  };
  double sup = std::abs(w.potential(probe(Coord::infinity())));
  const auto t = uniform_grid(-8.0, 8.0, radial + 1);
  for (double s : t) {
    const double r = std::exp(s);
    const double fs = 0.5 * d * std::log1p(r * r);
    for (int j = 0; j < angular; ++j) {
      const Coord c{std::polar(r, 2.0 * std::numbers::pi * j / angular), false};
      sup = std::max(sup, std::abs(w.potential(probe(c)) - fs));
    }
  }
  return sup;
}

}  // namespace linser
