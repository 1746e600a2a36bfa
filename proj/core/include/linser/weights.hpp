#pragma once

#include <array>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "linser/geometry.hpp"

namespace linser {

// Sampled radial potential t -> phi(e^t). Outside the samples it continues with
// slope 0 to the left and slope `degree` to the right.
struct RadialProfile {
  std::vector<double> t;
  std::vector<double> values;
  int degree = 1;

  double operator()(double s) const;
  double left_value() const { return values.front(); }
  // lim_{t -> inf} phi - degree * t
  double infinity_value() const { return values.back() - degree * t.back(); }
};

// Bounded continuous function used as a direction for weight families.
class Direction {
 public:
  enum class Kind { constant, component_indicator, radial_bump, fs_bump, fiber_sign };

  static Direction constant(double value);
  static Direction component_indicator(int component);
  // height * (1 - ((log|z| - center)/half_width)^2)^2 inside the window, 0 outside.
  static Direction radial_bump(double center, double half_width, double height);
  // height / (1 + |z|^2); tends to 0 at infinity.
  static Direction fs_bump(double height);
  // base(z) * (1 - |w|^2)/(1 + |w|^2) on a product: +base on P1 x {0}, -base on P1 x {inf}.
  static Direction fiber_sign(const Direction& base);

  double operator()(const Point& p) const;
  double bound() const;
  // True when the function factors through the base map (depends on the first coordinate only).
  bool pulled_back() const;
  bool radial() const;
  Kind kind() const noexcept { return kind_; }

  bool operator==(const Direction& other) const;

  // Serialization access.
  const std::array<double, 3>& params() const noexcept { return params_; }
  int component() const noexcept { return component_; }
  const Direction* inner() const noexcept { return inner_.get(); }

 private:
  Kind kind_ = Kind::constant;
  std::array<double, 3> params_{0.0, 0.0, 0.0};
  int component_ = 0;
  std::shared_ptr<const Direction> inner_;
};

// Cartesian grid correction on [x0,x1] x [y0,y1]; values[j * nx + i] at (x_i, y_j).
// The boundary ring must be constant so that the extension outside the box is continuous.
struct GridCorrection {
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  int nx = 2, ny = 2;
  std::vector<double> values;

  double operator()(cplx z) const;
  double boundary_value() const { return values.front(); }
};

class Weight;

namespace weight_model {
struct Fs { int degree = 1; };
struct BlendedDisk {};
struct Radial { RadialProfile profile; };
struct Grid { GridCorrection correction; int degree = 1; };
struct Shifted { std::shared_ptr<const Weight> base; Direction direction; double t = 0.0; };
struct FiberInf { std::shared_ptr<const Weight> base; std::vector<Coord> fiber; };
struct PullbackFirst { std::shared_ptr<const Weight> base; };
struct PerComponent { std::vector<std::shared_ptr<const Weight>> parts; };
using Model = std::variant<Fs, BlendedDisk, Radial, Grid, Shifted, FiberInf, PullbackFirst, PerComponent>;
}  // namespace weight_model

// Continuous metric h = e^{-2 phi} on O(d) in the affine chart. `potential`
// returns phi, and at a coordinate at infinity the regularised limit
// phi - d log|coordinate|.
class Weight {
 public:
  static Weight fs(int degree = 1);
  static Weight blended_disk();
  static Weight radial(RadialProfile profile);
  static Weight grid(GridCorrection correction, int degree = 1);
  // Product weight depending on the first coordinate only (bundle pi^* O(d)).
  static Weight pullback_first(const Weight& base);
  static Weight per_component(const std::vector<Weight>& parts);
  // phi + t f; shifting an already shifted weight along the same direction adds parameters.
  static Weight shifted(const Weight& base, const Direction& direction, double t);
  static Weight fiber_inf(const Weight& product_weight, std::vector<Coord> fiber);

  double potential(const Point& p) const;
  std::array<int, 2> degree() const;
  bool on_product() const;
  const weight_model::Model& model() const noexcept { return model_; }

 private:
  explicit Weight(weight_model::Model m) : model_(std::move(m)) {}
  weight_model::Model model_;
};

struct WeightFamily {
  Weight base;
  Direction direction;
};

// |p(z)| e^{-k phi(z)} for raw polynomial coefficients (row-major (a, b) on products).
double eval_section_norm(const Weight& w, std::span<const cplx> coeffs, const Point& x, int k);

Weight shift_weight(const WeightFamily& family, double t);

// 0, infinity and n - 2 Fibonacci-sphere points.
std::vector<Coord> fiber_grid(int n = 64);
Weight fiber_sup_weight(const Weight& product_weight, int fiber_points = 64);
Weight fiber_sup_weight(const Weight& product_weight, std::vector<Coord> fiber);

RadialProfile radial_profile(const Weight& w, std::span<const double> t_grid);
bool is_radial(const Weight& w, double lo = -3.0, double hi = 3.0);

// sup over a chart probe grid of |phi - (d/2) log(1+|z|^2)|, refined with `level`.
double admissibility_sup(const Weight& w, int level);

std::vector<double> uniform_grid(double lo, double hi, int n);

}  // namespace linser
