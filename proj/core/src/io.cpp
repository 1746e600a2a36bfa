#include "linser/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace linser::io {

namespace {

const Json& member(const Json& j, const char* key) {
  if (!j.is_object()) throw SchemaError(std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T field(const Json& j, const char* key) {
  try {
    return member(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T field_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return field<T>(j, key);
}

std::string kind_of(const Json& j) { return field<std::string>(j, "kind"); }

SpaceModel space_from_json(const Json& j) {
  const auto structure = field<std::string>(j, "structure");
  if (structure == "sphere") return SpaceModel::sphere();
  if (structure == "union") return SpaceModel::disjoint_union(field_or<int>(j, "components", 2));
  if (structure == "product") return SpaceModel::product();
  throw SchemaError("unknown space structure '" + structure + "'");
}

Json space_to_json(const SpaceModel& s) {
  switch (s.structure) {
    case Structure::single_sphere: return {{"structure", "sphere"}};
    case Structure::disjoint_union: return {{"structure", "union"}, {"components", s.components}};
    case Structure::product: return {{"structure", "product"}};
  }
  return {};
}

Json coord_to_json(const Coord& c) {
  if (c.at_infinity) return "inf";
  return Json::array({c.value.real(), c.value.imag()});
}

Coord coord_from_json(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return Coord::infinity();
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SchemaError("a coordinate is \"inf\" or [re, im]");
  }
  return Coord{cplx{j[0].get<double>(), j[1].get<double>()}};
}

Json point_to_json(const Point& p) {
  Json j{{"component", p.component}, {"first", coord_to_json(p.first)}};
  if (p.second) j["second"] = coord_to_json(*p.second);
  return j;
}

Json complex_matrix(const Eigen::MatrixXcd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* role_name(AnnulusRole r) { return r == AnnulusRole::a_set ? "A" : "C"; }

}  // namespace

SeriesSpec series_from_json(const Json& j) {
  const auto kind = kind_of(j);
  if (kind == "full") return SeriesSpec::full(field_or<int>(j, "degree", 1));
  if (kind == "full_product") {
    const auto d = field<std::array<int, 2>>(j, "degrees");
    return SeriesSpec::full_product(d[0], d[1]);
  }
  if (kind == "even_degree") return SeriesSpec::even_degree();
  if (kind == "monomial") {
    std::vector<Generator> gens;
    for (const auto& g : member(j, "generators")) {
      gens.push_back({field<int>(g, "degree"), field_or<Exponent>(g, "exponent", Exponent{0, 0})});
    }
    return SeriesSpec::monomial(field_or<int>(j, "rank", 1), std::move(gens),
                                field_or<std::array<int, 2>>(j, "line_degree", {1, 0}),
                                field_or<bool>(j, "saturated", false));
  }
  if (kind == "pullback") return SeriesSpec::pullback(series_from_json(member(j, "base")), space_from_json(member(j, "space")));
  if (kind == "divisor_shift") {
    std::vector<DivisorRoot> roots;
    for (const auto& r : member(j, "roots")) {
      roots.push_back({cplx{field<double>(r, "re"), field_or<double>(r, "im", 0.0)}, field_or<int>(r, "multiplicity", 1)});
    }
    return SeriesSpec::divisor_shift(series_from_json(member(j, "base")), std::move(roots));
  }
  if (kind == "sym_power") return SeriesSpec::sym_power(series_from_json(member(j, "base")), field<int>(j, "power"));
  throw SchemaError("unknown series kind '" + kind + "'");
}

Json to_json(const SeriesSpec& spec) {
  switch (spec.variant) {
    case SeriesVariant::full:
      if (spec.space.structure == Structure::product) {
        return {{"kind", "full_product"}, {"degrees", spec.line_degree}};
      }
      return {{"kind", "full"}, {"degree", spec.line_degree[0]}};
    case SeriesVariant::even_degree: return {{"kind", "even_degree"}};
    case SeriesVariant::monomial: {
      Json gens = Json::array();
      for (const auto& g : spec.generators) gens.push_back({{"degree", g.degree}, {"exponent", g.exponent}});
      return {{"kind", "monomial"}, {"rank", spec.rank}, {"generators", gens},
              {"line_degree", spec.line_degree}, {"saturated", spec.saturated}};
    }
    case SeriesVariant::pullback:
      return {{"kind", "pullback"}, {"base", to_json(*spec.base)}, {"space", space_to_json(spec.space)}};
    case SeriesVariant::divisor_shift: {
      Json roots = Json::array();
      for (const auto& r : spec.roots) {
        roots.push_back({{"re", r.root.real()}, {"im", r.root.imag()}, {"multiplicity", r.multiplicity}});
      }
      return {{"kind", "divisor_shift"}, {"base", to_json(*spec.base)}, {"roots", roots}};
    }
    case SeriesVariant::sym_power:
      return {{"kind", "sym_power"}, {"base", to_json(*spec.base)}, {"power", spec.power}};
  }
  return {};
}

Direction direction_from_json(const Json& j) {
  const auto kind = kind_of(j);
  if (kind == "constant") return Direction::constant(field<double>(j, "value"));
  if (kind == "component_indicator") return Direction::component_indicator(field<int>(j, "component"));
  if (kind == "radial_bump") {
    return Direction::radial_bump(field<double>(j, "center"), field<double>(j, "half_width"), field<double>(j, "height"));
  }
  if (kind == "fs_bump") return Direction::fs_bump(field_or<double>(j, "height", 1.0));
  if (kind == "fiber_sign") return Direction::fiber_sign(direction_from_json(member(j, "base")));
  throw SchemaError("unknown direction kind '" + kind + "'");
}

Json to_json(const Direction& d) {
  const auto& p = d.params();
  switch (d.kind()) {
    case Direction::Kind::constant: return {{"kind", "constant"}, {"value", p[0]}};
    case Direction::Kind::component_indicator: return {{"kind", "component_indicator"}, {"component", d.component()}};
    case Direction::Kind::radial_bump:
      return {{"kind", "radial_bump"}, {"center", p[0]}, {"half_width", p[1]}, {"height", p[2]}};
    case Direction::Kind::fs_bump: return {{"kind", "fs_bump"}, {"height", p[0]}};
    case Direction::Kind::fiber_sign: return {{"kind", "fiber_sign"}, {"base", to_json(*d.inner())}};
  }
  return {};
}

Weight weight_from_json(const Json& j) {
  const auto kind = kind_of(j);
  if (kind == "fs") return Weight::fs(field_or<int>(j, "degree", 1));
  if (kind == "blended_disk") return Weight::blended_disk();
  if (kind == "radial") {
    return Weight::radial(RadialProfile{field<std::vector<double>>(j, "t"), field<std::vector<double>>(j, "values"),
                                        field_or<int>(j, "degree", 1)});
  }
  if (kind == "grid") {
    GridCorrection g;
    const auto box = field<std::array<double, 4>>(j, "box");
    g.x0 = box[0];
    g.x1 = box[1];
    g.y0 = box[2];
    g.y1 = box[3];
    g.nx = field<int>(j, "nx");
    g.ny = field<int>(j, "ny");
    g.values = field<std::vector<double>>(j, "values");
    return Weight::grid(std::move(g), field_or<int>(j, "degree", 1));
  }
  if (kind == "pullback_first") return Weight::pullback_first(weight_from_json(member(j, "base")));
  if (kind == "per_component") {
    std::vector<Weight> parts;
    for (const auto& p : member(j, "parts")) parts.push_back(weight_from_json(p));
    return Weight::per_component(parts);
  }
  if (kind == "shifted") {
    return Weight::shifted(weight_from_json(member(j, "base")), direction_from_json(member(j, "direction")),
                           field<double>(j, "t"));
  }
  if (kind == "fiber_inf") {
    std::vector<Coord> fiber;
    for (const auto& c : member(j, "fiber")) fiber.push_back(coord_from_json(c));
    return Weight::fiber_inf(weight_from_json(member(j, "base")), std::move(fiber));
  }
  if (kind == "fiber_sup") return fiber_sup_weight(weight_from_json(member(j, "base")), field_or<int>(j, "points", 64));
  throw SchemaError("unknown weight kind '" + kind + "'");
}

Json to_json(const Weight& w) {
  using namespace weight_model;
  return std::visit(
      [](const auto& m) -> Json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Fs>) {
          return {{"kind", "fs"}, {"degree", m.degree}};
        } else if constexpr (std::is_same_v<M, BlendedDisk>) {
          return {{"kind", "blended_disk"}};
        } else if constexpr (std::is_same_v<M, Radial>) {
          return {{"kind", "radial"}, {"t", m.profile.t}, {"values", m.profile.values}, {"degree", m.profile.degree}};
        } else if constexpr (std::is_same_v<M, Grid>) {
          const auto& g = m.correction;
          return {{"kind", "grid"}, {"box", {g.x0, g.x1, g.y0, g.y1}}, {"nx", g.nx}, {"ny", g.ny},
                  {"values", g.values}, {"degree", m.degree}};
        } else if constexpr (std::is_same_v<M, Shifted>) {
          return {{"kind", "shifted"}, {"base", to_json(*m.base)}, {"direction", to_json(m.direction)}, {"t", m.t}};
        } else if constexpr (std::is_same_v<M, FiberInf>) {
          Json fiber = Json::array();
          for (const auto& c : m.fiber) fiber.push_back(coord_to_json(c));
          return {{"kind", "fiber_inf"}, {"base", to_json(*m.base)}, {"fiber", fiber}};
        } else if constexpr (std::is_same_v<M, PullbackFirst>) {
          return {{"kind", "pullback_first"}, {"base", to_json(*m.base)}};
        } else {
          Json parts = Json::array();
          for (const auto& p : m.parts) parts.push_back(to_json(*p));
          return {{"kind", "per_component"}, {"parts", parts}};
        }
      },
      w.model());
}

SampleSet set_from_json(const Json& j) {
  const auto kind = kind_of(j);
  const int refinement = field_or<int>(j, "refinement", 0);
  SampleSet base;
  if (kind == "circle") {
    base = SampleSet::circle(field_or<double>(j, "radius", 1.0), field<int>(j, "n"), refinement);
  } else if (kind == "disk") {
    base = SampleSet::disk(field_or<double>(j, "radius", 1.0), field<int>(j, "n_radial"), field<int>(j, "n_angular"),
                           refinement);
  } else if (kind == "annulus") {
    base = SampleSet::annulus(field<double>(j, "inner"), field<double>(j, "outer"), field<int>(j, "n_radial"),
                              field<int>(j, "n_angular"), refinement);
  } else if (kind == "interval") {
    base = SampleSet::interval(field<double>(j, "lo"), field<double>(j, "hi"), field<int>(j, "n"), refinement);
  } else if (kind == "sphere") {
    base = SampleSet::sphere(field<int>(j, "n_polar"), field<int>(j, "n_azimuth"), refinement);
  } else {
    throw SchemaError("unknown set kind '" + kind + "'");
  }
  const int components = field_or<int>(j, "components", 1);
  return components > 1 ? SampleSet::on_components(base, components) : base;
}

QuadratureMeasure measure_from_json(const Json& j) {
  const auto kind = kind_of(j);
  if (kind == "circle") return circle_quadrature(field_or<double>(j, "radius", 1.0), field<int>(j, "n"));
  if (kind == "disk") {
    return disk_quadrature(field_or<double>(j, "radius", 1.0), field<int>(j, "n_radial"), field<int>(j, "n_angular"));
  }
  if (kind == "sphere") return sphere_quadrature(field<int>(j, "n_polar"), field<int>(j, "n_azimuth"));
  if (kind == "product") return product_measure(measure_from_json(member(j, "first")), measure_from_json(member(j, "second")));
  if (kind == "union") {
    const int components = field<int>(j, "components");
    std::vector<QuadratureMeasure> parts;
    for (const auto& p : member(j, "parts")) {
      parts.push_back(on_component(measure_from_json(member(p, "measure")), field<int>(p, "component"), components)
                          .scaled(field_or<double>(p, "scale", 1.0)));
    }
    return combine(parts);
  }
  throw SchemaError("unknown measure kind '" + kind + "'");
}

Json to_json(const QuadratureMeasure& mu) {
  Json nodes = Json::array();
  for (const auto& p : mu.nodes) nodes.push_back(point_to_json(p));
  return {{"descriptor", mu.descriptor}, {"components", mu.components}, {"product", mu.product},
          {"total_mass", mu.total_mass}, {"nodes", nodes}, {"weights", mu.weights}};
}

Json to_json(const GramMatrix& g) {
  Json exps = Json::array();
  for (const auto& e : g.basis.basis.exponents) exps.push_back(e);
  return {{"k", g.k()}, {"exponents", exps}, {"scale", g.basis.scale}, {"measure_mass", g.measure_mass},
          {"entries", complex_matrix(g.entries)}};
}

Json to_json(const GrowthFit& fit) {
  return {{"kappa", fit.kappa}, {"vol", fit.vol}, {"window", {fit.window_lo, fit.window_hi}},
          {"slope", fit.slope}, {"residual", fit.residual}};
}

Json to_json(const SemigroupAnalysis& a) {
  Json j{{"hull_dimension", a.hull_dimension}, {"lattice_rank", a.lattice_rank}, {"body_volume", a.body_volume},
         {"normalized_volume", a.normalized_volume}, {"hull_vertices", a.hull_vertices},
         {"generic_degree", a.generic_degree}, {"preimage_count", a.preimage_count}};
  if (a.saturation) j["saturation"] = to_json(*a.saturation);
  return j;
}

Json to_json(const std::vector<ScanRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back({{"k", r.k}, {"mass", r.mass}, {"discrepancy", r.discrepancy}, {"runtime_ms", r.runtime_ms}});
  }
  return out;
}

Json to_json(const EnvelopeGrid& env) {
  Json j{{"t", env.t}, {"values", env.values}, {"degree", env.degree}, {"k_source", env.k_source},
         {"gap", env.gap}, {"mode", env.mode}};
  if (!env.iterates.empty()) {
    j["iterate_degrees"] = env.iterate_degrees;
    j["iterates"] = env.iterates;
  }
  if (!env.support.empty()) j["support"] = env.support;
  if (!env.distortion.empty()) {
    Json d = Json::array();
    for (const auto& p : env.distortion) d.push_back({{"k", p.k}, {"epsilon", p.epsilon}, {"log_constant", p.log_constant}});
    j["distortion"] = d;
  }
  return j;
}

Json to_json(const EnergyDiff& e) {
  return {{"value", e.value}, {"kappa", e.kappa}, {"fiber_degree", e.fiber_degree.value}, {"components", e.components}};
}

Json to_json(const VolumeRatioCheck& check) {
  Json rows = Json::array();
  for (const auto& r : check.series.rows) {
    rows.push_back({{"k", r.k}, {"log_ratio", r.log_ratio}, {"raw_normalized", r.raw_normalized},
                    {"normalized", r.normalized}, {"error_budget", r.error_budget}});
  }
  return {{"kappa", check.series.kappa}, {"rows", rows}, {"oracle", to_json(check.oracle)}};
}

Json to_json(const DerivativeScan& s) {
  return {{"t", s.t}, {"energy", s.energy}, {"slope_minus", s.slope_minus}, {"slope_plus", s.slope_plus},
          {"slope_gap", s.slope_gap}, {"expected_slope", s.expected_slope}, {"pulled_back", s.pulled_back}};
}

Json to_json(const AnnuliPlan& plan) {
  Json annuli = Json::array();
  for (const auto& a : plan.annuli) {
    annuli.push_back({{"inner", a.inner}, {"outer", a.outer}, {"degree", a.degree}, {"role", role_name(a.role)},
                      {"mass", a.mass}});
  }
  return {{"annuli", annuli}, {"target", plan.target}, {"requested", plan.requested}, {"complete", plan.complete()},
          {"n_radial", plan.n_radial}, {"n_angular", plan.n_angular}};
}

Json to_json(const OscillationReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back({{"k", row.k}, {"first_sheet_mass", row.first_sheet_mass}});
  return {{"rows", rows}, {"max_on_a", r.max_on_a}, {"min_on_c", r.min_on_c}, {"amplitude", r.amplitude}};
}

Json to_json(const RescueReport& r) {
  return {{"rows", to_json(r.rows)}, {"final_discrepancy", r.final_discrepancy}, {"decreasing", r.decreasing}};
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, x);
  return std::string(buffer, result.ptr);
}

void write_csv(std::ostream& os, const CsvTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

}  // namespace linser::io
