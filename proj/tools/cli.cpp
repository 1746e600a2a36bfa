#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "linser/error.hpp"
#include "linser/io.hpp"

namespace linser::cli {

namespace {

using io::Json;
using io::SchemaError;

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Outcome {
  Json results;
  io::CsvTable table;
  std::vector<Assertion> assertions;
};

const Json& required(const Json& config, const char* key) {
  const auto it = config.find(key);
  if (it == config.end()) throw SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T value_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("field '") + key + "': " + e.what());
  }
}

const Json& assertions_of(const Json& config) {
  static const Json empty = Json::object();
  const auto it = config.find("assert");
  if (it == config.end()) return empty;
  if (!it->is_object()) throw SchemaError("'assert' must be an object");
  return *it;
}

std::string number(double x) { return io::format_number(x); }

void check_at_most(Outcome& o, const std::string& name, double value, double limit) {
  o.assertions.push_back({name, value <= limit, number(value) + " <= " + number(limit)});
}

void check_at_least(Outcome& o, const std::string& name, double value, double limit) {
  o.assertions.push_back({name, value >= limit, number(value) + " >= " + number(limit)});
}

std::vector<double> t_grid_from(const Json& config) {
  const Json& g = required(config, "t_grid");
  if (g.is_array()) return g.get<std::vector<double>>();
  return uniform_grid(value_or<double>(g, "lo", -2.0), value_or<double>(g, "hi", 2.0), value_or<int>(g, "n", 9));
}

FiberDegree fiber_degree_from(const Json& config) {
  if (config.contains("fiber_degree")) return FiberDegree{value_or<double>(config, "fiber_degree", 1.0)};
  if (config.contains("series")) return fiber_degree(io::series_from_json(config.at("series")));
  return FiberDegree{1.0};
}

Outcome run_kappa(const Json& config) {
  const SeriesSpec spec = io::series_from_json(required(config, "series"));
  const int k_max = value_or<int>(config, "k_max", 200);
  const GrowthFit fit = fit_growth(spec, k_max);
  Outcome o;
  o.results = io::to_json(fit);
  o.table.header = {"k", "dim"};
  const auto dims = dimension_table(spec, k_max);
  for (std::size_t k = 0; k < dims.size(); ++k) o.table.rows.push_back({double(k), double(dims[k])});

  const Json& a = assertions_of(config);
  if (a.contains("kappa")) {
    const int expected = a.at("kappa").get<int>();
    o.assertions.push_back({"kappa", fit.kappa == expected, std::to_string(fit.kappa) + " == " + std::to_string(expected)});
  }
  if (a.contains("vol")) {
    const double expected = a.at("vol").get<double>();
    check_at_most(o, "vol", std::abs(fit.vol - expected), value_or<double>(a, "vol_tolerance", 1e-12));
  }
  return o;
}

Outcome run_okounkov(const Json& config) {
  const SeriesSpec spec = io::series_from_json(required(config, "series"));
  const int k_max = value_or<int>(config, "k_max", 200);
  const SemigroupAnalysis body = okounkov_body(spec, k_max);
  Outcome o;
  o.results["body"] = io::to_json(body);
  std::optional<SemigroupAnalysis> closure;
  if (spec.is_monomial_type()) {
    closure = monomial_closure_and_degree(spec, value_or<std::uint64_t>(config, "seed", 1));
    o.results["closure"] = io::to_json(*closure);
  }
  o.table.header = {"x", "y"};
  for (const auto& v : body.hull_vertices) o.table.rows.push_back({v[0], v[1]});

  const Json& a = assertions_of(config);
  if (a.contains("kappa")) {
    const int expected = a.at("kappa").get<int>();
    o.assertions.push_back({"kappa", body.hull_dimension == expected,
                            std::to_string(body.hull_dimension) + " == " + std::to_string(expected)});
  }
  if (a.contains("normalized_volume")) {
    const double expected = a.at("normalized_volume").get<double>();
    check_at_most(o, "normalized_volume", std::abs(body.normalized_volume - expected) / std::abs(expected),
                  value_or<double>(a, "volume_rel_tol", 0.05));
  }
  if (a.contains("generic_degree")) {
    if (!closure) throw SchemaError("generic_degree needs a monomial-type series");
    const auto expected = a.at("generic_degree").get<std::int64_t>();
    o.assertions.push_back({"generic_degree", closure->generic_degree == expected,
                            std::to_string(closure->generic_degree) + " == " + std::to_string(expected)});
  }
  return o;
}

Outcome run_bergman(const Json& config) {
  const SeriesSpec spec = io::series_from_json(required(config, "series"));
  const Weight w = io::weight_from_json(required(config, "weight"));
  const QuadratureMeasure mu = io::measure_from_json(required(config, "measure"));
  const auto k_list = value_or<std::vector<int>>(config, "k_list", {16, 32, 64});
  const QuadratureMeasure target = config.contains("target") ? io::measure_from_json(config.at("target"))
                                                             : circle_quadrature(1.0, 64);
  ScanOptions options;
  options.kappa = value_or<int>(config, "kappa", 1);
  options.moment_order = value_or<int>(config, "moment_order", 4);
  options.push = value_or<bool>(config, "push", false);
  options.record_timing = value_or<bool>(config, "record_timing", false);
  const auto rows = convergence_scan(spec, w, mu, k_list, target, options);

  Outcome o;
  o.results["rows"] = io::to_json(rows);
  o.table.header = {"k", "mass", "discrepancy", "trace_error", "runtime_ms"};
  double worst_trace = 0.0;
  bool nonincreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double dim = static_cast<double>(dims_and_basis(spec, rows[i].k).size());
    const double trace = rows[i].mass * std::pow(static_cast<double>(rows[i].k), options.kappa);
    const double trace_error = std::abs(trace - dim) / dim;
    worst_trace = std::max(worst_trace, trace_error);
    if (i > 0 && rows[i].discrepancy > rows[i - 1].discrepancy) nonincreasing = false;
    o.table.rows.push_back({double(rows[i].k), rows[i].mass, rows[i].discrepancy, trace_error, rows[i].runtime_ms});
  }
  o.results["max_trace_error"] = worst_trace;

  const Json& a = assertions_of(config);
  if (a.contains("max_discrepancy") && !rows.empty()) {
    check_at_most(o, "discrepancy at k=" + std::to_string(rows.back().k), rows.back().discrepancy,
                  a.at("max_discrepancy").get<double>());
  }
  if (value_or<bool>(a, "nonincreasing", false)) {
    o.assertions.push_back({"discrepancy nonincreasing", nonincreasing, nonincreasing ? "yes" : "no"});
  }
  if (a.contains("trace_tolerance")) check_at_most(o, "trace identity", worst_trace, a.at("trace_tolerance").get<double>());
  return o;
}

Outcome run_envelope(const Json& config) {
  const SeriesSpec spec = config.contains("series") ? io::series_from_json(config.at("series")) : SeriesSpec::full(1);
  const Weight w = io::weight_from_json(required(config, "weight"));
  const SampleSet set = io::set_from_json(required(config, "set"));
  const auto t_grid = t_grid_from(config);
  EnvelopeOptions options;
  options.facets = value_or<int>(config, "facets", 16);
  options.monotone_tolerance = value_or<double>(config, "monotone_tolerance", 1e-3);
  const auto mode = value_or<std::string>(config, "mode", "sup_chebyshev");
  if (mode == "bm_equivalent") {
    options.mode = EnvelopeMode::bm_equivalent;
    options.bm_measure = io::measure_from_json(required(config, "measure"));
  } else if (mode != "sup_chebyshev") {
    throw SchemaError("unknown envelope mode '" + mode + "'");
  }
  const EnvelopeGrid iterate = envelope_iterate(spec, w, set, t_grid, value_or<int>(config, "k_max", 128), options);

  Outcome o;
  o.results["iterate"] = io::to_json(iterate);
  o.table.header = {"t", "iterate"};
  std::optional<EnvelopeGrid> oracle;
  if (set.radial_range() && is_radial(w)) {
    oracle = radial_envelope_oracle(w, set, t_grid);
    o.results["oracle"] = io::to_json(*oracle);
    o.table.header.push_back("oracle");
  }
  double distance = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    std::vector<double> row{t_grid[i], iterate.values[i]};
    if (oracle) {
      row.push_back(oracle->values[i]);
      distance = std::max(distance, std::abs(iterate.values[i] - oracle->values[i]));
    }
    o.table.rows.push_back(std::move(row));
  }
  if (oracle) o.results["oracle_distance"] = distance;

  const Json& a = assertions_of(config);
  if (a.contains("max_distance")) {
    if (!oracle) throw SchemaError("max_distance needs a radial weight and a radial set");
    check_at_most(o, "iterate vs oracle", distance, a.at("max_distance").get<double>());
  }
  if (a.contains("tautological")) {
    const Json& tau = a.at("tautological");
    const auto ks = value_or<std::vector<int>>(tau, "k_list", {8, 16, 32});
    const auto rows = tautological_check(w, set, ks, value_or<std::uint64_t>(config, "seed", 1),
                                         value_or<int>(tau, "samples", 64));
    Json out = Json::array();
    double worst = 0.0;
    for (const auto& r : rows) {
      out.push_back({{"k", r.k}, {"relative_gap", r.relative_gap}});
      worst = std::max(worst, r.relative_gap);
    }
    o.results["tautological"] = out;
    check_at_most(o, "tautological gap", worst, value_or<double>(tau, "max_gap", 1e-8));
  }
  return o;
}

Outcome run_energy(const Json& config) {
  const Weight w0 = io::weight_from_json(required(config, "weight0"));
  const Weight w1 = io::weight_from_json(required(config, "weight1"));
  const SampleSet set = io::set_from_json(required(config, "set"));
  const int points = value_or<int>(config, "grid_points", 4001);
  const EnvelopeGrid env0 = radial_limit_envelope(w0, set, points);
  const EnvelopeGrid env1 = radial_limit_envelope(w1, set, points);
  const EnergyDiff e = kappa_energy_diff(env0, env1, value_or<int>(config, "kappa", 1), fiber_degree_from(config));

  Outcome o;
  o.results = io::to_json(e);
  o.table.header = {"t", "psi0", "psi1"};
  for (std::size_t i = 0; i < env0.t.size(); ++i) o.table.rows.push_back({env0.t[i], env0.values[i], env1.values[i]});
  const Json& a = assertions_of(config);
  if (a.contains("value")) {
    check_at_most(o, "energy difference", std::abs(e.value - a.at("value").get<double>()),
                  value_or<double>(a, "tolerance", 1e-6));
  }
  return o;
}

Outcome run_volratio(const Json& config) {
  const SeriesSpec spec = config.contains("series") ? io::series_from_json(config.at("series")) : SeriesSpec::full(1);
  const Weight w0 = io::weight_from_json(required(config, "weight0"));
  const Weight w1 = io::weight_from_json(required(config, "weight1"));
  const SampleSet set = io::set_from_json(required(config, "set"));
  const QuadratureMeasure mu = io::measure_from_json(required(config, "measure"));
  const auto k_list = value_or<std::vector<int>>(config, "k_list", {16, 32, 64, 128});
  const VolumeRatioCheck check = volume_ratio_limit_check(spec, w0, w1, set, mu, k_list, value_or<int>(config, "kappa", 1),
                                                          fiber_degree_from(config));
  Outcome o;
  o.results = io::to_json(check);
  o.table.header = {"k", "log_ratio", "raw_normalized", "normalized", "error_budget"};
  for (const auto& r : check.series.rows) {
    o.table.rows.push_back({double(r.k), r.log_ratio, r.raw_normalized, r.normalized, r.error_budget});
  }
  const Json& a = assertions_of(config);
  if (a.contains("max_gap") && !check.series.rows.empty()) {
    const auto& last = check.series.rows.back();
    check_at_most(o, "volume ratio vs energy at k=" + std::to_string(last.k), std::abs(last.normalized - check.oracle.value),
                  a.at("max_gap").get<double>());
  }
  return o;
}

Outcome run_derivative(const Json& config) {
  const WeightFamily family{io::weight_from_json(required(config, "weight")),
                            io::direction_from_json(required(config, "direction"))};
  const SampleSet set = config.contains("set") ? io::set_from_json(config.at("set")) : SampleSet::sphere(8, 16);
  DerivativeOptions options;
  options.steps = value_or<std::vector<double>>(config, "steps", options.steps);
  options.fiber_points = value_or<int>(config, "fiber_points", options.fiber_points);
  options.grid_points = value_or<int>(config, "grid_points", options.grid_points);
  const DerivativeScan scan = energy_derivative_scan(family, set, fiber_degree_from(config), options);

  Outcome o;
  o.results = io::to_json(scan);
  o.table.header = {"t", "energy"};
  for (std::size_t i = 0; i < scan.t.size(); ++i) o.table.rows.push_back({scan.t[i], scan.energy[i]});
  const Json& a = assertions_of(config);
  const double scale = std::abs(scan.slope_plus);
  if (a.contains("min_gap_ratio")) check_at_least(o, "one-sided slope gap", scan.slope_gap, a.at("min_gap_ratio").get<double>() * scale);
  if (a.contains("max_gap_ratio")) check_at_most(o, "one-sided slope gap", scan.slope_gap, a.at("max_gap_ratio").get<double>() * scale);
  if (a.contains("expected_rel_tol")) {
    check_at_most(o, "slope vs equilibrium integral", std::abs(scan.slope_plus - scan.expected_slope),
                  a.at("expected_rel_tol").get<double>() * std::abs(scan.expected_slope));
  }
  return o;
}

Outcome run_counterexample(const Json& config) {
  const int count = value_or<int>(config, "count", 2);
  const int k_budget = value_or<int>(config, "k_max", 96);
  AnnuliSearchOptions search;
  search.target = value_or<double>(config, "target", search.target);
  search.inner_radius = value_or<double>(config, "inner_radius", search.inner_radius);
  const AnnuliPlan plan = find_annuli(Weight::blended_disk(), count, k_budget, search);
  const Counterexample built = build_counterexample(plan);

  std::vector<int> default_list;
  for (int k : search.candidates) {
    if (k <= k_budget) default_list.push_back(k);
  }
  const auto k_list = value_or<std::vector<int>>(config, "k_list", default_list);
  const auto rescue_list = value_or<std::vector<int>>(config, "rescue_k_list", {12, 24, 48, 96});
  const OscillationReport oscillation = divergence_scan(built, k_list);
  const RescueReport rescue = pushforward_rescue(built, rescue_list);

  Outcome o;
  o.results = {{"plan", io::to_json(plan)}, {"oscillation", io::to_json(oscillation)}, {"rescue", io::to_json(rescue)}};
  o.table.header = {"k", "first_sheet_mass", "pushed_discrepancy"};
  std::map<int, std::array<double, 2>> merged;
  constexpr double missing = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : oscillation.rows) merged[r.k] = {r.first_sheet_mass, missing};
  for (const auto& r : rescue.rows) {
    auto [it, fresh] = merged.try_emplace(r.k, std::array<double, 2>{missing, missing});
    it->second[1] = r.discrepancy;
  }
  for (const auto& [k, v] : merged) o.table.rows.push_back({double(k), v[0], v[1]});

  const Json& a = assertions_of(config);
  check_at_least(o, "oscillation amplitude", oscillation.amplitude, value_or<double>(a, "min_amplitude", 0.15));
  check_at_most(o, "pushed discrepancy at k=" + std::to_string(rescue_list.empty() ? 0 : rescue_list.back()),
                rescue.final_discrepancy, value_or<double>(a, "max_discrepancy", 0.1));
  if (value_or<bool>(a, "decreasing", false)) {
    o.assertions.push_back({"pushed discrepancy trend", rescue.decreasing, rescue.decreasing ? "yes" : "no"});
  }
  return o;
}

const std::map<std::string, std::function<Outcome(const Json&)>>& commands() {
  static const std::map<std::string, std::function<Outcome(const Json&)>> table{
      {"kappa", run_kappa},   {"okounkov", run_okounkov},     {"bergman", run_bergman},
      {"envelope", run_envelope}, {"energy", run_energy},     {"volratio", run_volratio},
      {"derivative", run_derivative}, {"counterexample", run_counterexample}};
  return table;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream os;
  os << std::put_time(&utc, "%Y%m%dT%H%M%SZ");
  return os.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Run a linear-series experiment described by a JSON configuration."};
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> k_max;
  bool quiet = false;
  bool deterministic_names = false;
  app.add_option("--config", config_path, "experiment configuration (JSON)")->required();
  app.add_option("--out", out_dir, "directory for JSON and CSV artifacts");
  app.add_option("--seed", seed, "seed for randomized checks; overrides the config");
  app.add_option("--kmax", k_max, "largest degree; overrides the config");
  app.add_flag("--quiet", quiet, "suppress the per-assertion summary");
  app.add_flag("--deterministic-names", deterministic_names, "name artifacts <command>.json and <command>.csv");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? pass : usage_error;
  }

  Json config;
  std::string command;
  Outcome outcome;
  try {
    std::ifstream in(config_path);
    if (!in) throw SchemaError("cannot read " + config_path);
    config = Json::parse(in);
    if (!config.is_object()) throw SchemaError("configuration must be a JSON object");
    command = required(config, "command").get<std::string>();
    const auto it = commands().find(command);
    if (it == commands().end()) throw SchemaError("unknown command '" + command + "'");
    if (seed) config["seed"] = *seed;
    if (k_max) config["k_max"] = *k_max;
    outcome = it->second(config);
  } catch (const SchemaError& e) {
    err << "usage error: " << e.what() << '\n';
    return usage_error;
  } catch (const nlohmann::json::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return usage_error;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return numeric_failure;
  }

  bool all_passed = true;
  Json assertions = Json::array();
  for (const auto& a : outcome.assertions) {
    all_passed = all_passed && a.passed;
    assertions.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  }
  const Json record{{"command", command}, {"config", config}, {"results", outcome.results},
                    {"assertions", assertions}, {"passed", all_passed}};

  const std::string stem = deterministic_names ? command : command + "_" + timestamp();
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream json_file(dir / (stem + ".json"));
  std::ofstream csv_file(dir / (stem + ".csv"));
  if (!json_file || !csv_file) {
    err << "usage error: cannot write artifacts to " << out_dir << '\n';
    return usage_error;
  }
  json_file << record.dump(2) << '\n';
  io::write_csv(csv_file, outcome.table);

  if (!quiet) {
    for (const auto& a : outcome.assertions) out << (a.passed ? "PASS " : "FAIL ") << a.name << ": " << a.detail << '\n';
  }
  return all_passed ? pass : numeric_failure;
}

}  // namespace linser::cli
