#include "linser/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linser/error.hpp"

namespace linser {

namespace {

constexpr int max_annuli = 8;

// Cumulative ring masses of the normalized density at one degree; cum[i] is the
// mass of rings 0..i-1.
struct RingTable {
  int degree = 0;
  std::vector<double> cum;
};

class PlanSearch {
 public:
  PlanSearch(std::vector<RingTable> tables, int first_ring, int rings)
      : tables_(std::move(tables)), first_(first_ring), rings_(rings) {}

  // Smallest-first boundaries achieving `level` in every annulus, or empty.
  std::vector<int> boundaries(std::span<const int> seq, double level) const {
    std::vector<int> out{first_};
    int b = first_;
    for (std::size_t j = 0; j < seq.size(); ++j) {
      const auto& cum = tables_[static_cast<std::size_t>(seq[j])].cum;
      if (j + 1 == seq.size()) {
        if (cum[rings_] - cum[b] < level) return {};
        out.push_back(rings_);
        break;
      }
      int next = b + 1;
      while (next < rings_ && cum[next] - cum[b] < level) ++next;
      if (next >= rings_) return {};
      out.push_back(next);
      b = next;
    }
    return out;
  }

  double best_level(std::span<const int> seq) const {
    if (boundaries(seq, 0.0).empty()) return -1.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (boundaries(seq, mid).empty() ? hi : lo) = mid;
    }
    return lo;
  }

  const RingTable& table(int index) const { return tables_[static_cast<std::size_t>(index)]; }
  std::size_t size() const noexcept { return tables_.size(); }

 private:
  std::vector<RingTable> tables_;
  int first_;
  int rings_;
};

void enumerate(const PlanSearch& search, std::vector<int>& seq, int start, int count, double& best,
               std::vector<int>& best_seq) {
  if (static_cast<int>(seq.size()) == count) {
    const double level = search.best_level(seq);
    if (level > best) {
      best = level;
      best_seq = seq;
    }
    return;
  }
  for (int i = start; i < static_cast<int>(search.size()); ++i) {
    seq.push_back(i);
    enumerate(search, seq, i + 1, count, best, best_seq);
    seq.pop_back();
  }
}

}  // namespace

bool AnnuliPlan::complete() const noexcept {
  return static_cast<int>(annuli.size()) == requested && min_mass() >= target;
}

double AnnuliPlan::min_mass() const noexcept {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& a : annuli) m = std::min(m, a.mass);
  return annuli.empty() ? 0.0 : m;
}

std::vector<int> AnnuliPlan::degrees(AnnulusRole role) const {
  std::vector<int> out;
  for (const auto& a : annuli) {
    if (a.role == role) out.push_back(a.degree);
  }
  return out;
}

double annulus_mass(const QuadratureMeasure& density, double inner, double outer) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < density.size(); ++i) {
    const Coord& c = density.nodes[i].first;
    if (c.at_infinity) continue;
    const double r = std::abs(c.value);
    if (r > inner && r < outer) acc.add(density.weights[i]);
  }
  return acc.value();
}

AnnuliPlan find_annuli(const Weight& w, int count, int k_budget, const AnnuliSearchOptions& options) {
  require(count >= 1, ErrorCode::invalid_argument, "need at least one annulus");
  require(k_budget >= 1 && k_budget <= 256, ErrorCode::invalid_argument, "k budget must lie in [1, 256]");
  require(options.inner_radius > 0.0 && options.inner_radius < 1.0, ErrorCode::invalid_argument,
          "inner radius must lie in (0, 1)");
  require(options.n_radial >= 8, ErrorCode::invalid_argument, "too few quadrature rings");

  AnnuliPlan plan;
  plan.target = options.target;
  plan.requested = count;
  plan.n_radial = options.n_radial;
  plan.n_angular = options.n_angular > 0 ? options.n_angular : k_budget + 2;

  const QuadratureMeasure disk = disk_quadrature(1.0, plan.n_radial, plan.n_angular);
  std::vector<double> radii(static_cast<std::size_t>(plan.n_radial));
  for (int i = 0; i < plan.n_radial; ++i) {
    radii[static_cast<std::size_t>(i)] = std::abs(disk.nodes[static_cast<std::size_t>(i * plan.n_angular)].first.value);
  }
  const int first_ring = static_cast<int>(
      std::upper_bound(radii.begin(), radii.end(), options.inner_radius) - radii.begin());

  std::vector<int> candidates;
  for (int k : options.candidates) {
    if (k >= 1 && k <= k_budget) candidates.push_back(k);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const SeriesSpec spec = SeriesSpec::full(1);
  std::vector<RingTable> tables;
  for (int k : candidates) {
    const QuadratureMeasure density = normalized_density(spec, k, w, disk);
    RingTable t{k, std::vector<double>(static_cast<std::size_t>(plan.n_radial) + 1, 0.0)};
    for (int i = 0; i < plan.n_radial; ++i) {
      CompensatedSum ring;
      for (int j = 0; j < plan.n_angular; ++j) ring.add(density.weights[static_cast<std::size_t>(i * plan.n_angular + j)]);
      t.cum[static_cast<std::size_t>(i) + 1] = t.cum[static_cast<std::size_t>(i)] + ring.value();
    }
    tables.push_back(std::move(t));
  }

  const PlanSearch search(std::move(tables), first_ring, plan.n_radial);
  const int feasible = std::min({count, max_annuli, static_cast<int>(candidates.size()), plan.n_radial - first_ring});
  double best = -1.0;
  std::vector<int> best_seq;
  std::vector<int> seq;
  enumerate(search, seq, 0, feasible, best, best_seq);
  if (best_seq.empty()) return plan;

  const auto bounds = search.boundaries(best_seq, best);
  const auto radius_at = [&](int b) {
    if (b == first_ring) return options.inner_radius;
    if (b == plan.n_radial) return 1.0;
    return 0.5 * (radii[static_cast<std::size_t>(b) - 1] + radii[static_cast<std::size_t>(b)]);
  };
  for (std::size_t j = 0; j < best_seq.size(); ++j) {
    const RingTable& t = search.table(best_seq[j]);
    Annulus a;
    a.inner = radius_at(bounds[j]);
    a.outer = radius_at(bounds[j + 1]);
    a.degree = t.degree;
    a.role = j % 2 == 0 ? AnnulusRole::a_set : AnnulusRole::c_set;
    a.mass = t.cum[static_cast<std::size_t>(bounds[j + 1])] - t.cum[static_cast<std::size_t>(bounds[j])];
    plan.annuli.push_back(a);
  }
  return plan;
}

Counterexample build_counterexample(const AnnuliPlan& plan, const Weight& w) {
  const int n_radial = plan.n_radial > 0 ? plan.n_radial : 192;
  const int n_angular = plan.n_angular > 0 ? plan.n_angular : 98;
  for (std::size_t j = 0; j < plan.annuli.size(); ++j) {
    const Annulus& a = plan.annuli[j];
    require(a.inner < a.outer && (j == 0 || plan.annuli[j - 1].outer <= a.inner) &&
                (j == 0 || plan.annuli[j - 1].degree < a.degree),
            ErrorCode::invalid_argument, "annuli must increase in radius and degree");
  }

  Counterexample out{SeriesSpec::pullback(SeriesSpec::full(1), SpaceModel::disjoint_union(2)), w, {},
                     disk_quadrature(1.0, n_radial, n_angular), {}, plan};
  out.g.resize(out.disk.size(), 0.0);
  for (std::size_t i = 0; i < out.disk.size(); ++i) {
    const double r = std::abs(out.disk.nodes[i].first.value);
    for (const Annulus& a : plan.annuli) {
      if (a.role == AnnulusRole::a_set && r > a.inner && r < a.outer) out.g[i] = 1.0;
    }
  }

  std::vector<Point> nodes;
  std::vector<double> weights;
  nodes.reserve(2 * out.disk.size());
  weights.reserve(2 * out.disk.size());
  for (int sheet = 0; sheet < 2; ++sheet) {
    const double sign = sheet == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < out.disk.size(); ++i) {
      nodes.push_back(Point::at(out.disk.nodes[i].first.value, sheet));
      weights.push_back(out.disk.weights[i] * (2.0 + sign * out.g[i]) / 4.0);
    }
  }
  out.measure = QuadratureMeasure::make(std::move(nodes), std::move(weights), "split-disk", 2);
  return out;
}

OscillationReport divergence_scan(const Counterexample& built, std::span<const int> k_list) {
  const auto a_degrees = built.plan.degrees(AnnulusRole::a_set);
  const auto c_degrees = built.plan.degrees(AnnulusRole::c_set);
  for (const auto* list : {&a_degrees, &c_degrees}) {
    for (int k : *list) {
      require(std::find(k_list.begin(), k_list.end(), k) != k_list.end(), ErrorCode::invalid_argument,
              "degree list misses a plan degree");
    }
  }

  OscillationReport out;
  for (int k : k_list) {
    const QuadratureMeasure density = normalized_density(built.spec, k, built.weight, built.measure);
    CompensatedSum first;
    for (std::size_t i = 0; i < density.size(); ++i) {
      if (density.nodes[i].component == 0) first.add(density.weights[i]);
    }
    out.rows.push_back({k, first.value()});
  }

  // A role without annuli is summarized over the whole scan.
  const auto pick = [&](const std::vector<int>& degrees, bool take_max) {
    double v = take_max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    for (const auto& row : out.rows) {
      if (!degrees.empty() && std::find(degrees.begin(), degrees.end(), row.k) == degrees.end()) continue;
      v = take_max ? std::max(v, row.first_sheet_mass) : std::min(v, row.first_sheet_mass);
    }
    return v;
  };
  if (!out.rows.empty()) {
    out.max_on_a = pick(a_degrees, true);
    out.min_on_c = pick(c_degrees, false);
    out.amplitude = out.max_on_a - out.min_on_c;
  }
  return out;
}

RescueReport pushforward_rescue(const Counterexample& built, std::span<const int> k_list, int moment_order) {
  ScanOptions options;
  options.moment_order = moment_order;
  options.push = true;
  RescueReport out;
  out.rows = convergence_scan(built.spec, built.weight, built.measure, k_list, circle_quadrature(1.0, 64), options);
  out.decreasing = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (out.rows[i].discrepancy > 1.1 * out.rows[i - 1].discrepancy) out.decreasing = false;
  }
  if (!out.rows.empty()) out.final_discrepancy = out.rows.back().discrepancy;
  return out;
}

}  // namespace linser
