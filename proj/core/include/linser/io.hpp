#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "linser/bergman.hpp"
#include "linser/counterexample.hpp"
#include "linser/energy.hpp"
#include "linser/envelopes.hpp"
#include "linser/geometry.hpp"
#include "linser/norms.hpp"
#include "linser/series.hpp"
#include "linser/weights.hpp"

namespace linser::io {

using Json = nlohmann::json;

// A configuration that does not match the expected schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SeriesSpec series_from_json(const Json& j);
Direction direction_from_json(const Json& j);
Weight weight_from_json(const Json& j);
SampleSet set_from_json(const Json& j);
QuadratureMeasure measure_from_json(const Json& j);

Json to_json(const SeriesSpec& spec);
Json to_json(const Direction& d);
Json to_json(const Weight& w);
Json to_json(const QuadratureMeasure& mu);
Json to_json(const GramMatrix& g);
Json to_json(const GrowthFit& fit);
Json to_json(const SemigroupAnalysis& analysis);
Json to_json(const std::vector<ScanRow>& rows);
Json to_json(const EnvelopeGrid& env);
Json to_json(const EnergyDiff& e);
Json to_json(const VolumeRatioCheck& check);
Json to_json(const DerivativeScan& scan);
Json to_json(const AnnuliPlan& plan);
Json to_json(const OscillationReport& report);
Json to_json(const RescueReport& report);

// Shortest decimal text that reads back to the same double.
std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(std::ostream& os, const CsvTable& table);

}  // namespace linser::io
