#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "seqprice/exante.hpp"
#include "seqprice/mechanisms.hpp"

namespace seqprice {

using Json = nlohmann::json;

// Instance files carry the buyers plus, optionally, per-buyer reference
// pricings (used as extra candidate columns by the solver).
struct InstanceFile {
  Instance instance;
  std::optional<std::vector<RandomPricing>> reference_pricings;
};

Json to_json(const ItemPricing& p);          // numbers, inf as the string "inf"
ItemPricing pricing_from_json(const Json& j);

Json to_json(const RandomPricing& q);
RandomPricing random_pricing_from_json(const Json& j);

Json to_json(const Valuation& v);
Valuation valuation_from_json(const Json& j);

Json to_json(const InstanceFile& f);
InstanceFile instance_from_json(const Json& j);

Json to_json(const ExAnteSolution& sol);
ExAnteSolution exante_from_json(const Json& j);

struct RunReport {
  ExAnteSolution exante;
  std::string mechanism;
  long trials = 0;
  std::uint64_t seed = 0;
  double mean_revenue = 0.0;
  double std_err = 0.0;
  double ratio = 0.0;  // exante.value / mean_revenue
  std::vector<std::vector<double>> availability;
  std::vector<double> offer_rate;  // per buyer; 1 minus the composed skip rate
};

Json to_json(const RunReport& r);
RunReport run_report_from_json(const Json& j);

// Canonical serialization: keys sorted, floats rendered with %.12g, trailing
// newline.  Identical values always produce identical bytes.
std::string canonical_dump(const Json& j);

void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

}  // namespace seqprice
