#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "seqprice/io.hpp"

namespace seqprice {

namespace {

Json number_or_inf(double x) {
  if (x >= kInf) return Json("inf");
  return Json(x);
}

double double_from(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw std::invalid_argument("expected a number or \"inf\"");
  }
  return j.get<double>();
}

Json set_to_json(const ItemSet& s) {
  Json out = Json::array();
  for (int j : s) out.push_back(j);
  return out;
}

ItemSet set_from_json(const Json& j) {
  std::vector<int> items;
  for (const auto& e : j) items.push_back(e.get<int>());
  return ItemSet(std::move(items));
}

}  // namespace

Json to_json(const ItemPricing& p) {
  Json out = Json::array();
  for (int j = 0; j < p.size(); ++j) out.push_back(number_or_inf(p[j]));
  return out;
}

ItemPricing pricing_from_json(const Json& j) {
  std::vector<double> prices;
  for (const auto& e : j) prices.push_back(double_from(e));
  return ItemPricing(std::move(prices));
}

Json to_json(const RandomPricing& q) {
  Json out = Json::array();
  for (const auto& wp : q.support())
    out.push_back({{"prob", wp.prob}, {"prices", to_json(wp.pricing)}});
  return out;
}

RandomPricing random_pricing_from_json(const Json& j) {
  std::vector<WeightedPricing> support;
  for (const auto& e : j)
    support.push_back({e.at("prob").get<double>(), pricing_from_json(e.at("prices"))});
  return RandomPricing(std::move(support));
}

Json to_json(const Valuation& v) {
  Json out;
  out["kind"] = to_string(v.kind());
  switch (v.kind()) {
    case ValuationKind::additive:
    case ValuationKind::unit_demand:
      out["values"] = v.additive_values();
      break;
    case ValuationKind::xos:
      out["clauses"] = v.xos_clauses();
      break;
    case ValuationKind::table: {
      out["m"] = v.item_count();
      out["values"] = v.table_values();
      if (v.declared_class()) out["declared_class"] = to_string(*v.declared_class());
      break;
    }
    case ValuationKind::bundle_threshold: {
      out["m"] = v.item_count();
      Json bundles = Json::array();
      for (const auto& b : v.bundles()) bundles.push_back(set_to_json(b));
      out["bundles"] = bundles;
      break;
    }
    case ValuationKind::xos_lb: {
      const auto& par = v.xos_lb_params();
      out["m"] = v.item_count();
      out["a_set"] = set_to_json(par.a_set);
      out["k"] = par.k;
      out["t"] = par.t;
      out["ell"] = par.ell;
      out["eps"] = par.eps;
      break;
    }
    case ValuationKind::rrs_lb: {
      const auto& par = v.rrs_lb_params();
      out["m"] = v.item_count();
      out["index"] = par.index;
      out["r_set"] = set_to_json(par.r_set);
      out["beta"] = par.beta;
      out["eps"] = par.eps;
      break;
    }
  }
  return out;
}

Valuation valuation_from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "additive")
    return Valuation::additive(j.at("values").get<std::vector<double>>());
  if (kind == "unit_demand")
    return Valuation::unit_demand(j.at("values").get<std::vector<double>>());
  if (kind == "xos")
    return Valuation::xos(
        static_cast<int>(j.at("clauses").at(0).size()),
        j.at("clauses").get<std::vector<std::vector<double>>>());
  if (kind == "table") {
    std::optional<ValuationClass> declared;
    if (j.contains("declared_class")) {
      std::string c = j.at("declared_class").get<std::string>();
      if (c == "monotone") declared = ValuationClass::monotone;
      else if (c == "subadditive") declared = ValuationClass::subadditive;
      else if (c == "xos_certified") declared = ValuationClass::xos_certified;
      else if (c == "gross_substitutes") declared = ValuationClass::gross_substitutes;
      else throw std::invalid_argument("unknown declared_class: " + c);
    }
    return Valuation::table(j.at("m").get<int>(),
                            j.at("values").get<std::vector<double>>(), declared);
  }
  if (kind == "bundle_threshold") {
    std::vector<ItemSet> bundles;
    for (const auto& b : j.at("bundles")) bundles.push_back(set_from_json(b));
    return Valuation::bundle_threshold(j.at("m").get<int>(), std::move(bundles));
  }
  if (kind == "xos_lb") {
    XosLbParams par;
    par.a_set = set_from_json(j.at("a_set"));
    par.k = j.at("k").get<int>();
    par.t = j.at("t").get<int>();
    par.ell = j.at("ell").get<int>();
    par.eps = j.at("eps").get<double>();
    return Valuation::xos_lb(j.at("m").get<int>(), std::move(par));
  }
  if (kind == "rrs_lb") {
    RrsLbParams par;
    par.index = j.at("index").get<int>();
    par.r_set = set_from_json(j.at("r_set"));
    par.beta = j.at("beta").get<double>();
    par.eps = j.at("eps").get<double>();
    return Valuation::rrs_lb(j.at("m").get<int>(), std::move(par));
  }
  throw std::invalid_argument("unknown valuation kind: " + kind);
}

Json to_json(const InstanceFile& f) {
  Json out;
  out["m"] = f.instance.m;
  Json buyers = Json::array();
  for (const auto& d : f.instance.buyers) {
    Json support = Json::array();
    for (const auto& wv : d.support())
      support.push_back({{"prob", wv.prob}, {"valuation", to_json(wv.valuation)}});
    buyers.push_back({{"support", support}});
  }
  out["buyers"] = buyers;
  if (f.reference_pricings) {
    Json refs = Json::array();
    for (const auto& q : *f.reference_pricings) refs.push_back(to_json(q));
    out["reference_pricings"] = refs;
  }
  return out;
}

InstanceFile instance_from_json(const Json& j) {
  InstanceFile out;
  out.instance.m = j.at("m").get<int>();
  for (const auto& b : j.at("buyers")) {
    std::vector<WeightedValuation> support;
    for (const auto& e : b.at("support"))
      support.push_back(
          {e.at("prob").get<double>(), valuation_from_json(e.at("valuation"))});
    out.instance.buyers.push_back(BuyerDistribution(std::move(support)));
  }
  if (j.contains("reference_pricings")) {
    std::vector<RandomPricing> refs;
    for (const auto& q : j.at("reference_pricings"))
      refs.push_back(random_pricing_from_json(q));
    out.reference_pricings = std::move(refs);
  }
  for (const auto& d : out.instance.buyers)
    if (d.item_count() != out.instance.m)
      throw std::invalid_argument("instance: buyer item count != m");
  return out;
}

Json to_json(const ExAnteSolution& sol) {
  Json out;
  out["value"] = sol.value;
  out["x"] = sol.x;
  Json pricings = Json::array();
  for (const auto& q : sol.pricings) pricings.push_back(to_json(q));
  out["pricings"] = pricings;
  return out;
}

ExAnteSolution exante_from_json(const Json& j) {
  ExAnteSolution sol;
  sol.value = j.at("value").get<double>();
  sol.x = j.at("x").get<std::vector<std::vector<double>>>();
  for (const auto& q : j.at("pricings"))
    sol.pricings.push_back(random_pricing_from_json(q));
  return sol;
}

Json to_json(const RunReport& r) {
  Json out;
  out["exante"] = to_json(r.exante);
  out["mechanism"] = r.mechanism;
  out["trials"] = r.trials;
  out["seed"] = r.seed;
  out["mean_revenue"] = r.mean_revenue;
  out["stderr"] = r.std_err;
  out["ratio"] = number_or_inf(r.ratio);
  out["availability"] = r.availability;
  out["offer_rate"] = r.offer_rate;
  return out;
}

RunReport run_report_from_json(const Json& j) {
  RunReport r;
  r.exante = exante_from_json(j.at("exante"));
  r.mechanism = j.at("mechanism").get<std::string>();
  r.trials = j.at("trials").get<long>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.mean_revenue = j.at("mean_revenue").get<double>();
  r.std_err = j.at("stderr").get<double>();
  r.ratio = double_from(j.at("ratio"));
  r.availability = j.at("availability").get<std::vector<std::vector<double>>>();
  if (j.contains("offer_rate"))
    r.offer_rate = j.at("offer_rate").get<std::vector<double>>();
  return r;
}

namespace {

void dump_rec(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        dump_rec(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        dump_rec(e, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.12g", j.get<double>());
      out += buf;
      break;
    }
    default:
      out += j.dump();
      break;
  }
}

}  // namespace

std::string canonical_dump(const Json& j) {
  std::string out;
  dump_rec(j, out);
  out += '\n';
  return out;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << canonical_dump(j);
}

Json read_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  return Json::parse(f);
}

}  // namespace seqprice
