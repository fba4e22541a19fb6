#include "seqprice/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

namespace seqprice {

namespace {

std::string item_set_str(const ItemSet& s) {
  std::string out = "{";
  bool first = true;
  for (int j : s) {
    if (!first) out += ",";
    out += std::to_string(j);
    first = false;
  }
  return out + "}";
}

}  // namespace

// ---------------------------------------------------------------------------
// ItemSet

ItemSet::ItemSet(std::vector<int> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

ItemSet::ItemSet(std::initializer_list<int> items)
    : ItemSet(std::vector<int>(items)) {}

ItemSet ItemSet::full(int m) {
  ItemSet s;
  s.items_.resize(m);
  for (int j = 0; j < m; ++j) s.items_[j] = j;
  return s;
}

ItemSet ItemSet::from_mask(std::uint64_t mask) {
  ItemSet s;
  while (mask != 0) {
    int j = std::countr_zero(mask);
    s.items_.push_back(j);
    mask &= mask - 1;
  }
  return s;
}

bool ItemSet::contains(int j) const {
  return std::binary_search(items_.begin(), items_.end(), j);
}

void ItemSet::insert(int j) {
  auto it = std::lower_bound(items_.begin(), items_.end(), j);
  if (it == items_.end() || *it != j) items_.insert(it, j);
}

void ItemSet::erase(int j) {
  auto it = std::lower_bound(items_.begin(), items_.end(), j);
  if (it != items_.end() && *it == j) items_.erase(it);
}

int ItemSet::max_element() const {
  if (items_.empty()) throw std::logic_error("max_element of empty ItemSet");
  return items_.back();
}

ItemSet ItemSet::intersect(const ItemSet& other) const {
  ItemSet out;
  std::set_intersection(items_.begin(), items_.end(), other.items_.begin(),
                        other.items_.end(), std::back_inserter(out.items_));
  return out;
}

ItemSet ItemSet::unite(const ItemSet& other) const {
  ItemSet out;
  std::set_union(items_.begin(), items_.end(), other.items_.begin(),
                 other.items_.end(), std::back_inserter(out.items_));
  return out;
}

ItemSet ItemSet::subtract(const ItemSet& other) const {
  ItemSet out;
  std::set_difference(items_.begin(), items_.end(), other.items_.begin(),
                      other.items_.end(), std::back_inserter(out.items_));
  return out;
}

bool ItemSet::subset_of(const ItemSet& other) const {
  return std::includes(other.items_.begin(), other.items_.end(),
                       items_.begin(), items_.end());
}

std::uint64_t ItemSet::to_mask() const {
  std::uint64_t mask = 0;
  for (int j : items_) {
    if (j >= 64) throw std::logic_error("ItemSet::to_mask: item index >= 64");
    mask |= std::uint64_t{1} << j;
  }
  return mask;
}

std::size_t ItemSetHash::operator()(const ItemSet& s) const {
  std::size_t h = 1469598103934665603ULL;
  for (int j : s) {
    h ^= static_cast<std::size_t>(j) + 0x9e3779b9;
    h *= 1099511628211ULL;
  }
  return h;
}

bool mask_lex_less(std::uint64_t a, std::uint64_t b) {
  while (true) {
    if (a == b) return false;
    if (a == 0) return true;   // proper prefix
    if (b == 0) return false;
    int la = std::countr_zero(a);
    int lb = std::countr_zero(b);
    if (la != lb) return la < lb;
    a &= a - 1;
    b &= b - 1;
  }
}

// ---------------------------------------------------------------------------
// ItemPricing

ItemPricing::ItemPricing(std::vector<double> prices) : prices_(std::move(prices)) {
  for (double p : prices_) {
    if (std::isnan(p) || p < 0)
      throw std::invalid_argument("ItemPricing: prices must be in [0, inf]");
  }
}

ItemPricing ItemPricing::all_infinite(int m) {
  return ItemPricing(std::vector<double>(m, kInf));
}

ItemPricing ItemPricing::uniform(int m, double price) {
  return ItemPricing(std::vector<double>(m, price));
}

double ItemPricing::total(const ItemSet& s) const {
  double sum = 0;
  for (int j : s) sum += prices_[j];
  return sum;
}

ItemPricing ItemPricing::masked_to(const ItemSet& s) const {
  std::vector<double> out(prices_.size(), kInf);
  for (int j : s) out[j] = prices_[j];
  return ItemPricing(std::move(out));
}

ItemPricing ItemPricing::scaled(double factor) const {
  std::vector<double> out(prices_.size());
  for (std::size_t j = 0; j < prices_.size(); ++j) out[j] = factor * prices_[j];
  return ItemPricing(std::move(out));
}

// ---------------------------------------------------------------------------
// Valuation

std::string to_string(ValuationKind kind) {
  switch (kind) {
    case ValuationKind::additive: return "additive";
    case ValuationKind::unit_demand: return "unit_demand";
    case ValuationKind::xos: return "xos";
    case ValuationKind::table: return "table";
    case ValuationKind::bundle_threshold: return "bundle_threshold";
    case ValuationKind::xos_lb: return "xos_lb";
    case ValuationKind::rrs_lb: return "rrs_lb";
  }
  return "?";
}

std::string to_string(ValuationClass cls) {
  switch (cls) {
    case ValuationClass::monotone: return "monotone";
    case ValuationClass::subadditive: return "subadditive";
    case ValuationClass::xos_certified: return "xos_certified";
    case ValuationClass::gross_substitutes: return "gross_substitutes";
  }
  return "?";
}

Valuation Valuation::additive(std::vector<double> values) {
  for (double v : values)
    if (!(v >= 0)) throw std::invalid_argument("additive: values must be >= 0");
  Valuation v;
  v.kind_ = ValuationKind::additive;
  v.m_ = static_cast<int>(values.size());
  v.restriction_ = ItemSet::full(v.m_);
  v.data_ = std::move(values);
  return v;
}

Valuation Valuation::unit_demand(std::vector<double> values) {
  for (double v : values)
    if (!(v >= 0)) throw std::invalid_argument("unit_demand: values must be >= 0");
  Valuation v;
  v.kind_ = ValuationKind::unit_demand;
  v.m_ = static_cast<int>(values.size());
  v.restriction_ = ItemSet::full(v.m_);
  v.data_ = std::move(values);
  return v;
}

Valuation Valuation::xos(int m, std::vector<std::vector<double>> clauses) {
  if (clauses.empty()) throw std::invalid_argument("xos: needs at least one clause");
  for (const auto& a : clauses) {
    if (static_cast<int>(a.size()) != m)
      throw std::invalid_argument("xos: clause length != m");
    for (double x : a)
      if (!(x >= 0)) throw std::invalid_argument("xos: clause entries must be >= 0");
  }
  Valuation v;
  v.kind_ = ValuationKind::xos;
  v.m_ = m;
  v.restriction_ = ItemSet::full(m);
  v.data_ = std::move(clauses);
  return v;
}

Valuation Valuation::table(int m, std::vector<double> values,
                           std::optional<ValuationClass> declared) {
  if (m > 12) throw std::invalid_argument("table: m > 12 exceeds the 2^m limit");
  if (values.size() != (std::size_t{1} << m))
    throw std::invalid_argument("table: needs 2^m values");
  if (values[0] != 0.0) throw std::invalid_argument("table: v(empty) must be 0");
  for (double x : values)
    if (!(x >= 0)) throw std::invalid_argument("table: values must be >= 0");
  Valuation v;
  v.kind_ = ValuationKind::table;
  v.m_ = m;
  v.restriction_ = ItemSet::full(m);
  v.data_ = std::move(values);
  if (declared) {
    v.declared_ = declared;
    ClassCheckResult r = check_class(v, *declared);
    if (!r.ok)
      throw std::invalid_argument("table: declared class " + to_string(*declared) +
                                  " fails its checker: " + r.detail);
  }
  return v;
}

Valuation Valuation::bundle_threshold(int m, std::vector<ItemSet> bundles) {
  for (const auto& b : bundles) {
    if (b.empty())
      throw std::invalid_argument("bundle_threshold: empty bundle breaks v(empty)=0");
    if (!b.empty() && (b.max_element() >= m || *b.begin() < 0))
      throw std::invalid_argument("bundle_threshold: bundle item out of range");
  }
  Valuation v;
  v.kind_ = ValuationKind::bundle_threshold;
  v.m_ = m;
  v.restriction_ = ItemSet::full(m);
  v.data_ = std::move(bundles);
  return v;
}

Valuation Valuation::xos_lb(int m, XosLbParams params) {
  if (params.a_set.size() != params.k)
    throw std::invalid_argument("xos_lb: |A| must equal k");
  if (!params.a_set.empty() && params.a_set.max_element() >= m)
    throw std::invalid_argument("xos_lb: A out of range");
  if (params.t < 1 || params.ell < 1 || params.t * params.ell > m)
    throw std::invalid_argument("xos_lb: need 1 <= t*ell <= m");
  Valuation v;
  v.kind_ = ValuationKind::xos_lb;
  v.m_ = m;
  v.restriction_ = ItemSet::full(m);
  v.data_ = std::move(params);
  return v;
}

Valuation Valuation::rrs_lb(int m, RrsLbParams params) {
  if (params.index < 1 || params.index > m - 1)
    throw std::invalid_argument("rrs_lb: index must be in [1, m-1]");
  if (!params.r_set.empty() && params.r_set.max_element() > params.index - 2)
    throw std::invalid_argument("rrs_lb: R must be a subset of {0..index-2}");
  if (!(params.beta > 0)) throw std::invalid_argument("rrs_lb: beta must be positive");
  Valuation v;
  v.kind_ = ValuationKind::rrs_lb;
  v.m_ = m;
  v.restriction_ = ItemSet::full(m);
  v.data_ = std::move(params);
  return v;
}

const std::vector<double>& Valuation::additive_values() const {
  return std::get<std::vector<double>>(data_);
}

const std::vector<std::vector<double>>& Valuation::xos_clauses() const {
  return std::get<std::vector<std::vector<double>>>(data_);
}

const std::vector<double>& Valuation::table_values() const {
  return std::get<std::vector<double>>(data_);
}

const std::vector<ItemSet>& Valuation::bundles() const {
  return std::get<std::vector<ItemSet>>(data_);
}

const XosLbParams& Valuation::xos_lb_params() const {
  return std::get<XosLbParams>(data_);
}

const RrsLbParams& Valuation::rrs_lb_params() const {
  return std::get<RrsLbParams>(data_);
}

namespace {

// Value of the first clause on the last item (index m-1).
double rrs_lb_last_item_value(const RrsLbParams& par) {
  double sum = par.eps;
  double beta_i = std::pow(par.beta, par.index);
  for (int r : par.r_set) sum += beta_i - std::pow(par.beta, r + 1);
  return sum;
}

}  // namespace

double Valuation::value(const ItemSet& raw) const {
  ItemSet s = is_restricted() ? raw.intersect(restriction_) : raw;
  switch (kind_) {
    case ValuationKind::additive: {
      const auto& a = additive_values();
      double sum = 0;
      for (int j : s) sum += a[j];
      return sum;
    }
    case ValuationKind::unit_demand: {
      const auto& a = additive_values();
      double best = 0;
      for (int j : s) best = std::max(best, a[j]);
      return best;
    }
    case ValuationKind::xos: {
      double best = 0;
      for (const auto& a : xos_clauses()) {
        double sum = 0;
        for (int j : s) sum += a[j];
        best = std::max(best, sum);
      }
      return best;
    }
    case ValuationKind::table:
      return table_values()[s.to_mask()];
    case ValuationKind::bundle_threshold: {
      for (const auto& b : bundles())
        if (b.subset_of(s)) return 1.0;
      return 0.0;
    }
    case ValuationKind::xos_lb: {
      const auto& par = xos_lb_params();
      double a_val = (1.0 + par.t) * s.intersect(par.a_set).size();
      double cap = static_cast<double>(par.t) * par.ell;
      double b_val = (1.0 + static_cast<double>(par.k) / par.ell) *
                     std::min<double>(s.size(), cap);
      return std::max(a_val, b_val);
    }
    case ValuationKind::rrs_lb: {
      const auto& par = rrs_lb_params();
      double beta_i = std::pow(par.beta, par.index);
      double v1 = 0;
      if (s.contains(par.index - 1)) v1 += beta_i;
      if (s.contains(m_ - 1)) v1 += rrs_lb_last_item_value(par);
      double v2 = beta_i * s.intersect(par.r_set).size();
      return std::max(v1, v2);
    }
  }
  return 0;
}

Valuation restrict_to(const Valuation& v, const ItemSet& s) {
  Valuation out = v;
  out.restriction_ = v.restriction_.intersect(s);
  return out;
}

// ---------------------------------------------------------------------------
// Distributions

BuyerDistribution::BuyerDistribution(std::vector<WeightedValuation> support)
    : support_(std::move(support)) {
  if (support_.empty())
    throw std::invalid_argument("BuyerDistribution: empty support");
  m_ = support_[0].valuation.item_count();
  double sum = 0;
  for (const auto& wv : support_) {
    if (wv.valuation.item_count() != m_)
      throw std::invalid_argument("BuyerDistribution: mixed item counts");
    if (wv.prob < -1e-12)
      throw std::invalid_argument("BuyerDistribution: negative probability");
    sum += wv.prob;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("BuyerDistribution: probabilities must sum to 1");
}

BuyerDistribution BuyerDistribution::point(Valuation v) {
  std::vector<WeightedValuation> s;
  s.push_back({1.0, std::move(v)});
  return BuyerDistribution(std::move(s));
}

BuyerDistribution BuyerDistribution::restricted_to(const ItemSet& s) const {
  std::vector<WeightedValuation> out;
  out.reserve(support_.size());
  for (const auto& wv : support_) out.push_back({wv.prob, restrict_to(wv.valuation, s)});
  return BuyerDistribution(std::move(out));
}

RandomPricing::RandomPricing(std::vector<WeightedPricing> support)
    : support_(std::move(support)) {
  if (support_.empty()) throw std::invalid_argument("RandomPricing: empty support");
  m_ = support_[0].pricing.size();
  double sum = 0;
  for (const auto& wp : support_) {
    if (wp.pricing.size() != m_)
      throw std::invalid_argument("RandomPricing: mixed item counts");
    if (wp.prob < -1e-12)
      throw std::invalid_argument("RandomPricing: negative probability");
    sum += wp.prob;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("RandomPricing: probabilities must sum to 1");
}

RandomPricing RandomPricing::point(ItemPricing p) {
  std::vector<WeightedPricing> s;
  s.push_back({1.0, std::move(p)});
  return RandomPricing(std::move(s));
}

// ---------------------------------------------------------------------------
// Demand

namespace {

// Items the buyer can consider: finite price and inside the restriction.
ItemSet available_items(const Valuation& v, const ItemPricing& p) {
  std::vector<int> items;
  for (int j : v.restriction())
    if (p[j] < kInf) items.push_back(j);
  return ItemSet(std::move(items));
}

// Greedy utility-maximizing set for a single additive clause: take items with
// positive margin, plus zero-margin items that carry price (max-price rule).
ItemSet clause_greedy(const std::vector<double>& a, const ItemPricing& p,
                      const ItemSet& avail) {
  std::vector<int> take;
  for (int j : avail) {
    double margin = a[j] - p[j];
    if (margin > kTol) {
      take.push_back(j);
    } else if (margin >= -kTol && p[j] > kTol) {
      take.push_back(j);
    }
  }
  return ItemSet(std::move(take));
}

// Lexicographic polish: free (zero-priced) zero-marginal items below the
// set's maximum belong in the lexicographically smallest tied set.
ItemSet augment_with_free_items(const Valuation& v, const ItemPricing& p,
                                const ItemSet& avail, const ItemSet& chosen) {
  if (chosen.empty()) return chosen;
  int cap = chosen.max_element();
  std::vector<int> extra;
  for (int z : avail) {
    if (z >= cap) break;
    if (p[z] <= kTol && !chosen.contains(z)) extra.push_back(z);
  }
  if (extra.empty()) return chosen;
  ItemSet widened = chosen.unite(ItemSet(std::move(extra)));
  if (v.value(widened) <= v.value(chosen) + kTol) return widened;
  return chosen;
}

DemandResult finish(const Valuation& v, const ItemPricing& p, ItemSet set) {
  DemandResult r;
  r.payment = p.total(set);
  r.utility = v.value(set) - r.payment;
  r.set = std::move(set);
  return r;
}

// Three-pass selection: max utility (tol-tied), then max payment (tol-tied),
// then lexicographically smallest after the free-item polish.
DemandResult select_candidate(const Valuation& v, const ItemPricing& p,
                              const ItemSet& avail,
                              std::vector<ItemSet> candidates) {
  candidates.push_back(ItemSet{});
  double best_util = -kInf;
  std::vector<std::pair<double, double>> scored(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double pay = p.total(candidates[i]);
    double util = v.value(candidates[i]) - pay;
    scored[i] = {util, pay};
    best_util = std::max(best_util, util);
  }
  double best_pay = -kInf;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (scored[i].first >= best_util - kTol)
      best_pay = std::max(best_pay, scored[i].second);

  bool found = false;
  ItemSet best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (scored[i].first < best_util - kTol) continue;
    if (scored[i].second < best_pay - kTol) continue;
    ItemSet polished = augment_with_free_items(v, p, avail, candidates[i]);
    if (!found || polished < best) {
      best = polished;
      found = true;
    }
  }
  return finish(v, p, best);
}

DemandResult demand_additive(const Valuation& v, const ItemPricing& p,
                             const ItemSet& avail) {
  ItemSet t = clause_greedy(v.additive_values(), p, avail);
  return select_candidate(v, p, avail, {t});
}

DemandResult demand_xos_clauses(const Valuation& v,
                                const std::vector<std::vector<double>>& clauses,
                                const ItemPricing& p, const ItemSet& avail) {
  std::vector<ItemSet> candidates;
  candidates.reserve(clauses.size());
  for (const auto& a : clauses) candidates.push_back(clause_greedy(a, p, avail));
  return select_candidate(v, p, avail, candidates);
}

DemandResult demand_unit_demand(const Valuation& v, const ItemPricing& p,
                                const ItemSet& avail) {
  // Unit-demand is XOS with one singleton clause per item.
  const auto& vals = v.additive_values();
  std::vector<ItemSet> candidates;
  for (int j : avail) {
    double margin = vals[j] - p[j];
    if (margin > kTol || (margin >= -kTol && p[j] > kTol)) candidates.push_back({j});
  }
  return select_candidate(v, p, avail, candidates);
}

DemandResult demand_table(const Valuation& v, const ItemPricing& p,
                          const ItemSet& avail) {
  const auto& val = v.table_values();
  std::uint64_t avail_mask = avail.to_mask();
  std::uint64_t restr_mask = v.restriction().to_mask();

  auto util_of = [&](std::uint64_t mask, double& pay) {
    pay = 0;
    for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1)
      pay += p[std::countr_zero(rest)];
    return val[mask & restr_mask] - pay;
  };

  double best_util = -kInf;
  std::uint64_t sub = avail_mask;
  while (true) {
    double pay;
    best_util = std::max(best_util, util_of(sub, pay));
    if (sub == 0) break;
    sub = (sub - 1) & avail_mask;
  }
  double best_pay = -kInf;
  sub = avail_mask;
  while (true) {
    double pay;
    if (util_of(sub, pay) >= best_util - kTol) best_pay = std::max(best_pay, pay);
    if (sub == 0) break;
    sub = (sub - 1) & avail_mask;
  }
  bool found = false;
  std::uint64_t best_mask = 0;
  sub = avail_mask;
  while (true) {
    double pay;
    if (util_of(sub, pay) >= best_util - kTol && pay >= best_pay - kTol) {
      if (!found || mask_lex_less(sub, best_mask)) {
        best_mask = sub;
        found = true;
      }
    }
    if (sub == 0) break;
    sub = (sub - 1) & avail_mask;
  }
  return finish(v, p, ItemSet::from_mask(best_mask));
}

DemandResult demand_bundle_threshold(const Valuation& v, const ItemPricing& p,
                                     const ItemSet& avail) {
  std::vector<ItemSet> candidates;
  for (const auto& b : v.bundles())
    if (b.subset_of(avail)) candidates.push_back(b);
  return select_candidate(v, p, avail, candidates);
}

XosLbBreakdown xos_lb_candidates(const Valuation& v, const ItemPricing& p,
                                 const ItemSet& avail) {
  const auto& par = v.xos_lb_params();
  double a_threshold = 1.0 + par.t + par.eps;
  double b_threshold = 1.0 + static_cast<double>(par.k) / par.ell;
  int cap = par.t * par.ell;
  XosLbBreakdown out;

  // A candidate: affordable A items; utility carries the eps tie-break bump.
  std::vector<int> a_items;
  for (int j : avail) {
    if (!par.a_set.contains(j)) continue;
    double margin = a_threshold - p[j];
    if (margin > kTol || (margin >= -kTol && p[j] > kTol)) {
      a_items.push_back(j);
      out.a_utility += margin;
    }
  }
  out.a_candidate = ItemSet(std::move(a_items));

  // B candidate: up to t*ell cheapest items priced at most 1 + k/ell.
  std::vector<std::pair<double, int>> eligible;
  for (int j : avail) {
    double margin = b_threshold - p[j];
    if (margin > kTol || (margin >= -kTol && p[j] > kTol))
      eligible.push_back({p[j], j});
  }
  std::sort(eligible.begin(), eligible.end());
  std::vector<int> b_items;
  for (int i = 0; i < static_cast<int>(eligible.size()) && i < cap; ++i) {
    b_items.push_back(eligible[i].second);
    out.b_utility += b_threshold - eligible[i].first;
  }
  out.b_candidate = ItemSet(std::move(b_items));

  if (out.a_utility >= out.b_utility - kTol && out.a_utility > kTol) {
    out.a_chosen = true;
  } else if (out.b_utility > kTol) {
    out.a_chosen = false;
  } else {
    // All margins vanish: fall back on the max-price rule, ties toward A.
    double pa = p.total(out.a_candidate), pb = p.total(out.b_candidate);
    out.a_chosen = pa >= pb - kTol;
  }
  return out;
}

DemandResult demand_xos_lb(const Valuation& v, const ItemPricing& p,
                           const ItemSet& avail) {
  XosLbBreakdown b = xos_lb_candidates(v, p, avail);
  ItemSet chosen = b.a_chosen ? b.a_candidate : b.b_candidate;
  chosen = augment_with_free_items(v, p, avail, chosen);
  return finish(v, p, chosen);
}

DemandResult demand_rrs_lb(const Valuation& v, const ItemPricing& p,
                           const ItemSet& avail) {
  const auto& par = v.rrs_lb_params();
  int m = v.item_count();
  double beta_i = std::pow(par.beta, par.index);

  std::vector<double> clause1(m, 0.0), clause2(m, 0.0);
  clause1[par.index - 1] = beta_i;
  clause1[m - 1] = rrs_lb_last_item_value(par);
  for (int r : par.r_set) clause2[r] = beta_i;

  ItemSet t1 = clause_greedy(clause1, p, avail);
  ItemSet t2 = clause_greedy(clause2, p, avail);
  double u1 = 0, u2 = 0;
  for (int j : t1) u1 += clause1[j] - p[j];
  for (int j : t2) u2 += clause2[j] - p[j];

  ItemSet chosen;
  if (std::abs(u1 - u2) <= kTol) {
    if (u1 <= kTol) {
      // Nothing to gain either way: the max-price rule decides.
      chosen = (p.total(t2) > p.total(t1) + kTol) ? t2 : t1;
    } else {
      chosen = t1;  // component ties break toward v^1
    }
  } else {
    chosen = (u1 > u2) ? t1 : t2;
  }
  chosen = augment_with_free_items(v, p, avail, chosen);
  return finish(v, p, chosen);
}

}  // namespace

XosLbBreakdown xos_lb_breakdown(const Valuation& v, const ItemPricing& p) {
  if (v.kind() != ValuationKind::xos_lb)
    throw std::invalid_argument("xos_lb_breakdown: wrong valuation kind");
  return xos_lb_candidates(v, p, available_items(v, p));
}

DemandResult demand(const Valuation& v, const ItemPricing& p) {
  if (p.size() != v.item_count())
    throw std::invalid_argument("demand: pricing length != item count");
  ItemSet avail = available_items(v, p);
  switch (v.kind()) {
    case ValuationKind::additive: return demand_additive(v, p, avail);
    case ValuationKind::unit_demand: return demand_unit_demand(v, p, avail);
    case ValuationKind::xos: return demand_xos_clauses(v, v.xos_clauses(), p, avail);
    case ValuationKind::table: return demand_table(v, p, avail);
    case ValuationKind::bundle_threshold: return demand_bundle_threshold(v, p, avail);
    case ValuationKind::xos_lb: return demand_xos_lb(v, p, avail);
    case ValuationKind::rrs_lb: return demand_rrs_lb(v, p, avail);
  }
  throw std::logic_error("demand: unknown kind");
}

SubsetValueTable::SubsetValueTable(const Valuation& v, const ItemSet& ground)
    : ground_(ground) {
  int k = ground.size();
  if (k > 24) throw std::invalid_argument("SubsetValueTable: ground set too large");
  std::uint64_t n = std::uint64_t{1} << k;
  values_.assign(n, 0.0);
  const std::vector<int>& items = ground.items();

  auto additive_fill = [&](const std::vector<double>& a, bool take_max) {
    // Subset-sum DP over compact masks; one pass per clause.
    std::vector<double> sums(n, 0.0);
    for (std::uint64_t mask = 1; mask < n; ++mask) {
      int b = std::countr_zero(mask);
      sums[mask] = sums[mask & (mask - 1)] + a[items[b]];
    }
    for (std::uint64_t mask = 0; mask < n; ++mask)
      values_[mask] = take_max ? std::max(values_[mask], sums[mask]) : sums[mask];
  };

  // The DP fast paths ignore the restriction, so they only apply when the
  // ground set already sits inside it.
  bool dp_ok = !v.is_restricted() || ground.subset_of(v.restriction());
  if (dp_ok && v.kind() == ValuationKind::additive) {
    additive_fill(v.additive_values(), false);
  } else if (dp_ok && v.kind() == ValuationKind::xos) {
    for (const auto& a : v.xos_clauses()) additive_fill(a, true);
  } else {
    for (std::uint64_t mask = 0; mask < n; ++mask) {
      std::vector<int> members;
      for (int b = 0; b < k; ++b)
        if (mask & (std::uint64_t{1} << b)) members.push_back(items[b]);
      values_[mask] = v.value(ItemSet(std::move(members)));
    }
  }
}

DemandResult demand_exhaustive(const Valuation& v, const SubsetValueTable& table,
                               const ItemPricing& p) {
  ItemSet avail = available_items(v, p);
  if (!avail.subset_of(table.ground()))
    throw std::invalid_argument("demand_exhaustive: availability outside table ground");
  const std::vector<int>& items = table.ground().items();
  int k = table.ground().size();

  std::uint64_t avail_mask = 0;
  for (int b = 0; b < k; ++b)
    if (avail.contains(items[b])) avail_mask |= std::uint64_t{1} << b;

  auto pay_of = [&](std::uint64_t mask) {
    double pay = 0;
    for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1)
      pay += p[items[std::countr_zero(rest)]];
    return pay;
  };

  double best_util = -kInf;
  for (std::uint64_t sub = avail_mask;; sub = (sub - 1) & avail_mask) {
    best_util = std::max(best_util, table.value(sub) - pay_of(sub));
    if (sub == 0) break;
  }
  double best_pay = -kInf;
  for (std::uint64_t sub = avail_mask;; sub = (sub - 1) & avail_mask) {
    double pay = pay_of(sub);
    if (table.value(sub) - pay >= best_util - kTol)
      best_pay = std::max(best_pay, pay);
    if (sub == 0) break;
  }
  // Compact masks follow ascending item order, so mask_lex_less on them
  // matches the lexicographic order on the underlying item sets.
  bool found = false;
  std::uint64_t best = 0;
  for (std::uint64_t sub = avail_mask;; sub = (sub - 1) & avail_mask) {
    double pay = pay_of(sub);
    if (table.value(sub) - pay >= best_util - kTol && pay >= best_pay - kTol) {
      if (!found || mask_lex_less(sub, best)) {
        best = sub;
        found = true;
      }
    }
    if (sub == 0) break;
  }
  std::vector<int> members;
  for (int b = 0; b < k; ++b)
    if (best & (std::uint64_t{1} << b)) members.push_back(items[b]);
  return finish(v, p, ItemSet(std::move(members)));
}

DemandResult demand_exhaustive(const Valuation& v, const ItemPricing& p,
                               int max_items) {
  if (p.size() != v.item_count())
    throw std::invalid_argument("demand: pricing length != item count");
  ItemSet avail = available_items(v, p);
  if (avail.size() > max_items)
    throw std::invalid_argument("demand_exhaustive: 2^" +
                                std::to_string(avail.size()) +
                                " subsets exceed the configured limit");
  SubsetValueTable table(v, avail);
  return demand_exhaustive(v, table, p);
}

// ---------------------------------------------------------------------------
// Expectations

double expected_rev(const BuyerDistribution& d, const ItemPricing& p) {
  double sum = 0;
  for (const auto& wv : d.support()) sum += wv.prob * demand(wv.valuation, p).payment;
  return sum;
}

double expected_rev(const BuyerDistribution& d, const RandomPricing& q) {
  double sum = 0;
  for (const auto& wp : q.support()) sum += wp.prob * expected_rev(d, wp.pricing);
  return sum;
}

std::vector<double> expected_alloc(const BuyerDistribution& d, const ItemPricing& p) {
  std::vector<double> alloc(d.item_count(), 0.0);
  for (const auto& wv : d.support()) {
    DemandResult r = demand(wv.valuation, p);
    for (int j : r.set) alloc[j] += wv.prob;
  }
  return alloc;
}

std::vector<double> expected_alloc(const BuyerDistribution& d, const RandomPricing& q) {
  std::vector<double> alloc(d.item_count(), 0.0);
  for (const auto& wp : q.support()) {
    std::vector<double> a = expected_alloc(d, wp.pricing);
    for (int j = 0; j < d.item_count(); ++j) alloc[j] += wp.prob * a[j];
  }
  return alloc;
}

// ---------------------------------------------------------------------------
// Class checks

namespace {

std::vector<double> value_table(const Valuation& v) {
  int m = v.item_count();
  if (m > 12)
    throw std::invalid_argument("check_class: instance too large for exhaustive check");
  std::vector<double> val(std::size_t{1} << m);
  for (std::uint64_t mask = 0; mask < val.size(); ++mask)
    val[mask] = v.value(ItemSet::from_mask(mask));
  return val;
}

ClassCheckResult check_monotone(const Valuation& v) {
  std::vector<double> val = value_table(v);
  int m = v.item_count();
  for (std::uint64_t mask = 0; mask < val.size(); ++mask) {
    for (int j = 0; j < m; ++j) {
      std::uint64_t bit = std::uint64_t{1} << j;
      if (mask & bit) continue;
      if (val[mask | bit] < val[mask] - kTol) {
        ClassCheckResult r;
        r.ok = false;
        r.set_witness = {ItemSet::from_mask(mask), ItemSet::from_mask(mask | bit)};
        r.detail = "v(" + item_set_str(r.set_witness->second) + ") < v(" +
                   item_set_str(r.set_witness->first) + ")";
        return r;
      }
    }
  }
  return {true, "monotone on all 2^m subsets", std::nullopt, std::nullopt};
}

ClassCheckResult check_subadditive(const Valuation& v) {
  std::vector<double> val = value_table(v);
  std::uint64_t n = val.size();
  for (std::uint64_t s = 0; s < n; ++s) {
    for (std::uint64_t t = s; t < n; ++t) {
      if (val[s] + val[t] < val[s | t] - kTol) {
        ClassCheckResult r;
        r.ok = false;
        r.set_witness = {ItemSet::from_mask(s), ItemSet::from_mask(t)};
        r.detail = "v(S)+v(T) < v(S|T) at S=" + item_set_str(r.set_witness->first) +
                   " T=" + item_set_str(r.set_witness->second);
        return r;
      }
    }
  }
  return {true, "subadditive on all pairs", std::nullopt, std::nullopt};
}

ClassCheckResult check_xos_certified(const Valuation& v) {
  switch (v.kind()) {
    case ValuationKind::additive:
    case ValuationKind::unit_demand:
    case ValuationKind::xos:
    case ValuationKind::xos_lb:
    case ValuationKind::rrs_lb:
      return {true, "representation is XOS by construction", std::nullopt, std::nullopt};
    default:
      return {false, "no XOS certificate for kind " + to_string(v.kind()),
              std::nullopt, std::nullopt};
  }
}

// Grid-limited GS check: quantifies over pairs p <= p' from the marginal-value
// candidate grid, not over all real pricings.  The condition is checked on
// the demand correspondence: a demanded item whose price did not rise must
// remain in some utility-maximizing set (the tie-broken set alone would flag
// spurious violations at knife-edge ties).
ClassCheckResult check_gross_substitutes(const Valuation& v) {
  int m = v.item_count();
  auto per_item = per_item_candidate_prices(BuyerDistribution::point(v));
  std::size_t grid_size = 1;
  for (const auto& c : per_item) {
    grid_size *= c.size();
    if (grid_size > 4096)
      throw std::invalid_argument(
          "check_class: pricing grid too large for the GS check");
  }
  std::vector<ItemPricing> grid;
  grid.reserve(grid_size);
  std::vector<std::size_t> idx(m, 0);
  while (true) {
    std::vector<double> prices(m);
    for (int j = 0; j < m; ++j) prices[j] = per_item[j][idx[j]];
    grid.push_back(ItemPricing(std::move(prices)));
    int j = 0;
    for (; j < m; ++j) {
      if (++idx[j] < per_item[j].size()) break;
      idx[j] = 0;
    }
    if (j == m) break;
  }

  std::vector<double> val(std::size_t{1} << m);
  for (std::uint64_t mask = 0; mask < val.size(); ++mask)
    val[mask] = v.value(ItemSet::from_mask(mask));

  // Per pricing: the demanded set, the best utility, and the best utility of
  // any set containing each item.
  std::vector<ItemSet> alloc(grid.size());
  std::vector<double> best(grid.size(), 0.0);
  std::vector<std::vector<double>> best_with(grid.size(),
                                             std::vector<double>(m, -kInf));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    alloc[i] = demand(v, grid[i]).set;
    std::uint64_t finite = 0;
    for (int j = 0; j < m; ++j)
      if (grid[i][j] < kInf) finite |= std::uint64_t{1} << j;
    for (std::uint64_t mask = finite;; mask = (mask - 1) & finite) {
      double pay = 0;
      for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1)
        pay += grid[i][std::countr_zero(rest)];
      double util = val[mask] - pay;
      best[i] = std::max(best[i], util);
      for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) {
        int j = std::countr_zero(rest);
        best_with[i][j] = std::max(best_with[i][j], util);
      }
      if (mask == 0) break;
    }
  }

  for (std::size_t a = 0; a < grid.size(); ++a) {
    for (std::size_t b = 0; b < grid.size(); ++b) {
      if (a == b) continue;
      bool leq = true;
      for (int j = 0; j < m && leq; ++j)
        if (grid[a][j] > grid[b][j]) leq = false;
      if (!leq) continue;
      for (int j : alloc[a]) {
        if (grid[a][j] != grid[b][j]) continue;
        if (best_with[b][j] < best[b] - kTol) {
          ClassCheckResult r;
          r.ok = false;
          r.pricing_witness = {grid[a], grid[b], j};
          r.detail = "item " + std::to_string(j) +
                     " dropped after raising only other prices";
          return r;
        }
      }
    }
  }
  return {true,
          "GS holds on " + std::to_string(grid.size()) +
              " grid pricings (grid-limited check)",
          std::nullopt, std::nullopt};
}

}  // namespace

ClassCheckResult check_class(const Valuation& v, ValuationClass cls) {
  switch (cls) {
    case ValuationClass::monotone: return check_monotone(v);
    case ValuationClass::subadditive: return check_subadditive(v);
    case ValuationClass::xos_certified: return check_xos_certified(v);
    case ValuationClass::gross_substitutes: return check_gross_substitutes(v);
  }
  throw std::logic_error("check_class: unknown class");
}

ClassCheckResult check_class(const BuyerDistribution& d, ValuationClass cls) {
  for (const auto& wv : d.support()) {
    ClassCheckResult r = check_class(wv.valuation, cls);
    if (!r.ok) return r;
  }
  return {true, "all support valuations pass", std::nullopt, std::nullopt};
}

// ---------------------------------------------------------------------------
// Candidate prices

std::vector<std::vector<double>> per_item_candidate_prices(
    const BuyerDistribution& d, const std::vector<double>& extra_grid) {
  int m = d.item_count();
  std::vector<std::vector<double>> out(m);
  for (int j = 0; j < m; ++j) {
    out[j].push_back(0.0);
    for (double g : extra_grid)
      if (g >= 0 && g < kInf) out[j].push_back(g);
  }
  for (const auto& wv : d.support()) {
    const Valuation& v = wv.valuation;
    if (v.kind() == ValuationKind::additive) {
      for (int j = 0; j < m; ++j) {
        double a = v.additive_values()[j];
        if (a > kTol) out[j].push_back(a);
      }
      continue;
    }
    if (m > 12)
      throw std::invalid_argument(
          "per_item_candidate_prices: marginal enumeration needs m <= 12");
    std::vector<double> val(std::size_t{1} << m);
    for (std::uint64_t mask = 0; mask < val.size(); ++mask)
      val[mask] = v.value(ItemSet::from_mask(mask));
    for (int j = 0; j < m; ++j) {
      std::uint64_t bit = std::uint64_t{1} << j;
      for (std::uint64_t mask = 0; mask < val.size(); ++mask) {
        if (!(mask & bit)) continue;
        double diff = val[mask] - val[mask & ~bit];
        if (diff > kTol) out[j].push_back(diff);
      }
    }
  }
  for (int j = 0; j < m; ++j) {
    std::sort(out[j].begin(), out[j].end());
    std::vector<double> dedup;
    for (double x : out[j])
      if (dedup.empty() || x - dedup.back() > 1e-9) dedup.push_back(x);
    dedup.push_back(kInf);
    out[j] = std::move(dedup);
  }
  return out;
}

}  // namespace seqprice
