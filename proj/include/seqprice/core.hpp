#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace seqprice {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute tolerance for utility/price comparisons in demand computations.
inline constexpr double kTol = 1e-9;

// A set of item indices kept as a sorted vector.  operator< is the
// lexicographic order on the sorted element sequence, so {} < {0} < {0,2} < {1}.
class ItemSet {
 public:
  ItemSet() = default;
  explicit ItemSet(std::vector<int> items);
  ItemSet(std::initializer_list<int> items);

  static ItemSet full(int m);
  static ItemSet from_mask(std::uint64_t mask);

  bool contains(int j) const;
  void insert(int j);
  void erase(int j);
  bool empty() const { return items_.empty(); }
  int size() const { return static_cast<int>(items_.size()); }
  int max_element() const;  // requires non-empty

  ItemSet intersect(const ItemSet& other) const;
  ItemSet unite(const ItemSet& other) const;
  ItemSet subtract(const ItemSet& other) const;
  bool subset_of(const ItemSet& other) const;

  std::uint64_t to_mask() const;  // requires all elements < 64

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const std::vector<int>& items() const { return items_; }

  friend bool operator==(const ItemSet&, const ItemSet&) = default;
  friend auto operator<=>(const ItemSet& a, const ItemSet& b) {
    return a.items_ <=> b.items_;
  }

 private:
  std::vector<int> items_;
};

struct ItemSetHash {
  std::size_t operator()(const ItemSet& s) const;
};

// Compares two bitmasks as sorted element sequences (same order as ItemSet).
bool mask_lex_less(std::uint64_t a, std::uint64_t b);

// Item pricing: one price per item in [0, inf]; inf means "not offered".
class ItemPricing {
 public:
  ItemPricing() = default;
  explicit ItemPricing(std::vector<double> prices);

  static ItemPricing all_infinite(int m);
  static ItemPricing uniform(int m, double price);

  int size() const { return static_cast<int>(prices_.size()); }
  double operator[](int j) const { return prices_[j]; }
  double& operator[](int j) { return prices_[j]; }
  const std::vector<double>& prices() const { return prices_; }

  double total(const ItemSet& s) const;  // sum over s; requires finite entries
  ItemPricing masked_to(const ItemSet& s) const;   // inf outside s
  ItemPricing scaled(double factor) const;         // factor * p

  friend bool operator==(const ItemPricing&, const ItemPricing&) = default;

 private:
  std::vector<double> prices_;
};

struct DemandResult {
  ItemSet set;
  double payment = 0.0;
  double utility = 0.0;
};

enum class ValuationKind {
  additive,
  unit_demand,
  xos,
  table,
  bundle_threshold,
  xos_lb,
  rrs_lb,
};

std::string to_string(ValuationKind kind);

enum class ValuationClass { monotone, subadditive, xos_certified, gross_substitutes };

std::string to_string(ValuationClass cls);

// Parameters of the analytic XOS lower-bound valuation: the A-clause values
// items of a_set at 1+t, and every set of size t*ell is valued at 1+k/ell per
// item.  eps is a tie-break bump applied to the A side during demand only.
struct XosLbParams {
  ItemSet a_set;
  int k = 0;
  int t = 0;
  int ell = 0;
  double eps = 0.0;
};

// Two-clause XOS valuation from the RRS lower-bound family.  index is
// 1-based (it refers to item index-1); r_set holds 0-based items and must
// sit inside {0..index-2}.
struct RrsLbParams {
  int index = 1;
  ItemSet r_set;
  double beta = 0.0;
  double eps = 0.0;
};

class Valuation {
 public:
  static Valuation additive(std::vector<double> values);
  static Valuation unit_demand(std::vector<double> values);
  static Valuation xos(int m, std::vector<std::vector<double>> clauses);
  static Valuation table(int m, std::vector<double> values,
                         std::optional<ValuationClass> declared = std::nullopt);
  static Valuation bundle_threshold(int m, std::vector<ItemSet> bundles);
  static Valuation xos_lb(int m, XosLbParams params);
  static Valuation rrs_lb(int m, RrsLbParams params);

  ValuationKind kind() const { return kind_; }
  int item_count() const { return m_; }

  // Effective availability: v(S) is evaluated as v(S ∩ restriction).
  const ItemSet& restriction() const { return restriction_; }
  bool is_restricted() const { return restriction_.size() != m_; }

  double value(const ItemSet& s) const;

  const std::vector<double>& additive_values() const;
  const std::vector<std::vector<double>>& xos_clauses() const;
  const std::vector<double>& table_values() const;
  const std::vector<ItemSet>& bundles() const;
  const XosLbParams& xos_lb_params() const;
  const RrsLbParams& rrs_lb_params() const;
  std::optional<ValuationClass> declared_class() const { return declared_; }

  friend Valuation restrict_to(const Valuation& v, const ItemSet& s);

 private:
  Valuation() = default;

  ValuationKind kind_ = ValuationKind::additive;
  int m_ = 0;
  ItemSet restriction_;
  std::optional<ValuationClass> declared_;
  std::variant<std::vector<double>,               // additive / unit_demand / table
               std::vector<std::vector<double>>,  // xos
               std::vector<ItemSet>,              // bundle_threshold
               XosLbParams, RrsLbParams>
      data_;
};

// v|S with v|S(T) = v(T ∩ S); demand against v|S matches demand against v
// with prices set to inf outside S.
Valuation restrict_to(const Valuation& v, const ItemSet& s);

struct WeightedValuation {
  double prob;
  Valuation valuation;
};

class BuyerDistribution {
 public:
  BuyerDistribution() = default;
  explicit BuyerDistribution(std::vector<WeightedValuation> support);

  static BuyerDistribution point(Valuation v);

  int item_count() const { return m_; }
  const std::vector<WeightedValuation>& support() const { return support_; }

  BuyerDistribution restricted_to(const ItemSet& s) const;

 private:
  int m_ = 0;
  std::vector<WeightedValuation> support_;
};

struct WeightedPricing {
  double prob;
  ItemPricing pricing;
};

class RandomPricing {
 public:
  RandomPricing() = default;
  explicit RandomPricing(std::vector<WeightedPricing> support);

  static RandomPricing point(ItemPricing p);

  int item_count() const { return m_; }
  const std::vector<WeightedPricing>& support() const { return support_; }

 private:
  int m_ = 0;
  std::vector<WeightedPricing> support_;
};

// Utility-maximizing demanded set under pricing p.  Among utility maximizers
// the buyer takes a maximal-price set; remaining ties go to the
// lexicographically smallest item set.  Items priced inf are never included.
DemandResult demand(const Valuation& v, const ItemPricing& p);

// Precomputed v(S) over all subsets of a ground set, indexed by compact
// bitmask relative to the ground's sorted items.  |ground| <= 24.
class SubsetValueTable {
 public:
  SubsetValueTable(const Valuation& v, const ItemSet& ground);

  const ItemSet& ground() const { return ground_; }
  double value(std::uint64_t compact_mask) const { return values_[compact_mask]; }

 private:
  ItemSet ground_;
  std::vector<double> values_;
};

// Exhaustive reference over every subset of the finite-priced available
// items; requires at most max_items of them (default 20).
DemandResult demand_exhaustive(const Valuation& v, const ItemPricing& p,
                               int max_items = 20);

// Same, reusing a prebuilt value table (availability must lie in its ground).
DemandResult demand_exhaustive(const Valuation& v, const SubsetValueTable& table,
                               const ItemPricing& p);

double expected_rev(const BuyerDistribution& d, const ItemPricing& p);
double expected_rev(const BuyerDistribution& d, const RandomPricing& q);
std::vector<double> expected_alloc(const BuyerDistribution& d, const ItemPricing& p);
std::vector<double> expected_alloc(const BuyerDistribution& d, const RandomPricing& q);

// Candidate breakdown of the analytic xos_lb demand: the affordable A items
// (utility includes the eps bump) versus the best t*ell-prefix of cheap items.
struct XosLbBreakdown {
  ItemSet a_candidate;
  ItemSet b_candidate;
  double a_utility = 0.0;  // bumped
  double b_utility = 0.0;
  bool a_chosen = false;
};

XosLbBreakdown xos_lb_breakdown(const Valuation& v, const ItemPricing& p);

struct ClassCheckResult {
  bool ok = false;
  std::string detail;
  // Violating pair for monotone/subadditive checks.
  std::optional<std::pair<ItemSet, ItemSet>> set_witness;
  // Violating (p, p', item) for the gross-substitutes check.
  std::optional<std::tuple<ItemPricing, ItemPricing, int>> pricing_witness;

  explicit operator bool() const { return ok; }
};

// Exhaustive check for monotone/subadditive (m <= 12).  xos_certified accepts
// exactly the representations that are XOS by construction.  The GS check is
// grid-limited: it quantifies over pairs p <= p' drawn from the marginal-value
// candidate grid, not over all real pricings.
ClassCheckResult check_class(const Valuation& v, ValuationClass cls);
ClassCheckResult check_class(const BuyerDistribution& d, ValuationClass cls);

// Per-item candidate prices: {0, inf}, every marginal difference
// v(S) - v(S \ {j}) over support valuations, and the extra grid, deduplicated
// with tolerance 1e-9.  Shared by the ex ante grid and the GS checker.
std::vector<std::vector<double>> per_item_candidate_prices(
    const BuyerDistribution& d, const std::vector<double>& extra_grid = {});

}  // namespace seqprice
