#pragma once

#include <cstdint>
#include <vector>

#include "seqprice/core.hpp"
#include "seqprice/exante.hpp"
#include "seqprice/mechanisms.hpp"

namespace seqprice {

int largest_prime_at_most(int x);

// XOS lower-bound family: n = k buyers over m = k^2 items, each buyer a
// uniform mixture over (A-block, scale) valuations.  A-blocks come from an
// independent random equipartition of the items, which keeps every per-item
// marginal exactly k/m while the support stays k * t^2/2 entries.
struct XosLbInstance {
  Instance instance;
  RandomPricing reference;  // unit prices, shared by every buyer
  int k = 0;
  int t = 0;
  double eps = 0.0;

  // x from exact allocations under unit prices; value = n * k = m.
  ExAnteSolution reference_solution() const;
};

XosLbInstance gen_xos_lb(int t, double eps, std::uint64_t seed);

// Validation-mode explicit representation: the A clause plus every set of
// size t*ell as a clause.  Parameters decouple from the generator's coupling
// (k = 2^(t^2), m = k^2) so small oracle cross-checks stay feasible.
Valuation xos_lb_explicit_valuation(int m, const ItemSet& a_set, int k, int t,
                                    int ell, double eps);

// Named alias of the analytic oracle (dispatches through demand()).
DemandResult xos_lb_demand(const Valuation& v, const ItemPricing& p);

// ell partitions of [ell^2] into ell bundles such that bundles from distinct
// partitions always intersect; built from lines y = xi + j mod ell.
struct GoodCollection {
  int ell = 0;
  std::vector<std::vector<ItemSet>> partitions;
};

GoodCollection good_collection(int ell);

struct MonotoneLbInstance {
  Instance instance;
  std::vector<RandomPricing> reference;  // per buyer: uniform over bundle pricings
  int ell = 0;
  int active = 0;  // N = min(n, ell)
  double eps = 0.0;

  ExAnteSolution reference_solution() const;
};

MonotoneLbInstance gen_monotone_lb(int m, int n, double eps);

// RRS lower bound: single buyer over m items, prices (beta, ..., beta^{m-1}, 0)
// with S = [m-1].  The support is exponential in m, so expectations are
// computed analytically (per-index case analysis with pruned enumeration of
// the Bernoulli inclusion sums).
struct RrsLbInstance {
  int m = 0;
  double beta = 0.0;
  double sigma = 0.0;  // sum_i beta^{-i}
  double eps = 0.0;
  ItemPricing reference;
  ItemSet s_set;  // items 0..m-2

  // Explicit materialization; throws when the support would exceed the cap.
  BuyerDistribution buyer(std::size_t max_support = std::size_t{1} << 16) const;

  // sum_{j in S} p_j Alloc_j(D, p) = sigma^{-1} (m-1), in closed form.
  double priced_alloc_identity() const;

  // Exact E[Rev(D|S, q)] for an arbitrary pricing q (items outside S ignored).
  double expected_rev_restricted(const ItemPricing& q) const;

  // Cap on any pricing's restricted revenue for this family:
  // 4 sigma^{-1} sqrt(m-1).
  double revenue_upper_bound() const;

  // Label-aligned verification grid: scaled/shifted powers of beta, constant
  // pricings, suffix-infinite variants and seeded random label assignments.
  std::vector<ItemPricing> structured_grid(std::uint64_t seed,
                                           int random_count = 50) const;
};

RrsLbInstance gen_rrs_lb(int m, double eps);

enum class SubaddFamily { coverage, budgeted_additive, xos_random };
enum class GsFamily { additive, unit_demand, mixed };

// Random test families; every generated valuation provably belongs to its
// family (checkers must agree).
Instance gen_random_subadditive(int m, int n, int support_size,
                                SubaddFamily family, std::uint64_t seed);
Instance gen_random_gs(int m, int n, int support_size, GsFamily family,
                       std::uint64_t seed);

}  // namespace seqprice
