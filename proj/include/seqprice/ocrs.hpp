#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seqprice/core.hpp"

namespace seqprice {

// Input to the greedy hull sampler.  Sets range over the ground set; w is a
// full-length vector that vanishes off the ground.  The oracle must satisfy
// (i) y^T_j = 0 off T and (ii) |y^T| >= sum_{j in T} w_j; both are checked on
// every call and violations are hard errors.
struct HullInput {
  ItemSet ground;
  std::vector<double> w;
  std::function<std::vector<double>(const ItemSet&)> y_oracle;
};

struct HullEntry {
  ItemSet subset;  // empty set marks the lambda_empty mass
  double weight;
};

struct HullDistribution {
  std::vector<HullEntry> support;
  int oracle_queries = 0;

  double total_weight() const;
  // sum_T lambda_T y^T, reconstructed from the recorded oracle outputs.
  std::vector<double> mixed_vector() const;

  // Recorded y^T per support entry (empty vector for the empty set).
  std::vector<std::vector<double>> y_vectors;
};

// Greedy hull sampler: repeatedly scales y^Q into the remaining budget w~
// until either the budget or the probability mass runs out.  Output satisfies
// sum lambda_T y^T <= w and |sum lambda_T y^T| >= (1 - 1/e) |w|.
HullDistribution convex_hull_sampler(const HullInput& input);

enum class RrsKind { subadditive, gross_substitutes };

// Distribution over restricted pricings produced for one deterministic
// reference pricing: entry t sells items of lambda[t].subset at pricing[t]
// (the empty subset maps to the all-infinite pricing).
struct OcrsPlan {
  std::vector<HullEntry> lambda;
  std::vector<ItemPricing> pricing;
  double alpha = 1.0;
  int oracle_queries = 0;

  RandomPricing as_random_pricing(int m) const;
};

// Runs the RRS -> OCRS reduction for a single reference pricing p over the
// available set s: w_j = p_j Alloc_j(D, p), y^T_j = alpha q^T_j
// Alloc_j(D|T, q^T) with q^T the RRS pricing for (D, T, p).  y vectors are
// computed on demand and memoized per T.
OcrsPlan build_ocrs_plan(const BuyerDistribution& d, const ItemSet& s,
                         const ItemPricing& p, RrsKind rrs,
                         std::optional<double> alpha_override = std::nullopt);

// Mixture of per-support plans over the reference random pricing.  alpha_out,
// when given, receives the largest RRS factor used by any support pricing.
RandomPricing rrs_to_ocrs(const BuyerDistribution& d, const ItemSet& s,
                          const std::vector<double>& x,
                          const RandomPricing& reference, RrsKind rrs,
                          std::optional<double> alpha_override = std::nullopt,
                          double* alpha_out = nullptr);

// Finite-support distribution over available sets.
struct SetDistribution {
  std::vector<std::pair<double, ItemSet>> support;

  static SetDistribution point(ItemSet s);
};

// Exact convex decomposition for gross-substitutes buyers: returns a random
// pricing whose expected allocation over S ~ dist equals y and whose expected
// revenue equals sum_j p_j y_j.  Requires y <= w coordinatewise where
// w_j = E_S[Alloc_j(D|S, p)].
RandomPricing gs_decompose(const BuyerDistribution& d, const SetDistribution& dist,
                           const ItemPricing& p, const std::vector<double>& y);

struct OcrsVerifyReport {
  bool ok = false;
  bool alloc_ok = false;    // (a)  E_S[Alloc(D|S, out)] <= x
  bool revenue_ok = false;  // (b') E_S[Rev(D|S, out)] >= (1/alpha) E[priced mass]
  int alloc_witness = -1;
  double revenue_lhs = 0.0;
  double revenue_rhs = 0.0;
  std::string detail;

  explicit operator bool() const { return ok; }
};

// The output argument maps each support set of dist to the pricing offered
// when that set is available (the OCRS may depend on the realized S).
OcrsVerifyReport verify_ocrs(const BuyerDistribution& d, const SetDistribution& dist,
                             const std::vector<double>& x,
                             const std::vector<RandomPricing>& output_per_set,
                             const RandomPricing& reference, double alpha);

}  // namespace seqprice
