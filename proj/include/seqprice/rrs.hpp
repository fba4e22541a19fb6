#pragma once

#include <string>

#include "seqprice/core.hpp"

namespace seqprice {

// Scaling window of the subadditive revenue recovery scheme: gamma ranges
// over [lo, hi] = [1/2, m * aspect] where aspect is the max/min ratio of the
// positive prices on S.
struct ScalingWindow {
  double lo = 0.5;
  double hi = 0.0;
  double aspect = 1.0;

  // Throws when S is nonempty but carries no positive finite price.
  static ScalingWindow for_pricing(const ItemPricing& p, const ItemSet& s, int m);
};

// E_gamma[Rev(D|S, gamma p)] under the density 1/(gamma ln(hi/lo)), computed
// exactly: the demanded set is piecewise constant in gamma, breakpoints are
// located by bisection, and each constant piece integrates in closed form.
double subadd_rrs_expected_rev(const BuyerDistribution& d, const ItemSet& s,
                               const ItemPricing& p);

// Derandomized scheme: gamma* is the best power of two in the window;
// returns gamma* p, so every price on S keeps at least half its value.
ItemPricing subadd_rrs(const BuyerDistribution& d, const ItemSet& s,
                       const ItemPricing& p);

// Gross-substitutes scheme: the identity q = p is a 1-RRS.
ItemPricing gs_rrs(const BuyerDistribution& d, const ItemSet& s,
                   const ItemPricing& p);

struct RrsVerifyReport {
  bool ok = false;
  bool scale_ok = false;    // (a) q_j >= p_j / alpha on S
  bool revenue_ok = false;  // (b) Rev(D|S, q) >= (1/alpha) sum p_j Alloc_j(D, p)
  int scale_witness = -1;   // first item violating (a), if any
  double revenue_lhs = 0.0;
  double revenue_rhs = 0.0;
  std::string detail;

  explicit operator bool() const { return ok; }
};

// Checks both RRS conditions of the alpha-scheme with tolerance 1e-9.
RrsVerifyReport verify_rrs(const BuyerDistribution& d, const ItemSet& s,
                           const ItemPricing& p, const ItemPricing& q,
                           double alpha);

// sum over j in S of p_j * Alloc_j(D, p); inf-priced items contribute 0.
double priced_alloc_mass(const BuyerDistribution& d, const ItemSet& s,
                         const ItemPricing& p);

// RRS guarantee carried by the power-of-two scheme: 4 * log2(2 m aspect).
double subadd_rrs_alpha(const ItemPricing& p, const ItemSet& s, int m);

}  // namespace seqprice
