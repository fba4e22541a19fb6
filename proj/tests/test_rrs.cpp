#include <doctest.h>

#include <cmath>

#include "seqprice/instances.hpp"
#include "seqprice/rng.hpp"
#include "seqprice/rrs.hpp"
#include "seqprice/verify.hpp"

using namespace seqprice;

TEST_SUITE_BEGIN("rrs");

namespace {

// Util(v|S, gamma p) by direct demand evaluation.
double util_at(const Valuation& v, const ItemSet& s, const ItemPricing& p,
               double gamma) {
  return demand(v, p.scaled(gamma).masked_to(s)).utility;
}

Instance random_subadd(int trial) {
  auto family = static_cast<SubaddFamily>(trial % 3);
  int m = 2 + trial % 5;
  return gen_random_subadditive(m, 1, 2 + trial % 3, family, 1000 + trial);
}

}  // namespace

TEST_CASE("single item closed form") {
  BuyerDistribution d = BuyerDistribution::point(Valuation::additive({1.0}));
  ItemSet s{0};
  ItemPricing p({1.0});
  // Window [1/2, 1]; the buyer purchases throughout, so
  // E = integral of gamma / (gamma ln 2) = (1/2) / ln 2.
  double expect = 0.5 / std::log(2.0);
  CHECK(subadd_rrs_expected_rev(d, s, p) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("worthless instance recovers nothing") {
  BuyerDistribution d = BuyerDistribution::point(Valuation::additive({0.0, 0.0}));
  CHECK(subadd_rrs_expected_rev(d, ItemSet{0, 1}, ItemPricing({1.0, 2.0})) == 0.0);
}

TEST_CASE("expected revenue equals the utility-drop identity") {
  // E_gamma[Rev] = (Util(lp) - Util(hp)) / ln(h/l), exactly, per valuation.
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    Instance inst = random_subadd(trial);
    int m = inst.m;
    const BuyerDistribution& d = inst.buyers[0];
    std::vector<double> prices(m);
    for (double& x : prices) x = rng.uniform(0.05, 1.5);
    ItemPricing p(prices);
    std::vector<int> items;
    for (int j = 0; j < m; ++j)
      if (rng.coin(0.7)) items.push_back(j);
    if (items.empty()) items.push_back(0);
    ItemSet s(items);

    ScalingWindow w = ScalingWindow::for_pricing(p, s, m);
    double log_ratio = std::log(w.hi / w.lo);
    double expect = 0.0;
    for (const auto& wv : d.support())
      expect += wv.prob *
                (util_at(wv.valuation, s, p, w.lo) - util_at(wv.valuation, s, p, w.hi)) /
                log_ratio;
    double got = subadd_rrs_expected_rev(d, s, p);
    CAPTURE(trial);
    CHECK(got == doctest::Approx(expect).epsilon(1e-7));
  }
}

TEST_CASE("expected revenue matches Monte Carlo sampling of gamma") {
  Instance inst = gen_random_subadditive(5, 1, 3, SubaddFamily::coverage, 321);
  const BuyerDistribution& d = inst.buyers[0];
  Rng rng(17);
  std::vector<double> prices(5);
  for (double& x : prices) x = rng.uniform(0.1, 1.0);
  ItemPricing p(prices);
  ItemSet s{0, 1, 3, 4};

  ScalingWindow w = ScalingWindow::for_pricing(p, s, 5);
  double exact = subadd_rrs_expected_rev(d, s, p);

  long samples = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < samples; ++i) {
    double gamma = w.lo * std::pow(w.hi / w.lo, rng.uniform());  // density 1/(g ln r)
    double rev = 0.0;
    for (const auto& wv : d.support())
      rev += wv.prob * demand(wv.valuation, p.scaled(gamma).masked_to(s)).payment;
    sum += rev;
    sum_sq += rev * rev;
  }
  double mean = sum / samples;
  double se = std::sqrt(std::max(0.0, (sum_sq - samples * mean * mean) /
                                          (samples - 1) / samples));
  CHECK(std::abs(exact - mean) <= 3.0 * se + 1e-9);
}

TEST_CASE("power-of-two derandomization") {
  {
    // m=1, v=1, p=1: gamma=1 earns 1, gamma=1/2 earns 1/2.
    BuyerDistribution d = BuyerDistribution::point(Valuation::additive({1.0}));
    ItemPricing q = subadd_rrs(d, ItemSet{0}, ItemPricing({1.0}));
    CHECK(q[0] == doctest::Approx(1.0));
  }
  {
    // Everything worth 1 at unit prices: selling all at gamma=1 beats m/2.
    BuyerDistribution d = BuyerDistribution::point(Valuation::additive({1, 1, 1}));
    ItemPricing q = subadd_rrs(d, ItemSet::full(3), ItemPricing::uniform(3, 1.0));
    for (int j = 0; j < 3; ++j) CHECK(q[j] == doctest::Approx(1.0));
  }
  {
    // Empty S is vacuous.
    BuyerDistribution d = BuyerDistribution::point(Valuation::additive({1.0}));
    ItemPricing p({2.0});
    CHECK(subadd_rrs(d, ItemSet{}, p) == p);
  }
  // The price floor q >= p/2 holds exactly.
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = random_subadd(trial);
    const BuyerDistribution& d = inst.buyers[0];
    std::vector<double> prices(inst.m);
    for (double& x : prices) x = rng.uniform(0.05, 2.0);
    ItemPricing p(prices);
    ItemSet s = ItemSet::full(inst.m);
    ItemPricing q = subadd_rrs(d, s, p);
    for (int j : s) CHECK(q[j] >= p[j] / 2.0 - 1e-15);
  }
}

TEST_CASE("utility drop bounds") {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    Instance inst = random_subadd(trial);
    int m = inst.m;
    const BuyerDistribution& d = inst.buyers[0];
    std::vector<double> prices(m);
    for (double& x : prices) x = rng.uniform(0.05, 1.5);
    ItemPricing p(prices);
    std::vector<int> items;
    for (int j = 0; j < m; ++j)
      if (rng.coin(0.6)) items.push_back(j);
    if (items.empty()) items.push_back(0);
    ItemSet s(items);
    ScalingWindow w = ScalingWindow::for_pricing(p, s, m);

    for (const auto& wv : d.support()) {
      const Valuation& v = wv.valuation;
      double drop = util_at(v, s, p, w.lo) - util_at(v, s, p, w.hi);
      // Restricted form: holds for any valuation.
      DemandResult restricted = demand(v, p.masked_to(s));
      CHECK(drop >= 0.5 * restricted.payment - 1e-9);
      // Unrestricted form: needs subadditivity (these families are).
      DemandResult full = demand(v, p);
      double mass = 0.0;
      for (int j : s)
        if (full.set.contains(j)) mass += p[j];
      CHECK(drop >= 0.5 * mass - 1e-9);
    }
  }
}

TEST_CASE("error paths of the scaling scheme") {
  BuyerDistribution d = BuyerDistribution::point(Valuation::additive({1.0, 1.0}));
  // No positive price on S.
  CHECK_THROWS(subadd_rrs_expected_rev(d, ItemSet{0, 1}, ItemPricing({0.0, 0.0})));
  // Infinite price inside S violates the precondition.
  CHECK_THROWS(subadd_rrs(d, ItemSet{0, 1}, ItemPricing({1.0, kInf})));
  // Zero-priced items are offered but excluded from the aspect ratio.
  ScalingWindow w = ScalingWindow::for_pricing(ItemPricing({0.0, 2.0, 0.5}),
                                               ItemSet{0, 1, 2}, 3);
  CHECK(w.aspect == doctest::Approx(4.0));
  CHECK(w.hi == doctest::Approx(12.0));
}

TEST_CASE("verify_rrs") {
  BuyerDistribution d = BuyerDistribution::point(Valuation::additive({1.0, 0.4}));
  ItemSet s{0, 1};
  ItemPricing p({0.8, 0.3});
  CHECK(verify_rrs(d, s, p, p, 1.0).ok);

  RrsVerifyReport bad = verify_rrs(d, s, p, ItemPricing({0.0, 0.0}), 1.0);
  CHECK(!bad.ok);
  CHECK(!bad.scale_ok);
  CHECK(bad.scale_witness == 0);
}

TEST_CASE("gs identity scheme on restricted sets") {
  Rng rng(55);
  for (int trial = 0; trial < 25; ++trial) {
    Instance inst = gen_random_gs(3, 1, 2, GsFamily::mixed, 900 + trial);
    const BuyerDistribution& d = inst.buyers[0];
    std::vector<double> prices(3);
    for (double& x : prices) x = rng.uniform(0.1, 1.0);
    ItemPricing p(prices);
    std::vector<int> items;
    for (int j = 0; j < 3; ++j)
      if (rng.coin(0.6)) items.push_back(j);
    if (items.empty()) items.push_back(1);
    ItemSet s(items);
    ItemPricing q = gs_rrs(d, s, p);
    CHECK(q == p);
    CHECK(verify_rrs(d, s, p, q, 1.0).ok);
  }
}

TEST_CASE("randomized and derandomized bounds on random instances") {
  verify::Check c = verify::rrs_subadditive(31337, 40);
  CHECK_MESSAGE(c.ok, c.detail);
}

TEST_SUITE_END();
