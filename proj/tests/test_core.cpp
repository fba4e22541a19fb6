#include <doctest.h>

#include "oracles.hpp"
#include "seqprice/core.hpp"
#include "seqprice/instances.hpp"
#include "seqprice/rng.hpp"
#include "seqprice/verify.hpp"

using namespace seqprice;

TEST_SUITE_BEGIN("core");

TEST_CASE("item sets order lexicographically on sorted elements") {
  CHECK(ItemSet{} < ItemSet{0});
  CHECK(ItemSet{0} < ItemSet{0, 1});
  CHECK(ItemSet{0, 2} < ItemSet{1});
  CHECK(ItemSet{1} < ItemSet{2});
  CHECK(mask_lex_less(0b101, 0b010));   // {0,2} < {1}
  CHECK(!mask_lex_less(0b010, 0b101));
  CHECK(mask_lex_less(0b001, 0b011));   // prefix
}

TEST_CASE("single additive item") {
  Valuation v = Valuation::additive({3.0});
  DemandResult r = demand(v, ItemPricing({1.0}));
  CHECK(r.set == ItemSet{0});
  CHECK(r.payment == doctest::Approx(1.0));
  CHECK(r.utility == doctest::Approx(2.0));
}

TEST_CASE("nothing offered means nothing bought") {
  Valuation v = Valuation::unit_demand({5.0, 2.0});
  DemandResult r = demand(v, ItemPricing::all_infinite(2));
  CHECK(r.set.empty());
  CHECK(r.payment == 0.0);
  CHECK(r.utility == 0.0);
}

TEST_CASE("max-price tie-break, then lexicographic") {
  // Both items priced at value: buy both (max price).
  Valuation add = Valuation::additive({2.0, 3.0});
  CHECK(demand(add, ItemPricing({2.0, 3.0})).set == ItemSet{0, 1});

  // Unit demand with equal values and prices: zero-utility singletons tie on
  // price; the lexicographically smallest wins.
  Valuation ud = Valuation::unit_demand({5.0, 5.0});
  DemandResult r = demand(ud, ItemPricing({5.0, 5.0}));
  CHECK(r.set == ItemSet{0});
  CHECK(r.utility == doctest::Approx(0.0));

  // Free low-index item joins the tied set.
  Valuation ud2 = Valuation::unit_demand({3.0, 5.0});
  CHECK(demand(ud2, ItemPricing({0.0, 0.0})).set == ItemSet{0, 1});
}

TEST_CASE("random tables match the brute-force oracle") {
  Rng rng(20240811);
  for (int trial = 0; trial < 120; ++trial) {
    int m = 3;
    std::vector<double> vals(1 << m, 0.0);
    for (std::size_t s = 1; s < vals.size(); ++s) vals[s] = rng.uniform(0.0, 2.0);
    Valuation v = Valuation::table(m, vals);
    std::vector<double> prices(m);
    for (double& x : prices) {
      if (rng.coin(0.2)) x = kInf;
      else if (rng.coin(0.15)) x = vals[rng.index(vals.size())];  // exact ties
      else x = rng.uniform(0.0, 2.0);
    }
    ItemPricing p(prices);
    DemandResult fast = demand(v, p);
    DemandResult slow = testing::brute_demand(v, p);
    CAPTURE(trial);
    CHECK(fast.set == slow.set);
    CHECK(fast.payment == doctest::Approx(slow.payment).epsilon(1e-9));
    CHECK(fast.utility == doctest::Approx(slow.utility).epsilon(1e-9));
  }
}

TEST_CASE("restriction behaves like masking prices") {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    int m = 4;
    std::vector<double> vals(1 << m, 0.0);
    for (std::size_t s = 1; s < vals.size(); ++s) vals[s] = rng.uniform(0.0, 2.0);
    Valuation v = Valuation::table(m, vals);

    CHECK(restrict_to(v, ItemSet::full(m)).value(ItemSet{1, 3}) ==
          v.value(ItemSet{1, 3}));
    CHECK(restrict_to(v, ItemSet{}).value(ItemSet{0, 1, 2}) == 0.0);

    ItemSet s{0, 2};
    Valuation vs = restrict_to(v, s);
    CHECK(vs.value(ItemSet{1, 2}) == v.value(ItemSet{2}));

    std::vector<double> prices(m);
    for (double& x : prices) x = rng.uniform(0.0, 1.5);
    ItemPricing p(prices);
    DemandResult a = demand(vs, p);
    DemandResult b = demand(v, p.masked_to(s));
    CHECK(a.utility == doctest::Approx(b.utility).epsilon(1e-9));
    CHECK(a.payment == doctest::Approx(b.payment).epsilon(1e-9));
  }
}

TEST_CASE("expected allocation and revenue") {
  // Point masses give the indicator of the demand set.
  Valuation v = Valuation::additive({2.0, 0.5});
  BuyerDistribution d = BuyerDistribution::point(v);
  ItemPricing p({1.0, 1.0});
  std::vector<double> alloc = expected_alloc(d, p);
  CHECK(alloc[0] == doctest::Approx(1.0));
  CHECK(alloc[1] == doctest::Approx(0.0));

  // Half the support buys.
  BuyerDistribution half(
      {{0.5, Valuation::additive({2.0})}, {0.5, Valuation::additive({0.0})}});
  CHECK(expected_alloc(half, ItemPricing({1.0}))[0] == doctest::Approx(0.5));

  // All-infinite pricing earns nothing.
  CHECK(expected_rev(half, ItemPricing::all_infinite(1)) == 0.0);

  // Deterministic pricing: revenue equals price-weighted allocation.
  Rng rng(99);
  Instance inst = gen_random_subadditive(3, 1, 4, SubaddFamily::coverage, 5);
  const BuyerDistribution& dd = inst.buyers[0];
  std::vector<double> prices(3);
  for (double& x : prices) x = rng.uniform(0.1, 1.5);
  ItemPricing q(prices);
  std::vector<double> a = expected_alloc(dd, q);
  double dot = 0;
  for (int j = 0; j < 3; ++j) dot += q[j] * a[j];
  CHECK(expected_rev(dd, q) == doctest::Approx(dot).epsilon(1e-12));
  for (double f : a) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-12);
  }
}

TEST_CASE("expected allocation matches Monte Carlo") {
  Instance inst = gen_random_subadditive(3, 1, 4, SubaddFamily::budgeted_additive, 17);
  const BuyerDistribution& d = inst.buyers[0];
  Rng rng(31);
  std::vector<WeightedPricing> mix;
  for (int k = 0; k < 4; ++k) {
    std::vector<double> prices(3);
    for (double& x : prices) x = rng.coin(0.15) ? kInf : rng.uniform(0.05, 1.2);
    mix.push_back({0.25, ItemPricing(prices)});
  }
  RandomPricing q(mix);
  std::vector<double> exact = expected_alloc(d, q);
  testing::McAlloc mc = testing::mc_expected_alloc(d, q, 100000, 77);
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(exact[j] - mc.mean[j]) <= 3.0 * mc.std_err[j] + 1e-9);
}

TEST_CASE("class checks") {
  Valuation add = Valuation::additive({1.0, 2.0});
  CHECK(check_class(add, ValuationClass::subadditive).ok);
  CHECK(check_class(add, ValuationClass::monotone).ok);
  CHECK(check_class(add, ValuationClass::gross_substitutes).ok);
  CHECK(check_class(add, ValuationClass::xos_certified).ok);

  // One bundle: v({0}) = v({1}) = 0 < v({0,1}) = 1 violates subadditivity.
  Valuation bundle = Valuation::bundle_threshold(2, {ItemSet{0, 1}});
  ClassCheckResult r = check_class(bundle, ValuationClass::subadditive);
  CHECK(!r.ok);
  REQUIRE(r.set_witness.has_value());
  CHECK(r.set_witness->first == ItemSet{0});
  CHECK(r.set_witness->second == ItemSet{1});
  CHECK(check_class(bundle, ValuationClass::monotone).ok);
  CHECK(!check_class(bundle, ValuationClass::gross_substitutes).ok);

  // Random XOS valuations are subadditive.
  Instance inst = gen_random_subadditive(4, 1, 3, SubaddFamily::xos_random, 3);
  for (const auto& wv : inst.buyers[0].support()) {
    CHECK(check_class(wv.valuation, ValuationClass::subadditive).ok);
    CHECK(check_class(wv.valuation, ValuationClass::xos_certified).ok);
  }

  // Unit-demand is GS.
  Valuation ud = Valuation::unit_demand({0.8, 0.5, 0.9});
  CHECK(check_class(ud, ValuationClass::gross_substitutes).ok);

  // A non-monotone table is caught.
  std::vector<double> vals = {0.0, 1.0, 0.5, 0.2};
  CHECK(!check_class(Valuation::table(2, vals), ValuationClass::monotone).ok);
}

TEST_CASE("declared table classes are enforced at construction") {
  std::vector<double> bad = {0.0, 0.0, 0.0, 1.0};  // superadditive bundle
  CHECK_THROWS(Valuation::table(2, bad, ValuationClass::subadditive));
  std::vector<double> good = {0.0, 1.0, 1.0, 1.5};
  CHECK_NOTHROW(Valuation::table(2, good, ValuationClass::subadditive));
}

TEST_CASE("per-item candidates carry marginal values") {
  BuyerDistribution d = BuyerDistribution::point(Valuation::unit_demand({5.0, 5.0}));
  auto per_item = per_item_candidate_prices(d);
  for (int j = 0; j < 2; ++j) {
    bool has5 = false;
    for (double x : per_item[j]) has5 = has5 || std::abs(x - 5.0) < 1e-12;
    CHECK(has5);
    CHECK(per_item[j].front() == 0.0);
    CHECK(per_item[j].back() == kInf);
  }
}

TEST_CASE("demand across kinds agrees with enumeration") {
  // Small build-time battery; the acceptance suite runs the full one.
  verify::Check c = verify::demand_ground_truth(4242, 200);
  CHECK_MESSAGE(c.ok, c.detail);
}

TEST_SUITE_END();
