#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "seqprice/instances.hpp"
#include "seqprice/rng.hpp"
#include "seqprice/verify.hpp"

using namespace seqprice;

TEST_SUITE_BEGIN("instances");

TEST_CASE("xos lower-bound parameters and structure") {
  XosLbInstance inst = gen_xos_lb(2, 1e-6, 11);
  CHECK(inst.k == 16);
  CHECK(inst.instance.m == 256);
  CHECK(inst.instance.buyer_count() == 16);
  for (const auto& buyer : inst.instance.buyers) {
    CHECK(buyer.support().size() == 32);  // 16 blocks x 2 scales
    for (const auto& wv : buyer.support()) {
      const auto& par = wv.valuation.xos_lb_params();
      CHECK(par.a_set.size() == 16);
      CHECK((par.ell == 2 || par.ell == 4));
    }
  }
  CHECK_THROWS(gen_xos_lb(3, 1e-6, 1));  // odd t
  CHECK_THROWS(gen_xos_lb(4, 1e-6, 1));  // k = 2^16 is far beyond desk scale
}

TEST_CASE("xos lower-bound utilities, demand and reference solution") {
  XosLbInstance inst = gen_xos_lb(2, 1e-6, 3);
  int k = inst.k;
  double kt = 32.0;
  ItemPricing ones = ItemPricing::uniform(inst.instance.m, 1.0);

  const auto& wv = inst.instance.buyers[2].support()[5];
  const auto& par = wv.valuation.xos_lb_params();
  CHECK(wv.valuation.value(par.a_set) - k == doctest::Approx(kt));
  ItemSet some_b = ItemSet::full(par.t * par.ell);
  CHECK(wv.valuation.value(some_b) - par.t * par.ell == doctest::Approx(kt));

  DemandResult r = xos_lb_demand(wv.valuation, ones);
  CHECK(r.set == par.a_set);
  CHECK(r.payment == doctest::Approx(k));

  ExAnteSolution ref = inst.reference_solution();
  CHECK(ref.value == doctest::Approx(256.0));
  validate_exante(inst.instance.buyers, ref);
}

TEST_CASE("analytic oracle agrees with the explicit XOS representation") {
  Rng rng(1234);
  int m = 16, k = 4, t = 2, ell = 2;
  std::vector<int> perm(m);
  for (int j = 0; j < m; ++j) perm[j] = j;
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  ItemSet a_set(std::vector<int>(perm.begin(), perm.begin() + k));

  Valuation explicit_v = xos_lb_explicit_valuation(m, a_set, k, t, ell, 0.0);
  Valuation analytic_v = Valuation::xos_lb(m, XosLbParams{a_set, k, t, ell, 0.0});

  // Value functions agree everywhere (spot sample).
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> items;
    for (int j = 0; j < m; ++j)
      if (rng.coin(0.4)) items.push_back(j);
    ItemSet s(items);
    CHECK(analytic_v.value(s) == doctest::Approx(explicit_v.value(s)).epsilon(1e-12));
  }

  SubsetValueTable table(explicit_v, ItemSet::full(m));
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> prices(m);
    for (double& x : prices) x = rng.coin(0.15) ? kInf : rng.uniform(0.0, 6.0);
    ItemPricing p(prices);
    DemandResult a = demand(analytic_v, p);
    DemandResult b = demand_exhaustive(explicit_v, table, p);
    CAPTURE(trial);
    CHECK(a.set == b.set);
    CHECK(a.payment == doctest::Approx(b.payment).epsilon(1e-9));
    CHECK(a.utility == doctest::Approx(b.utility).epsilon(1e-9));
  }
}

TEST_CASE("good collections from mod-ell lines") {
  GoodCollection g2 = good_collection(2);
  // B_{00} = {(0,0),(1,0)} -> items {0,2}; B_{10} = {(0,0),(1,1)} -> {0,3}.
  CHECK(g2.partitions[0][0] == ItemSet{0, 2});
  CHECK(g2.partitions[1][0] == ItemSet{0, 3});
  CHECK(g2.partitions[0][0].intersect(g2.partitions[1][0]) == ItemSet{0});

  GoodCollection g3 = good_collection(3);
  for (int i = 0; i < 3; ++i)
    for (int i2 = i + 1; i2 < 3; ++i2)
      for (const auto& a : g3.partitions[i])
        for (const auto& b : g3.partitions[i2]) CHECK(!a.intersect(b).empty());
  for (const auto& part : g3.partitions)
    for (std::size_t x = 0; x < part.size(); ++x)
      for (std::size_t y = x + 1; y < part.size(); ++y)
        CHECK(part[x].intersect(part[y]).empty());

  CHECK_THROWS(good_collection(4));
  CHECK_THROWS(good_collection(1));
}

TEST_CASE("monotone lower-bound generator") {
  MonotoneLbInstance lb = gen_monotone_lb(9, 5, 0.01);
  CHECK(lb.ell == 3);
  CHECK(lb.active == 3);
  CHECK(lb.instance.buyer_count() == 5);

  // Inactive buyers are worthless and never buy.
  const Valuation& zero = lb.instance.buyers[4].support()[0].valuation;
  CHECK(zero.value(ItemSet::full(9)) == 0.0);
  CHECK(demand(zero, ItemPricing::uniform(9, 0.1)).set.empty());

  ExAnteSolution ref = lb.reference_solution();
  CHECK(ref.value == doctest::Approx(3 * 0.99));
  validate_exante(lb.instance.buyers, ref);
  for (int j = 0; j < 9; ++j) {
    double load = 0.0;
    for (int i = 0; i < 5; ++i) load += ref.x[i][j];
    CHECK(load == doctest::Approx(1.0).epsilon(1e-12));
  }

  CHECK_THROWS(gen_monotone_lb(3, 2, 0.01));
}

TEST_CASE("rrs lower-bound generator basics") {
  CHECK_THROWS(gen_rrs_lb(4, 1e-3));
  // Explicit materialization refuses supports beyond the cap.
  CHECK_THROWS(gen_rrs_lb(26, 1e-3).buyer());
  RrsLbInstance inst = gen_rrs_lb(10, 1e-3);
  CHECK(inst.beta == doctest::Approx(3.0));
  CHECK(inst.reference[9] == 0.0);
  CHECK(inst.reference[0] == doctest::Approx(3.0));

  // Every support valuation demands {i, m} under the reference pricing.
  BuyerDistribution d = inst.buyer();
  double mass = 0.0;
  for (const auto& wv : d.support()) {
    DemandResult r = demand(wv.valuation, inst.reference);
    const auto& par = wv.valuation.rrs_lb_params();
    CHECK(r.set == ItemSet{par.index - 1, 9});
    mass += wv.prob * inst.reference[par.index - 1];
  }
  CHECK(mass == doctest::Approx(inst.priced_alloc_identity()).epsilon(1e-9));

  // The analytic restricted revenue matches the explicit-support expectation.
  std::vector<ItemPricing> grid = inst.structured_grid(5, 10);
  for (std::size_t g = 0; g < grid.size(); g += 7) {
    double analytic = inst.expected_rev_restricted(grid[g]);
    double explicit_rev = expected_rev(d, grid[g].masked_to(inst.s_set));
    CAPTURE(g);
    CHECK(analytic == doctest::Approx(explicit_rev).epsilon(1e-9));
  }
}

TEST_CASE("rrs lower-bound demand matches enumeration on the two-clause form") {
  Rng rng(777);
  RrsLbInstance inst = gen_rrs_lb(8, 1e-3);
  for (int trial = 0; trial < 150; ++trial) {
    int i = 1 + static_cast<int>(rng.index(7));
    std::vector<int> rs;
    for (int r = 0; r + 2 <= i; ++r)
      if (rng.coin(0.5)) rs.push_back(r);
    Valuation v = Valuation::rrs_lb(8, RrsLbParams{i, ItemSet(rs), inst.beta, 1e-3});
    std::vector<double> prices(8);
    for (double& x : prices)
      x = rng.coin(0.2) ? kInf : rng.uniform(0.0, 2.0 * std::pow(inst.beta, i));
    ItemPricing p(prices);
    DemandResult fast = demand(v, p);
    DemandResult slow = testing::brute_demand(v, p);
    CAPTURE(trial);
    CHECK(fast.set == slow.set);
    CHECK(fast.utility == doctest::Approx(slow.utility).epsilon(1e-9));
  }
}

TEST_CASE("random families satisfy their declared classes") {
  for (auto family : {SubaddFamily::coverage, SubaddFamily::budgeted_additive,
                      SubaddFamily::xos_random}) {
    Instance inst = gen_random_subadditive(4, 2, 3, family, 2024);
    for (const auto& buyer : inst.buyers)
      for (const auto& wv : buyer.support()) {
        CHECK(check_class(wv.valuation, ValuationClass::subadditive).ok);
        CHECK(check_class(wv.valuation, ValuationClass::monotone).ok);
      }
  }
  Instance gs = gen_random_gs(3, 2, 2, GsFamily::mixed, 2024);
  for (const auto& buyer : gs.buyers)
    for (const auto& wv : buyer.support())
      CHECK(check_class(wv.valuation, ValuationClass::gross_substitutes).ok);
}

TEST_CASE("degenerate family parameters collapse to additive") {
  // Budgeted-additive with a budget above the total is additive.
  std::vector<double> a = {0.3, 0.5, 0.2};
  std::vector<double> table(8, 0.0);
  for (std::uint64_t mask = 1; mask < 8; ++mask) {
    double sum = 0;
    for (int j = 0; j < 3; ++j)
      if (mask & (1u << j)) sum += a[j];
    table[mask] = std::min(1e9, sum);
  }
  Valuation budgeted = Valuation::table(3, table);
  Valuation additive = Valuation::additive(a);
  for (std::uint64_t mask = 0; mask < 8; ++mask)
    CHECK(budgeted.value(ItemSet::from_mask(mask)) ==
          doctest::Approx(additive.value(ItemSet::from_mask(mask))));

  // Coverage with disjoint element sets is additive too.
  std::vector<double> weights = {0.4, 0.7, 0.9};
  std::vector<double> cov(8, 0.0);
  for (std::uint64_t mask = 1; mask < 8; ++mask) {
    double sum = 0;
    for (int j = 0; j < 3; ++j)
      if (mask & (1u << j)) sum += weights[j];  // item j covers element j only
    cov[mask] = sum;
  }
  Valuation coverage = Valuation::table(3, cov);
  Valuation add2 = Valuation::additive(weights);
  for (std::uint64_t mask = 0; mask < 8; ++mask)
    CHECK(coverage.value(ItemSet::from_mask(mask)) ==
          doctest::Approx(add2.value(ItemSet::from_mask(mask))));
}

TEST_CASE("largest prime helper") {
  CHECK(largest_prime_at_most(3) == 3);
  CHECK(largest_prime_at_most(4) == 3);
  CHECK(largest_prime_at_most(7) == 7);
  CHECK(largest_prime_at_most(8) == 7);
  CHECK_THROWS(largest_prime_at_most(1));
}

TEST_SUITE_END();
