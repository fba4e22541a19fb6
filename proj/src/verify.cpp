#include <algorithm>
#include <cmath>
#include <sstream>

#include "seqprice/instances.hpp"
#include "seqprice/rrs.hpp"
#include "seqprice/verify.hpp"

namespace seqprice::verify {

namespace {

constexpr double kEulerLoss = 1.0 - 1.0 / 2.718281828459045;

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(6);
  out << x;
  return out.str();
}

struct Failures {
  int count = 0;
  std::string first;

  void add(const std::string& what) {
    if (count == 0) first = what;
    ++count;
  }
  Check to_check(const std::string& name, const std::string& ok_detail) const {
    if (count == 0) return {name, true, ok_detail};
    return {name, false, std::to_string(count) + " failures; first: " + first};
  }
};

std::vector<double> hull_oracle_vector(std::uint64_t inst_seed, const ItemSet& t,
                                       const std::vector<double>& w, int k,
                                       bool gs_mode) {
  Rng rng(splitmix64(inst_seed ^ (t.to_mask() * 0x9e3779b97f4a7c15ULL + 1)));
  std::vector<double> y(k, 0.0);
  if (gs_mode) {
    for (int j : t) y[j] = w[j] * (1.0 + rng.uniform());
    return y;
  }
  double need = 0.0;
  for (int j : t) need += w[j];
  double raw_sum = 0.0;
  for (int j : t) {
    y[j] = rng.uniform(0.05, 1.0);
    raw_sum += y[j];
  }
  double scale = need * (1.0 + rng.uniform()) / raw_sum;
  for (int j : t) y[j] *= scale;
  return y;
}

}  // namespace

Check hull_random(std::uint64_t seed, int count, int k_max) {
  Failures fails;
  for (int idx = 0; idx < count; ++idx) {
    Rng rng = Rng::substream(seed, idx);
    int k = 1 + static_cast<int>(rng.index(k_max));
    std::vector<double> w(k, 0.0);
    for (double& x : w)
      if (!rng.coin(0.25)) x = rng.uniform(0.05, 2.0);
    std::uint64_t inst_seed = substream_seed(seed, idx);
    HullInput input{ItemSet::full(k), w, [&](const ItemSet& t) {
                      return hull_oracle_vector(inst_seed, t, w, k, false);
                    }};
    HullDistribution dist = convex_hull_sampler(input);

    double mass = dist.total_weight();
    if (std::abs(mass - 1.0) > 1e-12) fails.add("weights sum to " + fmt(mass));
    for (const auto& e : dist.support)
      if (e.weight < 0) fails.add("negative weight");
    if (static_cast<int>(dist.support.size()) > k + 1)
      fails.add("support larger than k+1");
    std::vector<double> mix = dist.mixed_vector();
    if (mix.empty()) mix.assign(k, 0.0);
    double mix_mass = 0.0, w_mass = 0.0;
    for (int j = 0; j < k; ++j) {
      if (mix[j] > w[j] + 1e-9)
        fails.add("mix exceeds w at " + std::to_string(j));
      mix_mass += mix[j];
      w_mass += w[j];
    }
    if (mix_mass < kEulerLoss * w_mass - 1e-9)
      fails.add("mass " + fmt(mix_mass) + " < (1-1/e)|w| = " + fmt(kEulerLoss * w_mass));
  }
  return fails.to_check("hull sampler on random inputs",
                        std::to_string(count) + " inputs pass");
}

Check hull_gs_exact(std::uint64_t seed, int count) {
  Failures fails;
  for (int idx = 0; idx < count; ++idx) {
    Rng rng = Rng::substream(seed ^ 0xabcdef, idx);
    int k = 1 + static_cast<int>(rng.index(8));
    std::vector<double> w(k, 0.0);
    for (double& x : w)
      if (!rng.coin(0.2)) x = rng.uniform(0.05, 2.0);
    std::uint64_t inst_seed = substream_seed(seed ^ 0xabcdef, idx);
    HullInput input{ItemSet::full(k), w, [&](const ItemSet& t) {
                      return hull_oracle_vector(inst_seed, t, w, k, true);
                    }};
    HullDistribution dist = convex_hull_sampler(input);
    std::vector<double> mix = dist.mixed_vector();
    if (mix.empty()) mix.assign(k, 0.0);
    for (int j = 0; j < k; ++j)
      if (std::abs(mix[j] - w[j]) > 1e-9)
        fails.add("residual " + fmt(w[j] - mix[j]) + " at " + std::to_string(j));
  }
  return fails.to_check("hull sampler exact recovery on GS-style inputs",
                        std::to_string(count) + " inputs recovered exactly");
}

Check rrs_subadditive(std::uint64_t seed, int count) {
  Failures fails;
  for (int idx = 0; idx < count; ++idx) {
    Rng rng = Rng::substream(seed ^ 0x5555, idx);
    int m = 2 + idx % 5;
    int support = 2 + idx % 3;
    auto family = static_cast<SubaddFamily>(idx % 3);
    Instance inst =
        gen_random_subadditive(m, 1, support, family, substream_seed(seed, idx));
    const BuyerDistribution& d = inst.buyers[0];

    std::vector<double> prices(m);
    for (double& x : prices) x = rng.uniform(0.05, 1.5);
    ItemPricing p(std::move(prices));
    std::vector<int> s_items;
    for (int j = 0; j < m; ++j)
      if (rng.coin(0.7)) s_items.push_back(j);
    if (s_items.empty()) s_items.push_back(static_cast<int>(rng.index(m)));
    ItemSet s(std::move(s_items));

    ScalingWindow w = ScalingWindow::for_pricing(p, s, m);
    double mass = priced_alloc_mass(d, s, p);
    double exact = subadd_rrs_expected_rev(d, s, p);
    double bound = mass / (2.0 * std::log(2.0 * m * w.aspect));
    if (exact < bound - 1e-7)
      fails.add("expected rev " + fmt(exact) + " below bound " + fmt(bound));

    ItemPricing q = subadd_rrs(d, s, p);
    double alpha = subadd_rrs_alpha(p, s, m);
    RrsVerifyReport rep = verify_rrs(d, s, p, q, alpha);
    if (!rep.ok) fails.add("verify_rrs: " + rep.detail);
    for (int j : s)
      if (q[j] < p[j] / 2.0 - 1e-12) fails.add("price floor q >= p/2 broken");
  }
  return fails.to_check("subadditive RRS bound and derandomization",
                        std::to_string(count) + " instances pass");
}

Check gs_rrs_and_ocrs(std::uint64_t seed, int count) {
  Failures fails;
  const double e_ratio = 1.0 / kEulerLoss;  // e/(e-1)
  for (int idx = 0; idx < count; ++idx) {
    Rng rng = Rng::substream(seed ^ 0x7777, idx);
    int m = 2 + idx % 3;
    int support = 1 + idx % 3;
    Instance inst = gen_random_gs(m, 1, support, GsFamily::mixed,
                                  substream_seed(seed ^ 1, idx));
    const BuyerDistribution& d = inst.buyers[0];

    std::vector<double> prices(m);
    for (double& x : prices) x = rng.uniform(0.1, 1.2);
    ItemPricing p(std::move(prices));
    std::vector<int> s_items;
    for (int j = 0; j < m; ++j)
      if (idx % 3 == 0 || rng.coin(0.7)) s_items.push_back(j);
    if (s_items.empty()) s_items.push_back(static_cast<int>(rng.index(m)));
    ItemSet s(std::move(s_items));

    ItemPricing q = gs_rrs(d, s, p);
    RrsVerifyReport rrs_rep = verify_rrs(d, s, p, q, 1.0);
    if (!rrs_rep.ok) fails.add("gs 1-RRS: " + rrs_rep.detail);

    RandomPricing reference = RandomPricing::point(p);
    std::vector<double> x = expected_alloc(d, reference);
    RandomPricing out =
        rrs_to_ocrs(d, s, x, reference, RrsKind::gross_substitutes, 1.0);
    SetDistribution dist = SetDistribution::point(s);
    OcrsVerifyReport ocrs_rep = verify_ocrs(d, dist, x, {out}, reference, e_ratio);
    if (!ocrs_rep.ok) fails.add("gs OCRS at e/(e-1): " + ocrs_rep.detail);

    std::vector<double> w = expected_alloc(d, p.masked_to(s));
    RandomPricing dec = gs_decompose(d, dist, p, w);
    OcrsVerifyReport dec_rep = verify_ocrs(d, dist, w, {dec}, reference, 1.0);
    if (!dec_rep.ok) fails.add("gs_decompose at alpha 1: " + dec_rep.detail);
  }
  return fails.to_check("GS 1-RRS, e/(e-1)-OCRS, exact decomposition",
                        std::to_string(count) + " instances pass");
}

Check gs_end_to_end(std::uint64_t seed, int instances, long trials) {
  Failures fails;
  for (int idx = 0; idx < instances; ++idx) {
    int m = 2 + idx % 3;
    int n = 1 + idx % 3;
    Instance inst =
        gen_random_gs(m, n, 2, GsFamily::mixed, substream_seed(seed ^ 2, idx));
    CandidateOptions copts;
    copts.per_item_cap = 7;
    ExAnteSolution sol = solve_exante_auto(inst.buyers, {}, copts);
    validate_exante(inst.buyers, sol);

    GsPlan plan = build_gs_plan(inst, sol);
    for (int i = 0; i < n; ++i) {
      double target = 0.5 * expected_rev(inst.buyers[i], sol.pricings[i]);
      if (std::abs(plan.expected_revenue[i] - target) > 1e-9)
        fails.add("buyer " + std::to_string(i) + " plan revenue " +
                  fmt(plan.expected_revenue[i]) + " != half ex ante " + fmt(target));
    }

    auto runner = make_runner(MechanismKind::gs, inst, sol);
    MonteCarloResult mc =
        monte_carlo(*runner, inst, trials, substream_seed(seed ^ 3, idx));
    for (int i = 0; i < n; ++i) {
      double diff = std::abs(mc.per_buyer_mean[i] - plan.expected_revenue[i]);
      if (diff > 3.0 * mc.per_buyer_std_err[i] + 1e-6)
        fails.add("buyer " + std::to_string(i) + " MC revenue off by " + fmt(diff));
    }
    if (mc.mean < sol.value / 2.0 - 3.0 * mc.std_err - 1e-6)
      fails.add("total MC revenue " + fmt(mc.mean) + " below EARev/2 = " +
                fmt(sol.value / 2.0));
  }
  return fails.to_check("GS sequential mechanism halves ex ante revenue",
                        std::to_string(instances) + " solved instances pass");
}

Check availability(std::uint64_t seed, long trials) {
  Failures fails;
  auto check_runner = [&](const Instance& inst, const ExAnteSolution& sol,
                          MechanismKind kind, const std::string& label) {
    auto runner = make_runner(kind, inst, sol);
    MonteCarloResult mc = monte_carlo(*runner, inst, trials, seed ^ 0x11);
    for (int i = 0; i < inst.buyer_count(); ++i) {
      for (int j = 0; j < inst.m; ++j) {
        double f = mc.availability[i][j];
        double se = std::sqrt(std::max(f * (1.0 - f), 0.0) / trials);
        if (f < 0.5 - 3.0 * se - 1e-9)
          fails.add(label + ": Pr[item " + std::to_string(j) + " in S_" +
                    std::to_string(i) + "] = " + fmt(f));
      }
    }
  };

  {
    Instance inst =
        gen_random_subadditive(4, 3, 2, SubaddFamily::coverage, seed ^ 0xa1);
    CandidateOptions copts;
    copts.per_item_cap = 7;
    ExAnteSolution sol = solve_exante_auto(inst.buyers, {}, copts);
    check_runner(inst, sol, MechanismKind::ocrs_seq, "ocrs-seq");
  }
  {
    Instance inst = gen_random_gs(3, 3, 2, GsFamily::mixed, seed ^ 0xa2);
    ExAnteSolution sol = solve_exante_auto(inst.buyers, {});
    check_runner(inst, sol, MechanismKind::gs, "gs");
  }
  return fails.to_check("availability stays above 1/2", "all (i, j) pass");
}

std::vector<Check> xos_lb_suite(std::uint64_t seed) {
  std::vector<Check> checks;
  XosLbInstance inst = gen_xos_lb(2, 1e-6, seed ^ 0xbeef);
  int k = inst.k, t = inst.t, m = inst.instance.m;
  double kt = static_cast<double>(k) * t;
  ItemPricing ones = ItemPricing::uniform(m, 1.0);

  {
    Failures fails;
    for (const auto& buyer : inst.instance.buyers) {
      for (const auto& wv : buyer.support()) {
        const auto& par = wv.valuation.xos_lb_params();
        double util_a = wv.valuation.value(par.a_set) - k;
        int cap = par.t * par.ell;
        ItemSet b_set = ItemSet::full(cap);  // any t*ell items
        double util_b = wv.valuation.value(b_set) - cap;
        if (std::abs(util_a - kt) > 1e-9)
          fails.add("Util(A) = " + fmt(util_a) + " != kt");
        if (std::abs(util_b - kt) > 1e-9)
          fails.add("Util(B) = " + fmt(util_b) + " != kt");
      }
    }
    checks.push_back(fails.to_check("xos-lb unit-price utilities equal kt = " +
                                        std::to_string(static_cast<int>(kt)),
                                    "exact ties on every support valuation"));
  }
  {
    Failures fails;
    ExAnteSolution ref = inst.reference_solution();
    if (std::abs(ref.value - static_cast<double>(m)) > 1e-9)
      fails.add("reference value " + fmt(ref.value) + " != m");
    for (int j = 0; j < m; ++j) {
      double load = 0.0;
      for (int i = 0; i < inst.instance.buyer_count(); ++i) load += ref.x[i][j];
      if (std::abs(load - 1.0) > 1e-9)
        fails.add("item " + std::to_string(j) + " total allocation " + fmt(load));
    }
    try {
      validate_exante(inst.instance.buyers, ref);
    } catch (const std::exception& e) {
      fails.add(e.what());
    }
    for (const auto& wv : inst.instance.buyers[0].support()) {
      DemandResult r = demand(wv.valuation, ones);
      if (!(r.set == wv.valuation.xos_lb_params().a_set))
        fails.add("support valuation does not buy its A set");
      if (std::abs(r.payment - k) > 1e-9) fails.add("A purchase pays " + fmt(r.payment));
    }
    checks.push_back(fails.to_check("xos-lb ex ante reference value = m = " +
                                        std::to_string(m),
                                    "value exact, per-item allocation exactly 1"));
  }
  {
    Failures fails;
    int mm = 16, mk = 4, mt = 2, mell = 2;
    Rng rng(seed ^ 0xc0de);
    std::vector<int> items(mm);
    for (int j = 0; j < mm; ++j) items[j] = j;
    std::shuffle(items.begin(), items.end(), rng.engine());
    ItemSet a_set(std::vector<int>(items.begin(), items.begin() + mk));
    Valuation explicit_v = xos_lb_explicit_valuation(mm, a_set, mk, mt, mell, 0.0);
    XosLbParams par{a_set, mk, mt, mell, 0.0};
    Valuation analytic_v = Valuation::xos_lb(mm, par);
    SubsetValueTable table(explicit_v, ItemSet::full(mm));
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> prices(mm);
      for (double& x : prices) x = rng.coin(0.15) ? kInf : rng.uniform(0.0, 6.0);
      ItemPricing p(std::move(prices));
      DemandResult a = demand(analytic_v, p);
      DemandResult b = demand_exhaustive(explicit_v, table, p);
      if (!(a.set == b.set) || std::abs(a.payment - b.payment) > 1e-9 ||
          std::abs(a.utility - b.utility) > 1e-9) {
        fails.add("trial " + std::to_string(trial) + ": analytic |T|=" +
                  std::to_string(a.set.size()) + " util " + fmt(a.utility) +
                  " vs exhaustive |T|=" + std::to_string(b.set.size()) +
                  " util " + fmt(b.utility));
      }
    }
    checks.push_back(fails.to_check(
        "xos-lb analytic oracle matches exhaustive (validation mode m=16)",
        "200 random pricings agree"));
  }
  {
    Failures fails;
    // A-type purchases only appear when the A items carry most of the value,
    // so the sampled pricings keep A cheap; mixed regimes are kept as well.
    Rng rng(seed ^ 0xd1ce);
    double floor_size = kt / (t + 1.0);
    int a_purchases = 0;
    for (int trial = 0; trial < 200; ++trial) {
      for (const auto& wv : inst.instance.buyers[trial % 4].support()) {
        const ItemSet& a_set = wv.valuation.xos_lb_params().a_set;
        double a_hi = trial % 2 == 0 ? 0.6 : 2.5;
        double b_lo = trial % 2 == 0 ? 6.0 : 2.5;
        std::vector<double> prices(m);
        for (int j = 0; j < m; ++j)
          prices[j] = a_set.contains(j) ? rng.uniform(0.0, a_hi)
                                        : rng.uniform(b_lo, 12.0);
        ItemPricing p(std::move(prices));
        XosLbBreakdown b = xos_lb_breakdown(wv.valuation, p);
        if (b.a_chosen && b.a_utility > 1e-6) {
          ++a_purchases;
          if (b.a_candidate.size() < floor_size - 1e-3)
            fails.add("A purchase of size " + std::to_string(b.a_candidate.size()) +
                      " below kt/(t+1)");
        }
      }
    }
    // Unit prices trigger the A purchase deterministically (the eps bump).
    for (const auto& wv : inst.instance.buyers[0].support()) {
      XosLbBreakdown b = xos_lb_breakdown(wv.valuation, ones);
      if (!b.a_chosen) fails.add("unit prices did not pick the A set");
      ++a_purchases;
      if (b.a_candidate.size() < floor_size - 1e-3)
        fails.add("unit-price A purchase below kt/(t+1)");
    }
    if (a_purchases < 100) fails.add("too few A purchases to spot-check");
    checks.push_back(fails.to_check(
        "xos-lb A-type purchases take at least kt/(t+1) items",
        std::to_string(a_purchases) + " A purchases observed, all large"));
  }
  return checks;
}

std::vector<Check> monotone_lb_suite(std::uint64_t seed, long trials) {
  std::vector<Check> checks;
  for (int ell : {2, 3, 5, 7}) {
    Failures fails;
    GoodCollection gc = good_collection(ell);  // validates at construction
    int cross_pairs = 0;
    for (int a = 0; a < ell; ++a)
      for (int b = a + 1; b < ell; ++b)
        for (const auto& ba : gc.partitions[a])
          for (const auto& bb : gc.partitions[b]) {
            ++cross_pairs;
            if (ba.intersect(bb).empty()) fails.add("empty cross intersection");
          }

    int m = ell * ell;
    MonotoneLbInstance lb = gen_monotone_lb(m, ell, 0.01);
    double target = lb.active * (1.0 - lb.eps);
    ExAnteSolution ref = lb.reference_solution();
    if (std::abs(ref.value - target) > 1e-9)
      fails.add("reference value " + fmt(ref.value) + " != N(1-eps)");
    try {
      validate_exante(lb.instance.buyers, ref);
    } catch (const std::exception& e) {
      fails.add(e.what());
    }

    // Solve with the reference pricings as candidate columns.
    std::vector<std::vector<ItemPricing>> candidates(lb.instance.buyer_count());
    for (int i = 0; i < lb.instance.buyer_count(); ++i)
      for (const auto& wp : lb.reference[i].support())
        candidates[i].push_back(wp.pricing);
    ExAnteSolution sol = solve_exante(lb.instance.buyers, candidates);
    if (sol.value < target - 1e-7)
      fails.add("solver value " + fmt(sol.value) + " below N(1-eps)");

    RunnerOptions opts;
    opts.gs_presample_count = 20000;
    for (MechanismKind kind :
         {MechanismKind::ocrs_seq, MechanismKind::subadd, MechanismKind::gs,
          MechanismKind::mono_n, MechanismKind::mono_m2}) {
      auto runner = make_runner(kind, lb.instance, sol, opts);
      MonteCarloResult mc = monte_carlo(*runner, lb.instance, trials,
                                        seed ^ (0x100 + ell), true);
      double worst = 0.0;
      for (double r : mc.per_trial) worst = std::max(worst, r);
      if (worst > 1.0 + 1e-9)
        fails.add(to_string(kind) + " transcript revenue " + fmt(worst) + " > 1");
    }
    checks.push_back(fails.to_check(
        "monotone-lb ell=" + std::to_string(ell) +
            ": good collection, solver value, one-sale cap",
        std::to_string(cross_pairs) + " cross pairs intersect; solver >= " +
            fmt(target) + "; all transcripts <= 1"));
  }
  return checks;
}

std::vector<Check> rrs_lb_suite(std::uint64_t seed) {
  std::vector<Check> checks;
  for (int m : {10, 17, 26}) {
    Failures fails;
    RrsLbInstance inst = gen_rrs_lb(m, 1e-3);
    Rng rng(seed ^ (0x200 + m));

    // Every support valuation demands exactly {i, m} under the reference.
    for (int i = 1; i <= m - 1; ++i) {
      std::vector<ItemSet> r_sets;
      r_sets.push_back(ItemSet{});
      std::vector<int> all;
      for (int r = 0; r + 2 <= i; ++r) all.push_back(r);
      r_sets.push_back(ItemSet(all));
      for (int extra = 0; extra < 3 && i >= 2; ++extra) {
        std::vector<int> rs;
        for (int r = 0; r + 2 <= i; ++r)
          if (rng.coin(1.0 / inst.beta)) rs.push_back(r);
        r_sets.push_back(ItemSet(std::move(rs)));
      }
      for (const auto& r_set : r_sets) {
        RrsLbParams par{i, r_set, inst.beta, inst.eps};
        Valuation v = Valuation::rrs_lb(m, par);
        DemandResult res = demand(v, inst.reference);
        ItemSet want{i - 1, m - 1};
        if (!(res.set == want))
          fails.add("i=" + std::to_string(i) + " demand != {i, m}");
      }
    }

    // Closed-form identity for the priced allocation mass.
    double identity = inst.priced_alloc_identity();
    double direct = 0.0;
    for (int i = 1; i <= m - 1; ++i)
      direct += std::pow(inst.beta, i) * std::pow(inst.beta, -i) / inst.sigma;
    if (std::abs(direct - identity) > 1e-9)
      fails.add("identity mismatch: " + fmt(direct) + " vs " + fmt(identity));
    if (m == 10) {
      BuyerDistribution d = inst.buyer();
      double explicit_mass = priced_alloc_mass(d, inst.s_set, inst.reference);
      if (std::abs(explicit_mass - identity) > 1e-9)
        fails.add("explicit support mass " + fmt(explicit_mass) + " != sigma^-1 (m-1)");
    }

    // Structured-grid revenue cap.
    double bound = inst.revenue_upper_bound();
    double best = 0.0;
    std::vector<ItemPricing> grid = inst.structured_grid(seed ^ (0x300 + m), 40);
    for (const auto& q : grid) {
      double rev = inst.expected_rev_restricted(q);
      best = std::max(best, rev);
      if (rev > bound + 1e-9)
        fails.add("grid pricing revenue " + fmt(rev) + " exceeds bound " + fmt(bound));
    }
    if (m == 10) {
      BuyerDistribution d = inst.buyer();
      for (int g = 0; g < 12; ++g) {
        const ItemPricing& q = grid[g * grid.size() / 12];
        double analytic = inst.expected_rev_restricted(q);
        double explicit_rev = expected_rev(d, q.masked_to(inst.s_set));
        if (std::abs(analytic - explicit_rev) > 1e-9)
          fails.add("analytic revenue " + fmt(analytic) + " != explicit " +
                    fmt(explicit_rev));
      }
    }
    checks.push_back(fails.to_check(
        "rrs-lb m=" + std::to_string(m) + ": identities, demand, grid cap",
        "best grid revenue " + fmt(best) + " <= 4 sigma^-1 sqrt(m-1) = " + fmt(bound)));
  }
  return checks;
}

std::vector<Check> pipeline_report(std::uint64_t seed, long trials) {
  std::vector<Check> checks;
  const double e_ratio = 1.0 / kEulerLoss;
  int idx = 0;
  for (int m : {2, 4, 6}) {
    Failures fails;
    auto family = static_cast<SubaddFamily>(idx % 3);
    Instance inst = gen_random_subadditive(m, 2, 2, family, substream_seed(seed, idx));
    CandidateOptions copts;
    copts.per_item_cap = m <= 2 ? 16 : m <= 4 ? 8 : 4;
    ExAnteSolution sol = solve_exante_auto(inst.buyers, {}, copts);
    validate_exante(inst.buyers, sol);

    auto runner = make_runner(MechanismKind::subadd, inst, sol);
    MonteCarloResult mc = monte_carlo(*runner, inst, trials, seed ^ (0x400 + m));
    double ratio = sol.value / mc.mean;
    if (!(mc.mean > 0) || !std::isfinite(ratio))
      fails.add("mean revenue " + fmt(mc.mean) + " gives non-finite ratio");

    // Verifier passes along the pipeline for the first buyer's first pricing.
    const BuyerDistribution& d = inst.buyers[0];
    for (const auto& wp : sol.pricings[0].support()) {
      std::vector<int> s_items;
      for (int j = 0; j < m; ++j)
        if (wp.pricing[j] > 0 && wp.pricing[j] < kInf) s_items.push_back(j);
      if (s_items.empty()) continue;
      ItemSet s(std::move(s_items));
      ItemPricing q = subadd_rrs(d, s, wp.pricing);
      RrsVerifyReport rep =
          verify_rrs(d, s, wp.pricing, q, subadd_rrs_alpha(wp.pricing, s, m));
      if (!rep.ok) fails.add("pipeline verify_rrs: " + rep.detail);

      OcrsPlan plan = build_ocrs_plan(d, s, wp.pricing, RrsKind::subadditive);
      OcrsVerifyReport orep = verify_ocrs(
          d, SetDistribution::point(s), expected_alloc(d, wp.pricing),
          {plan.as_random_pricing(m)}, RandomPricing::point(wp.pricing),
          plan.alpha * e_ratio);
      if (!orep.ok) fails.add("pipeline verify_ocrs: " + orep.detail);
      break;
    }
    checks.push_back(fails.to_check(
        "pipeline m=" + std::to_string(m),
        "EARev " + fmt(sol.value) + ", mechanism " + fmt(mc.mean) + ", ratio " +
            fmt(ratio)));
    ++idx;
  }
  return checks;
}

Check demand_ground_truth(std::uint64_t seed, int pairs) {
  Failures fails;
  for (int idx = 0; idx < pairs; ++idx) {
    Rng rng = Rng::substream(seed ^ 0x600, idx);
    int kind = idx % 7;
    int m = 2 + static_cast<int>(rng.index(9));  // 2..10
    double price_scale = 1.2;

    Valuation v = Valuation::additive(std::vector<double>(1, 0.0));
    switch (kind) {
      case 0: {
        std::vector<double> vals(m);
        for (double& x : vals) x = rng.coin(0.2) ? 0.0 : rng.uniform(0.0, 1.0);
        v = Valuation::additive(std::move(vals));
        break;
      }
      case 1: {
        std::vector<double> vals(m);
        for (double& x : vals) x = rng.coin(0.2) ? 0.0 : rng.uniform(0.0, 1.0);
        v = Valuation::unit_demand(std::move(vals));
        break;
      }
      case 2: {
        int clauses = 2 + static_cast<int>(rng.index(2));
        std::vector<std::vector<double>> cl(clauses, std::vector<double>(m, 0.0));
        for (auto& a : cl)
          for (double& x : a)
            if (!rng.coin(0.3)) x = rng.uniform(0.0, 1.0);
        v = Valuation::xos(m, std::move(cl));
        break;
      }
      case 3: {
        m = 2 + static_cast<int>(rng.index(7));  // table kind: m <= 8
        std::vector<double> vals(std::size_t{1} << m, 0.0);
        for (std::size_t s = 1; s < vals.size(); ++s) vals[s] = rng.uniform(0.0, 2.0);
        v = Valuation::table(m, std::move(vals));
        price_scale = 2.2;
        break;
      }
      case 4: {
        int bundles = 1 + static_cast<int>(rng.index(3));
        std::vector<ItemSet> bs;
        for (int b = 0; b < bundles; ++b) {
          std::vector<int> items;
          for (int j = 0; j < m; ++j)
            if (rng.coin(0.4)) items.push_back(j);
          if (items.empty()) items.push_back(static_cast<int>(rng.index(m)));
          bs.push_back(ItemSet(std::move(items)));
        }
        v = Valuation::bundle_threshold(m, std::move(bs));
        break;
      }
      case 5: {
        m = 9;
        std::vector<int> items(m);
        for (int j = 0; j < m; ++j) items[j] = j;
        std::shuffle(items.begin(), items.end(), rng.engine());
        ItemSet a_set(std::vector<int>(items.begin(), items.begin() + 3));
        XosLbParams par{a_set, 3, 2, 2, 0.0};
        v = Valuation::xos_lb(m, par);
        price_scale = 5.0;
        break;
      }
      case 6: {
        m = 5 + static_cast<int>(rng.index(6));  // 5..10
        double beta = std::sqrt(static_cast<double>(m - 1));
        int i = 1 + static_cast<int>(rng.index(m - 1));
        std::vector<int> rs;
        for (int r = 0; r + 2 <= i; ++r)
          if (rng.coin(0.5)) rs.push_back(r);
        RrsLbParams par{i, ItemSet(std::move(rs)), beta, 1e-3};
        v = Valuation::rrs_lb(m, par);
        price_scale = 2.0 * std::pow(beta, i);
        break;
      }
    }

    std::vector<double> prices(m);
    for (double& x : prices) {
      if (rng.coin(0.15)) x = kInf;
      else if (rng.coin(0.1)) x = 0.0;
      else x = rng.uniform(0.0, price_scale);
    }
    ItemPricing p(std::move(prices));

    DemandResult fast = demand(v, p);
    DemandResult slow = demand_exhaustive(v, p);
    if (!(fast.set == slow.set) || std::abs(fast.payment - slow.payment) > 1e-9 ||
        std::abs(fast.utility - slow.utility) > 1e-9)
      fails.add("kind " + to_string(v.kind()) + " m=" + std::to_string(m) +
                " idx=" + std::to_string(idx));
  }
  return fails.to_check("demand equals exhaustive argmax with tie-breaks",
                        std::to_string(pairs) + " random (v, p) pairs agree");
}

}  // namespace seqprice::verify
