#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "seqprice/instances.hpp"
#include "seqprice/rng.hpp"

namespace seqprice {

int largest_prime_at_most(int x) {
  auto is_prime = [](int v) {
    if (v < 2) return false;
    for (int d = 2; d * d <= v; ++d)
      if (v % d == 0) return false;
    return true;
  };
  for (int v = x; v >= 2; --v)
    if (is_prime(v)) return v;
  throw std::invalid_argument("largest_prime_at_most: no prime <= " + std::to_string(x));
}

// ---------------------------------------------------------------------------
// XOS lower bound

ExAnteSolution XosLbInstance::reference_solution() const {
  ExAnteSolution sol;
  int n = instance.buyer_count();
  sol.pricings.assign(n, reference);
  sol.x.resize(n);
  sol.value = 0.0;
  for (int i = 0; i < n; ++i) {
    sol.x[i] = expected_alloc(instance.buyers[i], reference);
    sol.value += expected_rev(instance.buyers[i], reference);
  }
  return sol;
}

XosLbInstance gen_xos_lb(int t, double eps, std::uint64_t seed) {
  if (t < 2 || t % 2 != 0)
    throw std::invalid_argument("gen_xos_lb: t must be even and >= 2");
  if (t > 2)
    throw std::invalid_argument("gen_xos_lb: t > 2 needs m = 2^(2t^2) items; too large");
  int k = 1 << (t * t);  // log2 k = t^2
  int m = k * k;
  int n = k;
  int half_log_k = (t * t) / 2;

  XosLbInstance out;
  out.k = k;
  out.t = t;
  out.eps = eps;
  out.instance.m = m;

  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    // Independent random equipartition of [m] into k blocks of size k.
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    std::vector<WeightedValuation> support;
    double prob = 1.0 / (k * half_log_k);
    for (int b = 0; b < k; ++b) {
      std::vector<int> block(perm.begin() + b * k, perm.begin() + (b + 1) * k);
      ItemSet a_set(block);
      for (int h = 1; h <= half_log_k; ++h) {
        XosLbParams par;
        par.a_set = a_set;
        par.k = k;
        par.t = t;
        par.ell = 1 << h;
        par.eps = eps;
        support.push_back({prob, Valuation::xos_lb(m, par)});
      }
    }
    out.instance.buyers.push_back(BuyerDistribution(std::move(support)));
  }
  out.reference = RandomPricing::point(ItemPricing::uniform(m, 1.0));
  return out;
}

Valuation xos_lb_explicit_valuation(int m, const ItemSet& a_set, int k, int t,
                                    int ell, double eps) {
  int cap = t * ell;
  if (cap > m) throw std::invalid_argument("xos_lb_explicit: t*ell > m");
  std::vector<std::vector<double>> clauses;
  std::vector<double> a_clause(m, 0.0);
  for (int j : a_set) a_clause[j] = 1.0 + t + eps;
  clauses.push_back(std::move(a_clause));

  // Every subset of size t*ell as a B clause.
  std::vector<int> combo(cap);
  std::iota(combo.begin(), combo.end(), 0);
  double b_value = 1.0 + static_cast<double>(k) / ell;
  while (true) {
    std::vector<double> clause(m, 0.0);
    for (int j : combo) clause[j] = b_value;
    clauses.push_back(std::move(clause));
    int i = cap - 1;
    while (i >= 0 && combo[i] == m - cap + i) --i;
    if (i < 0) break;
    ++combo[i];
    for (int j = i + 1; j < cap; ++j) combo[j] = combo[j - 1] + 1;
  }
  return Valuation::xos(m, std::move(clauses));
}

DemandResult xos_lb_demand(const Valuation& v, const ItemPricing& p) {
  if (v.kind() != ValuationKind::xos_lb)
    throw std::invalid_argument("xos_lb_demand: wrong valuation kind");
  return demand(v, p);
}

// ---------------------------------------------------------------------------
// Good collections and the monotone lower bound

GoodCollection good_collection(int ell) {
  if (ell < 2 || largest_prime_at_most(ell) != ell)
    throw std::invalid_argument("good_collection: ell must be prime");
  GoodCollection out;
  out.ell = ell;
  for (int i = 0; i < ell; ++i) {
    std::vector<ItemSet> bundles;
    for (int j = 0; j < ell; ++j) {
      std::vector<int> items;
      for (int x = 0; x < ell; ++x) {
        int y = (x * i + j) % ell;
        items.push_back(x * ell + y);
      }
      bundles.push_back(ItemSet(std::move(items)));
    }
    out.partitions.push_back(std::move(bundles));
  }
  if (ell <= 13) {
    // Construction-time validation: partition property and cross intersections.
    for (const auto& partition : out.partitions) {
      ItemSet seen;
      int total = 0;
      for (const auto& b : partition) {
        if (!b.intersect(seen).empty())
          throw std::logic_error("good_collection: bundles overlap");
        seen = seen.unite(b);
        total += b.size();
      }
      if (total != ell * ell)
        throw std::logic_error("good_collection: not a partition");
    }
    for (int i = 0; i < ell; ++i)
      for (int i2 = i + 1; i2 < ell; ++i2)
        for (const auto& a : out.partitions[i])
          for (const auto& b : out.partitions[i2])
            if (a.intersect(b).empty())
              throw std::logic_error("good_collection: cross intersection empty");
  }
  return out;
}

ExAnteSolution MonotoneLbInstance::reference_solution() const {
  ExAnteSolution sol;
  int n = instance.buyer_count();
  sol.pricings = reference;
  sol.x.resize(n);
  sol.value = 0.0;
  for (int i = 0; i < n; ++i) {
    sol.x[i] = expected_alloc(instance.buyers[i], reference[i]);
    sol.value += expected_rev(instance.buyers[i], reference[i]);
  }
  return sol;
}

MonotoneLbInstance gen_monotone_lb(int m, int n, double eps) {
  if (m < 4) throw std::invalid_argument("gen_monotone_lb: need m >= 4");
  int ell = largest_prime_at_most(static_cast<int>(std::floor(std::sqrt(m))));
  int active = std::min(n, ell);
  GoodCollection gc = good_collection(ell);

  MonotoneLbInstance out;
  out.ell = ell;
  out.active = active;
  out.eps = eps;
  out.instance.m = m;
  double item_price = (1.0 - eps) / ell;
  for (int i = 0; i < n; ++i) {
    if (i < active) {
      out.instance.buyers.push_back(BuyerDistribution::point(
          Valuation::bundle_threshold(m, gc.partitions[i])));
      std::vector<WeightedPricing> mix;
      for (const auto& b : gc.partitions[i]) {
        ItemPricing p = ItemPricing::uniform(m, item_price).masked_to(b);
        mix.push_back({1.0 / ell, std::move(p)});
      }
      out.reference.push_back(RandomPricing(std::move(mix)));
    } else {
      out.instance.buyers.push_back(
          BuyerDistribution::point(Valuation::bundle_threshold(m, {})));
      out.reference.push_back(RandomPricing::point(ItemPricing::all_infinite(m)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// RRS lower bound

BuyerDistribution RrsLbInstance::buyer(std::size_t max_support) const {
  std::size_t support_size = 0;
  for (int i = 1; i <= m - 1; ++i) {
    support_size += std::size_t{1} << (i - 1);
    if (support_size > max_support)
      throw std::invalid_argument("RrsLbInstance::buyer: support exceeds cap");
  }
  double incl = 1.0 / beta;
  std::vector<WeightedValuation> support;
  support.reserve(support_size);
  for (int i = 1; i <= m - 1; ++i) {
    double pi = std::pow(beta, -i) / sigma;
    int nr = i - 1;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nr); ++mask) {
      double pr = 1.0;
      std::vector<int> r_items;
      for (int b = 0; b < nr; ++b) {
        if (mask & (std::uint64_t{1} << b)) {
          pr *= incl;
          r_items.push_back(b);
        } else {
          pr *= 1.0 - incl;
        }
      }
      RrsLbParams par;
      par.index = i;
      par.r_set = ItemSet(std::move(r_items));
      par.beta = beta;
      par.eps = eps;
      support.push_back({pi * pr, Valuation::rrs_lb(m, par)});
    }
  }
  return BuyerDistribution(std::move(support));
}

double RrsLbInstance::priced_alloc_identity() const {
  return (m - 1) / sigma;
}

double RrsLbInstance::revenue_upper_bound() const {
  return 4.0 * std::sqrt(static_cast<double>(m - 1)) / sigma;
}

namespace {

// Mirrors the clause_greedy inclusion rule: buy at positive margin, or at a
// zero margin when the price is positive.
struct MarginClass {
  bool include = false;
  double margin = 0.0;  // utility contribution when included
};

MarginClass classify(double value, double price) {
  MarginClass c;
  if (price >= kInf) return c;
  double margin = value - price;
  if (margin > kTol || (margin >= -kTol && price > kTol)) {
    c.include = true;
    c.margin = margin;
  }
  return c;
}

// Pr[sum of independently included weights > threshold], inclusion
// probability q_incl, weights nonincreasing.  Pruned branch recursion.
double bernoulli_tail(const std::vector<double>& weights,
                      const std::vector<double>& suffix, std::size_t idx,
                      double q_incl, double threshold) {
  if (threshold < 0) return 1.0;
  if (idx >= weights.size() || suffix[idx] <= threshold) return 0.0;
  return q_incl * bernoulli_tail(weights, suffix, idx + 1, q_incl,
                                 threshold - weights[idx]) +
         (1.0 - q_incl) * bernoulli_tail(weights, suffix, idx + 1, q_incl, threshold);
}

struct TailComputer {
  std::vector<double> weights;  // sorted descending
  std::vector<double> suffix;   // suffix sums
  double q_incl;

  explicit TailComputer(std::vector<double> w, double q) : q_incl(q) {
    std::sort(w.begin(), w.end(), std::greater<double>());
    weights = std::move(w);
    suffix.assign(weights.size() + 1, 0.0);
    for (std::size_t i = weights.size(); i-- > 0;)
      suffix[i] = suffix[i + 1] + weights[i];
  }

  double prob_above(double threshold) const {
    return bernoulli_tail(weights, suffix, 0, q_incl, threshold);
  }
};

}  // namespace

double RrsLbInstance::expected_rev_restricted(const ItemPricing& q_raw) const {
  ItemPricing q = q_raw.masked_to(s_set);
  double incl = 1.0 / beta;
  double total = 0.0;

  for (int i = 1; i <= m - 1; ++i) {
    double beta_i = std::pow(beta, i);
    double pi = std::pow(beta, -i) / sigma;

    // Clause 1 on S: only item i-1 (the free last item lies outside S).
    MarginClass one = classify(beta_i, q[i - 1]);
    double u1 = one.include ? one.margin : 0.0;
    double rev1 = one.include ? q[i - 1] : 0.0;

    // Clause 2 items r in R: split into utility-positive and zero-margin.
    std::vector<double> pos_margin, pos_price;
    double tie_price_mean = 0.0;  // E[sum of tie prices over R]
    std::vector<double> tie_prices;
    for (int r = 0; r + 1 <= i - 1; ++r) {
      MarginClass c = classify(beta_i, q[r]);
      if (!c.include) continue;
      if (c.margin > kTol) {
        pos_margin.push_back(c.margin);
        pos_price.push_back(q[r]);
      } else {
        tie_prices.push_back(q[r]);
        tie_price_mean += incl * q[r];
      }
    }

    TailComputer pos_tail(pos_margin, incl);
    double exp_rev_i = 0.0;

    if (u1 > kTol) {
      // Clause 2 wins iff its utility exceeds u1 + tol.
      double theta = u1 + kTol;
      double p_win2 = pos_tail.prob_above(theta);
      exp_rev_i += rev1 * (1.0 - p_win2);
      exp_rev_i += p_win2 * tie_price_mean;
      // E[sum over included positive items of price, conditioned on the win]:
      // remove one item at a time and shift the threshold.
      for (std::size_t r = 0; r < pos_margin.size(); ++r) {
        std::vector<double> rest = pos_margin;
        rest.erase(rest.begin() + r);
        TailComputer rest_tail(std::move(rest), incl);
        exp_rev_i += pos_price[r] * incl * rest_tail.prob_above(theta - pos_margin[r]);
      }
    } else {
      // u1 is zero: any included positive item hands the win to clause 2.
      double p_some_pos = 1.0 - std::pow(1.0 - incl, pos_margin.size());
      for (double price : pos_price) exp_rev_i += price * incl;
      exp_rev_i += p_some_pos * tie_price_mean;
      // No positive items: both utilities vanish and the max-price rule
      // compares the zero-margin prices against rev1.
      double p_no_pos = std::pow(1.0 - incl, pos_margin.size());
      if (p_no_pos > 0) {
        double theta = rev1 + kTol;
        TailComputer tie_tail(tie_prices, incl);
        double p_price2 = tie_tail.prob_above(theta);
        double tie_rev = 0.0;
        for (std::size_t r = 0; r < tie_prices.size(); ++r) {
          std::vector<double> rest = tie_prices;
          rest.erase(rest.begin() + r);
          TailComputer rest_tail(std::move(rest), incl);
          tie_rev += tie_prices[r] * incl *
                     rest_tail.prob_above(theta - tie_prices[r]);
        }
        exp_rev_i += p_no_pos * (tie_rev + (1.0 - p_price2) * rev1);
      }
    }
    total += pi * exp_rev_i;
  }
  return total;
}

std::vector<ItemPricing> RrsLbInstance::structured_grid(std::uint64_t seed,
                                                        int random_count) const {
  std::vector<ItemPricing> grid;
  const double scales[] = {0.5, 1.0, 2.0};

  auto shifted = [&](int shift, double scale) {
    std::vector<double> q(m, kInf);
    for (int j = 0; j + 1 <= m - 1; ++j) {
      long long label = j + 1 + shift;
      if (label < 1) label = 1;
      if (label > m - 1) label = m - 1;
      q[j] = scale * std::pow(beta, static_cast<double>(label));
    }
    return ItemPricing(std::move(q));
  };

  for (int shift = -2; shift <= 2; ++shift)
    for (double c : scales) grid.push_back(shifted(shift, c));

  for (int level = 1; level <= m - 1; ++level)
    for (double c : scales)
      grid.push_back(ItemPricing(
          std::vector<double>(m, c * std::pow(beta, level))).masked_to(s_set));

  // Suffix-infinite variants of the aligned pricing.
  for (int keep : {2, (m - 1) / 2, m - 2}) {
    std::vector<double> q(m, kInf);
    for (int j = 0; j < keep && j + 1 <= m - 1; ++j)
      q[j] = std::pow(beta, j + 1);
    grid.push_back(ItemPricing(std::move(q)));
  }

  Rng rng(seed);
  for (int r = 0; r < random_count; ++r) {
    std::vector<double> q(m, kInf);
    for (int j = 0; j + 1 <= m - 1; ++j) {
      if (rng.coin(0.1)) continue;  // leave the item unpriced
      int label = j + 1 + static_cast<int>(rng.index(5)) - 2;
      label = std::clamp(label, 1, m - 1);
      q[j] = scales[rng.index(3)] * std::pow(beta, label);
    }
    grid.push_back(ItemPricing(std::move(q)));
  }
  return grid;
}

RrsLbInstance gen_rrs_lb(int m, double eps) {
  if (m < 5) throw std::invalid_argument("gen_rrs_lb: need m >= 5 so beta >= 2");
  RrsLbInstance out;
  out.m = m;
  out.beta = std::sqrt(static_cast<double>(m - 1));
  out.eps = eps;
  out.sigma = 0.0;
  for (int i = 1; i <= m - 1; ++i) out.sigma += std::pow(out.beta, -i);
  std::vector<double> p(m);
  for (int j = 0; j + 1 <= m - 1; ++j) p[j] = std::pow(out.beta, j + 1);
  p[m - 1] = 0.0;
  out.reference = ItemPricing(std::move(p));
  std::vector<int> s_items(m - 1);
  std::iota(s_items.begin(), s_items.end(), 0);
  out.s_set = ItemSet(std::move(s_items));
  return out;
}

// ---------------------------------------------------------------------------
// Random families

namespace {

std::vector<double> random_probs(Rng& rng, int count) {
  std::vector<double> w(count);
  double sum = 0.0;
  for (double& x : w) {
    x = rng.uniform(0.2, 1.0);
    sum += x;
  }
  for (double& x : w) x /= sum;
  return w;
}

Valuation random_coverage(Rng& rng, int m) {
  int universe = m + 4;
  std::vector<double> weight(universe);
  for (double& w : weight) w = rng.uniform(0.2, 1.0);
  std::vector<std::uint64_t> covers(m, 0);
  for (int j = 0; j < m; ++j) {
    for (int e = 0; e < universe; ++e)
      if (rng.coin(0.4)) covers[j] |= std::uint64_t{1} << e;
    if (covers[j] == 0) covers[j] |= std::uint64_t{1} << rng.index(universe);
  }
  std::vector<double> table(std::size_t{1} << m, 0.0);
  std::vector<std::uint64_t> union_mask(table.size(), 0);
  for (std::uint64_t mask = 1; mask < table.size(); ++mask) {
    int j = std::countr_zero(mask);
    union_mask[mask] = union_mask[mask & (mask - 1)] | covers[j];
    double value = 0.0;
    for (std::uint64_t rest = union_mask[mask]; rest != 0; rest &= rest - 1)
      value += weight[std::countr_zero(rest)];
    table[mask] = value;
  }
  return Valuation::table(m, std::move(table), ValuationClass::subadditive);
}

Valuation random_budgeted_additive(Rng& rng, int m) {
  std::vector<double> a(m);
  double sum = 0.0;
  for (double& x : a) {
    x = rng.uniform(0.1, 1.0);
    sum += x;
  }
  double budget = rng.uniform(0.4, 0.9) * sum;
  std::vector<double> table(std::size_t{1} << m, 0.0);
  for (std::uint64_t mask = 1; mask < table.size(); ++mask) {
    double acc = 0.0;
    for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1)
      acc += a[std::countr_zero(rest)];
    table[mask] = std::min(budget, acc);
  }
  return Valuation::table(m, std::move(table), ValuationClass::subadditive);
}

Valuation random_xos(Rng& rng, int m) {
  int clauses = 2 + static_cast<int>(rng.index(2));
  std::vector<std::vector<double>> cl(clauses, std::vector<double>(m, 0.0));
  for (auto& a : cl)
    for (double& x : a)
      if (!rng.coin(0.3)) x = rng.uniform(0.1, 1.0);
  return Valuation::xos(m, std::move(cl));
}

}  // namespace

Instance gen_random_subadditive(int m, int n, int support_size,
                                SubaddFamily family, std::uint64_t seed) {
  Rng rng(seed);
  Instance out;
  out.m = m;
  for (int i = 0; i < n; ++i) {
    std::vector<double> probs = random_probs(rng, support_size);
    std::vector<WeightedValuation> support;
    for (int s = 0; s < support_size; ++s) {
      Valuation v = family == SubaddFamily::coverage ? random_coverage(rng, m)
                    : family == SubaddFamily::budgeted_additive
                        ? random_budgeted_additive(rng, m)
                        : random_xos(rng, m);
      support.push_back({probs[s], std::move(v)});
    }
    out.buyers.push_back(BuyerDistribution(std::move(support)));
  }
  return out;
}

Instance gen_random_gs(int m, int n, int support_size, GsFamily family,
                       std::uint64_t seed) {
  Rng rng(seed);
  Instance out;
  out.m = m;
  for (int i = 0; i < n; ++i) {
    std::vector<double> probs = random_probs(rng, support_size);
    std::vector<WeightedValuation> support;
    for (int s = 0; s < support_size; ++s) {
      bool unit = family == GsFamily::unit_demand ||
                  (family == GsFamily::mixed && rng.coin(0.5));
      std::vector<double> values(m);
      for (double& x : values) x = rng.uniform(0.1, 1.0);
      Valuation v = unit ? Valuation::unit_demand(std::move(values))
                         : Valuation::additive(std::move(values));
      support.push_back({probs[s], std::move(v)});
    }
    out.buyers.push_back(BuyerDistribution(std::move(support)));
  }
  return out;
}

}  // namespace seqprice
