#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "seqprice/ocrs.hpp"
#include "seqprice/rrs.hpp"

namespace seqprice {

double HullDistribution::total_weight() const {
  double sum = 0;
  for (const auto& e : support) sum += e.weight;
  return sum;
}

std::vector<double> HullDistribution::mixed_vector() const {
  std::vector<double> out;
  for (std::size_t t = 0; t < support.size(); ++t) {
    if (y_vectors[t].empty()) continue;
    if (out.empty()) out.assign(y_vectors[t].size(), 0.0);
    for (std::size_t j = 0; j < y_vectors[t].size(); ++j)
      out[j] += support[t].weight * y_vectors[t][j];
  }
  return out;
}

HullDistribution convex_hull_sampler(const HullInput& input) {
  const std::vector<double>& w = input.w;
  double w_mass = 0.0;
  for (int j : input.ground) w_mass += w[j];
  double zero_cut = 1e-12 * std::max(w_mass, 1.0);

  HullDistribution out;
  std::vector<double> residual = w;
  auto live = [&](double v) { return v > zero_cut; };

  ItemSet q;
  {
    std::vector<int> items;
    for (int j : input.ground)
      if (live(residual[j])) items.push_back(j);
    q = ItemSet(std::move(items));
  }

  double sigma = 0.0;
  while (!q.empty() && sigma < 1.0) {
    std::vector<double> y = input.y_oracle(q);
    ++out.oracle_queries;
    // Oracle contract checks.
    double y_mass = 0.0, required = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (!q.contains(static_cast<int>(j)) && y[j] > 1e-9)
        throw std::runtime_error("convex_hull_sampler: y^T positive off T");
      if (y[j] < 0)
        throw std::runtime_error("convex_hull_sampler: negative y^T entry");
    }
    for (int j : q) {
      y_mass += y[j];
      required += w[j];
    }
    if (y_mass + 1e-9 < required)
      throw std::runtime_error("convex_hull_sampler: |y^T| < sum of w over T");

    double tau = kInf;
    for (int j : q)
      if (y[j] > 0) tau = std::min(tau, residual[j] / y[j]);
    if (!(tau < kInf))
      throw std::runtime_error("convex_hull_sampler: y^T vanishes on all of T");

    double lambda = std::min(tau, 1.0 - sigma);
    if (lambda > 0) {
      out.support.push_back({q, lambda});
      out.y_vectors.push_back(y);
    }
    sigma += lambda;
    for (int j : q) residual[j] -= lambda * y[j];

    std::vector<int> next;
    for (int j : q)
      if (live(residual[j])) next.push_back(j);
    ItemSet next_set(std::move(next));
    if (next_set == q && lambda <= 0)
      throw std::runtime_error("convex_hull_sampler: no progress");
    q = std::move(next_set);
  }
  if (sigma < 1.0) {
    out.support.push_back({ItemSet{}, 1.0 - sigma});
    out.y_vectors.push_back({});
  }
  return out;
}

RandomPricing OcrsPlan::as_random_pricing(int m) const {
  std::vector<WeightedPricing> support;
  support.reserve(lambda.size());
  for (std::size_t t = 0; t < lambda.size(); ++t)
    support.push_back({lambda[t].weight, pricing[t]});
  if (support.empty()) support.push_back({1.0, ItemPricing::all_infinite(m)});
  return RandomPricing(std::move(support));
}

OcrsPlan build_ocrs_plan(const BuyerDistribution& d, const ItemSet& s,
                         const ItemPricing& p, RrsKind rrs,
                         std::optional<double> alpha_override) {
  int m = d.item_count();
  OcrsPlan plan;

  std::vector<double> alloc = expected_alloc(d, p);
  std::vector<double> w(m, 0.0);
  ItemSet ground;
  {
    std::vector<int> items;
    for (int j : s) {
      if (p[j] < kInf && alloc[j] > 0 && p[j] > 0) {
        w[j] = p[j] * alloc[j];
        items.push_back(j);
      }
    }
    ground = ItemSet(std::move(items));
  }
  if (ground.empty()) {
    // Nothing to recover: offer nothing.
    plan.lambda.push_back({ItemSet{}, 1.0});
    plan.pricing.push_back(ItemPricing::all_infinite(m));
    plan.alpha = 1.0;
    return plan;
  }

  if (alpha_override) {
    plan.alpha = *alpha_override;
  } else {
    plan.alpha = rrs == RrsKind::gross_substitutes
                     ? 1.0
                     : subadd_rrs_alpha(p, ground, m);
  }
  double alpha = plan.alpha;

  std::map<ItemSet, std::pair<ItemPricing, std::vector<double>>> memo;
  auto oracle = [&](const ItemSet& t) -> std::vector<double> {
    auto it = memo.find(t);
    if (it == memo.end()) {
      ItemPricing q = rrs == RrsKind::gross_substitutes ? gs_rrs(d, t, p)
                                                        : subadd_rrs(d, t, p);
      std::vector<double> restricted_alloc = expected_alloc(d, q.masked_to(t));
      std::vector<double> y(m, 0.0);
      for (int j : t)
        if (q[j] < kInf) y[j] = alpha * q[j] * restricted_alloc[j];
      it = memo.emplace(t, std::make_pair(std::move(q), std::move(y))).first;
    }
    return it->second.second;
  };

  HullInput input{ground, w, oracle};
  HullDistribution dist = convex_hull_sampler(input);
  plan.oracle_queries = dist.oracle_queries;
  for (const auto& e : dist.support) {
    plan.lambda.push_back(e);
    if (e.subset.empty()) {
      plan.pricing.push_back(ItemPricing::all_infinite(m));
    } else {
      plan.pricing.push_back(memo.at(e.subset).first.masked_to(e.subset));
    }
  }
  return plan;
}

RandomPricing rrs_to_ocrs(const BuyerDistribution& d, const ItemSet& s,
                          const std::vector<double>& x,
                          const RandomPricing& reference, RrsKind rrs,
                          std::optional<double> alpha_override, double* alpha_out) {
  (void)x;  // the plan satisfies the constraint through the reference alloc
  int m = d.item_count();
  std::vector<WeightedPricing> mix;
  double alpha = 1.0;
  for (const auto& wp : reference.support()) {
    OcrsPlan plan = build_ocrs_plan(d, s, wp.pricing, rrs, alpha_override);
    alpha = std::max(alpha, plan.alpha);
    for (std::size_t t = 0; t < plan.lambda.size(); ++t)
      mix.push_back({wp.prob * plan.lambda[t].weight, plan.pricing[t]});
  }
  if (alpha_out) *alpha_out = alpha;
  if (mix.empty()) mix.push_back({1.0, ItemPricing::all_infinite(m)});
  return RandomPricing(std::move(mix));
}

SetDistribution SetDistribution::point(ItemSet s) {
  SetDistribution d;
  d.support.push_back({1.0, std::move(s)});
  return d;
}

RandomPricing gs_decompose(const BuyerDistribution& d, const SetDistribution& dist,
                           const ItemPricing& p, const std::vector<double>& y) {
  int m = d.item_count();

  // x^T_j = E_S[Alloc_j(D|S∩T, p)], memoized per T.
  std::map<ItemSet, std::vector<double>> memo;
  auto alloc_for = [&](const ItemSet& t) -> const std::vector<double>& {
    auto it = memo.find(t);
    if (it == memo.end()) {
      std::vector<double> total(m, 0.0);
      for (const auto& [prob, s] : dist.support) {
        std::vector<double> a = expected_alloc(d, p.masked_to(s.intersect(t)));
        for (int j = 0; j < m; ++j) total[j] += prob * a[j];
      }
      it = memo.emplace(t, std::move(total)).first;
    }
    return it->second;
  };

  ItemSet full = ItemSet::full(m);
  const std::vector<double>& w = alloc_for(full);
  std::vector<double> target = y;
  for (int j = 0; j < m; ++j) {
    if (target[j] > w[j] + 1e-9)
      throw std::invalid_argument("gs_decompose: target allocation exceeds " +
                                  std::string("the availability-weighted allocation"));
    target[j] = std::min(target[j], w[j]);
  }

  ItemSet ground;
  {
    std::vector<int> items;
    for (int j = 0; j < m; ++j)
      if (target[j] > 0) items.push_back(j);
    ground = ItemSet(std::move(items));
  }

  HullInput input{ground, target,
                  [&](const ItemSet& t) { return alloc_for(t); }};
  HullDistribution hull = convex_hull_sampler(input);

  std::vector<WeightedPricing> mix;
  for (const auto& e : hull.support) {
    if (e.subset.empty())
      mix.push_back({e.weight, ItemPricing::all_infinite(m)});
    else
      mix.push_back({e.weight, p.masked_to(e.subset)});
  }
  return RandomPricing(std::move(mix));
}

OcrsVerifyReport verify_ocrs(const BuyerDistribution& d, const SetDistribution& dist,
                             const std::vector<double>& x,
                             const std::vector<RandomPricing>& output_per_set,
                             const RandomPricing& reference, double alpha) {
  if (output_per_set.size() != dist.support.size())
    throw std::invalid_argument("verify_ocrs: one output pricing per support set");
  int m = d.item_count();
  OcrsVerifyReport rep;

  std::vector<double> alloc(m, 0.0);
  double revenue = 0.0;
  for (std::size_t k = 0; k < dist.support.size(); ++k) {
    const auto& [prob, s] = dist.support[k];
    for (const auto& wp : output_per_set[k].support()) {
      ItemPricing masked = wp.pricing.masked_to(s);
      std::vector<double> a = expected_alloc(d, masked);
      for (int j = 0; j < m; ++j) alloc[j] += prob * wp.prob * a[j];
      revenue += prob * wp.prob * expected_rev(d, masked);
    }
  }

  rep.alloc_ok = true;
  for (int j = 0; j < m; ++j) {
    if (alloc[j] > x[j] + 1e-9) {
      rep.alloc_ok = false;
      rep.alloc_witness = j;
      break;
    }
  }

  double mass = 0.0;
  for (const auto& [prob, s] : dist.support)
    for (const auto& wp : reference.support())
      mass += prob * wp.prob * priced_alloc_mass(d, s, wp.pricing);
  rep.revenue_lhs = revenue;
  rep.revenue_rhs = mass / alpha;
  rep.revenue_ok = revenue + 1e-9 >= rep.revenue_rhs;
  rep.ok = rep.alloc_ok && rep.revenue_ok;
  rep.detail = rep.ok ? "OCRS conditions hold"
             : !rep.alloc_ok
                   ? "allocation bound violated at item " + std::to_string(rep.alloc_witness)
                   : "revenue condition violated";
  return rep;
}

}  // namespace seqprice
