#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqprice/rrs.hpp"

namespace seqprice {

ScalingWindow ScalingWindow::for_pricing(const ItemPricing& p, const ItemSet& s,
                                         int m) {
  double max_p = 0.0, min_pos = kInf;
  for (int j : s) {
    if (p[j] >= kInf)
      throw std::invalid_argument("ScalingWindow: infinite price inside S");
    if (p[j] > 0) {
      max_p = std::max(max_p, p[j]);
      min_pos = std::min(min_pos, p[j]);
    }
  }
  if (max_p <= 0)
    throw std::invalid_argument("ScalingWindow: no positive price on S");
  ScalingWindow w;
  w.aspect = max_p / min_pos;
  w.lo = 0.5;
  w.hi = m * w.aspect;
  return w;
}

double priced_alloc_mass(const BuyerDistribution& d, const ItemSet& s,
                         const ItemPricing& p) {
  std::vector<double> alloc = expected_alloc(d, p);
  double sum = 0.0;
  for (int j : s)
    if (alloc[j] > 0 && p[j] < kInf) sum += p[j] * alloc[j];
  return sum;
}

double subadd_rrs_alpha(const ItemPricing& p, const ItemSet& s, int m) {
  ScalingWindow w = ScalingWindow::for_pricing(p, s, m);
  return 4.0 * std::log2(2.0 * m * w.aspect);
}

namespace {

// Revenue from one valuation at scaling gamma, offering gamma*p over s.
double rev_at(const Valuation& v, const ItemSet& s, const ItemPricing& p,
              double gamma) {
  return demand(v, p.scaled(gamma).masked_to(s)).payment;
}

// Integrates p(T(gamma)) * dgamma over [lo, hi] by bisecting on changes of
// the demanded set; T(gamma) is piecewise constant because utilities are
// linear in gamma.  Unresolved slivers below min_width use the midpoint set.
double integrate_payment(const Valuation& v, const ItemSet& s, const ItemPricing& p,
                         double lo, double hi, double min_width) {
  struct Frame {
    double a, b;
    ItemSet da, db;
    double pa, pb;  // base payments p(T)/gamma, i.e. payment at gamma=1
  };
  auto base_payment = [&](double gamma, ItemSet* set_out) {
    DemandResult r = demand(v, p.scaled(gamma).masked_to(s));
    *set_out = r.set;
    return gamma > 0 ? r.payment / gamma : 0.0;
  };
  double total = 0.0;
  std::vector<Frame> stack;
  Frame root;
  root.a = lo;
  root.b = hi;
  root.pa = base_payment(lo, &root.da);
  root.pb = base_payment(hi, &root.db);
  stack.push_back(std::move(root));
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.da == f.db) {
      total += f.pa * (f.b - f.a);
      continue;
    }
    if (f.b - f.a <= min_width) {
      total += 0.5 * (f.pa + f.pb) * (f.b - f.a);
      continue;
    }
    double mid = 0.5 * (f.a + f.b);
    Frame left, right;
    left.a = f.a;
    left.b = mid;
    left.da = f.da;
    left.pa = f.pa;
    left.pb = base_payment(mid, &left.db);
    right.a = mid;
    right.b = f.b;
    right.da = left.db;
    right.pa = left.pb;
    right.db = f.db;
    right.pb = f.pb;
    stack.push_back(std::move(right));
    stack.push_back(std::move(left));
  }
  return total;
}

}  // namespace

double subadd_rrs_expected_rev(const BuyerDistribution& d, const ItemSet& s,
                               const ItemPricing& p) {
  if (s.empty()) return 0.0;
  ScalingWindow w = ScalingWindow::for_pricing(p, s, d.item_count());
  double log_ratio = std::log(w.hi / w.lo);
  double min_width = std::max(1e-13 * w.hi, 1e-13);
  double total = 0.0;
  for (const auto& wv : d.support()) {
    double integral =
        integrate_payment(wv.valuation, s, p, w.lo, w.hi, min_width);
    total += wv.prob * integral / log_ratio;
  }
  return total;
}

ItemPricing subadd_rrs(const BuyerDistribution& d, const ItemSet& s,
                       const ItemPricing& p) {
  if (s.empty()) return p;  // vacuous
  ScalingWindow w = ScalingWindow::for_pricing(p, s, d.item_count());
  double best_rev = -1.0;
  double best_gamma = w.lo;
  for (double gamma = 0.5; gamma <= w.hi * (1 + 1e-12); gamma *= 2.0) {
    double rev = 0.0;
    for (const auto& wv : d.support())
      rev += wv.prob * rev_at(wv.valuation, s, p, gamma);
    if (rev > best_rev + kTol) {
      best_rev = rev;
      best_gamma = gamma;
    }
  }
  return p.scaled(best_gamma);
}

ItemPricing gs_rrs(const BuyerDistribution&, const ItemSet&, const ItemPricing& p) {
  return p;
}

RrsVerifyReport verify_rrs(const BuyerDistribution& d, const ItemSet& s,
                           const ItemPricing& p, const ItemPricing& q,
                           double alpha) {
  RrsVerifyReport rep;
  rep.scale_ok = true;
  for (int j : s) {
    double floor = p[j] >= kInf ? kInf : p[j] / alpha;
    bool ok = q[j] >= kInf ? true : q[j] + 1e-9 >= floor;
    if (!ok) {
      rep.scale_ok = false;
      rep.scale_witness = j;
      break;
    }
  }
  rep.revenue_lhs = expected_rev(d, q.masked_to(s));
  rep.revenue_rhs = priced_alloc_mass(d, s, p) / alpha;
  rep.revenue_ok = rep.revenue_lhs + 1e-9 >= rep.revenue_rhs;
  rep.ok = rep.scale_ok && rep.revenue_ok;
  rep.detail = rep.ok ? "both RRS conditions hold"
             : !rep.scale_ok
                   ? "price floor violated at item " + std::to_string(rep.scale_witness)
                   : "revenue condition violated";
  return rep;
}

}  // namespace seqprice
