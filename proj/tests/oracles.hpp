// Test-only oracles, independent of the library's demand dispatch and LP path.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "seqprice/core.hpp"
#include "seqprice/exante.hpp"
#include "seqprice/rng.hpp"

namespace seqprice::testing {

// Plain enumeration over every subset of the finite-priced items: max
// utility, then max payment, then lexicographically smallest item set.
inline DemandResult brute_demand(const Valuation& v, const ItemPricing& p) {
  std::vector<int> avail;
  for (int j = 0; j < v.item_count(); ++j)
    if (p[j] < kInf) avail.push_back(j);
  int k = static_cast<int>(avail.size());

  auto set_of = [&](std::uint64_t mask) {
    std::vector<int> items;
    for (int b = 0; b < k; ++b)
      if (mask & (std::uint64_t{1} << b)) items.push_back(avail[b]);
    return ItemSet(std::move(items));
  };

  double best_util = -1e300;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    ItemSet s = set_of(mask);
    best_util = std::max(best_util, v.value(s) - p.total(s));
  }
  double best_pay = -1e300;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    ItemSet s = set_of(mask);
    if (v.value(s) - p.total(s) >= best_util - kTol)
      best_pay = std::max(best_pay, p.total(s));
  }
  bool found = false;
  ItemSet best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    ItemSet s = set_of(mask);
    double pay = p.total(s);
    if (v.value(s) - pay < best_util - kTol || pay < best_pay - kTol) continue;
    if (!found || s < best) {
      best = s;
      found = true;
    }
  }
  DemandResult r;
  r.payment = p.total(best);
  r.utility = v.value(best) - r.payment;
  r.set = best;
  return r;
}

// Monte Carlo estimate of the expected allocation under (D, Q).
struct McAlloc {
  std::vector<double> mean;
  std::vector<double> std_err;
};

inline McAlloc mc_expected_alloc(const BuyerDistribution& d, const RandomPricing& q,
                                 long samples, std::uint64_t seed) {
  int m = d.item_count();
  McAlloc out;
  out.mean.assign(m, 0.0);
  out.std_err.assign(m, 0.0);
  Rng rng(seed);
  std::vector<long> hits(m, 0);
  for (long s = 0; s < samples; ++s) {
    double uv = rng.uniform();
    double acc = 0.0;
    std::size_t vi = d.support().size() - 1;
    for (std::size_t i = 0; i < d.support().size(); ++i) {
      acc += d.support()[i].prob;
      if (uv < acc) {
        vi = i;
        break;
      }
    }
    double up = rng.uniform();
    acc = 0.0;
    std::size_t pi = q.support().size() - 1;
    for (std::size_t i = 0; i < q.support().size(); ++i) {
      acc += q.support()[i].prob;
      if (up < acc) {
        pi = i;
        break;
      }
    }
    DemandResult r = demand(d.support()[vi].valuation, q.support()[pi].pricing);
    for (int j : r.set) ++hits[j];
  }
  for (int j = 0; j < m; ++j) {
    double f = static_cast<double>(hits[j]) / samples;
    out.mean[j] = f;
    out.std_err[j] = std::sqrt(std::max(f * (1 - f), 0.0) / samples);
  }
  return out;
}

// Solves a small square linear system by Gaussian elimination with partial
// pivoting; returns false when singular.
inline bool gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b,
                        std::vector<double>& x) {
  int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-11) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return true;
}

// Vertex-enumeration oracle for max c.x s.t. Ax <= b, x >= 0 (bounded LPs):
// tries every choice of n active constraints among rows and axes.
inline double vertex_enum_lp(const std::vector<double>& c,
                             const std::vector<std::vector<double>>& rows,
                             const std::vector<double>& rhs) {
  int n = static_cast<int>(c.size());
  int total = static_cast<int>(rows.size()) + n;

  auto row_of = [&](int idx, double& b) {
    std::vector<double> r(n, 0.0);
    if (idx < static_cast<int>(rows.size())) {
      r = rows[idx];
      b = rhs[idx];
    } else {
      r[idx - rows.size()] = 1.0;
      b = 0.0;
    }
    return r;
  };

  double best = -1e300;
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<double>> a(n);
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) a[i] = row_of(pick[i], b[i]);
    std::vector<double> x;
    if (gauss_solve(a, b, x)) {
      bool feasible = true;
      for (int i = 0; i < n && feasible; ++i)
        if (x[i] < -1e-7) feasible = false;
      for (std::size_t r = 0; r < rows.size() && feasible; ++r) {
        double lhs = 0;
        for (int i = 0; i < n; ++i) lhs += rows[r][i] * x[i];
        if (lhs > rhs[r] + 1e-7) feasible = false;
      }
      if (feasible) {
        double obj = 0;
        for (int i = 0; i < n; ++i) obj += c[i] * x[i];
        best = std::max(best, obj);
      }
    }
    int i = n - 1;
    while (i >= 0 && pick[i] == total - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

}  // namespace seqprice::testing
