#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqprice/exante.hpp"

namespace seqprice {

void validate_exante(const std::vector<BuyerDistribution>& buyers,
                     const ExAnteSolution& sol, double tol) {
  int n = static_cast<int>(buyers.size());
  if (sol.buyer_count() != n || static_cast<int>(sol.pricings.size()) != n)
    throw std::invalid_argument("validate_exante: buyer count mismatch");
  int m = buyers.empty() ? 0 : buyers[0].item_count();
  std::vector<double> load(m, 0.0);
  double total_rev = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> alloc = expected_alloc(buyers[i], sol.pricings[i]);
    for (int j = 0; j < m; ++j) {
      if (alloc[j] > sol.x[i][j] + tol)
        throw std::runtime_error("validate_exante: alloc exceeds x for buyer " +
                                 std::to_string(i) + " item " + std::to_string(j));
      load[j] += sol.x[i][j];
    }
    total_rev += expected_rev(buyers[i], sol.pricings[i]);
  }
  for (int j = 0; j < m; ++j)
    if (load[j] > 1.0 + tol)
      throw std::runtime_error("validate_exante: item " + std::to_string(j) +
                               " oversold: " + std::to_string(load[j]));
  if (std::abs(total_rev - sol.value) > tol)
    throw std::runtime_error("validate_exante: value != sum of expected revenues");
}

std::vector<ItemPricing> candidate_prices(const BuyerDistribution& d,
                                          const std::vector<double>& extra_grid,
                                          const CandidateOptions& opts) {
  int m = d.item_count();
  auto per_item = per_item_candidate_prices(d, extra_grid);
  if (opts.per_item_cap > 0 && opts.per_item_cap < 3)
    throw std::invalid_argument(
        "candidate_prices: per_item_cap below 3 cannot keep any finite price");
  if (opts.per_item_cap > 0) {
    for (auto& c : per_item) {
      // Keep 0, inf and the largest values up to the cap.
      if (c.size() <= opts.per_item_cap) continue;
      std::vector<double> kept;
      kept.push_back(0.0);
      std::size_t take = opts.per_item_cap - 2;
      // c is sorted ascending with inf last; skip the leading 0.
      std::size_t finite_end = c.size() - 1;
      std::size_t start = finite_end > take ? finite_end - take : 1;
      for (std::size_t idx = std::max<std::size_t>(start, 1); idx < finite_end; ++idx)
        kept.push_back(c[idx]);
      kept.push_back(kInf);
      c = std::move(kept);
    }
  }
  std::size_t product = 1;
  for (const auto& c : per_item) {
    product *= c.size();
    if (product > opts.budget)
      throw std::invalid_argument("candidate_prices: Cartesian product exceeds budget");
  }
  std::vector<ItemPricing> out;
  out.reserve(product);
  std::vector<std::size_t> idx(m, 0);
  while (true) {
    std::vector<double> prices(m);
    for (int j = 0; j < m; ++j) prices[j] = per_item[j][idx[j]];
    out.push_back(ItemPricing(std::move(prices)));
    int j = 0;
    for (; j < m; ++j) {
      if (++idx[j] < per_item[j].size()) break;
      idx[j] = 0;
    }
    if (j == m) break;
  }
  return out;
}

ExAnteSolution solve_exante(const std::vector<BuyerDistribution>& buyers,
                            const std::vector<std::vector<ItemPricing>>& candidates,
                            const SolveOptions& opts) {
  int n = static_cast<int>(buyers.size());
  if (static_cast<int>(candidates.size()) != n)
    throw std::invalid_argument("solve_exante: candidate list per buyer required");
  if (n == 0) throw std::invalid_argument("solve_exante: no buyers");
  int m = buyers[0].item_count();

  // Columns: one lambda per (buyer, candidate pricing); the all-infinite
  // pricing is always available so the LP cannot be infeasible.
  struct Column {
    int buyer;
    ItemPricing pricing;
    double rev;
    std::vector<double> alloc;
  };
  std::vector<Column> cols;
  for (int i = 0; i < n; ++i) {
    bool has_inf = false;
    for (const auto& p : candidates[i]) {
      bool all_inf = true;
      for (int j = 0; j < m; ++j)
        if (p[j] < kInf) all_inf = false;
      has_inf = has_inf || all_inf;
      cols.push_back({i, p, expected_rev(buyers[i], p), expected_alloc(buyers[i], p)});
    }
    if (!has_inf) {
      ItemPricing p = ItemPricing::all_infinite(m);
      cols.push_back({i, p, 0.0, std::vector<double>(m, 0.0)});
    }
  }
  if (cols.size() > opts.column_limit)
    throw std::invalid_argument("solve_exante: " + std::to_string(cols.size()) +
                                " columns exceed the limit of " +
                                std::to_string(opts.column_limit));

  LinearProgram lp;
  std::size_t ncols = cols.size();
  lp.objective.resize(ncols);
  for (std::size_t c = 0; c < ncols; ++c) lp.objective[c] = cols[c].rev;
  // Per-buyer convexity rows.
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(ncols, 0.0);
    for (std::size_t c = 0; c < ncols; ++c)
      if (cols[c].buyer == i) row[c] = 1.0;
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(1.0);
    lp.sense.push_back(RowSense::eq);
  }
  // Per-item ex ante supply rows.
  for (int j = 0; j < m; ++j) {
    std::vector<double> row(ncols, 0.0);
    for (std::size_t c = 0; c < ncols; ++c) row[c] = cols[c].alloc[j];
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(1.0);
    lp.sense.push_back(RowSense::le);
  }

  LpResult res = lp_solve(lp);
  if (res.status != LpStatus::optimal)
    throw std::runtime_error("solve_exante: LP did not solve to optimality: " +
                             to_string(res.status));

  ExAnteSolution sol;
  sol.x.assign(n, std::vector<double>(m, 0.0));
  sol.pricings.resize(n);
  for (int i = 0; i < n; ++i) {
    std::vector<WeightedPricing> support;
    double mass = 0.0;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (cols[c].buyer != i || res.x[c] <= 1e-12) continue;
      support.push_back({res.x[c], cols[c].pricing});
      mass += res.x[c];
    }
    if (support.empty()) {
      support.push_back({1.0, ItemPricing::all_infinite(m)});
      mass = 1.0;
    }
    for (auto& wp : support) wp.prob /= mass;
    sol.pricings[i] = RandomPricing(std::move(support));
    sol.x[i] = expected_alloc(buyers[i], sol.pricings[i]);
  }
  sol.value = 0.0;
  for (int i = 0; i < n; ++i) sol.value += expected_rev(buyers[i], sol.pricings[i]);
  return sol;
}

ExAnteSolution solve_exante_auto(const std::vector<BuyerDistribution>& buyers,
                                 const std::vector<double>& extra_grid,
                                 const CandidateOptions& copts,
                                 const SolveOptions& sopts) {
  std::vector<std::vector<ItemPricing>> candidates;
  candidates.reserve(buyers.size());
  for (const auto& d : buyers)
    candidates.push_back(candidate_prices(d, extra_grid, copts));
  return solve_exante(buyers, candidates, sopts);
}

}  // namespace seqprice
