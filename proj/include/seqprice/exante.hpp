#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "seqprice/core.hpp"

namespace seqprice {

enum class RowSense { le, ge, eq };

// Dense LP: maximize objective . x subject to row constraints and
// per-variable bounds (lower defaults to 0, upper to +inf).
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<RowSense> sense;
  std::vector<double> lower;  // empty means all 0
  std::vector<double> upper;  // empty means all +inf

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rows.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

std::string to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

// Primal two-phase simplex: Dantzig pivoting while progress is made, Bland's
// rule during degenerate stalls (anti-cycling); 1e-9 feasibility/optimality
// tolerance.  Hits on the iteration cap are reported, never silent.
LpResult lp_solve(const LinearProgram& lp);

struct ExAnteSolution {
  std::vector<std::vector<double>> x;   // per buyer, length m
  std::vector<RandomPricing> pricings;  // per buyer
  double value = 0.0;

  int buyer_count() const { return static_cast<int>(x.size()); }
  int item_count() const { return x.empty() ? 0 : static_cast<int>(x[0].size()); }
};

// Throws if any ExAnteSolution invariant fails beyond tolerance 1e-7:
// sum_i x_ij <= 1, expected_alloc <= x_i, value == sum of expected revenues.
void validate_exante(const std::vector<BuyerDistribution>& buyers,
                     const ExAnteSolution& sol, double tol = 1e-7);

struct CandidateOptions {
  std::size_t budget = 1000000;     // cap on the Cartesian product size
  std::size_t per_item_cap = 0;     // 0 = unlimited; else keep the largest values
};

// Cartesian product over items of the per-item candidate sets
// ({0, inf} + marginal differences + extra grid).  Throws when the product
// exceeds the budget.
std::vector<ItemPricing> candidate_prices(const BuyerDistribution& d,
                                          const std::vector<double>& extra_grid = {},
                                          const CandidateOptions& opts = {});

struct SolveOptions {
  std::size_t column_limit = 10000;
};

// Solves the ex ante relaxation restricted to the given candidate pricings:
// max sum λ_{i,p} Rev(D_i, p) with per-buyer sum λ = 1 and per-item
// sum λ·Alloc_j <= 1.  The all-infinite column is always included.
ExAnteSolution solve_exante(const std::vector<BuyerDistribution>& buyers,
                            const std::vector<std::vector<ItemPricing>>& candidates,
                            const SolveOptions& opts = {});

// Convenience: builds per-buyer candidate grids, then solves.
ExAnteSolution solve_exante_auto(const std::vector<BuyerDistribution>& buyers,
                                 const std::vector<double>& extra_grid = {},
                                 const CandidateOptions& copts = {},
                                 const SolveOptions& sopts = {});

}  // namespace seqprice
