#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqprice/exante.hpp"

namespace seqprice {

namespace {

constexpr double kLpTol = 1e-9;

}  // namespace

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "OPTIMAL";
    case LpStatus::infeasible: return "INFEASIBLE";
    case LpStatus::unbounded: return "UNBOUNDED";
    case LpStatus::iteration_limit: return "ITERATION_LIMIT";
  }
  return "?";
}

// Two-phase tableau simplex, Bland's rule throughout.  The LP is brought to
// standard equality form with slack/surplus columns plus artificials; finite
// upper bounds become extra rows.
LpResult lp_solve(const LinearProgram& lp) {
  std::size_t n = lp.num_vars();
  if (lp.rows.size() != lp.rhs.size() || lp.rows.size() != lp.sense.size())
    throw std::invalid_argument("lp_solve: inconsistent row data");
  for (const auto& row : lp.rows)
    if (row.size() != n) throw std::invalid_argument("lp_solve: row length != vars");
  if (!lp.lower.empty() && lp.lower.size() != n)
    throw std::invalid_argument("lp_solve: bad lower bounds");
  if (!lp.upper.empty() && lp.upper.size() != n)
    throw std::invalid_argument("lp_solve: bad upper bounds");

  std::vector<double> lower = lp.lower.empty() ? std::vector<double>(n, 0.0) : lp.lower;
  for (double lo : lower)
    if (!std::isfinite(lo)) throw std::invalid_argument("lp_solve: lower bounds must be finite");

  // Shift x = lower + y so y >= 0 everywhere.
  std::vector<std::vector<double>> rows = lp.rows;
  std::vector<double> rhs = lp.rhs;
  std::vector<RowSense> sense = lp.sense;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) rhs[i] -= rows[i][j] * lower[j];
  if (!lp.upper.empty()) {
    for (std::size_t j = 0; j < n; ++j) {
      if (std::isfinite(lp.upper[j])) {
        std::vector<double> row(n, 0.0);
        row[j] = 1.0;
        rows.push_back(std::move(row));
        rhs.push_back(lp.upper[j] - lower[j]);
        sense.push_back(RowSense::le);
      }
    }
  }
  std::size_t m_rows = rows.size();
  // Normalize rhs >= 0.
  for (std::size_t i = 0; i < m_rows; ++i) {
    if (rhs[i] < 0) {
      for (double& a : rows[i]) a = -a;
      rhs[i] = -rhs[i];
      if (sense[i] == RowSense::le) sense[i] = RowSense::ge;
      else if (sense[i] == RowSense::ge) sense[i] = RowSense::le;
    }
  }

  // Column layout: structural | slack/surplus | artificial.
  std::size_t n_slack = 0;
  for (RowSense s : sense)
    if (s != RowSense::eq) ++n_slack;
  std::size_t n_art = 0;
  std::vector<bool> needs_art(m_rows, false);
  for (std::size_t i = 0; i < m_rows; ++i) {
    // <= rows start basic on their slack; >= and == need an artificial.
    needs_art[i] = sense[i] != RowSense::le;
    if (needs_art[i]) ++n_art;
  }
  std::size_t total = n + n_slack + n_art;

  std::vector<std::vector<double>> tab(m_rows, std::vector<double>(total + 1, 0.0));
  std::vector<int> basis(m_rows, -1);
  {
    std::size_t slack_at = n, art_at = n + n_slack;
    for (std::size_t i = 0; i < m_rows; ++i) {
      for (std::size_t j = 0; j < n; ++j) tab[i][j] = rows[i][j];
      tab[i][total] = rhs[i];
      if (sense[i] == RowSense::le) {
        tab[i][slack_at] = 1.0;
        basis[i] = static_cast<int>(slack_at);
        ++slack_at;
      } else if (sense[i] == RowSense::ge) {
        tab[i][slack_at] = -1.0;
        ++slack_at;
        tab[i][art_at] = 1.0;
        basis[i] = static_cast<int>(art_at);
        ++art_at;
      } else {
        tab[i][art_at] = 1.0;
        basis[i] = static_cast<int>(art_at);
        ++art_at;
      }
    }
  }

  auto pivot = [&](std::size_t row, std::size_t col) {
    double inv = 1.0 / tab[row][col];
    for (double& x : tab[row]) x *= inv;
    tab[row][col] = 1.0;  // clean up roundoff
    for (std::size_t i = 0; i < m_rows; ++i) {
      if (i == row) continue;
      double f = tab[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= total; ++j) tab[i][j] -= f * tab[row][j];
      tab[i][col] = 0.0;
    }
  };

  // Runs primal simplex on the current tableau for a given objective
  // (minimization of cost . columns).  Entering variable: most negative
  // reduced cost while the objective makes progress; after a degenerate
  // stall the rule switches to Bland's smallest index, whose anti-cycling
  // guarantee ensures termination.  allowed(j) masks out columns.
  std::size_t max_iters = 2000 + 200 * (m_rows + total);
  auto run_phase = [&](const std::vector<double>& cost, auto allowed,
                       bool* hit_cap) -> bool {
    *hit_cap = false;
    std::size_t stall = 0;
    const std::size_t stall_limit = 4 * m_rows + 16;
    for (std::size_t iter = 0;; ++iter) {
      if (iter > max_iters) {
        *hit_cap = true;
        return true;
      }
      bool bland = stall >= stall_limit;
      std::vector<double> y(m_rows);
      for (std::size_t i = 0; i < m_rows; ++i) y[i] = cost[basis[i]];
      int entering = -1;
      double most_negative = -kLpTol;
      for (std::size_t j = 0; j < total; ++j) {
        if (!allowed(j)) continue;
        double red = cost[j];
        for (std::size_t i = 0; i < m_rows; ++i) red -= y[i] * tab[i][j];
        if (red < most_negative) {
          entering = static_cast<int>(j);
          if (bland) break;  // smallest index
          most_negative = red;
        }
      }
      if (entering < 0) return true;  // optimal
      int leaving = -1;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < m_rows; ++i) {
        if (tab[i][entering] > kLpTol) {
          double ratio = tab[i][total] / tab[i][entering];
          if (leaving < 0 || ratio < best_ratio - kLpTol ||
              (ratio < best_ratio + kLpTol && basis[i] < basis[leaving])) {
            leaving = static_cast<int>(i);
            best_ratio = ratio;
          }
        }
      }
      if (leaving < 0) return false;  // unbounded in this objective
      stall = best_ratio > kLpTol ? 0 : stall + 1;
      pivot(leaving, entering);
      basis[leaving] = entering;
    }
  };

  LpResult result;
  bool hit_cap = false;

  if (n_art > 0) {
    std::vector<double> phase1(total, 0.0);
    for (std::size_t j = n + n_slack; j < total; ++j) phase1[j] = 1.0;
    run_phase(phase1, [](std::size_t) { return true; }, &hit_cap);
    if (hit_cap) {
      result.status = LpStatus::iteration_limit;
      return result;
    }
    double art_sum = 0.0;
    for (std::size_t i = 0; i < m_rows; ++i)
      if (basis[i] >= static_cast<int>(n + n_slack)) art_sum += tab[i][total];
    if (art_sum > 1e-7) {
      result.status = LpStatus::infeasible;
      return result;
    }
    // Drive remaining artificials out of the basis when possible.
    for (std::size_t i = 0; i < m_rows; ++i) {
      if (basis[i] < static_cast<int>(n + n_slack)) continue;
      int col = -1;
      for (std::size_t j = 0; j < n + n_slack; ++j) {
        if (std::abs(tab[i][j]) > kLpTol) {
          col = static_cast<int>(j);
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
        basis[i] = col;
      }
    }
  }

  std::vector<double> phase2(total, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = -lp.objective[j];  // maximize
  auto structural_only = [&](std::size_t j) { return j < n + n_slack; };
  bool bounded = run_phase(phase2, structural_only, &hit_cap);
  if (hit_cap) {
    result.status = LpStatus::iteration_limit;
    return result;
  }
  if (!bounded) {
    result.status = LpStatus::unbounded;
    return result;
  }

  result.status = LpStatus::optimal;
  result.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m_rows; ++i)
    if (basis[i] >= 0 && basis[i] < static_cast<int>(n))
      result.x[basis[i]] = tab[i][total];
  for (std::size_t j = 0; j < n; ++j) result.x[j] += lower[j];
  result.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    result.objective += lp.objective[j] * result.x[j];
  return result;
}

}  // namespace seqprice
