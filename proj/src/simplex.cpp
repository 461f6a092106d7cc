#include "mmd/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include "mmd/core.hpp"

namespace mmd {

namespace {

constexpr double kPhase1FeasTol = 1e-7;

struct Tableau {
    std::size_t rows = 0;
    std::size_t cols = 0;  // structural + slack/surplus + artificial
    std::vector<double> a;  // row-major constraint matrix
    std::vector<double> b;  // rhs, kept >= 0 by the construction below
    std::vector<double> cost;    // reduced-cost row of the current phase
    double cost_rhs = 0.0;       // negative of current objective value
    std::vector<int> basis;      // basic column per row
    std::vector<char> row_live;  // redundant rows found after phase 1 are dead

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    void pivot(std::size_t pr, std::size_t pc) {
        double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c < cols; ++c) at(pr, c) *= inv;
        b[pr] *= inv;
        at(pr, pc) = 1.0;  // kill roundoff on the pivot itself
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == pr || !row_live[r]) continue;
            double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < cols; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
            b[r] -= f * b[pr];
        }
        double f = cost[pc];
        if (f != 0.0) {
            for (std::size_t c = 0; c < cols; ++c) cost[c] -= f * at(pr, c);
            cost[pc] = 0.0;
            cost_rhs -= f * b[pr];
        }
        basis[pr] = static_cast<int>(pc);
    }
};

// Bland: entering = lowest-index eligible column, leaving = min ratio with
// ties broken by lowest basic variable index.
LpStatus run_simplex(Tableau& t, const std::vector<char>& allowed, std::int64_t& iterations) {
    while (true) {
        if (iterations >= kLpIterationCap) return LpStatus::iteration_limit;

        std::size_t enter = t.cols;
        for (std::size_t c = 0; c < t.cols; ++c) {
            if (!allowed[c]) continue;
            if (t.cost[c] < -kLpPivotTol) {
                enter = c;
                break;
            }
        }
        if (enter == t.cols) return LpStatus::optimal;

        std::size_t leave = t.rows;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < t.rows; ++r) {
            if (!t.row_live[r]) continue;
            double a = t.at(r, enter);
            if (a <= kLpPivotTol) continue;
            double ratio = t.b[r] / a;
            if (ratio < best_ratio - kLpPivotTol ||
                (ratio < best_ratio + kLpPivotTol &&
                 (leave == t.rows || t.basis[r] < t.basis[leave]))) {
                best_ratio = ratio;
                leave = r;
            }
        }
        if (leave == t.rows) return LpStatus::unbounded;

        t.pivot(leave, enter);
        ++iterations;
    }
}

}  // namespace

LpResult solve_lp(const LpProblem& problem) {
    std::size_t n = problem.objective.size();
    std::size_t m = problem.rows.size();
    for (const auto& row : problem.rows)
        if (row.coeffs.size() != n)
            throw DimensionMismatchError("constraint length does not match variable count");

    // Column layout: structural | one slack or surplus per inequality | artificials.
    // Rows with negative rhs are negated first so b >= 0 throughout.
    std::size_t num_slack = 0;
    for (const auto& row : problem.rows)
        if (row.relation == LpRelation::le) ++num_slack;

    std::vector<double> sign(m, 1.0);
    std::vector<char> needs_artificial(m, 0);
    for (std::size_t r = 0; r < m; ++r) {
        double rhs = problem.rows[r].rhs;
        if (rhs < 0.0) sign[r] = -1.0;
        // negated <= becomes >=, which needs an artificial; equalities always do
        if (problem.rows[r].relation == LpRelation::eq || sign[r] < 0.0)
            needs_artificial[r] = 1;
    }
    std::size_t num_art = 0;
    for (std::size_t r = 0; r < m; ++r) num_art += needs_artificial[r];

    Tableau t;
    t.rows = m;
    t.cols = n + num_slack + num_art;
    t.a.assign(t.rows * t.cols, 0.0);
    t.b.assign(m, 0.0);
    t.basis.assign(m, -1);
    t.row_live.assign(m, 1);

    std::size_t slack_at = n;
    std::size_t art_at = n + num_slack;
    for (std::size_t r = 0; r < m; ++r) {
        const auto& row = problem.rows[r];
        for (std::size_t c = 0; c < n; ++c) t.at(r, c) = sign[r] * row.coeffs[c];
        t.b[r] = sign[r] * row.rhs;
        if (row.relation == LpRelation::le) {
            t.at(r, slack_at) = sign[r];  // slack for <=, surplus for negated rows
            if (!needs_artificial[r]) t.basis[r] = static_cast<int>(slack_at);
            ++slack_at;
        }
        if (needs_artificial[r]) {
            t.at(r, art_at) = 1.0;
            t.basis[r] = static_cast<int>(art_at);
            ++art_at;
        }
    }

    LpResult result;

    // Phase 1: minimize the sum of artificials.
    if (num_art > 0) {
        t.cost.assign(t.cols, 0.0);
        t.cost_rhs = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            if (!needs_artificial[r]) continue;
            for (std::size_t c = 0; c < t.cols; ++c) t.cost[c] -= t.at(r, c);
            t.cost_rhs -= t.b[r];
        }
        for (std::size_t c = n + num_slack; c < t.cols; ++c) t.cost[c] = 0.0;

        std::vector<char> allowed(t.cols, 1);
        LpStatus st = run_simplex(t, allowed, result.iterations);
        if (st != LpStatus::optimal) {
            result.status = st;
            return result;
        }
        double phase1 = -t.cost_rhs;
        if (phase1 > kPhase1FeasTol) {
            result.status = LpStatus::infeasible;
            return result;
        }

        // Remove artificials from the basis; rows that cannot pivot them out
        // carry no independent constraint and are dropped.
        for (std::size_t r = 0; r < m; ++r) {
            if (t.basis[r] < static_cast<int>(n + num_slack)) continue;
            std::size_t pc = t.cols;
            for (std::size_t c = 0; c < n + num_slack; ++c)
                if (std::abs(t.at(r, c)) > kLpPivotTol) {
                    pc = c;
                    break;
                }
            if (pc == t.cols) {
                t.row_live[r] = 0;
                t.basis[r] = -1;
            } else {
                t.pivot(r, pc);
            }
        }
    }

    // Phase 2: true objective over structural and slack columns.
    t.cost.assign(t.cols, 0.0);
    t.cost_rhs = 0.0;
    for (std::size_t c = 0; c < n; ++c) t.cost[c] = problem.objective[c];
    for (std::size_t r = 0; r < m; ++r) {
        if (!t.row_live[r] || t.basis[r] < 0) continue;
        double f = t.cost[static_cast<std::size_t>(t.basis[r])];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < t.cols; ++c) t.cost[c] -= f * t.at(r, c);
        t.cost_rhs -= f * t.b[r];
    }

    std::vector<char> allowed(t.cols, 1);
    for (std::size_t c = n + num_slack; c < t.cols; ++c) allowed[c] = 0;
    LpStatus st = run_simplex(t, allowed, result.iterations);
    result.status = st;
    if (st != LpStatus::optimal) return result;

    result.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        if (!t.row_live[r] || t.basis[r] < 0) continue;
        if (t.basis[r] < static_cast<int>(n)) result.x[static_cast<std::size_t>(t.basis[r])] = t.b[r];
    }
    double obj = 0.0;
    for (std::size_t c = 0; c < n; ++c) obj += problem.objective[c] * result.x[c];
    result.objective = obj;
    return result;
}

}  // namespace mmd
