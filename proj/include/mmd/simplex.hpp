#pragma once
// Dense two-phase primal simplex for the small linear programs that arise
// when minimizing worst-case expected loss: a few hundred variables at most.
// Bland's rule throughout, so cycling cannot occur.

#include <cstdint>
#include <vector>

namespace mmd {

enum class LpRelation { le, eq };

struct LpRow {
    std::vector<double> coeffs;  // one per variable
    LpRelation relation = LpRelation::le;
    double rhs = 0.0;
};

// minimize c'x subject to the rows, x >= 0
struct LpProblem {
    std::vector<double> objective;
    std::vector<LpRow> rows;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::int64_t iterations = 0;
};

inline constexpr double kLpPivotTol = 1e-9;
inline constexpr std::int64_t kLpIterationCap = 1000000;

LpResult solve_lp(const LpProblem& problem);

}  // namespace mmd
