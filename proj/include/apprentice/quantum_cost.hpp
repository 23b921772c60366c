#pragma once

#include <map>
#include <string>
#include <vector>

namespace apprentice {

/**
 * Analytical cost model comparing classical and quantum query complexity per
 * outer iteration.  Convention: soft-O constants are 1 and log factors are
 * dropped, so values are scaling magnitudes, not wall-clock predictions.
 */
struct CostParams {
    double k = 4;
    double S = 16;
    double A = 4;
    double gamma = 0.9;
    double epsilon = 0.3;
    double eps_rl = 0.0;
    double n = -1.0;  // margin training-set size; < 0 means k/((1-g)^2 (eps^2 - eps_rl))
};

/// The margin training-set size actually used: p.n, or its default
/// k/((1-g)^2 (eps^2 - eps_rl)) when p.n < 1.
double resolved_margin_set_size(const CostParams& p);

/// (k + S*A) / ((1-g)^7 eps^6 (eps^2 - eps_rl))
double classical_iteration_cost(const CostParams& p);

/// (sqrt(k) + S*sqrt(A)) / ((1-g)^16 eps^24 sqrt(eps^2 - eps_rl))
double quantum_iteration_cost(const CostParams& p);

struct SubroutineCost {
    std::string name;
    double classical = 0.0;
    double quantum = 0.0;
    double ratio = 0.0;  // classical / quantum
};

struct CostReport {
    CostParams params;
    std::vector<SubroutineCost> rows;
    double classical_total = 0.0;
    double quantum_total = 0.0;
    double speedup = 0.0;  // classical_total / quantum_total
    std::string note;
};

/**
 * Per-subroutine query costs (minimum finding, mean estimation, margin
 * training, planning, feature-expectation estimation) plus the per-iteration
 * totals.  The quantum total's (1-g)^16 eps^24 scaling follows the summary
 * form; it is more pessimistic than the composition of the subroutine rows,
 * which the report notes.
 */
CostReport subroutine_costs(const CostParams& params);

struct SweepRow {
    CostParams params;
    double classical = 0.0;
    double quantum = 0.0;
    double ratio = 0.0;
    bool quantum_wins = false;  // quantum < classical
};

/**
 * Cartesian sweep over value lists for any of k, S, A, gamma, epsilon,
 * eps_rl, n (canonical nesting in that order); unkeyed parameters stay at
 * their base values.  An empty grid yields an empty table; unknown keys
 * throw std::invalid_argument.
 */
std::vector<SweepRow> crossover_sweep(const CostParams& base,
                                      const std::map<std::string, std::vector<double>>& grid);

}  // namespace apprentice
