#pragma once

#include <optional>
#include <vector>

namespace apprentice {

/**
 * One-step contraction update: orthogonally projects mu_hat_e onto the line
 * through mu_bar and mu_next, with the inner product debited by eps_rl:
 *
 *   mu_tilde = mu_bar + [((mu_hat_e - mu_bar).(mu_next - mu_bar) - eps_rl)
 *                        / ||mu_next - mu_bar||^2] * (mu_next - mu_bar)
 *
 * The coefficient is intentionally not clamped; it stays in [0,1] whenever
 * the contraction hypotheses hold, which the diagnostics check separately.
 * mu_next == mu_bar degenerates to mu_bar.
 */
std::vector<double> projection_update(const std::vector<double>& mu_hat_e,
                                      const std::vector<double>& mu_bar,
                                      const std::vector<double>& mu_next, double eps_rl);

/**
 * Guaranteed per-iteration contraction factor of the hull distance:
 *
 *   (sqrt(k) + (1-g) sqrt(eps_rl/2)) / sqrt(k + (1-g)^2 (dist^2 - eps_rl))
 *
 * valid when dist^2 >= 2 eps_rl (throws std::invalid_argument otherwise),
 * the demonstrator's feature expectation lies in the achievable hull, and the
 * per-iteration policy is eps_rl-optimal for the unnormalized direction
 * reward.  Tends to 1 as g -> 1.
 */
double lemma1_ratio_bound(double k, double gamma, double eps_rl, double dist);

struct IterationBound {
    double iterations = 0.0;  // exact quotient form
    double simplified = 0.0;  // 2k ln(sqrt(k)/((1-g) eps)) / ((1-g)^2 (eps^2 - eps_rl))
};

/**
 * Iterations sufficient for the margin to fall below eps:
 *
 *   ln(sqrt(k) / ((1-g) eps)) / ln(sqrt(k + (1-g)^2 (eps^2 - eps_rl))
 *                                  / (sqrt(k) + (1-g) sqrt(eps_rl/2)))
 *
 * plus the simplified companion form.  Requires eps^2 > eps_rl (throws
 * otherwise).  Returns {0, 0} when eps already exceeds the hull diameter
 * sqrt(k)/(1-g), and nullopt when the contraction ratio is <= 1 and the bound
 * is vacuous.  Certification uses the exact quotient; the companion is a
 * reporting value only (it is never larger than the exact quotient).
 */
std::optional<IterationBound> theorem1_iterations(double k, double gamma, double epsilon,
                                                  double eps_rl);

/// Per-iteration contraction observation attached to run logs.
struct IterationDiagnostic {
    int iteration = 0;
    double dist = 0.0;            // hull distance before the new policy
    double ratio_observed = 0.0;  // ||mu_hat_e - mu_tilde|| / dist
    double ratio_bound = 0.0;     // lemma1_ratio_bound at this dist (NaN if hypotheses fail)
    bool bound_ok = false;        // ratio_observed <= ratio_bound + 1e-9
    bool hypotheses_hold = false;
};

}  // namespace apprentice
