#include "apprentice/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace apprentice {

std::vector<double> projection_update(const std::vector<double>& mu_hat_e,
                                      const std::vector<double>& mu_bar,
                                      const std::vector<double>& mu_next, double eps_rl) {
    const std::size_t k = mu_hat_e.size();
    if (mu_bar.size() != k || mu_next.size() != k)
        throw std::invalid_argument("projection_update: dimension mismatch");
    double num = 0.0, denom = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        double dir = mu_next[c] - mu_bar[c];
        num += (mu_hat_e[c] - mu_bar[c]) * dir;
        denom += dir * dir;
    }
    if (denom == 0.0) return mu_bar;
    double coef = (num - eps_rl) / denom;
    std::vector<double> out(k);
    for (std::size_t c = 0; c < k; ++c) out[c] = mu_bar[c] + coef * (mu_next[c] - mu_bar[c]);
    return out;
}

double lemma1_ratio_bound(double k, double gamma, double eps_rl, double dist) {
    if (!(k >= 1.0)) throw std::invalid_argument("lemma1_ratio_bound: k must be >= 1");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("lemma1_ratio_bound: gamma must be in [0,1)");
    if (!(eps_rl >= 0.0)) throw std::invalid_argument("lemma1_ratio_bound: eps_rl must be >= 0");
    if (!(dist > 0.0)) throw std::invalid_argument("lemma1_ratio_bound: dist must be > 0");
    if (dist * dist < 2.0 * eps_rl)
        throw std::invalid_argument("lemma1_ratio_bound: requires dist^2 >= 2*eps_rl");
    double one_m_g = 1.0 - gamma;
    double num = std::sqrt(k) + one_m_g * std::sqrt(eps_rl / 2.0);
    double den = std::sqrt(k + one_m_g * one_m_g * (dist * dist - eps_rl));
    return num / den;
}

std::optional<IterationBound> theorem1_iterations(double k, double gamma, double epsilon,
                                                  double eps_rl) {
    if (!(k >= 1.0)) throw std::invalid_argument("theorem1_iterations: k must be >= 1");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("theorem1_iterations: gamma must be in [0,1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("theorem1_iterations: epsilon must be > 0");
    if (!(eps_rl >= 0.0)) throw std::invalid_argument("theorem1_iterations: eps_rl must be >= 0");
    if (!(epsilon * epsilon > eps_rl))
        throw std::invalid_argument("theorem1_iterations: requires epsilon^2 > eps_rl");
    double one_m_g = 1.0 - gamma;
    double num = std::log(std::sqrt(k) / (one_m_g * epsilon));
    if (num <= 0.0) return IterationBound{0.0, 0.0};
    double gain = one_m_g * one_m_g * (epsilon * epsilon - eps_rl);
    double ratio = std::sqrt(k + gain) / (std::sqrt(k) + one_m_g * std::sqrt(eps_rl / 2.0));
    if (ratio <= 1.0) return std::nullopt;
    IterationBound out;
    out.iterations = num / std::log(ratio);
    out.simplified = 2.0 * k * num / gain;
    return out;
}

}  // namespace apprentice
