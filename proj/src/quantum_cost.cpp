#include "apprentice/quantum_cost.hpp"

#include <cmath>
#include <stdexcept>

namespace apprentice {

namespace {

void validate(const CostParams& p) {
    if (!(p.k >= 1.0)) throw std::invalid_argument("cost model: k must be >= 1");
    if (!(p.S >= 1.0)) throw std::invalid_argument("cost model: S must be >= 1");
    if (!(p.A >= 1.0)) throw std::invalid_argument("cost model: A must be >= 1");
    if (!(p.gamma >= 0.0 && p.gamma < 1.0))
        throw std::invalid_argument("cost model: gamma must be in [0,1)");
    if (!(p.epsilon > 0.0 && p.epsilon <= 1.0))
        throw std::invalid_argument("cost model: epsilon must be in (0,1]");
    if (!(p.eps_rl >= 0.0)) throw std::invalid_argument("cost model: eps_rl must be >= 0");
    if (!(p.epsilon * p.epsilon > p.eps_rl))
        throw std::invalid_argument("cost model: requires epsilon^2 > eps_rl");
}

}  // namespace

double resolved_margin_set_size(const CostParams& p) {
    if (p.n >= 1.0) return p.n;
    double one_m_g = 1.0 - p.gamma;
    return p.k / (one_m_g * one_m_g * (p.epsilon * p.epsilon - p.eps_rl));
}

double classical_iteration_cost(const CostParams& p) {
    validate(p);
    double one_m_g = 1.0 - p.gamma;
    double gap = p.epsilon * p.epsilon - p.eps_rl;
    return (p.k + p.S * p.A) /
           (std::pow(one_m_g, 7) * std::pow(p.epsilon, 6) * gap);
}

double quantum_iteration_cost(const CostParams& p) {
    validate(p);
    double one_m_g = 1.0 - p.gamma;
    double gap = p.epsilon * p.epsilon - p.eps_rl;
    return (std::sqrt(p.k) + p.S * std::sqrt(p.A)) /
           (std::pow(one_m_g, 16) * std::pow(p.epsilon, 24) * std::sqrt(gap));
}

CostReport subroutine_costs(const CostParams& params) {
    validate(params);
    CostReport report;
    report.params = params;
    const double k = params.k;
    const double S = params.S;
    const double A = params.A;
    const double eps = params.epsilon;
    const double one_m_g = 1.0 - params.gamma;
    const double L = 1.0 / one_m_g;  // horizon scale
    const double n = resolved_margin_set_size(params);

    auto add = [&](const std::string& name, double classical, double quantum) {
        report.rows.push_back({name, classical, quantum, classical / quantum});
    };
    add("min_finding", k, std::sqrt(k));
    add("mean_estimation", L * L * k / (eps * eps), L * std::sqrt(k) / eps);
    add("margin_training", (n + k) / (eps * eps),
        std::sqrt(n) / std::pow(eps, 4) + std::sqrt(k) / std::pow(eps, 8));
    add("planning", S * A / (eps * eps * std::pow(one_m_g, 3)),
        S * std::sqrt(A) / (eps * std::pow(one_m_g, 1.5)));
    add("feature_expectation", k / (eps * eps * std::pow(one_m_g, 3)),
        std::sqrt(k) / (eps * one_m_g * one_m_g));

    report.classical_total = classical_iteration_cost(params);
    report.quantum_total = quantum_iteration_cost(params);
    report.speedup = report.classical_total / report.quantum_total;
    report.note =
        "soft-O constants set to 1, log factors dropped; the quantum total's "
        "(1-gamma)^16 * eps^24 scaling follows the summary form and is more "
        "pessimistic than the composition of the subroutine rows above";
    return report;
}

std::vector<SweepRow> crossover_sweep(const CostParams& base,
                                      const std::map<std::string, std::vector<double>>& grid) {
    if (grid.empty()) return {};
    static const char* kKeys[] = {"k", "S", "A", "gamma", "epsilon", "eps_rl", "n"};
    for (const auto& [key, values] : grid) {
        bool known = false;
        for (const char* name : kKeys) known = known || key == name;
        if (!known) throw std::invalid_argument("crossover_sweep: unknown parameter '" + key + "'");
        if (values.empty())
            throw std::invalid_argument("crossover_sweep: empty value list for '" + key + "'");
    }
    auto values_for = [&](const char* name, double fallback) {
        auto it = grid.find(name);
        return it == grid.end() ? std::vector<double>{fallback} : it->second;
    };
    std::vector<SweepRow> rows;
    for (double k : values_for("k", base.k))
        for (double S : values_for("S", base.S))
            for (double A : values_for("A", base.A))
                for (double gamma : values_for("gamma", base.gamma))
                    for (double epsilon : values_for("epsilon", base.epsilon))
                        for (double eps_rl : values_for("eps_rl", base.eps_rl))
                            for (double n : values_for("n", base.n)) {
                                SweepRow row;
                                row.params = CostParams{k, S, A, gamma, epsilon, eps_rl, n};
                                row.classical = classical_iteration_cost(row.params);
                                row.quantum = quantum_iteration_cost(row.params);
                                row.ratio = row.classical / row.quantum;
                                row.quantum_wins = row.quantum < row.classical;
                                rows.push_back(row);
                            }
    return rows;
}

}  // namespace apprentice
