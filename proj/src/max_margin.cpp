#include "apprentice/max_margin.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include <Eigen/Dense>

namespace apprentice {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> combine(const std::vector<std::vector<double>>& points,
                            const std::vector<double>& weights) {
    std::vector<double> x(points[0].size(), 0.0);
    for (std::size_t j = 0; j < points.size(); ++j) {
        if (weights[j] == 0.0) continue;
        for (std::size_t c = 0; c < x.size(); ++c) x[c] += weights[j] * points[j][c];
    }
    return x;
}

/// Exact affine minimizer over the active points (KKT system); returns false
/// if the system is singular or any coefficient leaves the simplex.
bool affine_snap(const std::vector<std::vector<double>>& points, std::vector<double>& weights,
                 std::vector<double>& x) {
    std::vector<int> active;
    for (std::size_t j = 0; j < weights.size(); ++j)
        if (weights[j] > 0.0) active.push_back(static_cast<int>(j));
    const int m = static_cast<int>(active.size());
    if (m < 2 || m > 16) return false;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            double g = dot(points[active[i]], points[active[j]]);
            kkt(i, j) = 2.0 * g;
            kkt(j, i) = 2.0 * g;
        }
        kkt(i, m) = 1.0;
        kkt(m, i) = 1.0;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    rhs(m) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) return false;
    Eigen::VectorXd sol = lu.solve(rhs);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        if (!std::isfinite(sol(i)) || sol(i) < -1e-12) return false;
        sum += std::max(0.0, sol(i));
    }
    if (sum <= 0.0) return false;
    std::vector<double> candidate(weights.size(), 0.0);
    for (int i = 0; i < m; ++i) candidate[active[i]] = std::max(0.0, sol(i)) / sum;
    std::vector<double> cx = combine(points, candidate);
    if (dot(cx, cx) > dot(x, x)) return false;
    weights = std::move(candidate);
    x = std::move(cx);
    return true;
}

}  // namespace

MinNormResult min_norm_point(const std::vector<std::vector<double>>& points, double tol,
                             int max_iterations) {
    const int n = static_cast<int>(points.size());
    if (n < 1) throw std::invalid_argument("min_norm_point: empty point set");
    if (!(tol > 0.0)) throw std::invalid_argument("min_norm_point: tol must be > 0");
    const std::size_t k = points[0].size();
    for (const auto& p : points)
        if (p.size() != k) throw std::invalid_argument("min_norm_point: inconsistent dimensions");

    std::vector<double> weights(n, 0.0);
    weights[0] = 1.0;
    std::vector<double> x = points[0];
    std::vector<double> dots(n);
    double best_gap = std::numeric_limits<double>::infinity();
    std::vector<double> best_x = x;

    auto finish = [&](int iters, double gap) {
        double sum = 0.0;
        for (double& w : weights) {
            if (w < 1e-15) w = 0.0;
            sum += w;
        }
        for (double& w : weights) w /= sum;
        MinNormResult res;
        res.point = combine(points, weights);
        res.weights = weights;
        res.gap = gap;
        res.iterations = iters;
        return res;
    };

    for (int iter = 1; iter <= max_iterations; ++iter) {
        double xx = dot(x, x);
        int fw = 0;
        for (int j = 0; j < n; ++j) {
            dots[j] = dot(x, points[j]);
            if (dots[j] < dots[fw]) fw = j;
        }
        double gap = xx - dots[fw];
        if (gap < best_gap) {
            best_gap = gap;
            best_x = x;
        }
        if (gap <= tol * tol) return finish(iter, gap);

        int away = -1;
        for (int j = 0; j < n; ++j)
            if (weights[j] > 0.0 && (away < 0 || dots[j] > dots[away])) away = j;
        double away_gap = dots[away] - xx;

        if (gap >= away_gap || weights[away] >= 1.0) {
            // toward step: x + g*(p_fw - x)
            double denom = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                double d = points[fw][c] - x[c];
                denom += d * d;
            }
            if (denom <= 0.0) return finish(iter, gap);
            double g = std::min(1.0, gap / denom);
            if (g == 1.0) {
                std::fill(weights.begin(), weights.end(), 0.0);
                weights[fw] = 1.0;
                x = points[fw];
            } else {
                for (double& w : weights) w *= 1.0 - g;
                weights[fw] += g;
                for (std::size_t c = 0; c < k; ++c) x[c] += g * (points[fw][c] - x[c]);
            }
        } else {
            // away step: x + g*(x - p_away), capped so weights[away] stays >= 0
            double denom = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                double d = x[c] - points[away][c];
                denom += d * d;
            }
            if (denom <= 0.0) return finish(iter, gap);
            double g_max = weights[away] / (1.0 - weights[away]);
            double g = away_gap / denom;
            bool drop = g >= g_max;
            if (drop) g = g_max;
            for (double& w : weights) w *= 1.0 + g;
            weights[away] = drop ? 0.0 : weights[away] - g;
            for (std::size_t c = 0; c < k; ++c) x[c] += g * (x[c] - points[away][c]);
        }

        if (iter % 16 == 0) affine_snap(points, weights, x);
        if (iter % 64 == 0) x = combine(points, weights);
    }
    throw MinNormError(std::move(best_x), best_gap);
}

MarginSolution solve_max_margin(const std::vector<std::vector<double>>& deltas, double epsilon) {
    if (deltas.empty()) throw std::invalid_argument("solve_max_margin: empty delta set");
    if (!(epsilon > 0.0)) throw std::invalid_argument("solve_max_margin: epsilon must be > 0");
    double tol = epsilon / 2.0;
    MinNormResult res = min_norm_point(deltas, tol);
    MarginSolution sol;
    sol.weights = res.weights;
    const std::size_t k = deltas[0].size();
    double norm = std::sqrt(dot(res.point, res.point));
    if (norm > tol) {
        sol.w.resize(k);
        for (std::size_t c = 0; c < k; ++c) sol.w[c] = res.point[c] / norm;
        double t = std::numeric_limits<double>::infinity();
        for (const auto& d : deltas) t = std::min(t, dot(sol.w, d));
        sol.t = t;
    } else {
        sol.w.assign(k, 0.0);
        sol.t = 0.0;
    }
    return sol;
}

}  // namespace apprentice
