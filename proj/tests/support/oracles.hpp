#pragma once

// Brute-force references. None of these share code paths with the library.

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace concord::oracle {

/// K = A'A / rows + small diagonal, A standard normal: positive definite.
inline Eigen::MatrixXd random_psd(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd a(n + 2, n);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    Eigen::MatrixXd k = scale * (a.transpose() * a) / static_cast<double>(n + 2);
    k.diagonal().array() += 1e-3 * scale;
    return 0.5 * (k + k.transpose());
}

/// Minimizer of x'Kx on the affine set {1'x = 1, m'x = target} restricted
/// to `support`, by null-space parametrization. nullopt when the support
/// cannot meet the constraints.
inline std::optional<Eigen::VectorXd> null_space_solve(const Eigen::MatrixXd& k, const Eigen::VectorXd& m, double target,
                                                       const std::vector<int>& support) {
    const int f = static_cast<int>(support.size());
    Eigen::MatrixXd a(2, f);
    Eigen::MatrixXd kf(f, f);
    for (int p = 0; p < f; ++p) {
        a(0, p) = 1.0;
        a(1, p) = m(support[p]);
        for (int q = 0; q < f; ++q) kf(p, q) = k(support[p], support[q]);
    }
    Eigen::Vector2d b(1.0, target);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto sv = svd.singularValues();
    const int rank = static_cast<int>((sv.array() > 1e-12 * sv(0)).count());
    Eigen::VectorXd x0 = svd.solve(b);
    if ((a * x0 - b).norm() > 1e-9 * (1.0 + std::abs(target))) return std::nullopt;

    Eigen::VectorXd xf = x0;
    if (f > rank) {
        const Eigen::MatrixXd z = svd.matrixV().rightCols(f - rank);
        const Eigen::MatrixXd h = z.transpose() * kf * z;
        const Eigen::VectorXd y = h.ldlt().solve(-(z.transpose() * kf * x0));
        xf = x0 + z * y;
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m.size());
    for (int p = 0; p < f; ++p) x(support[p]) = xf(p);
    return x;
}

/// Global long-only optimum by trying every support set (2^n - 1 of them).
inline Eigen::VectorXd enumerate_long_only(const Eigen::MatrixXd& k, const Eigen::VectorXd& m, double target) {
    const int n = static_cast<int>(m.size());
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x;
    for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> support;
        for (int i = 0; i < n; ++i)
            if (mask & (1 << i)) support.push_back(i);
        const auto x = null_space_solve(k, m, target, support);
        if (!x || x->minCoeff() < -1e-12) continue;
        const double v = x->dot(k * *x);
        if (v < best - 1e-15) {
            best = v;
            best_x = *x;
        }
    }
    return best_x;
}

/// Minimum variance over a grid on x1 (step 0.001, |x1| <= span); x2, x3
/// follow from the two equality constraints, so every grid point is feasible.
inline double grid_min_variance_3(const Eigen::Matrix3d& k, const Eigen::Vector3d& m, double target, double span = 3.0) {
    double best = std::numeric_limits<double>::infinity();
    const int steps = static_cast<int>(std::lround(span / 0.001));
    for (int s = -steps; s <= steps; ++s) {
        const double x1 = s * 0.001;
        // x2 + x3 = 1 - x1 ; m2 x2 + m3 x3 = target - m1 x1
        const double rest = 1.0 - x1;
        const double x2 = (target - m(0) * x1 - m(2) * rest) / (m(1) - m(2));
        const Eigen::Vector3d x(x1, x2, rest - x2);
        best = std::min(best, x.dot(k * x));
    }
    return best;
}

struct Point2 {
    double mean;
    double risk;
};

/// O(n^2) dominance flags.
inline std::vector<bool> brute_force_dominated(const std::vector<Point2>& pts) {
    std::vector<bool> out(pts.size(), false);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        for (std::size_t q = 0; q < pts.size(); ++q) {
            if (p == q) continue;
            const bool weakly = pts[q].mean >= pts[p].mean && pts[q].risk <= pts[p].risk;
            const bool strictly = pts[q].mean > pts[p].mean || pts[q].risk < pts[p].risk;
            if (weakly && strictly) out[p] = true;
        }
    }
    return out;
}

/// Hidden-weight generated consistent continuous PCM: a_ij = v_i / (v_i + v_j).
inline Eigen::MatrixXd consistent_pcm(const Eigen::VectorXd& v) {
    const auto n = v.size();
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = i == j ? 0.5 : v(i) / (v(i) + v(j));
    return a;
}

}  // namespace concord::oracle
