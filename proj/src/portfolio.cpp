#include "concord/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "concord/error.hpp"

namespace concord::portfolio {

namespace {

constexpr double kNegativeWeightTol = 1e-12;
constexpr double kMultiplierTol = 1e-9;

struct SupportSolve {
    Eigen::VectorXd x;  // full length, zero off the support
    double lambda_return = 0.0;
    double lambda_budget = 0.0;
};

void validate(const PortfolioProblem& p) {
    const auto n = p.stats.securities.size();
    if (n < 2) fail(ErrorCode::InvalidArgument, "a pool needs at least 2 securities");
    if (static_cast<std::size_t>(p.stats.means.size()) != n || static_cast<std::size_t>(p.stats.covariance.rows()) != n ||
        static_cast<std::size_t>(p.stats.covariance.cols()) != n) {
        fail(ErrorCode::InvalidArgument, "means/covariance dimensions do not match the pool");
    }
    if (!std::isfinite(p.target_return)) fail(ErrorCode::InvalidArgument, "target return is not finite");
    if (!(p.regularization >= 0.0)) fail(ErrorCode::InvalidArgument, "regularization must be >= 0");
}

bool means_degenerate(const Eigen::VectorXd& m) {
    return m.maxCoeff() - m.minCoeff() <= 0.0;
}

/// Equality-constrained minimizer over the securities in `support`; all other
/// weights are zero. When the support's means coincide the return constraint
/// is redundant (or unsatisfiable) and only the budget row is kept.
SupportSolve solve_on_support(const Eigen::MatrixXd& k, const Eigen::VectorXd& m, double target,
                              const std::vector<std::size_t>& support) {
    const auto f = static_cast<Eigen::Index>(support.size());
    Eigen::VectorXd mf(f);
    for (Eigen::Index a = 0; a < f; ++a) mf(a) = m(static_cast<Eigen::Index>(support[a]));

    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const bool drop_return = (mf.maxCoeff() - mf.minCoeff()) <= 1e-14 * scale;
    if (drop_return && std::abs(mf(0) - target) > 1e-9 * scale) {
        fail(ErrorCode::Infeasible, "securities in the support all have mean " + std::to_string(mf(0)));
    }
    const Eigen::Index rows = f + (drop_return ? 1 : 2);

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(rows, rows);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    for (Eigen::Index a = 0; a < f; ++a) {
        for (Eigen::Index b = 0; b < f; ++b) {
            kkt(a, b) = 2.0 * k(static_cast<Eigen::Index>(support[a]), static_cast<Eigen::Index>(support[b]));
        }
    }
    Eigen::Index row = f;
    if (!drop_return) {
        kkt.block(row, 0, 1, f) = mf.transpose();
        kkt.block(0, row, f, 1) = -mf;
        rhs(row) = target;
        ++row;
    }
    kkt.block(row, 0, 1, f).setOnes();
    kkt.block(0, row, f, 1).setConstant(-1.0);
    rhs(row) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (lu.rank() < rows) {
        fail(ErrorCode::SingularSystem,
             "bordered KKT matrix is rank deficient (" + std::to_string(lu.rank()) + " < " + std::to_string(rows) +
                 "); covariance may be singular on the constraint set, consider a ridge regularization");
    }
    Eigen::VectorXd z = lu.solve(rhs);
    z += lu.solve(rhs - kkt * z);  // one step of iterative refinement

    SupportSolve out;
    out.x = Eigen::VectorXd::Zero(m.size());
    for (Eigen::Index a = 0; a < f; ++a) out.x(static_cast<Eigen::Index>(support[a])) = z(a);
    if (drop_return) {
        out.lambda_budget = z(f);
    } else {
        out.lambda_return = z(f);
        out.lambda_budget = z(f + 1);
    }
    return out;
}

Eigen::MatrixXd solve_matrix(const PortfolioProblem& p) {
    Eigen::MatrixXd k = p.stats.covariance;
    if (p.regularization > 0.0) k.diagonal().array() += p.regularization;
    return k;
}

PortfolioSolution finish(const PortfolioProblem& p, const SupportSolve& s, std::vector<std::size_t> active) {
    PortfolioSolution sol;
    sol.securities = p.stats.securities;
    sol.weights = s.x;
    sol.variance = s.x.dot(p.stats.covariance * s.x);
    sol.target_return = p.target_return;
    sol.multipliers = {s.lambda_return, s.lambda_budget};
    sol.active_bounds = std::move(active);
    return sol;
}

}  // namespace

double PortfolioSolution::risk() const {
    return std::sqrt(std::max(variance, 0.0));
}

double target_return(const market::AssetStats& stats, double rho) {
    if (stats.means.size() < 2) fail(ErrorCode::InvalidArgument, "a pool needs at least 2 securities");
    if (!(rho >= 0.0 && rho <= 1.0)) fail(ErrorCode::InvalidArgument, "rho must lie in [0, 1]");
    const double lo = stats.means.minCoeff();
    const double hi = stats.means.maxCoeff();
    if (hi - lo <= 0.0) fail(ErrorCode::DegenerateInterval, "all mean returns equal " + std::to_string(lo));
    return lo + rho * (hi - lo);
}

PortfolioSolution solve_equality_qp(const PortfolioProblem& problem) {
    validate(problem);
    if (means_degenerate(problem.stats.means)) {
        fail(ErrorCode::DegenerateInterval, "all mean returns are equal; the return constraint is degenerate");
    }
    std::vector<std::size_t> all(problem.stats.securities.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return finish(problem, solve_on_support(solve_matrix(problem), problem.stats.means, problem.target_return, all), {});
}

PortfolioSolution solve_long_only(const PortfolioProblem& problem) {
    validate(problem);
    const auto& m = problem.stats.means;
    const auto n = static_cast<std::size_t>(m.size());
    if (means_degenerate(m)) {
        fail(ErrorCode::DegenerateInterval, "all mean returns are equal; the return constraint is degenerate");
    }

    Eigen::Index lo_idx = 0;
    Eigen::Index hi_idx = 0;
    const double lo = m.minCoeff(&lo_idx);
    const double hi = m.maxCoeff(&hi_idx);
    const double target = problem.target_return;
    const double slack = 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
    if (target < lo - slack || target > hi + slack) {
        fail(ErrorCode::Infeasible, "target return " + std::to_string(target) + " outside long-only range [" +
                                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }

    const Eigen::MatrixXd k = solve_matrix(problem);

    // Bounds inactive: the equality solution is the answer.
    try {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        auto full = solve_on_support(k, m, target, all);
        if (full.x.minCoeff() >= -kNegativeWeightTol) return finish(problem, full, {});
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularSystem) throw;
    }

    // Feasible start on the edge between the lowest- and highest-mean securities.
    std::vector<bool> free(n, false);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    const double t = std::clamp((hi - target) / (hi - lo), 0.0, 1.0);
    x(lo_idx) = t;
    x(hi_idx) = 1.0 - t;
    free[static_cast<std::size_t>(lo_idx)] = true;
    free[static_cast<std::size_t>(hi_idx)] = true;

    const std::size_t max_iter = 50 * n + 100;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        std::vector<std::size_t> support;
        for (std::size_t i = 0; i < n; ++i) {
            if (free[i]) support.push_back(i);
        }
        const auto eq = solve_on_support(k, m, target, support);
        const Eigen::VectorXd step = eq.x - x;

        if (step.cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, x.cwiseAbs().maxCoeff())) {
            // Stationary on the working set: check the bound multipliers.
            const Eigen::VectorXd grad = 2.0 * (k * eq.x);
            const double mult_scale = std::max(1.0, grad.cwiseAbs().maxCoeff());
            std::size_t release = n;
            double most_negative = -kMultiplierTol * mult_scale;
            for (std::size_t i = 0; i < n; ++i) {
                if (free[i]) continue;
                const auto ii = static_cast<Eigen::Index>(i);
                const double mu = grad(ii) - eq.lambda_return * m(ii) - eq.lambda_budget;
                if (mu < most_negative) {
                    most_negative = mu;
                    release = i;
                }
            }
            if (release == n) {
                std::vector<std::size_t> active;
                Eigen::VectorXd clean = eq.x;
                for (std::size_t i = 0; i < n; ++i) {
                    if (!free[i]) {
                        active.push_back(i);
                        clean(static_cast<Eigen::Index>(i)) = 0.0;
                    }
                }
                return finish(problem, SupportSolve{clean, eq.lambda_return, eq.lambda_budget}, std::move(active));
            }
            free[release] = true;
            x = eq.x;
            continue;
        }

        // Longest step along `step` that keeps every free weight nonnegative.
        double alpha = 1.0;
        std::size_t blocking = n;
        for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            if (!free[i] || step(ii) >= 0.0) continue;
            const double ratio = -x(ii) / step(ii);
            if (ratio < alpha) {
                alpha = ratio;
                blocking = i;
            }
        }
        x += alpha * step;
        if (blocking != n) {
            x(static_cast<Eigen::Index>(blocking)) = 0.0;
            free[blocking] = false;
        }
    }
    fail(ErrorCode::NoConvergence, "active-set iteration did not terminate after " + std::to_string(max_iter) + " steps");
}

PortfolioSolution solve(const PortfolioProblem& problem) {
    return problem.long_only ? solve_long_only(problem) : solve_equality_qp(problem);
}

std::vector<StageSolution> solve_trajectory(std::span<const market::AssetStats> stages, double rho, bool long_only,
                                            double regularization) {
    std::vector<StageSolution> out;
    out.reserve(stages.size());
    for (const auto& stats : stages) {
        const auto& label = stats.window.last_stage;
        try {
            PortfolioProblem problem{stats, target_return(stats, rho), long_only, regularization};
            out.push_back(StageSolution{label, solve(problem)});
        } catch (const Error& e) {
            throw e.with_context("stage " + label);
        }
    }
    return out;
}

std::vector<RiskReturnPoint> risk_return_points(const market::AssetStats& stats) {
    std::vector<RiskReturnPoint> out;
    out.reserve(stats.securities.size());
    for (std::size_t i = 0; i < stats.securities.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        out.push_back({stats.securities[i], stats.means(ii), std::sqrt(std::max(stats.covariance(ii, ii), 0.0))});
    }
    return out;
}

std::vector<FrontierPoint> pareto_frontier(std::span<const RiskReturnPoint> points) {
    const auto n = points.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].risk != points[b].risk) return points[a].risk < points[b].risk;
        return points[a].mean > points[b].mean;
    });

    std::vector<FrontierPoint> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {points[i].security_id, points[i].mean, points[i].risk, false};

    // Sweep by risk; within an equal-risk group the best mean comes first.
    bool have_lower = false;
    double best_lower = 0.0;  // max mean among strictly lower risk
    std::size_t g = 0;
    while (g < n) {
        std::size_t end = g;
        while (end < n && points[order[end]].risk == points[order[g]].risk) ++end;
        const double group_best = points[order[g]].mean;
        for (std::size_t k = g; k < end; ++k) {
            const double mean = points[order[k]].mean;
            out[order[k]].dominated = (have_lower && best_lower >= mean) || group_best > mean;
        }
        best_lower = have_lower ? std::max(best_lower, group_best) : group_best;
        have_lower = true;
        g = end;
    }
    return out;
}

std::vector<FrontierPoint> efficient_set(std::span<const FrontierPoint> flagged) {
    std::vector<FrontierPoint> out;
    for (const auto& p : flagged) {
        if (!p.dominated) out.push_back(p);
    }
    std::stable_sort(out.begin(), out.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
        if (a.risk != b.risk) return a.risk < b.risk;
        return a.mean > b.mean;
    });
    return out;
}

market::AssetStats subset(const market::AssetStats& stats, std::span<const std::size_t> indices) {
    market::AssetStats out;
    out.window = stats.window;
    const auto k = static_cast<Eigen::Index>(indices.size());
    out.means.resize(k);
    out.covariance.resize(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        const auto ia = static_cast<Eigen::Index>(indices[static_cast<std::size_t>(a)]);
        out.securities.push_back(stats.securities.at(static_cast<std::size_t>(ia)));
        out.means(a) = stats.means(ia);
        for (Eigen::Index b = 0; b < k; ++b) {
            out.covariance(a, b) = stats.covariance(ia, static_cast<Eigen::Index>(indices[static_cast<std::size_t>(b)]));
        }
    }
    return out;
}

ScreeningResult screen_pool(const market::AssetStats& stats, double rho, double epsilon, std::size_t max_iter,
                            bool long_only, double regularization) {
    if (!(epsilon >= 0.0)) fail(ErrorCode::InvalidArgument, "screening epsilon must be >= 0");
    if (stats.securities.size() < 2) fail(ErrorCode::InvalidArgument, "a pool needs at least 2 securities");

    ScreeningResult result{stats, {}};
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        auto& pool = result.pool;
        const double target = target_return(pool, rho);
        const auto sol = solve(PortfolioProblem{pool, target, long_only, regularization});
        result.log.push_back({pool.securities, sol.weights, target});

        const auto n = pool.securities.size();
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(sol.weights(static_cast<Eigen::Index>(i))) >= epsilon) keep.push_back(i);
        }
        if (keep.size() == n) break;
        if (keep.size() < 2) {
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return std::abs(sol.weights(static_cast<Eigen::Index>(a))) >
                       std::abs(sol.weights(static_cast<Eigen::Index>(b)));
            });
            keep.assign(order.begin(), order.begin() + 2);
            std::sort(keep.begin(), keep.end());
        }
        pool = subset(pool, keep);
        if (pool.securities.size() <= 2) break;
    }
    return result;
}

}  // namespace concord::portfolio
