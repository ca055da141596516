#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "concord/market_data.hpp"

namespace concord::portfolio {

/// Minimum-variance portfolio with a prescribed expected return:
///
///     minimize    x' K x
///     subject to  m' x = target_return
///                 1' x = 1
///                 x >= 0            (long_only only)
///
/// `regularization` adds a ridge to K's diagonal for the solve; the reported
/// variance always uses the unregularized K.
struct PortfolioProblem {
    market::AssetStats stats;
    double target_return = 0.0;
    bool long_only = true;
    double regularization = 0.0;
};

struct PortfolioSolution {
    std::vector<std::string> securities;
    Eigen::VectorXd weights;
    double variance = 0.0;
    double target_return = 0.0;
    /// Multipliers of the return and budget constraints in 2Kx = l0*m + l1*1 (+ bound terms).
    std::array<double, 2> multipliers{0.0, 0.0};
    /// Indices held at zero by the long-only bounds, ascending.
    std::vector<std::size_t> active_bounds;

    double risk() const;
};

/// m_min + rho * (m_max - m_min) over the pool's mean returns.
double target_return(const market::AssetStats& stats, double rho);

/// Solves the bordered KKT system; ignores `long_only`.
PortfolioSolution solve_equality_qp(const PortfolioProblem& problem);

/// Primal active-set method over the nonnegativity bounds.
PortfolioSolution solve_long_only(const PortfolioProblem& problem);

/// Dispatches on `problem.long_only`.
PortfolioSolution solve(const PortfolioProblem& problem);

struct StageSolution {
    std::string stage;
    PortfolioSolution solution;
};

/// One solve per stage with the target return recomputed from that stage's
/// mean interval. Errors are re-raised prefixed with the stage label.
std::vector<StageSolution> solve_trajectory(std::span<const market::AssetStats> stages, double rho,
                                            bool long_only, double regularization = 0.0);

struct RiskReturnPoint {
    std::string security_id;
    double mean = 0.0;
    double risk = 0.0;
};

struct FrontierPoint {
    std::string security_id;
    double mean = 0.0;
    double risk = 0.0;
    bool dominated = false;
};

/// Mean and sqrt(K_ii) per security.
std::vector<RiskReturnPoint> risk_return_points(const market::AssetStats& stats);

/// Flags every point, in input order. p is dominated when some q has
/// mean(q) >= mean(p) and risk(q) <= risk(p), one of them strictly.
std::vector<FrontierPoint> pareto_frontier(std::span<const RiskReturnPoint> points);

/// The non-dominated points of a flagged list, sorted by risk ascending
/// (ties: higher mean first, then input order).
std::vector<FrontierPoint> efficient_set(std::span<const FrontierPoint> flagged);

/// Restriction of a pool to the given security indices (in the given order).
market::AssetStats subset(const market::AssetStats& stats, std::span<const std::size_t> indices);

struct ScreeningPass {
    std::vector<std::string> pool;
    Eigen::VectorXd weights;
    double target_return = 0.0;
};

struct ScreeningResult {
    market::AssetStats pool;
    std::vector<ScreeningPass> log;
};

/// Solve, drop every security with |x_i| < epsilon, re-solve on what is left.
/// Stops when nothing is dropped, the pool is down to 2, or after max_iter
/// solves. A pass never shrinks the pool below 2: the two largest |x_i| stay.
ScreeningResult screen_pool(const market::AssetStats& stats, double rho, double epsilon,
                            std::size_t max_iter, bool long_only = true, double regularization = 0.0);

}  // namespace concord::portfolio
