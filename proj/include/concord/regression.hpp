#pragma once

#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace concord::regression {

inline constexpr std::size_t kFactorCount = 5;

/// f1 fixed assets total, f2 gross payroll, f3 net income total,
/// f4 profit margin, f5 major produce throughput rate.
std::vector<std::string> default_factor_names();

struct FactorBounds {
    double min = 0.0;
    double max = 0.0;
};

/// Min-max normalized factors plus the response, one row per stage.
struct FactorPanel {
    std::vector<std::string> stages;
    std::vector<std::string> factor_names;
    Eigen::MatrixXd normalized;  ///< S x p, every column spans exactly [0, 1]
    Eigen::VectorXd response;    ///< S
    std::vector<FactorBounds> raw_bounds;
};

/// Maps each raw column onto [0, 1] by its own min and max. Stage labels
/// default to "1".."S" and factor names to f1..fp when not given.
FactorPanel normalize_factors(const Eigen::MatrixXd& raw, const Eigen::VectorXd& response,
                              std::vector<std::string> stages = {}, std::vector<std::string> factor_names = {});

struct RegressionFit {
    Eigen::VectorXd coefficients;  ///< intercept first, then one slope per factor
    Eigen::VectorXd std_errors;
    Eigen::VectorXd t_stats;
    Eigen::VectorXd p_values;  ///< two-sided, S - p - 1 degrees of freedom
    std::vector<bool> significant;
    double r_squared = 0.0;
    double alpha = 0.05;
    std::size_t degrees_of_freedom = 0;
    Eigen::VectorXd residuals;

    double intercept() const { return coefficients(0); }
    Eigen::VectorXd slopes() const { return coefficients.tail(coefficients.size() - 1); }
};

/// Ordinary least squares of `response` on [1 | design].
RegressionFit ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, double alpha = 0.05);

RegressionFit ols_fit(const FactorPanel& panel, double alpha = 0.05);

/// Slopes rescaled to sum to one; the intercept does not take part.
/// Negative weights are kept.
Eigen::VectorXd market_weights(const Eigen::VectorXd& slopes);
Eigen::VectorXd market_weights(const RegressionFit& fit);

struct RankedFactor {
    std::string name;
    double weight = 0.0;
    std::size_t index = 0;
};

/// Descending by weight, ties by factor index.
std::vector<RankedFactor> rank_factors(const Eigen::VectorXd& weights, const std::vector<std::string>& names = {});

/// factors-CSV: `stage,f1,f2,f3,f4,f5` with raw values.
struct RawFactors {
    std::vector<std::string> stages;
    std::vector<std::string> factor_names;
    Eigen::MatrixXd values;
};
RawFactors parse_factors(std::istream& source);

/// `stage,x1` response CSV.
struct StageSeries {
    std::vector<std::string> stages;
    std::vector<double> values;
};
StageSeries parse_response(std::istream& source);

}  // namespace concord::regression
