#include "concord/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "concord/csv.hpp"
#include "concord/error.hpp"
#include "concord/student_t.hpp"

namespace concord::regression {

std::vector<std::string> default_factor_names() {
    return {"f1", "f2", "f3", "f4", "f5"};
}

FactorPanel normalize_factors(const Eigen::MatrixXd& raw, const Eigen::VectorXd& response,
                              std::vector<std::string> stages, std::vector<std::string> factor_names) {
    const auto s = raw.rows();
    const auto p = raw.cols();
    if (s < 2) fail(ErrorCode::TooFewStages, "normalization needs at least 2 stages");
    if (response.size() != s) fail(ErrorCode::InvalidArgument, "response length does not match factor rows");
    if (stages.empty()) {
        for (Eigen::Index t = 0; t < s; ++t) stages.push_back(std::to_string(t + 1));
    }
    if (factor_names.empty()) {
        for (Eigen::Index i = 0; i < p; ++i) factor_names.push_back("f" + std::to_string(i + 1));
    }
    if (static_cast<Eigen::Index>(stages.size()) != s || static_cast<Eigen::Index>(factor_names.size()) != p) {
        fail(ErrorCode::InvalidArgument, "label counts do not match the factor matrix");
    }

    FactorPanel panel;
    panel.stages = std::move(stages);
    panel.factor_names = std::move(factor_names);
    panel.response = response;
    panel.normalized.resize(s, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        const double lo = raw.col(i).minCoeff();
        const double hi = raw.col(i).maxCoeff();
        if (!(hi > lo)) {
            fail(ErrorCode::DegenerateFactor,
                 "factor " + std::to_string(i + 1) + " (" + panel.factor_names[static_cast<std::size_t>(i)] + ") is constant");
        }
        panel.raw_bounds.push_back({lo, hi});
        for (Eigen::Index t = 0; t < s; ++t) {
            const double v = raw(t, i);
            // pin the extremes so the [0, 1] invariant holds exactly
            panel.normalized(t, i) = v == lo ? 0.0 : v == hi ? 1.0 : (v - lo) / (hi - lo);
        }
    }
    return panel;
}

RegressionFit ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& response, double alpha) {
    const auto s = design.rows();
    const auto k = design.cols() + 1;
    if (response.size() != s) fail(ErrorCode::InvalidArgument, "response length does not match design rows");
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    if (s <= k) {
        fail(ErrorCode::TooFewStages, std::to_string(s) + " stages for " + std::to_string(k) + " parameters");
    }

    const double mean = response.mean();
    const double sst = (response.array() - mean).square().sum();
    if (!(sst > 0.0)) fail(ErrorCode::ZeroVariance, "response is constant; R^2 is undefined");

    Eigen::MatrixXd x(s, k);
    x.col(0).setOnes();
    x.rightCols(k - 1) = design;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < k) {
        fail(ErrorCode::RankDeficient, "design matrix has rank " + std::to_string(qr.rank()) + " < " + std::to_string(k));
    }

    RegressionFit fit;
    fit.alpha = alpha;
    fit.coefficients = qr.solve(response);
    fit.residuals = response - x * fit.coefficients;
    const double ssr = fit.residuals.squaredNorm();
    fit.r_squared = 1.0 - ssr / sst;
    fit.degrees_of_freedom = static_cast<std::size_t>(s - k);

    // (X'X)^-1 = P R^-1 R^-T P' for X P = Q R
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd perm = qr.colsPermutation();
    const Eigen::MatrixXd xtx_inv = perm * (r_inv * r_inv.transpose()) * perm.transpose();

    const double s2 = ssr / static_cast<double>(fit.degrees_of_freedom);
    const double df = static_cast<double>(fit.degrees_of_freedom);
    fit.std_errors.resize(k);
    fit.t_stats.resize(k);
    fit.p_values.resize(k);
    fit.significant.resize(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
        const double se = std::sqrt(std::max(s2 * xtx_inv(j, j), 0.0));
        const double c = fit.coefficients(j);
        fit.std_errors(j) = se;
        if (se > 0.0) {
            fit.t_stats(j) = c / se;
            fit.p_values(j) = stats::student_t_two_sided(fit.t_stats(j), df);
        } else {
            fit.t_stats(j) = c == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), c);
            fit.p_values(j) = c == 0.0 ? 1.0 : 0.0;
        }
        fit.significant[static_cast<std::size_t>(j)] = fit.p_values(j) < alpha;
    }
    return fit;
}

RegressionFit ols_fit(const FactorPanel& panel, double alpha) {
    return ols_fit(panel.normalized, panel.response, alpha);
}

Eigen::VectorXd market_weights(const Eigen::VectorXd& slopes) {
    const double total = slopes.sum();
    if (total == 0.0 || !std::isfinite(total)) fail(ErrorCode::ZeroSlopeSum, "slopes sum to zero");
    return slopes / total;
}

Eigen::VectorXd market_weights(const RegressionFit& fit) {
    return market_weights(fit.slopes());
}

std::vector<RankedFactor> rank_factors(const Eigen::VectorXd& weights, const std::vector<std::string>& names) {
    std::vector<RankedFactor> out;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        out.push_back({ui < names.size() ? names[ui] : "f" + std::to_string(i + 1), weights(i), ui});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RankedFactor& a, const RankedFactor& b) { return a.weight > b.weight; });
    return out;
}

RawFactors parse_factors(std::istream& source) {
    const auto table = csv::read(source);
    if (table.header.size() < 2 || table.header.front() != "stage") {
        fail(ErrorCode::MalformedRow, "line 1: expected header stage,f1,...");
    }
    RawFactors out;
    out.factor_names.assign(table.header.begin() + 1, table.header.end());
    const auto p = out.factor_names.size();
    out.values.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(p));
    std::set<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto where = "line " + std::to_string(row.line);
        if (row.fields.size() != p + 1) fail(ErrorCode::MalformedRow, where + ": wrong field count");
        if (!seen.insert(row.fields[0]).second) fail(ErrorCode::MalformedRow, where + ": duplicate stage " + row.fields[0]);
        out.stages.push_back(row.fields[0]);
        for (std::size_t i = 0; i < p; ++i) {
            double v = 0.0;
            if (!csv::parse_double(row.fields[i + 1], v)) fail(ErrorCode::MalformedRow, where + ": unparseable number");
            out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return out;
}

StageSeries parse_response(std::istream& source) {
    const auto table = csv::read(source);
    if (table.header.size() != 2 || table.header[0] != "stage") {
        fail(ErrorCode::MalformedRow, "line 1: expected header stage,x1");
    }
    StageSeries out;
    for (const auto& row : table.rows) {
        const auto where = "line " + std::to_string(row.line);
        double v = 0.0;
        if (row.fields.size() != 2 || !csv::parse_double(row.fields[1], v)) {
            fail(ErrorCode::MalformedRow, where + ": expected stage,value");
        }
        out.stages.push_back(row.fields[0]);
        out.values.push_back(v);
    }
    return out;
}

}  // namespace concord::regression
