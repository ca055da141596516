#pragma once

#include <chrono>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace concord::market {

/// One trading-session quote. Prices and nominal (par value) share a currency.
struct SessionRecord {
    std::string security_id;
    std::chrono::year_month_day session_date;
    double price = 0.0;
    double nominal = 0.0;
};

/// Per-stage profitability of each security, in percent of nominal.
struct ReturnPanel {
    std::vector<std::string> securities;  ///< n columns
    std::vector<std::string> stages;      ///< S rows, strictly increasing labels
    Eigen::MatrixXd returns;              ///< S x n

    std::size_t security_count() const { return securities.size(); }
    std::size_t stage_count() const { return stages.size(); }
};

/// Range of stages a set of statistics was estimated over.
struct StageWindow {
    std::string first_stage;
    std::string last_stage;
    std::size_t stage_count = 0;
};

struct AssetStats {
    std::vector<std::string> securities;
    Eigen::VectorXd means;       ///< percent
    Eigen::MatrixXd covariance;  ///< percent^2, symmetric
    StageWindow window;
};

/// Maps a session date to a quarter label `YYYYQn`. With a fiscal offset of
/// k months the fiscal year starts k months after January.
struct QuarterCalendar {
    int fiscal_offset_months = 0;

    std::string label(const std::chrono::year_month_day& date) const;
    /// Monotone integer key, consecutive for consecutive quarters.
    long ordinal(const std::chrono::year_month_day& date) const;
    static std::string label_from_ordinal(long ordinal);
};

/// Parses quotes-CSV (`security_id,session_date,price,nominal`).
std::vector<SessionRecord> parse_quotes(std::istream& source);

/// Unweighted quarterly mean of 100 * (price - nominal) / nominal.
/// Securities keep first-appearance order; every security must trade in every
/// quarter between the earliest and latest session overall.
ReturnPanel quarterly_returns(std::span<const SessionRecord> sessions,
                              const QuarterCalendar& calendar = {});

/// Drops the first `drop_prefix` stages.
ReturnPanel select_window(const ReturnPanel& panel, std::size_t drop_prefix);

/// Stages [first, first + count).
ReturnPanel slice_stages(const ReturnPanel& panel, std::size_t first, std::size_t count);

/// Residuals of the least-squares line a + b*t, t = 1..S. Requires S >= 3.
std::vector<double> detrend(std::span<const double> series);

/// Means from raw returns; sample covariance (divisor S - 1) of detrended
/// residuals. Requires S >= 3.
AssetStats compute_stats(const ReturnPanel& panel);

}  // namespace concord::market
