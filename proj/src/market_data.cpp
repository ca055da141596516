#include "concord/market_data.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "concord/csv.hpp"
#include "concord/error.hpp"

namespace concord::market {

namespace {

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

bool parse_iso_date(std::string_view text, std::chrono::year_month_day& out) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
    long y = 0, m = 0, d = 0;
    if (!csv::parse_int(text.substr(0, 4), y) || !csv::parse_int(text.substr(5, 2), m) ||
        !csv::parse_int(text.substr(8, 2), d)) {
        return false;
    }
    out = std::chrono::year_month_day{std::chrono::year{static_cast<int>(y)},
                                      std::chrono::month{static_cast<unsigned>(m)},
                                      std::chrono::day{static_cast<unsigned>(d)}};
    return out.ok();
}

}  // namespace

long QuarterCalendar::ordinal(const std::chrono::year_month_day& date) const {
    const long months = static_cast<long>(static_cast<int>(date.year())) * 12 +
                        static_cast<long>(static_cast<unsigned>(date.month())) - 1 - fiscal_offset_months;
    return floor_div(months, 3);
}

std::string QuarterCalendar::label_from_ordinal(long ordinal) {
    const long year = floor_div(ordinal, 4);
    const long quarter = ordinal - year * 4 + 1;
    return std::to_string(year) + "Q" + std::to_string(quarter);
}

std::string QuarterCalendar::label(const std::chrono::year_month_day& date) const {
    return label_from_ordinal(ordinal(date));
}

std::vector<SessionRecord> parse_quotes(std::istream& source) {
    const auto table = csv::read(source);
    if (table.header.empty()) return {};
    const std::vector<std::string> expected{"security_id", "session_date", "price", "nominal"};
    if (table.header != expected) {
        fail(ErrorCode::MalformedRow, "line 1: expected header security_id,session_date,price,nominal");
    }

    std::vector<SessionRecord> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        const auto where = "line " + std::to_string(row.line);
        if (row.fields.size() != 4) {
            fail(ErrorCode::MalformedRow, where + ": expected 4 fields, got " + std::to_string(row.fields.size()));
        }
        SessionRecord rec;
        rec.security_id = row.fields[0];
        if (rec.security_id.empty()) fail(ErrorCode::MalformedRow, where + ": empty security_id");
        if (!parse_iso_date(row.fields[1], rec.session_date)) {
            fail(ErrorCode::MalformedRow, where + ": bad date '" + row.fields[1] + "'");
        }
        if (!csv::parse_double(row.fields[2], rec.price) || !csv::parse_double(row.fields[3], rec.nominal)) {
            fail(ErrorCode::MalformedRow, where + ": unparseable number");
        }
        if (rec.price <= 0.0) fail(ErrorCode::NonPositivePrice, where + ": price " + row.fields[2]);
        if (rec.nominal <= 0.0) fail(ErrorCode::NonPositivePrice, where + ": nominal " + row.fields[3]);
        records.push_back(std::move(rec));
    }
    return records;
}

ReturnPanel quarterly_returns(std::span<const SessionRecord> sessions, const QuarterCalendar& calendar) {
    ReturnPanel panel;
    if (sessions.empty()) return panel;

    std::map<std::string, std::size_t> column;
    long first = calendar.ordinal(sessions.front().session_date);
    long last = first;
    for (const auto& s : sessions) {
        if (column.emplace(s.security_id, panel.securities.size()).second) {
            panel.securities.push_back(s.security_id);
        }
        const long q = calendar.ordinal(s.session_date);
        first = std::min(first, q);
        last = std::max(last, q);
    }

    const auto n = panel.securities.size();
    const auto stages = static_cast<std::size_t>(last - first + 1);
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(stages, n);
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(stages, n);
    for (const auto& s : sessions) {
        const auto t = static_cast<std::size_t>(calendar.ordinal(s.session_date) - first);
        const auto i = column.at(s.security_id);
        sums(t, i) += 100.0 * (s.price - s.nominal) / s.nominal;
        counts(t, i) += 1;
    }

    panel.stages.reserve(stages);
    for (std::size_t t = 0; t < stages; ++t) {
        panel.stages.push_back(QuarterCalendar::label_from_ordinal(first + static_cast<long>(t)));
    }
    panel.returns.resize(stages, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < stages; ++t) {
            if (counts(t, i) == 0) {
                fail(ErrorCode::MissingQuarter,
                     "security " + panel.securities[i] + " has no sessions in " + panel.stages[t]);
            }
            panel.returns(t, i) = sums(t, i) / counts(t, i);
        }
    }
    return panel;
}

ReturnPanel slice_stages(const ReturnPanel& panel, std::size_t first, std::size_t count) {
    if (first + count > panel.stage_count()) {
        fail(ErrorCode::InvalidArgument, "stage slice out of range");
    }
    ReturnPanel out;
    out.securities = panel.securities;
    out.stages.assign(panel.stages.begin() + static_cast<std::ptrdiff_t>(first),
                      panel.stages.begin() + static_cast<std::ptrdiff_t>(first + count));
    out.returns = panel.returns.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
    return out;
}

ReturnPanel select_window(const ReturnPanel& panel, std::size_t drop_prefix) {
    const auto stages = panel.stage_count();
    if (drop_prefix > stages || stages - drop_prefix < 2) {
        fail(ErrorCode::WindowTooSmall, "dropping " + std::to_string(drop_prefix) + " of " +
                                            std::to_string(stages) + " stages leaves fewer than 2");
    }
    return slice_stages(panel, drop_prefix, stages - drop_prefix);
}

std::vector<double> detrend(std::span<const double> series) {
    const auto s = series.size();
    if (s < 3) fail(ErrorCode::SeriesTooShort, "detrending needs at least 3 points, got " + std::to_string(s));

    const double mid = (static_cast<double>(s) + 1.0) / 2.0;
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(s);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
        const double tc = static_cast<double>(k + 1) - mid;
        sxy += tc * (series[k] - mean);
        sxx += tc * tc;
    }
    const double slope = sxy / sxx;

    std::vector<double> residuals(s);
    for (std::size_t k = 0; k < s; ++k) {
        const double tc = static_cast<double>(k + 1) - mid;
        residuals[k] = (series[k] - mean) - slope * tc;
    }
    return residuals;
}

AssetStats compute_stats(const ReturnPanel& panel) {
    const auto s = panel.stage_count();
    const auto n = panel.security_count();
    if (s < 3) fail(ErrorCode::SeriesTooShort, "statistics need at least 3 stages, got " + std::to_string(s));

    AssetStats stats;
    stats.securities = panel.securities;
    stats.window = StageWindow{panel.stages.front(), panel.stages.back(), s};
    stats.means = panel.returns.colwise().mean().transpose();

    Eigen::MatrixXd resid(s, n);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd col = panel.returns.col(static_cast<Eigen::Index>(i));
        const auto r = detrend(std::span<const double>(col.data(), s));
        for (std::size_t t = 0; t < s; ++t) resid(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = r[t];
    }
    const Eigen::RowVectorXd centre = resid.colwise().mean();
    resid.rowwise() -= centre;

    stats.covariance.resize(n, n);
    const double denom = static_cast<double>(s - 1);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
        for (Eigen::Index j = i; j < static_cast<Eigen::Index>(n); ++j) {
            const double c = resid.col(i).dot(resid.col(j)) / denom;
            stats.covariance(i, j) = c;
            stats.covariance(j, i) = c;
        }
    }
    return stats;
}

}  // namespace concord::market
