#include "concord/concordance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "concord/csv.hpp"
#include "concord/error.hpp"
#include "concord/student_t.hpp"

namespace concord::concordance {

CorrelationTest correlation_test(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const auto n = u.size();
    if (v.size() != n) fail(ErrorCode::InvalidArgument, "vectors differ in length");
    if (n < 3) fail(ErrorCode::InvalidArgument, "correlation test needs at least 3 factors");

    if (u.maxCoeff() == u.minCoeff() || v.maxCoeff() == v.minCoeff())
        fail(ErrorCode::ConstantVector, "a weight vector has zero variance");

    const Eigen::ArrayXd du = u.array() - u.mean();
    const Eigen::ArrayXd dv = v.array() - v.mean();
    const double suu = du.square().sum();
    const double svv = dv.square().sum();
    if (!(suu > 0.0) || !(svv > 0.0)) fail(ErrorCode::ConstantVector, "a weight vector has zero variance");

    CorrelationTest out;
    out.r = std::clamp((du * dv).sum() / std::sqrt(suu * svv), -1.0, 1.0);
    const double df = static_cast<double>(n - 2);
    const double denom = 1.0 - out.r * out.r;
    out.t_stat = denom > 0.0 ? std::abs(out.r) * std::sqrt(df) / std::sqrt(denom) : INFINITY;
    out.p_value = stats::student_t_upper_tail(out.t_stat, df);
    return out;
}

double rmsd(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const auto n = u.size();
    if (v.size() != n) fail(ErrorCode::InvalidArgument, "vectors differ in length");
    if (n < 2) fail(ErrorCode::InvalidArgument, "RMSD needs at least 2 factors");
    const Eigen::ArrayXd d = (u - v).array();
    return std::sqrt((d - d.mean()).square().sum() / static_cast<double>(n - 1));
}

std::string to_string(Verdict verdict) {
    return verdict == Verdict::Concordant ? "concordant" : "discordant";
}

ConcordanceReport build_report(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Thresholds& thresholds) {
    const auto corr = correlation_test(u, v);
    ConcordanceReport report;
    report.r_f = corr.r;
    report.t_stat = corr.t_stat;
    report.p_value = corr.p_value;
    report.sigma_f = rmsd(u, v);
    report.mean_u = u.mean();
    report.mean_v = v.mean();
    report.n = static_cast<std::size_t>(u.size());
    report.thresholds = thresholds;
    report.verdict = (report.r_f >= thresholds.r_min && report.sigma_f <= thresholds.s_max) ? Verdict::Concordant
                                                                                           : Verdict::Discordant;
    return report;
}

std::string summary(const ConcordanceReport& r, const std::string& label_u, const std::string& label_v) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "concordance (%s vs %s, n = %zu)\n"
                  "  correlation r_f = %.4f\n"
                  "  t statistic     = %.4f\n"
                  "  P (one-sided)   = %.4f\n"
                  "  RMSD sigma_f    = %.4f\n"
                  "  means           = %.4f / %.4f\n"
                  "  verdict         = %s (r_min %.3g, s_max %.3g)\n",
                  label_u.c_str(), label_v.c_str(), r.n, r.r_f, r.t_stat, r.p_value, r.sigma_f, r.mean_u, r.mean_v,
                  to_string(r.verdict).c_str(), r.thresholds.r_min, r.thresholds.s_max);
    return buf;
}

NamedWeights parse_weights(std::istream& source) {
    const auto table = csv::read(source);
    if (table.header != std::vector<std::string>{"factor", "weight"}) {
        fail(ErrorCode::MalformedRow, "line 1: expected header factor,weight");
    }
    NamedWeights out;
    std::vector<double> values;
    for (const auto& row : table.rows) {
        double w = 0.0;
        if (row.fields.size() != 2 || !csv::parse_double(row.fields[1], w)) {
            fail(ErrorCode::MalformedRow, "line " + std::to_string(row.line) + ": expected factor,weight");
        }
        out.factors.push_back(row.fields[0]);
        values.push_back(w);
    }
    out.weights = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    return out;
}

}  // namespace concord::concordance
