#pragma once

#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace concord::concordance {

struct CorrelationTest {
    double r = 0.0;
    double t_stat = 0.0;   ///< |r| sqrt(n - 2) / sqrt(1 - r^2)
    double p_value = 0.0;  ///< upper tail of t with n - 2 degrees of freedom
};

/// Pearson correlation with its one-sided significance. Needs n >= 3 and
/// neither vector constant.
CorrelationTest correlation_test(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Sample standard deviation (divisor n - 1) of u - v.
double rmsd(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

struct Thresholds {
    double r_min = 0.5;
    double s_max = 0.1;
};

enum class Verdict { Concordant, Discordant };

struct ConcordanceReport {
    double r_f = 0.0;
    double t_stat = 0.0;
    double p_value = 0.0;
    double sigma_f = 0.0;
    double mean_u = 0.0;
    double mean_v = 0.0;
    std::size_t n = 0;
    Thresholds thresholds;
    Verdict verdict = Verdict::Discordant;
};

std::string to_string(Verdict verdict);

/// Concordant iff r_f >= r_min and sigma_f <= s_max.
ConcordanceReport build_report(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Thresholds& thresholds = {});

/// Plain-text block for terminals and logs.
std::string summary(const ConcordanceReport& report, const std::string& label_u = "objective",
                    const std::string& label_v = "subjective");

/// weights-CSV: `factor,weight`.
struct NamedWeights {
    std::vector<std::string> factors;
    Eigen::VectorXd weights;
};
NamedWeights parse_weights(std::istream& source);

}  // namespace concord::concordance
