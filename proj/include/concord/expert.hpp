#pragma once

#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace concord::expert {

inline constexpr std::size_t kQuestionnaireFactors = 5;

enum class Scale { Discrete, Continuous };
enum class Judgement { Yes, No, Equal };
enum class Method { Summation, Multiplication, Lewis, Average };

std::string_view to_string(Scale scale);
std::string_view to_string(Method method);

/// One questionnaire line: is `row` more significant than `col` (discrete),
/// or what share of significance goes to `row` (continuous). 1-based, row < col.
struct PairAnswer {
    std::size_t row = 0;
    std::size_t col = 0;
    Judgement judgement = Judgement::Equal;  ///< discrete scale
    double share = 0.5;                      ///< continuous scale
};

struct QuestionnaireResponse {
    std::string expert_id;
    Scale scale = Scale::Discrete;
    std::vector<PairAnswer> answers;
};

/// Discrete: diagonal 1, entries in {0, 1, 2}, a_ji = 2 - a_ij.
/// Continuous: diagonal 0.5, entries in [0, 1], a_ji = 1 - a_ij.
struct PairedComparisonMatrix {
    Scale scale = Scale::Discrete;
    Eigen::MatrixXd entries;

    std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
};

struct WeightVector {
    Eigen::VectorXd weights;
    Method method = Method::Summation;
    std::string provenance;
};

/// questionnaire-CSV: `expert_id,scale,row_factor,col_factor,value`. Rows are
/// grouped by (expert_id, scale) in order of first appearance; each group must
/// cover all 10 pairs of the 5 factors exactly once.
std::vector<QuestionnaireResponse> parse_questionnaires(std::istream& source);

/// The single response of the given scale in `source`.
QuestionnaireResponse parse_questionnaire(std::istream& source, Scale scale);

/// Checks pair coverage and value ranges; throws MissingPair, DuplicatePair or OutOfRangeValue.
void validate(const QuestionnaireResponse& response, std::size_t factors = kQuestionnaireFactors);

PairedComparisonMatrix build_pcm(const QuestionnaireResponse& response);

/// Wraps a ready matrix after checking the scale's invariants.
PairedComparisonMatrix make_pcm(Scale scale, const Eigen::MatrixXd& entries);

/// Row sums over the grand total.
WeightVector weights_summation(const PairedComparisonMatrix& pcm);

/// Normalized geometric row means. Continuous only, entries strictly inside (0, 1).
WeightVector weights_multiplication(const PairedComparisonMatrix& pcm);

/// Principal right eigenvector of r_ij = a_ij / a_ji by power iteration.
/// Continuous only, entries strictly inside (0, 1).
WeightVector weights_lewis(const PairedComparisonMatrix& pcm);

/// 0-based factor indices; i beats j and j beats k but i does not beat k.
struct Triple {
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t k = 0;
    bool operator==(const Triple&) const = default;
};

/// Ordinal transitivity violations. Rotations of one cycle are reported once,
/// starting from the smallest index.
std::vector<Triple> check_transitivity(const PairedComparisonMatrix& pcm);

/// Mean of the four per-method vectors of one expert.
WeightVector aggregate_expert(std::span<const WeightVector> vectors);

/// Mean across experts.
WeightVector aggregate_panel(std::span<const WeightVector> per_expert);

struct ExpertEvaluation {
    std::string expert_id;
    PairedComparisonMatrix discrete;
    PairedComparisonMatrix continuous;
    std::vector<WeightVector> methods;  ///< discrete summation, continuous summation, multiplication, Lewis
    WeightVector combined;
    std::vector<Triple> discrete_violations;
    std::vector<Triple> continuous_violations;
};

struct PanelEvaluation {
    std::vector<ExpertEvaluation> experts;
    std::vector<WeightVector> method_means;  ///< per method, averaged over experts
    WeightVector final_weights;
    Eigen::VectorXd dispersion;  ///< per factor, sample std over all expert x method vectors
    std::size_t observations = 0;
};

ExpertEvaluation evaluate_expert(const QuestionnaireResponse& discrete, const QuestionnaireResponse& continuous);

/// Pairs discrete and continuous responses by expert id (first-appearance order).
PanelEvaluation evaluate_panel(std::span<const QuestionnaireResponse> responses);

}  // namespace concord::expert
