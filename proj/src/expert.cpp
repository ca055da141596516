#include "concord/expert.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "concord/csv.hpp"
#include "concord/error.hpp"

namespace concord::expert {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string pair_text(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void require_open_continuous(const PairedComparisonMatrix& pcm, std::string_view method) {
    if (pcm.scale != Scale::Continuous) {
        fail(ErrorCode::ScaleNotSupported, std::string(method) + " needs a continuous-scale matrix");
    }
    const auto n = pcm.entries.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double a = pcm.entries(i, j);
            if (!(a > 0.0 && a < 1.0)) {
                fail(ErrorCode::ZeroEntry, std::string(method) + ": entry " +
                                               pair_text(static_cast<std::size_t>(i + 1), static_cast<std::size_t>(j + 1)) +
                                               " = " + std::to_string(a) + " is not inside (0, 1)");
            }
        }
    }
}

WeightVector normalized(Eigen::VectorXd raw, Method method) {
    return WeightVector{raw / raw.sum(), method, {}};
}

WeightVector mean_of(std::span<const WeightVector> vectors, Method method, std::string provenance) {
    const auto n = vectors.front().weights.size();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    for (const auto& v : vectors) {
        if (v.weights.size() != n) fail(ErrorCode::InvalidArgument, "weight vectors differ in length");
        acc += v.weights;
    }
    return WeightVector{acc / static_cast<double>(vectors.size()), method, std::move(provenance)};
}

}  // namespace

std::string_view to_string(Scale scale) {
    return scale == Scale::Discrete ? "discrete" : "continuous";
}

std::string_view to_string(Method method) {
    switch (method) {
    case Method::Summation: return "summation";
    case Method::Multiplication: return "multiplication";
    case Method::Lewis: return "lewis";
    case Method::Average: return "average";
    }
    return "unknown";
}

std::vector<QuestionnaireResponse> parse_questionnaires(std::istream& source) {
    const auto table = csv::read(source);
    const std::vector<std::string> expected{"expert_id", "scale", "row_factor", "col_factor", "value"};
    if (table.header.empty()) return {};
    if (table.header != expected) {
        fail(ErrorCode::MalformedRow, "line 1: expected header expert_id,scale,row_factor,col_factor,value");
    }

    std::vector<QuestionnaireResponse> out;
    std::map<std::pair<std::string, Scale>, std::size_t> group;
    for (const auto& row : table.rows) {
        const auto where = "line " + std::to_string(row.line);
        if (row.fields.size() != 5) fail(ErrorCode::MalformedRow, where + ": expected 5 fields");

        Scale scale;
        const auto scale_text = lower(row.fields[1]);
        if (scale_text == "discrete") {
            scale = Scale::Discrete;
        } else if (scale_text == "continuous") {
            scale = Scale::Continuous;
        } else {
            fail(ErrorCode::MalformedRow, where + ": unknown scale '" + row.fields[1] + "'");
        }

        long r = 0, c = 0;
        if (!csv::parse_int(row.fields[2], r) || !csv::parse_int(row.fields[3], c)) {
            fail(ErrorCode::MalformedRow, where + ": factor indices must be integers");
        }
        const long n = static_cast<long>(kQuestionnaireFactors);
        if (r < 1 || c < 1 || r > n || c > n || r >= c) {
            fail(ErrorCode::OutOfRangeValue, where + ": pair " + pair_text(static_cast<std::size_t>(std::max(r, 0L)),
                                                                             static_cast<std::size_t>(std::max(c, 0L))) +
                                                 " must satisfy 1 <= row < col <= 5");
        }

        PairAnswer answer;
        answer.row = static_cast<std::size_t>(r);
        answer.col = static_cast<std::size_t>(c);
        if (scale == Scale::Discrete) {
            const auto v = lower(row.fields[4]);
            if (v == "yes") {
                answer.judgement = Judgement::Yes;
            } else if (v == "no") {
                answer.judgement = Judgement::No;
            } else if (v == "equal") {
                answer.judgement = Judgement::Equal;
            } else {
                fail(ErrorCode::OutOfRangeValue, where + ": discrete value must be yes, no or equal");
            }
        } else {
            if (!csv::parse_double(row.fields[4], answer.share)) {
                fail(ErrorCode::MalformedRow, where + ": unparseable share");
            }
            if (answer.share < 0.0 || answer.share > 1.0) {
                fail(ErrorCode::OutOfRangeValue, where + ": share " + row.fields[4] + " outside [0, 1]");
            }
        }

        const auto key = std::make_pair(row.fields[0], scale);
        auto it = group.find(key);
        if (it == group.end()) {
            it = group.emplace(key, out.size()).first;
            out.push_back(QuestionnaireResponse{row.fields[0], scale, {}});
        }
        out[it->second].answers.push_back(answer);
    }

    for (const auto& response : out) {
        try {
            validate(response);
        } catch (const Error& e) {
            throw e.with_context("expert " + response.expert_id + " (" + std::string(to_string(response.scale)) + ")");
        }
    }
    return out;
}

QuestionnaireResponse parse_questionnaire(std::istream& source, Scale scale) {
    const auto all = parse_questionnaires(source);
    std::vector<const QuestionnaireResponse*> match;
    for (const auto& r : all) {
        if (r.scale == scale) match.push_back(&r);
    }
    if (match.empty()) {
        fail(ErrorCode::MissingPair, "no " + std::string(to_string(scale)) + " answers; pair (1,2) missing");
    }
    if (match.size() > 1) {
        fail(ErrorCode::InvalidArgument, "more than one expert answered on the " + std::string(to_string(scale)) + " scale");
    }
    return *match.front();
}

void validate(const QuestionnaireResponse& response, std::size_t factors) {
    std::map<std::pair<std::size_t, std::size_t>, int> count;
    for (const auto& a : response.answers) {
        if (a.row < 1 || a.col > factors || a.row >= a.col) {
            fail(ErrorCode::OutOfRangeValue, "pair " + pair_text(a.row, a.col) + " is not an upper-triangle pair");
        }
        if (response.scale == Scale::Continuous && !(a.share >= 0.0 && a.share <= 1.0)) {
            fail(ErrorCode::OutOfRangeValue, "share for pair " + pair_text(a.row, a.col) + " outside [0, 1]");
        }
        if (++count[{a.row, a.col}] > 1) fail(ErrorCode::DuplicatePair, "pair " + pair_text(a.row, a.col) + " answered twice");
    }
    for (std::size_t i = 1; i <= factors; ++i) {
        for (std::size_t j = i + 1; j <= factors; ++j) {
            if (!count.contains({i, j})) fail(ErrorCode::MissingPair, "pair " + pair_text(i, j) + " not answered");
        }
    }
}

PairedComparisonMatrix build_pcm(const QuestionnaireResponse& response) {
    validate(response);
    const auto n = static_cast<Eigen::Index>(kQuestionnaireFactors);
    const bool discrete = response.scale == Scale::Discrete;
    PairedComparisonMatrix pcm;
    pcm.scale = response.scale;
    pcm.entries = Eigen::MatrixXd::Constant(n, n, discrete ? 1.0 : 0.5);
    for (const auto& a : response.answers) {
        const auto i = static_cast<Eigen::Index>(a.row - 1);
        const auto j = static_cast<Eigen::Index>(a.col - 1);
        double v = a.share;
        if (discrete) v = a.judgement == Judgement::Yes ? 2.0 : a.judgement == Judgement::No ? 0.0 : 1.0;
        pcm.entries(i, j) = v;
        pcm.entries(j, i) = (discrete ? 2.0 : 1.0) - v;
    }
    return pcm;
}

PairedComparisonMatrix make_pcm(Scale scale, const Eigen::MatrixXd& entries) {
    const auto n = entries.rows();
    if (n < 2 || entries.cols() != n) fail(ErrorCode::InvalidArgument, "a PCM must be square with at least 2 factors");
    const bool discrete = scale == Scale::Discrete;
    const double diag = discrete ? 1.0 : 0.5;
    const double total = discrete ? 2.0 : 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (entries(i, i) != diag) fail(ErrorCode::OutOfRangeValue, "diagonal entry must be " + std::to_string(diag));
        for (Eigen::Index j = 0; j < n; ++j) {
            const double a = entries(i, j);
            const auto where = "entry " + pair_text(static_cast<std::size_t>(i + 1), static_cast<std::size_t>(j + 1));
            if (discrete ? (a != 0.0 && a != 1.0 && a != 2.0) : !(a >= 0.0 && a <= 1.0)) {
                fail(ErrorCode::OutOfRangeValue, where + " out of range");
            }
            if (std::abs(a + entries(j, i) - total) > 1e-12) {
                fail(ErrorCode::OutOfRangeValue, where + " is not complementary to its transpose");
            }
        }
    }
    return PairedComparisonMatrix{scale, entries};
}

WeightVector weights_summation(const PairedComparisonMatrix& pcm) {
    // Discrete entries are small integers, so the sums (and the quotient) are exact.
    return normalized(pcm.entries.rowwise().sum(), Method::Summation);
}

WeightVector weights_multiplication(const PairedComparisonMatrix& pcm) {
    require_open_continuous(pcm, "multiplication method");
    const auto n = static_cast<double>(pcm.size());
    const Eigen::VectorXd g = (pcm.entries.array().log().rowwise().sum() / n).exp();
    return normalized(g, Method::Multiplication);
}

WeightVector weights_lewis(const PairedComparisonMatrix& pcm) {
    require_open_continuous(pcm, "Lewis method");
    const auto n = pcm.entries.rows();
    const Eigen::MatrixXd ratio = pcm.entries.array() / pcm.entries.transpose().array();

    constexpr int kMaxIter = 10000;
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    for (int iter = 0; iter < kMaxIter; ++iter) {
        Eigen::VectorXd next = ratio * w;
        next /= next.sum();
        const double change = ((next - w).array().abs() / next.array().abs()).maxCoeff();
        w = next;
        if (change <= 1e-12) return WeightVector{w, Method::Lewis, {}};
    }
    fail(ErrorCode::NoConvergence, "power iteration did not converge in 10000 steps");
}

std::vector<Triple> check_transitivity(const PairedComparisonMatrix& pcm) {
    const auto n = pcm.size();
    const bool discrete = pcm.scale == Scale::Discrete;
    auto beats = [&](std::size_t a, std::size_t b) {
        const double v = pcm.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        return discrete ? v == 2.0 : v > 0.5;
    };

    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
    std::vector<Triple> out;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                if (i == j || j == k || i == k) continue;
                if (!(beats(i, j) && beats(j, k)) || beats(i, k)) continue;
                // rotate so the smallest index leads; a 3-cycle then shows up once
                Triple t{i, j, k};
                if (j < i && j < k) t = {j, k, i};
                if (k < i && k < j) t = {k, i, j};
                if (seen.emplace(t.i, t.j, t.k).second) out.push_back(t);
            }
        }
    }
    return out;
}

WeightVector aggregate_expert(std::span<const WeightVector> vectors) {
    if (vectors.size() != 4) {
        fail(ErrorCode::WrongVectorCount, "an expert contributes 4 method vectors, got " + std::to_string(vectors.size()));
    }
    return mean_of(vectors, Method::Average, vectors.front().provenance);
}

WeightVector aggregate_panel(std::span<const WeightVector> per_expert) {
    if (per_expert.empty()) fail(ErrorCode::EmptyPanel, "no expert vectors to aggregate");
    return mean_of(per_expert, Method::Average, "panel of " + std::to_string(per_expert.size()) + " experts");
}

ExpertEvaluation evaluate_expert(const QuestionnaireResponse& discrete, const QuestionnaireResponse& continuous) {
    if (discrete.scale != Scale::Discrete || continuous.scale != Scale::Continuous) {
        fail(ErrorCode::InvalidArgument, "expected one discrete and one continuous response");
    }
    ExpertEvaluation ev;
    ev.expert_id = discrete.expert_id;
    ev.discrete = build_pcm(discrete);
    ev.continuous = build_pcm(continuous);

    auto tag = [&](WeightVector w, std::string_view scale) {
        w.provenance = ev.expert_id + "/" + std::string(scale) + "/" + std::string(to_string(w.method));
        return w;
    };
    ev.methods.push_back(tag(weights_summation(ev.discrete), "discrete"));
    ev.methods.push_back(tag(weights_summation(ev.continuous), "continuous"));
    ev.methods.push_back(tag(weights_multiplication(ev.continuous), "continuous"));
    ev.methods.push_back(tag(weights_lewis(ev.continuous), "continuous"));
    ev.combined = aggregate_expert(ev.methods);
    ev.combined.provenance = ev.expert_id;
    ev.discrete_violations = check_transitivity(ev.discrete);
    ev.continuous_violations = check_transitivity(ev.continuous);
    return ev;
}

PanelEvaluation evaluate_panel(std::span<const QuestionnaireResponse> responses) {
    std::vector<std::string> order;
    std::map<std::string, std::pair<const QuestionnaireResponse*, const QuestionnaireResponse*>> by_expert;
    for (const auto& r : responses) {
        auto [it, inserted] = by_expert.try_emplace(r.expert_id, nullptr, nullptr);
        if (inserted) order.push_back(r.expert_id);
        auto& slot = r.scale == Scale::Discrete ? it->second.first : it->second.second;
        if (slot != nullptr) {
            fail(ErrorCode::DuplicatePair, "expert " + r.expert_id + " has two " + std::string(to_string(r.scale)) + " responses");
        }
        slot = &r;
    }
    if (order.empty()) fail(ErrorCode::EmptyPanel, "no questionnaire responses");

    PanelEvaluation panel;
    std::vector<WeightVector> combined;
    for (const auto& id : order) {
        const auto& [d, c] = by_expert.at(id);
        if (d == nullptr || c == nullptr) {
            fail(ErrorCode::MissingPair, "expert " + id + " lacks a " + (d == nullptr ? "discrete" : "continuous") + " response");
        }
        try {
            panel.experts.push_back(evaluate_expert(*d, *c));
        } catch (const Error& e) {
            throw e.with_context("expert " + id);
        }
        combined.push_back(panel.experts.back().combined);
    }
    panel.final_weights = aggregate_panel(combined);

    const auto n = panel.final_weights.weights.size();
    for (std::size_t m = 0; m < 4; ++m) {
        std::vector<WeightVector> col;
        for (const auto& e : panel.experts) col.push_back(e.methods[m]);
        auto mean = aggregate_panel(col);
        mean.method = panel.experts.front().methods[m].method;
        mean.provenance = m == 0 ? "discrete" : "continuous";
        panel.method_means.push_back(std::move(mean));
    }

    panel.observations = 4 * panel.experts.size();
    panel.dispersion = Eigen::VectorXd::Zero(n);
    if (panel.observations > 1) {
        for (const auto& e : panel.experts) {
            for (const auto& w : e.methods) {
                panel.dispersion.array() += (w.weights - panel.final_weights.weights).array().square();
            }
        }
        panel.dispersion = (panel.dispersion / static_cast<double>(panel.observations - 1)).cwiseSqrt();
    }
    return panel;
}

}  // namespace concord::expert
