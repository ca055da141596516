#include "concord/io.hpp"

#include <array>
#include <cstdio>
#include <sstream>

#include <openssl/evp.h>

#include "concord/csv.hpp"
#include "concord/error.hpp"

namespace concord::io {

namespace {

Json vector_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Json weight_map(const std::vector<std::string>& ids, const Eigen::VectorXd& w) {
    Json out = Json::object();
    for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = w(static_cast<Eigen::Index>(i));
    return out;
}

Json triples_json(const std::vector<expert::Triple>& triples) {
    Json out = Json::array();
    for (const auto& t : triples) out.push_back({t.i + 1, t.j + 1, t.k + 1});
    return out;
}

Json matrix_json(const Eigen::MatrixXd& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
    return out;
}

}  // namespace

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::FileNotFound, path.string());
    return in;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + path.string());
    out << text;
}

std::string sha256_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::array<char, 8192> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    EVP_MD_CTX_free(ctx);

    std::string hex;
    char byte[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(byte, sizeof byte, "%02x", md[i]);
        hex += byte;
    }
    return hex;
}

market::AssetStats parse_stats_csv(std::istream& source) {
    const auto table = csv::read(source);
    if (table.header.size() < 4 || table.header[0] != "security_id" || table.header[1] != "mean") {
        fail(ErrorCode::MalformedRow, "line 1: expected header security_id,mean,<id_1>,...,<id_n>");
    }
    const auto n = table.header.size() - 2;
    if (table.rows.size() != n) {
        fail(ErrorCode::MalformedRow, "expected " + std::to_string(n) + " security rows, got " + std::to_string(table.rows.size()));
    }

    market::AssetStats stats;
    stats.means.resize(static_cast<Eigen::Index>(n));
    stats.covariance.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = table.rows[i];
        const auto where = "line " + std::to_string(row.line);
        if (row.fields.size() != n + 2) fail(ErrorCode::MalformedRow, where + ": wrong field count");
        if (row.fields[0] != table.header[i + 2]) {
            fail(ErrorCode::MalformedRow, where + ": row id " + row.fields[0] + " does not match column " + table.header[i + 2]);
        }
        stats.securities.push_back(row.fields[0]);
        for (std::size_t j = 0; j <= n; ++j) {
            double v = 0.0;
            if (!csv::parse_double(row.fields[j + 1], v)) fail(ErrorCode::MalformedRow, where + ": unparseable number");
            if (j == 0) {
                stats.means(static_cast<Eigen::Index>(i)) = v;
            } else {
                stats.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - 1)) = v;
            }
        }
    }
    const double scale = std::max(1.0, stats.covariance.cwiseAbs().maxCoeff());
    if ((stats.covariance - stats.covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        fail(ErrorCode::MalformedRow, "covariance block is not symmetric");
    }
    stats.window = {"", "", 0};
    return stats;
}

std::string format_stats_csv(const market::AssetStats& stats) {
    std::ostringstream out;
    out.precision(17);
    out << "security_id,mean";
    for (const auto& id : stats.securities) out << ',' << id;
    out << '\n';
    for (std::size_t i = 0; i < stats.securities.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        out << stats.securities[i] << ',' << stats.means(ii);
        for (Eigen::Index j = 0; j < stats.covariance.cols(); ++j) out << ',' << stats.covariance(ii, j);
        out << '\n';
    }
    return out.str();
}

std::string format_returns_csv(const market::ReturnPanel& panel) {
    std::string out = "stage";
    for (const auto& id : panel.securities) out += "," + id;
    out += '\n';
    for (std::size_t t = 0; t < panel.stage_count(); ++t) {
        out += panel.stages[t];
        for (Eigen::Index i = 0; i < panel.returns.cols(); ++i) {
            out += "," + csv::format6(panel.returns(static_cast<Eigen::Index>(t), i));
        }
        out += '\n';
    }
    return out;
}

Json to_json(const market::AssetStats& stats) {
    Json out;
    out["window"] = {{"first_stage", stats.window.first_stage},
                     {"last_stage", stats.window.last_stage},
                     {"stages", stats.window.stage_count}};
    out["securities"] = stats.securities;
    out["means"] = vector_json(stats.means);
    out["covariance"] = matrix_json(stats.covariance);
    return out;
}

Json to_json(const std::string& stage, const portfolio::PortfolioSolution& solution) {
    Json out;
    out["stage"] = stage;
    out["weights"] = weight_map(solution.securities, solution.weights);
    out["variance"] = solution.variance;
    out["m_p"] = solution.target_return;
    out["multipliers"] = {solution.multipliers[0], solution.multipliers[1]};
    Json active = Json::array();
    for (auto i : solution.active_bounds) active.push_back(solution.securities[i]);
    out["active_bounds"] = active;
    return out;
}

Json to_json(const std::vector<portfolio::FrontierPoint>& frontier) {
    Json out = Json::array();
    for (const auto& p : frontier) {
        out.push_back({{"security_id", p.security_id}, {"mean", p.mean}, {"risk", p.risk}, {"dominated", p.dominated}});
    }
    return out;
}

Json to_json(const portfolio::ScreeningResult& screening) {
    Json out;
    out["final_pool"] = screening.pool.securities;
    Json passes = Json::array();
    for (const auto& pass : screening.log) {
        passes.push_back({{"pool", pass.pool}, {"m_p", pass.target_return}, {"weights", weight_map(pass.pool, pass.weights)}});
    }
    out["passes"] = passes;
    return out;
}

Json to_json(const regression::RegressionFit& fit, const Eigen::VectorXd& weights,
             const std::vector<std::string>& factor_names) {
    Json out;
    out["coefficients"] = vector_json(fit.coefficients);
    out["std_errors"] = vector_json(fit.std_errors);
    out["t_stats"] = vector_json(fit.t_stats);
    out["p_values"] = vector_json(fit.p_values);
    out["r_squared"] = fit.r_squared;
    out["weights"] = weight_map(factor_names, weights);
    out["alpha"] = fit.alpha;
    out["significant"] = fit.significant;
    out["degrees_of_freedom"] = fit.degrees_of_freedom;
    Json ranking = Json::array();
    for (const auto& r : regression::rank_factors(weights, factor_names)) ranking.push_back({r.name, r.weight});
    out["ranking"] = ranking;
    return out;
}

Json to_json(const expert::PanelEvaluation& panel) {
    Json out;
    Json experts = Json::array();
    for (const auto& e : panel.experts) {
        Json methods = Json::object();
        for (const auto& w : e.methods) methods[w.provenance.substr(e.expert_id.size() + 1)] = vector_json(w.weights);
        experts.push_back({{"expert_id", e.expert_id},
                           {"methods", methods},
                           {"combined", vector_json(e.combined.weights)},
                           {"transitivity",
                            {{"discrete", triples_json(e.discrete_violations)},
                             {"continuous", triples_json(e.continuous_violations)}}}});
    }
    out["experts"] = experts;
    Json methods = Json::object();
    for (const auto& w : panel.method_means) {
        methods[w.provenance + "/" + std::string(expert::to_string(w.method))] = vector_json(w.weights);
    }
    out["method_means"] = methods;
    out["final"] = vector_json(panel.final_weights.weights);
    Json ranking = Json::array();
    for (const auto& r : regression::rank_factors(panel.final_weights.weights)) ranking.push_back({r.name, r.weight});
    out["ranking"] = ranking;
    out["dispersion"] = vector_json(panel.dispersion);
    out["observations"] = panel.observations;
    return out;
}

Json to_json(const concordance::ConcordanceReport& report) {
    Json out;
    out["r_f"] = report.r_f;
    out["t_stat"] = report.t_stat;
    out["p_value"] = report.p_value;
    out["sigma_f"] = report.sigma_f;
    out["D_f"] = report.sigma_f * report.sigma_f;
    out["mean_u"] = report.mean_u;
    out["mean_v"] = report.mean_v;
    out["n"] = report.n;
    out["thresholds"] = {{"r_min", report.thresholds.r_min}, {"s_max", report.thresholds.s_max}};
    out["verdict"] = concordance::to_string(report.verdict);
    return out;
}

std::string dump(const Json& json) {
    return json.dump(2) + "\n";
}

}  // namespace concord::io
