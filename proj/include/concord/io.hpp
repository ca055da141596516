#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"

#include "concord/concordance.hpp"
#include "concord/expert.hpp"
#include "concord/market_data.hpp"
#include "concord/portfolio.hpp"
#include "concord/regression.hpp"

namespace concord::io {

using Json = nlohmann::ordered_json;

/// Opens a file for reading; FileNotFound when it is missing or unreadable.
std::ifstream open_input(const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// stats-CSV: header `security_id,mean,<id_1>,...,<id_n>`; row i carries the
/// mean of security i and row i of the covariance matrix.
market::AssetStats parse_stats_csv(std::istream& source);
std::string format_stats_csv(const market::AssetStats& stats);

std::string format_returns_csv(const market::ReturnPanel& panel);

Json to_json(const market::AssetStats& stats);
/// `{stage, weights: {id: fraction}, variance, m_p}` plus solver diagnostics.
Json to_json(const std::string& stage, const portfolio::PortfolioSolution& solution);
Json to_json(const std::vector<portfolio::FrontierPoint>& frontier);
Json to_json(const portfolio::ScreeningResult& screening);
/// `{coefficients, std_errors, t_stats, p_values, r_squared, weights}` plus flags.
Json to_json(const regression::RegressionFit& fit, const Eigen::VectorXd& weights,
             const std::vector<std::string>& factor_names);
Json to_json(const expert::PanelEvaluation& panel);
Json to_json(const concordance::ConcordanceReport& report);

/// Two-space indented rendering with a trailing newline.
std::string dump(const Json& json);

}  // namespace concord::io
