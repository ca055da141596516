#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "concord/concordance.hpp"
#include "concord/expert.hpp"
#include "concord/io.hpp"
#include "concord/market_data.hpp"
#include "concord/portfolio.hpp"
#include "concord/regression.hpp"

namespace concord::pipeline {

inline constexpr const char* kToolVersion = "0.1.0";

struct PipelineConfig {
    std::filesystem::path quotes;
    std::filesystem::path factors;
    std::filesystem::path questionnaires;
    std::filesystem::path response;  ///< optional `stage,x1`; otherwise x1 comes from the trajectory
    std::string company;             ///< security whose fraction is x1; empty = first in the quotes
    std::size_t drop_prefix = 9;
    std::size_t min_window = 4;
    int fiscal_offset_months = 0;
    double rho = 0.75;
    bool long_only = true;
    double regularization = 0.0;
    double epsilon = 0.01;
    std::size_t max_screen_iter = 10;
    double alpha = 0.05;
    concordance::Thresholds thresholds;
    std::filesystem::path out_dir = "out";
};

/// JSON config; relative paths resolve against the config file's directory.
/// Unknown keys are rejected.
PipelineConfig load_config(const std::filesystem::path& path);
void apply_json(PipelineConfig& config, const io::Json& json, const std::filesystem::path& base_dir = {});

/// CONCORD_* overrides; `lookup` returns the variable's value if set.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
void apply_env(PipelineConfig& config, const EnvLookup& lookup);
EnvLookup process_env();

/// Range checks; with `require_files`, every non-empty path must exist.
void validate(const PipelineConfig& config, bool require_files);

io::Json to_json(const PipelineConfig& config);

struct IngestResult {
    market::ReturnPanel full;
    market::ReturnPanel window;
    market::AssetStats window_stats;
    std::vector<market::AssetStats> stage_stats;  ///< expanding windows of at least min_window stages
};

/// Parse quotes, form quarterly returns, drop the prefix, estimate statistics.
IngestResult cmd_ingest(const PipelineConfig& config);

struct RegressionInputs {
    regression::FactorPanel panel;
    std::string response_source;
};

struct RunArtifacts {
    IngestResult ingest;
    std::vector<portfolio::StageSolution> trajectory;
    std::vector<portfolio::FrontierPoint> frontier;
    portfolio::ScreeningResult screening;
    RegressionInputs regression_inputs;
    regression::RegressionFit fit;
    Eigen::VectorXd market_weights;
    expert::PanelEvaluation experts;
    concordance::ConcordanceReport report;
    io::Json manifest;
};

/// Full run. Artifacts are written to config.out_dir stage by stage; on a
/// failure a `.partial` marker names the failing stage and the error is
/// re-raised prefixed with that stage.
RunArtifacts cmd_pipeline(const PipelineConfig& config);

/// Compares two weights-CSV files; FactorMismatch unless the factor lists agree.
concordance::ConcordanceReport cmd_compare(const std::filesystem::path& a, const std::filesystem::path& b,
                                           const concordance::Thresholds& thresholds);

/// Builds the regression panel: factors joined with x1 on stage label.
RegressionInputs join_response(const regression::RawFactors& factors, const regression::StageSeries& response,
                               std::string source);

/// x1 per stage: the company's weight in each trajectory solution.
regression::StageSeries company_fractions(const std::vector<portfolio::StageSolution>& trajectory,
                                          const std::string& company);

}  // namespace concord::pipeline
