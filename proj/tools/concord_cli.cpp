// concord: market-attraction factor weights vs. expert judgement.
//
//   concord ingest     --quotes q.csv [--drop-prefix 9] [--out dir]
//   concord portfolio  (--stats s.csv | --quotes q.csv) [--rho 0.75] [--long-only|--no-long-only]
//   concord regress    --factors f.csv --response x1.csv [--alpha 0.05]
//   concord expert     --questionnaires e.csv
//   concord compare    a.csv b.csv [--r-min 0.5] [--s-max 0.1]
//   concord pipeline   --config run.json
//
// Settings resolve as: defaults, then --config file, then CONCORD_* environment
// variables, then command-line flags.

#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "concord/error.hpp"
#include "concord/io.hpp"
#include "concord/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using concord::pipeline::PipelineConfig;

struct Overrides {
    std::string config;
    std::string out;
    std::optional<bool> long_only;
    std::optional<double> rho;
    std::optional<std::size_t> drop_prefix;
    std::optional<double> epsilon;
    std::optional<double> alpha;
    std::string quotes;
    std::string factors;
    std::string questionnaires;
    std::string response;
    std::string company;
    std::optional<double> r_min;
    std::optional<double> s_max;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run configuration");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_flag("--long-only{true},--no-long-only{false}", o.long_only, "Enforce nonnegative weights");
    cmd->add_option("--rho", o.rho, "Target return position in the mean interval [0, 1]");
    cmd->add_option("--drop-prefix", o.drop_prefix, "Leading quarters to exclude");
    cmd->add_option("--epsilon", o.epsilon, "Pool screening weight threshold");
    cmd->add_option("--alpha", o.alpha, "Regression significance level");
}

PipelineConfig resolve_config(const Overrides& o) {
    PipelineConfig c;
    std::string config_path = o.config;
    if (config_path.empty()) {
        if (const char* env = std::getenv("CONCORD_CONFIG")) config_path = env;
    }
    if (!config_path.empty()) c = concord::pipeline::load_config(config_path);
    concord::pipeline::apply_env(c, concord::pipeline::process_env());

    if (!o.out.empty()) c.out_dir = o.out;
    if (o.long_only) c.long_only = *o.long_only;
    if (o.rho) c.rho = *o.rho;
    if (o.drop_prefix) c.drop_prefix = *o.drop_prefix;
    if (o.epsilon) c.epsilon = *o.epsilon;
    if (o.alpha) c.alpha = *o.alpha;
    if (!o.quotes.empty()) c.quotes = o.quotes;
    if (!o.factors.empty()) c.factors = o.factors;
    if (!o.questionnaires.empty()) c.questionnaires = o.questionnaires;
    if (!o.response.empty()) c.response = o.response;
    if (!o.company.empty()) c.company = o.company;
    if (o.r_min) c.thresholds.r_min = *o.r_min;
    if (o.s_max) c.thresholds.s_max = *o.s_max;
    concord::pipeline::validate(c, true);
    return c;
}

int run_ingest(const PipelineConfig& c) {
    const auto r = concord::pipeline::cmd_ingest(c);
    concord::io::write_text(c.out_dir / "returns.csv", concord::io::format_returns_csv(r.full));
    concord::io::write_text(c.out_dir / "stats.csv", concord::io::format_stats_csv(r.window_stats));
    concord::io::write_text(c.out_dir / "stats.json", concord::io::dump(concord::io::to_json(r.window_stats)));
    std::cout << r.full.security_count() << " securities, " << r.full.stage_count() << " quarters ("
              << r.full.stages.front() << ".." << r.full.stages.back() << "), " << r.window.stage_count()
              << " retained after dropping " << c.drop_prefix << "\n";
    return 0;
}

int run_portfolio(const PipelineConfig& c, const std::string& stats_path, std::optional<double> target) {
    concord::market::AssetStats stats;
    if (!stats_path.empty()) {
        auto in = concord::io::open_input(stats_path);
        stats = concord::io::parse_stats_csv(in);
    } else {
        stats = concord::pipeline::cmd_ingest(c).window_stats;
    }
    const double m_p = target ? *target : concord::portfolio::target_return(stats, c.rho);
    const auto sol = concord::portfolio::solve({stats, m_p, c.long_only, c.regularization});
    const auto label = stats.window.last_stage.empty() ? std::string("full") : stats.window.last_stage;
    const auto json = concord::io::to_json(label, sol);

    const auto frontier = concord::portfolio::pareto_frontier(concord::portfolio::risk_return_points(stats));
    const auto screening =
        concord::portfolio::screen_pool(stats, c.rho, c.epsilon, c.max_screen_iter, c.long_only, c.regularization);
    concord::io::write_text(c.out_dir / "portfolio.json", concord::io::dump(json));
    concord::io::write_text(c.out_dir / "frontier.json", concord::io::dump(concord::io::to_json(frontier)));
    concord::io::write_text(c.out_dir / "screening.json", concord::io::dump(concord::io::to_json(screening)));
    std::cout << concord::io::dump(json);
    return 0;
}

int run_regress(const PipelineConfig& c) {
    if (c.factors.empty()) concord::fail(concord::ErrorCode::InvalidConfig, "--factors is required");
    auto fin = concord::io::open_input(c.factors);
    const auto factors = concord::regression::parse_factors(fin);

    concord::pipeline::RegressionInputs inputs;
    if (!c.response.empty()) {
        auto rin = concord::io::open_input(c.response);
        inputs = concord::pipeline::join_response(factors, concord::regression::parse_response(rin),
                                                  "file:" + c.response.generic_string());
    } else {
        const auto ingest = concord::pipeline::cmd_ingest(c);
        const auto traj =
            concord::portfolio::solve_trajectory(ingest.stage_stats, c.rho, c.long_only, c.regularization);
        const auto company = c.company.empty() ? ingest.window.securities.front() : c.company;
        inputs = concord::pipeline::join_response(factors, concord::pipeline::company_fractions(traj, company),
                                                  "trajectory:" + company);
    }
    const auto fit = concord::regression::ols_fit(inputs.panel, c.alpha);
    auto json = concord::io::to_json(fit, concord::regression::market_weights(fit), inputs.panel.factor_names);
    json["response_source"] = inputs.response_source;
    concord::io::write_text(c.out_dir / "regression.json", concord::io::dump(json));
    std::cout << concord::io::dump(json);
    return 0;
}

int run_expert(const PipelineConfig& c) {
    if (c.questionnaires.empty()) concord::fail(concord::ErrorCode::InvalidConfig, "--questionnaires is required");
    auto in = concord::io::open_input(c.questionnaires);
    const auto panel = concord::expert::evaluate_panel(concord::expert::parse_questionnaires(in));
    const auto json = concord::io::to_json(panel);
    concord::io::write_text(c.out_dir / "expert.json", concord::io::dump(json));
    std::cout << concord::io::dump(json);
    return 0;
}

int run_compare(const PipelineConfig& c, const std::string& a, const std::string& b, bool out_given) {
    const auto report = concord::pipeline::cmd_compare(a, b, c.thresholds);
    std::cout << concord::concordance::summary(report, fs::path(a).filename().string(), fs::path(b).filename().string());
    if (out_given) {
        concord::io::write_text(c.out_dir / "concordance.json", concord::io::dump(concord::io::to_json(report)));
    }
    return 0;
}

int run_pipeline(const PipelineConfig& c) {
    const auto run = concord::pipeline::cmd_pipeline(c);
    std::cout << concord::concordance::summary(run.report);
    std::cout << "artifacts written to " << c.out_dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Market-attraction factor weights versus expert judgement"};
    app.require_subcommand(1);
    app.set_version_flag("--version", concord::pipeline::kToolVersion);

    Overrides o;
    std::string stats_path;
    std::optional<double> target;
    std::string weights_a;
    std::string weights_b;

    auto* ingest = app.add_subcommand("ingest", "Quarterly returns and covariance statistics from quotes");
    add_common(ingest, o);
    ingest->add_option("--quotes", o.quotes, "quotes-CSV");

    auto* portfolio = app.add_subcommand("portfolio", "Minimum-variance portfolio, frontier and pool screening");
    add_common(portfolio, o);
    portfolio->add_option("--quotes", o.quotes, "quotes-CSV");
    portfolio->add_option("--stats", stats_path, "stats-CSV (overrides --quotes)");
    portfolio->add_option("--target", target, "Target return m_p in percent (overrides --rho)");

    auto* regress = app.add_subcommand("regress", "Regress x1 on normalized factors");
    add_common(regress, o);
    regress->add_option("--factors", o.factors, "factors-CSV");
    regress->add_option("--response", o.response, "stage,x1 CSV (default: solve from --quotes)");
    regress->add_option("--quotes", o.quotes, "quotes-CSV, used when no response is given");
    regress->add_option("--company", o.company, "Security whose fraction is x1");

    auto* expert = app.add_subcommand("expert", "Expert questionnaire weights");
    add_common(expert, o);
    expert->add_option("--questionnaires", o.questionnaires, "questionnaire-CSV");

    auto* compare = app.add_subcommand("compare", "Concordance of two weights-CSV files");
    add_common(compare, o);
    compare->add_option("weights_a", weights_a, "factor,weight CSV")->required();
    compare->add_option("weights_b", weights_b, "factor,weight CSV")->required();
    compare->add_option("--r-min", o.r_min, "Minimum correlation for concordance");
    compare->add_option("--s-max", o.s_max, "Maximum RMSD for concordance");

    auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write all artifacts");
    add_common(pipeline, o);
    pipeline->add_option("--quotes", o.quotes, "quotes-CSV");
    pipeline->add_option("--factors", o.factors, "factors-CSV");
    pipeline->add_option("--questionnaires", o.questionnaires, "questionnaire-CSV");
    pipeline->add_option("--response", o.response, "stage,x1 CSV overriding the solved fractions");
    pipeline->add_option("--company", o.company, "Security whose fraction is x1");
    pipeline->add_option("--r-min", o.r_min, "Minimum correlation for concordance");
    pipeline->add_option("--s-max", o.s_max, "Maximum RMSD for concordance");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = resolve_config(o);
        if (*ingest) return run_ingest(config);
        if (*portfolio) return run_portfolio(config, stats_path, target);
        if (*regress) return run_regress(config);
        if (*expert) return run_expert(config);
        if (*compare) return run_compare(config, weights_a, weights_b, !o.out.empty());
        if (*pipeline) return run_pipeline(config);
    } catch (const concord::Error& e) {
        concord::io::Json err{{"error", std::string(concord::to_string(e.code()))}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        concord::io::Json err{{"error", "Internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 0;
}
