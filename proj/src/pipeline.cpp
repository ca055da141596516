#include "concord/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>

#include "concord/csv.hpp"
#include "concord/error.hpp"

namespace concord::pipeline {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "quotes", "factors", "questionnaires", "response", "company", "drop_prefix", "min_window",
        "fiscal_offset_months", "rho", "long_only", "regularization", "epsilon", "max_screen_iter", "alpha",
        "r_min", "s_max", "out_dir"};
    return keys;
}

fs::path resolve(const fs::path& base, const std::string& value) {
    fs::path p(value);
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

template <typename T>
T get_as(const io::Json& value, const std::string& key) {
    try {
        return value.get<T>();
    } catch (const std::exception& e) {
        fail(ErrorCode::InvalidConfig, "key '" + key + "': " + e.what());
    }
}

std::size_t get_count(const io::Json& value, const std::string& key) {
    if (!value.is_number_integer() || value.get<long long>() < 0) {
        fail(ErrorCode::InvalidConfig, "key '" + key + "' must be a non-negative integer");
    }
    return value.get<std::size_t>();
}

/// Environment strings become JSON scalars so both sources share one setter.
io::Json env_value(const std::string& key, const std::string& text) {
    static const std::vector<std::string> strings{"quotes", "factors", "questionnaires", "response", "company", "out_dir"};
    if (std::find(strings.begin(), strings.end(), key) != strings.end()) return text;
    if (key == "long_only") {
        std::string v = text;
        std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
        if (v == "0" || v == "false" || v == "no" || v == "off") return false;
        fail(ErrorCode::InvalidConfig, "CONCORD_LONG_ONLY: not a boolean: " + text);
    }
    long integer = 0;
    if (csv::parse_int(text, integer)) return integer;
    double real = 0.0;
    if (csv::parse_double(text, real)) return real;
    fail(ErrorCode::InvalidConfig, "environment value for '" + key + "' is not a number: " + text);
}

template <typename F>
auto run_stage(const std::string& stage, const fs::path& out_dir, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const Error& e) {
        io::Json marker{{"stage", stage}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}};
        io::write_text(out_dir / ".partial", io::dump(marker));
        throw e.with_context("pipeline stage " + stage);
    }
}

std::string join_row(const std::string& head, const Eigen::VectorXd& values) {
    std::string out = head;
    for (Eigen::Index i = 0; i < values.size(); ++i) out += "," + csv::format6(values(i));
    return out + "\n";
}

template <typename Parser>
auto parse_file(const fs::path& path, Parser&& parser) {
    auto in = io::open_input(path);
    try {
        return parser(in);
    } catch (const Error& e) {
        throw e.with_context(path.string());
    }
}

}  // namespace

void apply_json(PipelineConfig& c, const io::Json& json, const fs::path& base_dir) {
    if (!json.is_object()) fail(ErrorCode::InvalidConfig, "config must be a JSON object");
    for (const auto& [key, value] : json.items()) {
        if (key == "quotes") c.quotes = resolve(base_dir, get_as<std::string>(value, key));
        else if (key == "factors") c.factors = resolve(base_dir, get_as<std::string>(value, key));
        else if (key == "questionnaires") c.questionnaires = resolve(base_dir, get_as<std::string>(value, key));
        else if (key == "response") c.response = resolve(base_dir, get_as<std::string>(value, key));
        else if (key == "out_dir") c.out_dir = resolve(base_dir, get_as<std::string>(value, key));
        else if (key == "company") c.company = get_as<std::string>(value, key);
        else if (key == "drop_prefix") c.drop_prefix = get_count(value, key);
        else if (key == "min_window") c.min_window = get_count(value, key);
        else if (key == "max_screen_iter") c.max_screen_iter = get_count(value, key);
        else if (key == "fiscal_offset_months") c.fiscal_offset_months = get_as<int>(value, key);
        else if (key == "rho") c.rho = get_as<double>(value, key);
        else if (key == "long_only") c.long_only = get_as<bool>(value, key);
        else if (key == "regularization") c.regularization = get_as<double>(value, key);
        else if (key == "epsilon") c.epsilon = get_as<double>(value, key);
        else if (key == "alpha") c.alpha = get_as<double>(value, key);
        else if (key == "r_min") c.thresholds.r_min = get_as<double>(value, key);
        else if (key == "s_max") c.thresholds.s_max = get_as<double>(value, key);
        else fail(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
    }
}

PipelineConfig load_config(const fs::path& path) {
    auto in = io::open_input(path);
    io::Json json;
    try {
        json = io::Json::parse(in);
    } catch (const std::exception& e) {
        fail(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    }
    PipelineConfig config;
    apply_json(config, json, path.parent_path());
    return config;
}

void apply_env(PipelineConfig& config, const EnvLookup& lookup) {
    io::Json overrides = io::Json::object();
    for (const auto& key : config_keys()) {
        std::string name = "CONCORD_" + key;
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
        if (auto value = lookup(name)) overrides[key] = env_value(key, *value);
    }
    apply_json(config, overrides);
}

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        if (v == nullptr) return std::nullopt;
        return std::string(v);
    };
}

void validate(const PipelineConfig& c, bool require_files) {
    if (!(c.rho >= 0.0 && c.rho <= 1.0)) fail(ErrorCode::InvalidConfig, "rho must lie in [0, 1]");
    if (!(c.epsilon >= 0.0)) fail(ErrorCode::InvalidConfig, "epsilon must be >= 0");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
    if (!(c.regularization >= 0.0)) fail(ErrorCode::InvalidConfig, "regularization must be >= 0");
    if (c.min_window < 3) fail(ErrorCode::InvalidConfig, "min_window must be at least 3");
    if (!require_files) return;
    for (const auto* p : {&c.quotes, &c.factors, &c.questionnaires, &c.response}) {
        if (!p->empty() && !fs::exists(*p)) fail(ErrorCode::FileNotFound, p->string());
    }
}

io::Json to_json(const PipelineConfig& c) {
    return io::Json{{"quotes", c.quotes.generic_string()},
                    {"factors", c.factors.generic_string()},
                    {"questionnaires", c.questionnaires.generic_string()},
                    {"response", c.response.generic_string()},
                    {"company", c.company},
                    {"drop_prefix", c.drop_prefix},
                    {"min_window", c.min_window},
                    {"fiscal_offset_months", c.fiscal_offset_months},
                    {"rho", c.rho},
                    {"long_only", c.long_only},
                    {"regularization", c.regularization},
                    {"epsilon", c.epsilon},
                    {"max_screen_iter", c.max_screen_iter},
                    {"alpha", c.alpha},
                    {"r_min", c.thresholds.r_min},
                    {"s_max", c.thresholds.s_max}};
}

IngestResult cmd_ingest(const PipelineConfig& config) {
    if (config.quotes.empty()) fail(ErrorCode::InvalidConfig, "no quotes file configured");
    const auto sessions = parse_file(config.quotes, [](std::istream& in) { return market::parse_quotes(in); });

    IngestResult r;
    try {
        r.full = market::quarterly_returns(sessions, market::QuarterCalendar{config.fiscal_offset_months});
    } catch (const Error& e) {
        throw e.with_context(config.quotes.string());
    }
    if (r.full.security_count() < 2) fail(ErrorCode::InvalidArgument, "quotes cover fewer than 2 securities");
    r.window = market::select_window(r.full, config.drop_prefix);
    r.window_stats = market::compute_stats(r.window);
    for (std::size_t len = config.min_window; len <= r.window.stage_count(); ++len) {
        r.stage_stats.push_back(market::compute_stats(market::slice_stages(r.window, 0, len)));
    }
    return r;
}

regression::StageSeries company_fractions(const std::vector<portfolio::StageSolution>& trajectory,
                                          const std::string& company) {
    regression::StageSeries out;
    for (const auto& s : trajectory) {
        const auto& ids = s.solution.securities;
        const auto it = std::find(ids.begin(), ids.end(), company);
        if (it == ids.end()) fail(ErrorCode::InvalidConfig, "company '" + company + "' is not in the pool");
        out.stages.push_back(s.stage);
        out.values.push_back(s.solution.weights(static_cast<Eigen::Index>(it - ids.begin())));
    }
    return out;
}

RegressionInputs join_response(const regression::RawFactors& factors, const regression::StageSeries& response,
                               std::string source) {
    std::map<std::string, double> x1;
    for (std::size_t i = 0; i < response.stages.size(); ++i) x1[response.stages[i]] = response.values[i];

    std::vector<Eigen::Index> rows;
    std::vector<std::string> stages;
    std::vector<double> values;
    for (std::size_t t = 0; t < factors.stages.size(); ++t) {
        const auto it = x1.find(factors.stages[t]);
        if (it == x1.end()) continue;
        rows.push_back(static_cast<Eigen::Index>(t));
        stages.push_back(factors.stages[t]);
        values.push_back(it->second);
    }
    const auto s = static_cast<Eigen::Index>(rows.size());
    if (s < 2) fail(ErrorCode::TooFewStages, "only " + std::to_string(s) + " stages have both factors and x1");

    Eigen::MatrixXd raw(s, factors.values.cols());
    for (Eigen::Index r = 0; r < s; ++r) raw.row(r) = factors.values.row(rows[static_cast<std::size_t>(r)]);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(values.data(), s);
    return RegressionInputs{regression::normalize_factors(raw, y, stages, factors.factor_names), std::move(source)};
}

RunArtifacts cmd_pipeline(const PipelineConfig& config) {
    validate(config, true);
    for (const auto* p : {&config.quotes, &config.factors, &config.questionnaires}) {
        if (p->empty()) fail(ErrorCode::InvalidConfig, "pipeline needs quotes, factors and questionnaires files");
    }
    const fs::path out = config.out_dir;
    fs::create_directories(out);
    fs::remove(out / ".partial");
    fs::remove(out / "manifest.json");

    RunArtifacts a;
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& text) {
        io::write_text(out / name, text);
        written.push_back(name);
    };

    a.ingest = run_stage("ingest", out, [&] { return cmd_ingest(config); });
    emit("returns.csv", io::format_returns_csv(a.ingest.full));
    emit("stats.csv", io::format_stats_csv(a.ingest.window_stats));
    {
        io::Json stats;
        stats["window"] = io::to_json(a.ingest.window_stats);
        io::Json stages = io::Json::array();
        for (const auto& s : a.ingest.stage_stats) stages.push_back(io::to_json(s));
        stats["stages"] = stages;
        emit("stats.json", io::dump(stats));
    }

    run_stage("portfolio", out, [&] {
        a.trajectory = portfolio::solve_trajectory(a.ingest.stage_stats, config.rho, config.long_only, config.regularization);
        const auto points = portfolio::risk_return_points(a.ingest.window_stats);
        a.frontier = portfolio::pareto_frontier(points);
        a.screening = portfolio::screen_pool(a.ingest.window_stats, config.rho, config.epsilon, config.max_screen_iter,
                                             config.long_only, config.regularization);
    });
    {
        io::Json sols = io::Json::array();
        for (const auto& s : a.trajectory) sols.push_back(io::to_json(s.stage, s.solution));
        emit("solutions.json", io::dump(sols));
        emit("frontier.json", io::dump(io::to_json(a.frontier)));
        emit("screening.json", io::dump(io::to_json(a.screening)));

        const auto& ids = a.ingest.window.securities;
        std::string traj = "stage";
        for (const auto& id : ids) traj += "," + id;
        traj += ",m_p,variance\n";
        for (const auto& s : a.trajectory) {
            Eigen::VectorXd row(s.solution.weights.size() + 2);
            row << s.solution.weights, s.solution.target_return, s.solution.variance;
            traj += join_row(s.stage, row);
        }
        emit("trajectory.csv", traj);

        std::string mr = "security_id,mean,risk\n";
        std::string fr = "security_id,mean,risk,dominated\n";
        for (const auto& p : a.frontier) {
            mr += join_row(p.security_id, Eigen::Vector2d(p.mean, p.risk));
            fr += p.security_id + "," + csv::format6(p.mean) + "," + csv::format6(p.risk) + "," +
                  (p.dominated ? "1" : "0") + "\n";
        }
        emit("mean_risk.csv", mr);
        emit("frontier.csv", fr);
    }

    run_stage("regression", out, [&] {
        const auto factors = parse_file(config.factors, [](std::istream& in) { return regression::parse_factors(in); });
        if (!config.response.empty()) {
            const auto response = parse_file(config.response, [](std::istream& in) { return regression::parse_response(in); });
            a.regression_inputs = join_response(factors, response, "file:" + config.response.generic_string());
        } else {
            const std::string company = config.company.empty() ? a.ingest.window.securities.front() : config.company;
            a.regression_inputs = join_response(factors, company_fractions(a.trajectory, company),
                                                "trajectory:" + company);
        }
        a.fit = regression::ols_fit(a.regression_inputs.panel, config.alpha);
        a.market_weights = regression::market_weights(a.fit);
    });
    {
        const auto& names = a.regression_inputs.panel.factor_names;
        auto json = io::to_json(a.fit, a.market_weights, names);
        json["response_source"] = a.regression_inputs.response_source;
        json["long_only"] = config.long_only;
        json["stages"] = a.regression_inputs.panel.stages;
        emit("regression.json", io::dump(json));
        std::string rank = "rank,factor,weight\n";
        std::size_t k = 1;
        for (const auto& r : regression::rank_factors(a.market_weights, names)) {
            rank += std::to_string(k++) + "," + r.name + "," + csv::format6(r.weight) + "\n";
        }
        emit("regression_ranking.csv", rank);
    }

    run_stage("expert", out, [&] {
        const auto responses =
            parse_file(config.questionnaires, [](std::istream& in) { return expert::parse_questionnaires(in); });
        a.experts = expert::evaluate_panel(responses);
    });
    {
        emit("expert.json", io::dump(io::to_json(a.experts)));
        const auto& names = a.regression_inputs.panel.factor_names;
        std::string ew = "factor";
        for (const auto& m : a.experts.method_means) ew += "," + m.provenance + "_" + std::string(expert::to_string(m.method));
        ew += ",final\n";
        for (Eigen::Index i = 0; i < a.experts.final_weights.weights.size(); ++i) {
            Eigen::VectorXd row(static_cast<Eigen::Index>(a.experts.method_means.size()) + 1);
            for (std::size_t m = 0; m < a.experts.method_means.size(); ++m) {
                row(static_cast<Eigen::Index>(m)) = a.experts.method_means[m].weights(i);
            }
            row(row.size() - 1) = a.experts.final_weights.weights(i);
            const auto ui = static_cast<std::size_t>(i);
            ew += join_row(ui < names.size() ? names[ui] : "f" + std::to_string(i + 1), row);
        }
        emit("expert_weights.csv", ew);
        std::string rank = "rank,factor,weight\n";
        std::size_t k = 1;
        for (const auto& r : regression::rank_factors(a.experts.final_weights.weights, names)) {
            rank += std::to_string(k++) + "," + r.name + "," + csv::format6(r.weight) + "\n";
        }
        emit("expert_ranking.csv", rank);
    }

    run_stage("concordance", out, [&] {
        if (a.market_weights.size() != a.experts.final_weights.weights.size()) {
            fail(ErrorCode::FactorMismatch, "regression has " + std::to_string(a.market_weights.size()) +
                                                " factors, experts rated " +
                                                std::to_string(a.experts.final_weights.weights.size()));
        }
        a.report = concordance::build_report(a.market_weights, a.experts.final_weights.weights, config.thresholds);
    });
    {
        emit("concordance.json", io::dump(io::to_json(a.report)));
        emit("concordance.txt", concordance::summary(a.report));
        const auto& names = a.regression_inputs.panel.factor_names;
        std::string fw = "factor,objective,subjective\n";
        for (Eigen::Index i = 0; i < a.market_weights.size(); ++i) {
            fw += join_row(names[static_cast<std::size_t>(i)],
                           Eigen::Vector2d(a.market_weights(i), a.experts.final_weights.weights(i)));
        }
        emit("factor_weights.csv", fw);
    }

    io::Json inputs = io::Json::object();
    inputs["quotes"] = {{"path", config.quotes.generic_string()}, {"sha256", io::sha256_file(config.quotes)}};
    inputs["factors"] = {{"path", config.factors.generic_string()}, {"sha256", io::sha256_file(config.factors)}};
    inputs["questionnaires"] = {{"path", config.questionnaires.generic_string()},
                                {"sha256", io::sha256_file(config.questionnaires)}};
    if (!config.response.empty()) {
        inputs["response"] = {{"path", config.response.generic_string()}, {"sha256", io::sha256_file(config.response)}};
    }
    a.manifest = io::Json{{"tool", "concord"},
                          {"version", kToolVersion},
                          {"config", to_json(config)},
                          {"inputs", inputs},
                          {"counts",
                           {{"quarters", a.ingest.full.stage_count()},
                            {"retained_stages", a.ingest.window.stage_count()},
                            {"solved_stages", a.trajectory.size()},
                            {"regression_stages", a.regression_inputs.panel.stages.size()},
                            {"experts", a.experts.experts.size()}}},
                          {"artifacts", written}};
    io::write_text(out / "manifest.json", io::dump(a.manifest));
    return a;
}

concordance::ConcordanceReport cmd_compare(const fs::path& a, const fs::path& b,
                                           const concordance::Thresholds& thresholds) {
    const auto wa = parse_file(a, [](std::istream& in) { return concordance::parse_weights(in); });
    const auto wb = parse_file(b, [](std::istream& in) { return concordance::parse_weights(in); });
    if (wa.factors != wb.factors) {
        fail(ErrorCode::FactorMismatch, a.string() + " and " + b.string() + " list different factors");
    }
    return concordance::build_report(wa.weights, wb.weights, thresholds);
}

}  // namespace concord::pipeline
