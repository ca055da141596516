// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero
// if any selected criterion fails. Usage: concord_acceptance [--criterion N]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "concord/concordance.hpp"
#include "concord/expert.hpp"
#include "concord/io.hpp"
#include "concord/market_data.hpp"
#include "concord/pipeline.hpp"
#include "concord/portfolio.hpp"
#include "concord/regression.hpp"
#include "support/oracles.hpp"
#include "support/reference_data.hpp"

namespace fs = std::filesystem;
using namespace concord;

namespace {

const fs::path kFixtures = CONCORD_FIXTURE_DIR;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

market::AssetStats make_stats(const Eigen::VectorXd& m, const Eigen::MatrixXd& k) {
    market::AssetStats s;
    for (Eigen::Index i = 0; i < m.size(); ++i) s.securities.push_back("S" + std::to_string(i + 1));
    s.means = m;
    s.covariance = k;
    return s;
}

Eigen::VectorXd random_means(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-10.0, 30.0);
    Eigen::VectorXd m(n);
    for (int i = 0; i < n; ++i) m(i) = u(rng);
    return m;
}

Outcome regression_reproduction() {
    Outcome o;
    const auto t = testdata::factor_panel();
    const auto fit = regression::ols_fit(t.rightCols(5), t.col(0));
    const auto eq = testdata::fitted_equation();
    for (int i = 0; i < 6; ++i) {
        const double d = std::abs(fit.coefficients(i) - eq(i));
        o.require(d <= 0.002, "c" + std::to_string(i) + " off by " + fmt("%.4f", d));
    }
    o.require(std::abs(fit.r_squared - 0.87) <= 0.01, "R2 = " + fmt("%.4f", fit.r_squared));
    if (o.pass) o.detail = "R2 = " + fmt("%.4f", fit.r_squared);
    return o;
}

Outcome significance_flags() {
    Outcome o;
    const auto t = testdata::factor_panel();
    const auto fit = regression::ols_fit(t.rightCols(5), t.col(0), 0.05);
    // coefficient index i + 1 belongs to factor f(i + 1)
    o.require(!fit.significant[1], "f1 flagged significant (p = " + fmt("%.4f", fit.p_values(1)) + ")");
    o.require(!fit.significant[4], "f4 flagged significant (p = " + fmt("%.4f", fit.p_values(4)) + ")");
    o.require(fit.significant[2] || fit.significant[3],
              "neither f2 (p = " + fmt("%.4f", fit.p_values(2)) + ") nor f3 (p = " + fmt("%.4f", fit.p_values(3)) +
                  ") is significant");
    return o;
}

Outcome weight_normalization() {
    Outcome o;
    const auto w = regression::market_weights(testdata::fitted_equation().tail(5));
    const double d = (w - testdata::objective_weights()).cwiseAbs().maxCoeff();
    o.require(d <= 0.002, "max deviation " + fmt("%.4f", d));
    if (o.pass) o.detail = "max deviation " + fmt("%.4f", d);
    return o;
}

Outcome concordance_metrics() {
    Outcome o;
    const auto r = concordance::build_report(testdata::objective_weights(), testdata::subjective_weights());
    o.require(std::abs(r.r_f + 0.27) <= 0.01, "r_f = " + fmt("%.4f", r.r_f));
    o.require(std::abs(r.t_stat - 0.48) <= 0.02, "t = " + fmt("%.4f", r.t_stat));
    o.require(std::abs(r.p_value - 0.34) <= 0.02, "P = " + fmt("%.4f", r.p_value));
    o.require(std::abs(r.sigma_f - 0.201) <= 0.001, "sigma_f = " + fmt("%.5f", r.sigma_f));
    o.require(std::abs(r.mean_u - 0.2) <= 0.001, "mean_u = " + fmt("%.4f", r.mean_u));
    o.require(std::abs(r.mean_v - 0.2) <= 0.001, "mean_v = " + fmt("%.4f", r.mean_v));
    if (o.pass)
        o.detail = "r_f " + fmt("%.4f", r.r_f) + ", t " + fmt("%.4f", r.t_stat) + ", P " + fmt("%.4f", r.p_value) +
                   ", sigma_f " + fmt("%.5f", r.sigma_f);
    return o;
}

Outcome pcm_construction() {
    Outcome o;
    std::ifstream d(kFixtures / "reference" / "discrete_questionnaire.csv");
    std::ifstream c(kFixtures / "reference" / "continuous_questionnaire.csv");
    const auto discrete = expert::build_pcm(expert::parse_questionnaire(d, expert::Scale::Discrete));
    const auto continuous = expert::build_pcm(expert::parse_questionnaire(c, expert::Scale::Continuous));
    o.require(discrete.entries == testdata::discrete_pcm(), "discrete matrix differs from the published one");
    const Eigen::MatrixXd t4 = testdata::continuous_pcm();
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            o.require(discrete.entries(i, j) + discrete.entries(j, i) == 2.0, "discrete complement");
            o.require(continuous.entries(i, j) + continuous.entries(j, i) == 1.0, "continuous complement");
            o.require(t4(i, j) + t4(j, i) == 1.0, "published continuous complement");
            if (i < j) o.require(continuous.entries(i, j) == t4(i, j), "continuous upper triangle");
        }
    }
    return o;
}

Outcome summation_weights() {
    Outcome o;
    // integer row sums over the integer total, each quotient rounded once
    const Eigen::MatrixXd t3 = testdata::discrete_pcm();
    long total = 0;
    long rows[5] = {};
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) rows[i] += std::lround(t3(i, j));
        total += rows[i];
    }
    const auto d = expert::weights_summation(expert::make_pcm(expert::Scale::Discrete, t3));
    const double published[] = {0.36, 0.12, 0.20, 0.28, 0.04};
    for (int i = 0; i < 5; ++i) {
        o.require(d.weights(i) == static_cast<double>(rows[i]) / static_cast<double>(total), "discrete w" + std::to_string(i + 1));
        o.require(d.weights(i) == published[i], "discrete w" + std::to_string(i + 1) + " vs published");
    }
    // hand row sums 2.25, 1.05, 3.25, 2.6, 3.35 over 12.5
    const auto c = expert::weights_summation(expert::make_pcm(expert::Scale::Continuous, testdata::continuous_pcm()));
    const double hand[] = {0.18, 0.084, 0.26, 0.208, 0.268};
    for (int i = 0; i < 5; ++i) o.require(std::abs(c.weights(i) - hand[i]) <= 1e-12, "continuous w" + std::to_string(i + 1));
    return o;
}

Outcome portfolio_properties() {
    Outcome o;
    std::mt19937_64 rng(20111231);
    std::uniform_int_distribution<int> size(2, 10);
    std::uniform_real_distribution<double> rho(0.0, 1.0);

    // (a) constraint residuals and (d) scaling invariance
    double worst = 0.0, worst_scale = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = size(rng);
        const auto m = random_means(rng, n);
        const auto k = oracle::random_psd(rng, n, 10.0);
        const double target = m.minCoeff() + rho(rng) * (m.maxCoeff() - m.minCoeff());
        for (bool long_only : {false, true}) {
            const auto s = portfolio::solve({make_stats(m, k), target, long_only, 0.0});
            worst = std::max({worst, std::abs(s.weights.sum() - 1.0), std::abs(m.dot(s.weights) - target)});
            if (long_only) worst = std::max(worst, std::max(0.0, -s.weights.minCoeff()));
            const auto scaled = portfolio::solve({make_stats(m, 7.0 * k), target, long_only, 0.0});
            worst_scale = std::max(worst_scale, (scaled.weights - s.weights).cwiseAbs().maxCoeff());
        }
    }
    o.require(worst <= 1e-9, "(a) residual " + fmt("%.3g", worst));
    o.require(worst_scale <= 1e-9, "(d) cK moved weights by " + fmt("%.3g", worst_scale));

    // (b) grid search never beats the solver by more than 1e-4
    double grid_gap = 0.0;
    int grid_trials = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_means(rng, 3);
        const Eigen::Matrix3d k = oracle::random_psd(rng, 3, 1.0);
        const double target = m.minCoeff() + rho(rng) * (m.maxCoeff() - m.minCoeff());
        const auto s = portfolio::solve_equality_qp({make_stats(m, k), target, false, 0.0});
        if (s.weights.cwiseAbs().maxCoeff() > 2.5) continue;  // outside the grid's span
        const double grid = oracle::grid_min_variance_3(k, m, target);
        grid_gap = std::max(grid_gap, s.variance - grid);
        ++grid_trials;
    }
    o.require(grid_trials >= 10, "(b) only " + std::to_string(grid_trials) + " grid instances");
    o.require(grid_gap <= 1e-4, "(b) grid beats solver by " + fmt("%.3g", grid_gap));

    // (c) long-only against exhaustive enumeration
    std::uniform_int_distribution<int> small(2, 6);
    double enum_gap = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = small(rng);
        const auto m = random_means(rng, n);
        const auto k = oracle::random_psd(rng, n, 10.0);
        const double target = m.minCoeff() + rho(rng) * (m.maxCoeff() - m.minCoeff());
        const auto s = portfolio::solve_long_only({make_stats(m, k), target, true, 0.0});
        enum_gap = std::max(enum_gap, (s.weights - oracle::enumerate_long_only(k, m, target)).cwiseAbs().maxCoeff());
    }
    o.require(enum_gap <= 1e-7, "(c) enumeration gap " + fmt("%.3g", enum_gap));
    if (o.pass)
        o.detail = "residual " + fmt("%.2g", worst) + ", grid gap " + fmt("%.2g", grid_gap) + ", enum gap " +
                   fmt("%.2g", enum_gap) + ", cK " + fmt("%.2g", worst_scale) +
                   " (" + std::to_string(grid_trials) + " grid instances)";
    return o;
}

Outcome pareto_frontier() {
    Outcome o;
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> count(1, 30);
    std::uniform_int_distribution<int> coarse(0, 8);
    std::uniform_real_distribution<double> fine(0.0, 10.0);
    int mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const bool gridded = trial % 2 == 0;
        const int n = count(rng);
        std::vector<portfolio::RiskReturnPoint> pts;
        std::vector<oracle::Point2> raw;
        for (int i = 0; i < n; ++i) {
            const double m = gridded ? coarse(rng) : fine(rng);
            const double r = gridded ? coarse(rng) : fine(rng);
            pts.push_back({"P" + std::to_string(i), m, r});
            raw.push_back({m, r});
        }
        const auto f = portfolio::pareto_frontier(pts);
        const auto ref = oracle::brute_force_dominated(raw);
        for (int i = 0; i < n; ++i)
            if (f[static_cast<std::size_t>(i)].dominated != ref[static_cast<std::size_t>(i)]) ++mismatches;
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " flags differ from brute force");

    // security 1: high mean, high risk; 2, 3, 9, 10 trace the efficient line
    const double mean[] = {6.0, 6.5, 4.0, 3.0, 2.0, 5.0, 1.0, 3.5, 5.5, 2.0};
    const double risk[] = {9.0, 5.0, 2.5, 4.0, 3.0, 6.0, 5.0, 7.0, 3.5, 1.0};
    Eigen::VectorXd m(10), var(10);
    for (int i = 0; i < 10; ++i) {
        m(i) = mean[i];
        var(i) = risk[i] * risk[i];
    }
    const auto f = portfolio::pareto_frontier(portfolio::risk_return_points(make_stats(m, var.asDiagonal())));
    o.require(f[0].dominated, "security 1 not dominated");
    for (int i : {1, 2, 8, 9}) o.require(!f[static_cast<std::size_t>(i)].dominated, "security " + std::to_string(i + 1) + " dominated");
    return o;
}

Outcome consistent_pcm_recovery() {
    Outcome o;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    double worst = 0.0;
    int disagreements = 0;
    const auto order = [](const Eigen::VectorXd& w) {
        std::vector<int> idx(static_cast<std::size_t>(w.size()));
        for (int i = 0; i < w.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return w(a) > w(b); });
        return idx;
    };
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd v(5);
        for (int i = 0; i < 5; ++i) v(i) = u(rng);
        const auto pcm = expert::make_pcm(expert::Scale::Continuous, oracle::consistent_pcm(v));
        const auto lewis = expert::weights_lewis(pcm).weights;
        worst = std::max(worst, (lewis - v / v.sum()).cwiseAbs().maxCoeff());
        const auto ranking = order(lewis);
        if (order(expert::weights_summation(pcm).weights) != ranking ||
            order(expert::weights_multiplication(pcm).weights) != ranking)
            ++disagreements;
    }
    o.require(worst <= 1e-9, "Lewis error " + fmt("%.3g", worst));
    o.require(disagreements == 0, std::to_string(disagreements) + " ranking disagreements");
    if (o.pass) o.detail = "max error " + fmt("%.2g", worst);
    return o;
}

Outcome detrending() {
    Outcome o;
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<int> len(3, 60);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst_mean = 0.0, worst_cov = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const int s = len(rng);
        std::vector<double> y(static_cast<std::size_t>(s));
        const double a = 10.0 * g(rng), b = g(rng);
        for (int t = 0; t < s; ++t) y[static_cast<std::size_t>(t)] = a + b * (t + 1) + 5.0 * g(rng);
        const auto r = market::detrend(y);
        double sum = 0.0, cov = 0.0;
        const double tbar = (s + 1) / 2.0;
        for (int t = 0; t < s; ++t) {
            sum += r[static_cast<std::size_t>(t)];
            cov += r[static_cast<std::size_t>(t)] * ((t + 1) - tbar);
        }
        worst_mean = std::max(worst_mean, std::abs(sum / s));
        worst_cov = std::max(worst_cov, std::abs(cov / (s - 1)));
    }
    o.require(worst_mean <= 1e-9, "residual mean " + fmt("%.3g", worst_mean));
    o.require(worst_cov <= 1e-9, "covariance with t " + fmt("%.3g", worst_cov));

    bool exact = true;
    for (int s = 3; s <= 40; ++s) {
        std::vector<double> line(static_cast<std::size_t>(s));
        for (int t = 0; t < s; ++t) line[static_cast<std::size_t>(t)] = 3.0 - 0.5 * (t + 1);
        for (double r : market::detrend(line)) exact = exact && r == 0.0;
    }
    o.require(exact, "exact line left nonzero residuals");
    return o;
}

Outcome pipeline_determinism() {
    Outcome o;
    const auto base = fs::temp_directory_path() / "concord_acceptance";
    fs::remove_all(base);
    auto config = pipeline::load_config(kFixtures / "synthetic" / "config.json");
    for (const char* run : {"a", "b"}) {
        config.out_dir = base / run;
        pipeline::cmd_pipeline(config);
    }
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(base / "a")) {
        if (entry.path().extension() != ".json") continue;
        const auto other = base / "b" / entry.path().filename();
        std::ifstream x(entry.path(), std::ios::binary), y(other, std::ios::binary);
        std::stringstream sx, sy;
        sx << x.rdbuf();
        sy << y.rdbuf();
        o.require(y.good() && sx.str() == sy.str(), entry.path().filename().string() + " differs");
        ++compared;
    }
    o.require(compared >= 8, "only " + std::to_string(compared) + " JSON artifacts");
    if (o.pass) o.detail = std::to_string(compared) + " JSON artifacts identical";
    return o;
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const Criterion criteria[] = {
        {"regression reproduction", regression_reproduction},
        {"significance flags", significance_flags},
        {"market-weight normalization", weight_normalization},
        {"concordance metrics", concordance_metrics},
        {"PCM construction", pcm_construction},
        {"summation weights", summation_weights},
        {"portfolio solver properties", portfolio_properties},
        {"Pareto frontier", pareto_frontier},
        {"consistent-PCM recovery", consistent_pcm_recovery},
        {"detrending", detrending},
        {"pipeline determinism", pipeline_determinism},
    };
    constexpr int kCount = static_cast<int>(std::size(criteria));

    int only = 0;
    if (argc == 3 && std::string(argv[1]) == "--criterion") only = std::atoi(argv[2]);
    if (argc != 1 && (only < 1 || only > kCount)) {
        std::fprintf(stderr, "usage: %s [--criterion 1..%d]\n", argv[0], kCount);
        return 2;
    }

    int failed = 0;
    for (int i = 1; i <= kCount; ++i) {
        if (only != 0 && i != only) continue;
        Outcome out;
        try {
            out = criteria[i - 1].run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %2d %-28s %s%s%s\n", i, criteria[i - 1].name, out.pass ? "PASS" : "FAIL",
                    out.detail.empty() ? "" : "  ", out.detail.c_str());
        if (!out.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
