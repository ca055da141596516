#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "concord/concordance.hpp"
#include "concord/error.hpp"
#include "support/reference_data.hpp"

using namespace concord;
using namespace concord::concordance;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

// Textbook two-pass Pearson r.
double pearson(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const double n = static_cast<double>(u.size());
    double su = 0, sv = 0, suu = 0, svv = 0, suv = 0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        su += u(i);
        sv += v(i);
    }
    const double mu = su / n, mv = sv / n;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        suu += (u(i) - mu) * (u(i) - mu);
        svv += (v(i) - mv) * (v(i) - mv);
        suv += (u(i) - mu) * (v(i) - mv);
    }
    return suv / std::sqrt(suu * svv);
}

}  // namespace

TEST_CASE("published weight rows") {
    const auto u = testdata::objective_weights();
    const auto v = testdata::subjective_weights();
    const auto r = build_report(u, v);
    CHECK(r.r_f == doctest::Approx(-0.26705).epsilon(1e-4));
    CHECK(r.r_f == doctest::Approx(pearson(u, v)).epsilon(1e-12));
    CHECK(r.t_stat == doctest::Approx(0.47997).epsilon(1e-4));
    CHECK(r.p_value == doctest::Approx(0.33204).epsilon(1e-4));
    CHECK(r.sigma_f == doctest::Approx(0.201198).epsilon(1e-5));
    CHECK(r.mean_u == doctest::Approx(0.1998).epsilon(1e-12));
    CHECK(r.mean_v == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.n == 5);
    CHECK(r.verdict == Verdict::Discordant);
    CHECK(summary(r).find("discordant") != std::string::npos);
}

TEST_CASE("identical vectors") {
    const Eigen::VectorXd u = testdata::subjective_weights();
    const auto r = build_report(u, u);
    CHECK(r.r_f == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.sigma_f == 0.0);
    CHECK(r.p_value <= 1e-6);
    CHECK(r.verdict == Verdict::Concordant);
}

TEST_CASE("correlation is affine invariant and symmetric") {
    std::mt19937_64 rng(43);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd u(7), v(7);
        for (int i = 0; i < 7; ++i) {
            u(i) = g(rng);
            v(i) = 0.5 * u(i) + g(rng);
        }
        const auto base = correlation_test(u, v);
        const auto moved = correlation_test((scale(rng) * u.array() + g(rng)).matrix(), v);
        CHECK(moved.r == doctest::Approx(base.r).epsilon(1e-10));
        const auto swapped = correlation_test(v, u);
        CHECK(swapped.r == doctest::Approx(base.r).epsilon(1e-14));
        CHECK(rmsd(u, v) == doctest::Approx(rmsd(v, u)).epsilon(1e-14));
        const auto flipped = correlation_test(-u, v);
        CHECK(flipped.r == doctest::Approx(-base.r).epsilon(1e-12));
        CHECK(flipped.t_stat == doctest::Approx(base.t_stat).epsilon(1e-10));
    }
}

TEST_CASE("verdict thresholds") {
    Eigen::VectorXd u(5), v(5);
    u << 0.1, 0.2, 0.3, 0.2, 0.2;
    v << 0.12, 0.18, 0.31, 0.21, 0.18;
    CHECK(build_report(u, v).verdict == Verdict::Concordant);
    CHECK(build_report(u, v, {0.999, 0.1}).verdict == Verdict::Discordant);
    CHECK(build_report(u, v, {0.5, 0.001}).verdict == Verdict::Discordant);
    const auto r = build_report(u, v);
    CHECK(build_report(u, v, {r.r_f, r.sigma_f}).verdict == Verdict::Concordant);
}

TEST_CASE("degenerate input") {
    CHECK(code_of([] { correlation_test(Eigen::Vector3d(0.2, 0.2, 0.2), Eigen::Vector3d(0.1, 0.2, 0.3)); }) ==
          ErrorCode::ConstantVector);
    CHECK(code_of([] { correlation_test(Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(0.1, 0.3)); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("weights CSV") {
    std::istringstream in("factor,weight\nf1,0.25\nf2,0.75\n");
    const auto w = parse_weights(in);
    CHECK(w.factors == std::vector<std::string>{"f1", "f2"});
    CHECK(w.weights(1) == 0.75);
    std::istringstream bad("factor,weight\nf1\n");
    CHECK(code_of([&] { parse_weights(bad); }) == ErrorCode::MalformedRow);
}
