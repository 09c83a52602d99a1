#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "atv/likelihood.hpp"

using namespace atv;

namespace {

AtvGarchSpec dgp3() {
    AtvGarchSpec s;
    s.garch.intercept = 0.005;
    s.garch.arch = {0.05};
    s.garch.garch = {0.8};
    return s;
}

AtvGarchSpec dgp1() {
    AtvGarchSpec s;
    s.garch.intercept = 0.1;
    s.garch.arch = {0.1};
    s.garch.garch = {0.85};
    return s;
}

/// Central finite differences of the summed log-likelihood in the natural
/// parameterization, matching the column layout of loglik_gradient.
Eigen::VectorXd fd_gradient(const SeriesData& series, const AtvGarchSpec& spec,
                            const VarianceInit& init, double h = 1e-6) {
    auto eval = [&](const AtvGarchSpec& s) { return loglik(series, s, init).sum; };
    const int L = spec.num_transitions();
    Eigen::VectorXd g(3 + 3 * L);
    auto bump = [&](auto setter, int idx) {
        AtvGarchSpec up = spec, dn = spec;
        setter(up, h);
        setter(dn, -h);
        g(idx) = (eval(up) - eval(dn)) / (2.0 * h);
    };
    bump([](AtvGarchSpec& s, double d) { s.garch.intercept += d; }, 0);
    bump([](AtvGarchSpec& s, double d) { s.garch.arch[0] += d; }, 1);
    bump([](AtvGarchSpec& s, double d) { s.garch.garch[0] += d; }, 2);
    for (int l = 0; l < L; ++l) {
        bump([l](AtvGarchSpec& s, double d) { s.transitions[l].amplitude += d; }, 3 + 3 * l);
        bump([l](AtvGarchSpec& s, double d) { s.transitions[l].slope += d; }, 4 + 3 * l);
        bump([l](AtvGarchSpec& s, double d) { s.transitions[l].location += d; }, 5 + 3 * l);
    }
    return g;
}

} // namespace

TEST_CASE("single-observation log-likelihood values") {
    AtvGarchSpec unit; // sigma2_1 = 1 by construction
    unit.garch.intercept = 0.05;
    unit.garch.arch = {0.05};
    unit.garch.garch = {0.9};
    SeriesData s;
    s.x.resize(1);

    s.x << 0.0;
    CHECK(loglik(s, unit, VarianceInit::explicit_values(1.0, 1.0)).sum == 0.0);
    s.x << 1.0;
    CHECK(loglik(s, unit, VarianceInit::explicit_values(1.0, 1.0)).sum ==
          doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("log-likelihood matches a brute-force recursion") {
    const AtvGarchSpec spec = dgp3();
    const SeriesData s = simulate(spec, 50, InnovationDist::normal(), 100, 11);
    const LikelihoodEval ll = loglik(s, spec, VarianceInit::sample_variance());

    const double s2_init = s.x.squaredNorm() / s.size();
    double prev_s2 = s2_init, prev_x2 = s2_init, total = 0.0;
    for (int t = 0; t < 50; ++t) {
        const double sig2 = 0.005 + 0.05 * prev_x2 + 0.8 * prev_s2;
        total += -0.5 * (std::log(sig2) + s.x(t) * s.x(t) / sig2);
        prev_s2 = sig2;
        prev_x2 = s.x(t) * s.x(t);
    }
    CHECK(ll.sum == doctest::Approx(total).epsilon(1e-12));
    CHECK(ll.mean == doctest::Approx(total / 50).epsilon(1e-12));
    CHECK(ll.std_residuals.size() == 50);
}

TEST_CASE("theta2 derivative first step and collapsed recursion") {
    const SeriesData s = simulate(dgp3(), 60, InnovationDist::normal(), 0, 5);
    const VarianceInit init = VarianceInit::explicit_values(0.7, 0.4);

    SUBCASE("first recursion step") {
        const Eigen::MatrixXd d = score_theta2(s, dgp3(), init);
        CHECK(d(0, 0) == 1.0);
        CHECK(d(0, 1) == 0.4);
        CHECK(d(0, 2) == 0.7);
    }
    SUBCASE("beta1 = 0 collapses the recursion") {
        AtvGarchSpec spec = dgp3();
        spec.garch.garch = {1e-300}; // effectively zero, keeps validity
        spec.garch.garch[0] = 0.0;
        // positivity of beta is an estimation-side constraint; the recursion
        // itself is defined at 0
        const Eigen::VectorXd sigma2 = conditional_variance_path(s, spec, init);
        const Eigen::MatrixXd d = score_theta2(s, spec, init);
        for (int t = 2; t <= s.size(); ++t) {
            CHECK(d(t - 1, 0) == 1.0);
            CHECK(d(t - 1, 1) == s.x(t - 2) * s.x(t - 2));
            CHECK(d(t - 1, 2) == sigma2(t - 2));
        }
    }
}

TEST_CASE("theta1 derivative special values") {
    AtvGarchSpec spec = dgp3();
    spec.garch.garch[0] = 0.0;
    spec.transitions = {{0.01, 2.0, 0.5}};
    SeriesData s;
    s.x = Eigen::VectorXd::Constant(100, 0.05);
    const VarianceInit init = VarianceInit::sample_variance();

    SUBCASE("amplitude column is G; exactly 1/2 at the center") {
        const Eigen::MatrixXd d = score_theta1(s, spec, init);
        CHECK(d(49, 0) == 0.5); // t/T = 0.5 with beta1 = 0
    }
    SUBCASE("zero amplitude kills slope and location columns") {
        spec.transitions[0].amplitude = 0.0;
        const Eigen::MatrixXd d = score_theta1(s, spec, init);
        CHECK(d.col(1).cwiseAbs().maxCoeff() == 0.0);
        CHECK(d.col(2).cwiseAbs().maxCoeff() == 0.0);
        CHECK(d.col(0).minCoeff() > 0.0);
    }
}

TEST_CASE("analytic score matches finite differences") {
    SUBCASE("plain GARCH, DGP 1") {
        const SeriesData s = simulate(dgp1(), 200, InnovationDist::normal(), 200, 21);
        const VarianceInit init = VarianceInit::sample_variance();
        const Eigen::VectorXd analytic = loglik_gradient(s, dgp1(), init);
        const Eigen::VectorXd fd = fd_gradient(s, dgp1(), init);
        for (int i = 0; i < analytic.size(); ++i)
            CHECK(analytic(i) == doctest::Approx(fd(i)).epsilon(1e-4));
    }
    SUBCASE("one transition") {
        AtvGarchSpec spec = dgp3();
        spec.transitions = {{0.01, 8.0, 0.4}};
        const SeriesData s = simulate(spec, 200, InnovationDist::normal(), 200, 22);
        const VarianceInit init = VarianceInit::first_obs_squared();
        const Eigen::VectorXd analytic = loglik_gradient(s, spec, init);
        const Eigen::VectorXd fd = fd_gradient(s, spec, init);
        for (int i = 0; i < analytic.size(); ++i)
            CHECK(analytic(i) == doctest::Approx(fd(i)).epsilon(1e-4));
    }
}

TEST_CASE("taylor regressors") {
    SeriesData s;
    const int T = 100;
    s.x = Eigen::VectorXd::Constant(T, 0.1);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(T);

    SUBCASE("beta = 0 gives tau_t / sigma2_t") {
        const Eigen::MatrixXd r2 = taylor_regressors(s, 0.0, 2.0 * ones);
        const double u = 0.37;
        const int t = 37;
        CHECK(r2(t - 1, 0) == doctest::Approx(u / 2.0).epsilon(1e-15));
        CHECK(r2(t - 1, 1) == doctest::Approx(u * u / 2.0).epsilon(1e-15));
        CHECK(r2(t - 1, 2) == doctest::Approx(u * u * u / 2.0).epsilon(1e-15));
    }
    SUBCASE("t = 1 single term") {
        const Eigen::MatrixXd r2 = taylor_regressors(s, 0.8, ones);
        const double u = 1.0 / T;
        CHECK(r2(0, 0) == doctest::Approx(u).epsilon(1e-15));
        CHECK(r2(0, 1) == doctest::Approx(u * u).epsilon(1e-15));
        CHECK(r2(0, 2) == doctest::Approx(u * u * u).epsilon(1e-15));
    }
    SUBCASE("direct summation oracle at t = T") {
        const Eigen::MatrixXd r2 = taylor_regressors(s, 0.8, ones);
        Eigen::Vector3d expect = Eigen::Vector3d::Zero();
        for (int j = 0; j <= T - 1; ++j) {
            const double u = static_cast<double>(T - j) / T;
            expect += std::pow(0.8, j) * Eigen::Vector3d(u, u * u, u * u * u);
        }
        for (int k = 0; k < 3; ++k)
            CHECK(r2(T - 1, k) == doctest::Approx(expect(k)).epsilon(1e-14));
    }
    SUBCASE("components are nonnegative and nondecreasing for constant sigma2") {
        const Eigen::MatrixXd r2 = taylor_regressors(s, 0.6, ones);
        for (int t = 1; t < T; ++t)
            for (int k = 0; k < 3; ++k) {
                CHECK(r2(t, k) >= 0.0);
                CHECK(r2(t, k) >= r2(t - 1, k));
            }
    }
}

TEST_CASE("score matrix dimensions and first-order conditions") {
    SUBCASE("column counts") {
        const SeriesData s = simulate(dgp3(), 100, InnovationDist::normal(), 100, 31);
        const ScoreMatrix sm0 = build_score_matrix(s, dgp3(), VarianceInit::sample_variance());
        CHECK(sm0.cols() == 6);
        CHECK(sm0.rows() == 100);

        AtvGarchSpec one = dgp3();
        one.transitions = {{0.01, 10.0, 0.5}};
        const ScoreMatrix sm1 = build_score_matrix(s, one, VarianceInit::sample_variance());
        CHECK(sm1.cols() == 9);
    }
    SUBCASE("ignores discarded burn-in by construction") {
        const SeriesData s = simulate(dgp3(), 150, InnovationDist::normal(), 0, 55);
        const ScoreMatrix a = build_score_matrix(s, dgp3(), VarianceInit::sample_variance());
        const ScoreMatrix b = build_score_matrix(s, dgp3(), VarianceInit::sample_variance());
        CHECK(a.r1 == b.r1);
        CHECK(a.r2 == b.r2);
        CHECK(a.e == b.e);
    }
}
