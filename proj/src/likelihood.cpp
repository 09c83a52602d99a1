#include "atv/likelihood.hpp"

#include <cmath>

namespace atv {

LikelihoodEval loglik(const SeriesData& series, const AtvGarchSpec& spec,
                      const VarianceInit& init) {
    LikelihoodEval out;
    out.sigma2 = conditional_variance_path(series, spec, init);
    const int T = series.size();
    out.per_obs.resize(T);
    out.std_residuals.resize(T);
    for (int t = 0; t < T; ++t) {
        const double s2 = out.sigma2(t);
        const double x = series.x(t);
        out.per_obs(t) = -0.5 * (std::log(s2) + x * x / s2);
        out.std_residuals(t) = x / std::sqrt(s2);
    }
    out.sum = out.per_obs.sum();
    out.mean = out.sum / T;
    return out;
}

Eigen::MatrixXd score_theta2(const SeriesData& series, const AtvGarchSpec& spec,
                             const VarianceInit& init) {
    const int T = series.size();
    const int p = spec.garch.p();
    const int q = spec.garch.q();
    const int k = 1 + p + q;
    const auto [s2_0, x2_0] = init.resolve(series);
    const Eigen::VectorXd sigma2 = conditional_variance_path(series, spec, init);

    Eigen::MatrixXd d(T, k);
    // Presample derivatives are zero; the presample values themselves do not
    // depend on the parameters.
    std::vector<Eigen::VectorXd> lags(q, Eigen::VectorXd::Zero(k));
    for (int t = 1; t <= T; ++t) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(k);
        row(0) = 1.0;
        for (int i = 1; i <= p; ++i)
            row(i) = (t - i >= 1) ? series.x(t - i - 1) * series.x(t - i - 1) : x2_0;
        for (int j = 1; j <= q; ++j) {
            row(p + j) = (t - j >= 1) ? sigma2(t - j - 1) : s2_0;
            row += spec.garch.garch[j - 1] * lags[j - 1];
        }
        for (int j = q - 1; j >= 1; --j) lags[j] = lags[j - 1];
        if (q > 0) lags[0] = row;
        d.row(t - 1) = row;
    }
    return d;
}

Eigen::MatrixXd score_theta1(const SeriesData& series, const AtvGarchSpec& spec,
                             const VarianceInit& init) {
    const int T = series.size();
    const int L = spec.num_transitions();
    const int q = spec.garch.q();
    const int k = 3 * L;
    (void)init; // presample derivatives are zero regardless of the init mode

    Eigen::MatrixXd d(T, k);
    std::vector<Eigen::VectorXd> lags(q, Eigen::VectorXd::Zero(k));
    for (int t = 1; t <= T; ++t) {
        const double u = series.rescaled_time(t);
        Eigen::VectorXd row(k);
        for (int l = 0; l < L; ++l) {
            const auto& tr = spec.transitions[l];
            const double G = logistic_transition(u, tr);
            // dG/dgamma = G (1 - G) (u - c), dG/dc = -gamma G (1 - G);
            // G (1 - G) avoids exp overflow for steep slopes.
            const double G1mG = G * (1.0 - G);
            row(3 * l + 0) = G;
            row(3 * l + 1) = tr.amplitude * G1mG * (u - tr.location);
            row(3 * l + 2) = -tr.amplitude * G1mG * tr.slope;
        }
        for (int j = 1; j <= q; ++j) row += spec.garch.garch[j - 1] * lags[j - 1];
        for (int j = q - 1; j >= 1; --j) lags[j] = lags[j - 1];
        if (q > 0) lags[0] = row;
        d.row(t - 1) = row;
    }
    return d;
}

Eigen::MatrixXd taylor_regressors(const SeriesData& series, double beta1,
                                  const Eigen::VectorXd& sigma2) {
    const int T = series.size();
    Eigen::MatrixXd r2(T, 3);
    Eigen::Vector3d acc = Eigen::Vector3d::Zero(); // tau_s = 0 for s <= 0
    for (int t = 1; t <= T; ++t) {
        const double u = series.rescaled_time(t);
        acc = beta1 * acc + Eigen::Vector3d(u, u * u, u * u * u);
        r2.row(t - 1) = acc.transpose() / sigma2(t - 1);
    }
    return r2;
}

Eigen::MatrixXd ScoreMatrix::stacked() const {
    Eigen::MatrixXd s(rows(), cols());
    s << r1, r2;
    return s;
}

ScoreMatrix build_score_matrix(const SeriesData& series, const AtvGarchSpec& spec,
                               const VarianceInit& init) {
    const int T = series.size();
    const int L = spec.num_transitions();
    const Eigen::VectorXd sigma2 = conditional_variance_path(series, spec, init);
    const Eigen::MatrixXd d2 = score_theta2(series, spec, init);
    const double beta1 = spec.garch.q() >= 1 ? spec.garch.garch[0] : 0.0;

    ScoreMatrix sm;
    sm.r1.resize(T, 3 * L + d2.cols());
    if (L > 0) {
        const Eigen::MatrixXd d1 = score_theta1(series, spec, init);
        sm.r1.leftCols(3 * L) = d1;
    }
    sm.r1.rightCols(d2.cols()) = d2;
    sm.r1.array().colwise() /= sigma2.array();

    sm.r2 = taylor_regressors(series, beta1, sigma2);

    sm.e.resize(T);
    for (int t = 0; t < T; ++t) {
        const double z = series.x(t) * series.x(t) / sigma2(t);
        sm.e(t) = z - 1.0;
    }
    return sm;
}

Eigen::MatrixXd per_obs_score(const SeriesData& series, const AtvGarchSpec& spec,
                              const VarianceInit& init) {
    const int T = series.size();
    const int L = spec.num_transitions();
    const Eigen::VectorXd sigma2 = conditional_variance_path(series, spec, init);
    const Eigen::MatrixXd d2 = score_theta2(series, spec, init);
    const int k2 = static_cast<int>(d2.cols());

    Eigen::MatrixXd s(T, k2 + 3 * L);
    s.leftCols(k2) = d2;
    if (L > 0) s.rightCols(3 * L) = score_theta1(series, spec, init);

    for (int t = 0; t < T; ++t) {
        const double z2 = series.x(t) * series.x(t) / sigma2(t);
        s.row(t) *= 0.5 * (z2 - 1.0) / sigma2(t);
    }
    return s;
}

Eigen::VectorXd loglik_gradient(const SeriesData& series, const AtvGarchSpec& spec,
                                const VarianceInit& init) {
    return per_obs_score(series, spec, init).colwise().sum().transpose();
}

} // namespace atv
