#pragma once

#include <Eigen/Dense>

#include "atv/model.hpp"

namespace atv {

/// Gaussian quasi log-likelihood of a series under a given spec, together
/// with the per-observation terms and standardized residuals.
struct LikelihoodEval {
    double sum = 0.0;                 ///< sum_t l_t
    double mean = 0.0;                ///< (1/T) sum_t l_t
    Eigen::VectorXd per_obs;          ///< l_t = -1/2 (log sigma2_t + X_t^2 / sigma2_t)
    Eigen::VectorXd sigma2;           ///< conditional variances
    Eigen::VectorXd std_residuals;    ///< Z_t = X_t / sigma_t
};

LikelihoodEval loglik(const SeriesData& series, const AtvGarchSpec& spec,
                      const VarianceInit& init);

/// Per-observation derivatives d sigma2_t / d theta2 with
/// theta2 = (alpha_0, alpha_1, beta_1). Analytic recursion for p = q = 1:
///   d sigma2_t = (1, X^2_{t-1}, sigma2_{t-1})' + beta_1 d sigma2_{t-1},
/// started at a zero presample derivative. Rows are observations.
Eigen::MatrixXd score_theta2(const SeriesData& series, const AtvGarchSpec& spec,
                             const VarianceInit& init);

/// Per-observation derivatives d sigma2_t / d theta1, columns grouped per
/// transition as (amplitude, slope, location) blocks:
///   ( G_l, alpha_0l G_l (1 - G_l) (u - c_l), -alpha_0l G_l (1 - G_l) gamma_l )
/// plus beta_1 times the lagged derivative, truncated at t = 1.
Eigen::MatrixXd score_theta1(const SeriesData& series, const AtvGarchSpec& spec,
                             const VarianceInit& init);

/// Taylor-polynomial regressors of the test:
///   r2_t = (1 / sigma2_t) sum_{j=0}^{t-1} beta_1^j tau_{t-j},
/// tau_s = (s/T, (s/T)^2, (s/T)^3), truncated at the first observation.
/// `sigma2` is the fitted null-model variance path.
Eigen::MatrixXd taylor_regressors(const SeriesData& series, double beta1,
                                  const Eigen::VectorXd& sigma2);

/// T x k stack of (r1_t, r2_t) rows plus the residual vector e_t = Z_t^2 - 1.
/// r1_t = (1/sigma2_t) d sigma2_t / d(theta1, theta2); the theta1 block is
/// empty when the null has no transitions. k = 3L + 3 + 3.
struct ScoreMatrix {
    Eigen::MatrixXd r1; ///< T x (3L + 3)
    Eigen::MatrixXd r2; ///< T x 3
    Eigen::VectorXd e;  ///< Z_t^2 - 1

    int rows() const { return static_cast<int>(r1.rows()); }
    int cols() const { return static_cast<int>(r1.cols() + r2.cols()); }
    Eigen::MatrixXd stacked() const;
};

ScoreMatrix build_score_matrix(const SeriesData& series, const AtvGarchSpec& spec,
                               const VarianceInit& init);

/// Gradient of the summed log-likelihood with respect to the natural
/// parameter vector (alpha_0, alpha_1..p, beta_1..q, then per transition
/// amplitude, slope, location). Assembled from the analytic score
/// recursions as sum_t 1/2 (Z_t^2 - 1) (1/sigma2_t) d sigma2_t.
Eigen::VectorXd loglik_gradient(const SeriesData& series, const AtvGarchSpec& spec,
                                const VarianceInit& init);

/// Per-observation score rows (same column layout as loglik_gradient);
/// row t is d l_t / d theta. The gradient above is the column sum.
Eigen::MatrixXd per_obs_score(const SeriesData& series, const AtvGarchSpec& spec,
                              const VarianceInit& init);

} // namespace atv
