#pragma once

#include <optional>

#include <Eigen/Dense>

#include "atv/likelihood.hpp"
#include "atv/model.hpp"

namespace atv {

/// gamma = eta / (1 - eta), eta in (0, 1).
double gamma_from_eta(double eta);
/// eta = gamma / (1 + gamma), gamma > 0.
double eta_from_gamma(double gamma);

struct FitConfig {
    int max_iterations = 500;
    double grad_tol = 1e-6;   ///< inf-norm of the mean log-likelihood gradient
    double step_tol = 1e-10;  ///< inf-norm of the parameter change
    VarianceInit init = VarianceInit::sample_variance();
    double eta_min = 1e-4;    ///< bounds for the transition-slope transform
    double eta_max = 1.0 - 1e-6;
};

/// Free-parameter vector layout used by the fitter and the standard errors:
/// (alpha_0, alpha_1..p, beta_1..q, then per transition amplitude, eta, c).
struct FitResult {
    AtvGarchSpec spec;               ///< estimated model, always feasible
    Eigen::VectorXd params;          ///< free vector, eta parameterization
    Eigen::VectorXd eta;             ///< eta_l per transition
    double loglik_sum = 0.0;
    double loglik_mean = 0.0;
    Eigen::VectorXd sigma2;          ///< fitted conditional variances
    Eigen::VectorXd std_residuals;   ///< X_t / sigma_t
    Eigen::VectorXd se;              ///< plain SEs (inverse numeric Hessian)
    Eigen::VectorXd robust_se;       ///< sandwich SEs
    bool converged = false;
    bool boundary = false;           ///< some eta pinned at its bound
    bool singular_hessian = false;   ///< SEs undefined (NaN markers)
    int iterations = 0;
    double grad_norm = 0.0;          ///< exit inf-norm of the mean gradient
    VarianceInit init;               ///< the init mode the fit used
};

/// Feasible heuristic starting point.
/// L = 0: alpha_0 = 0.05 var(X), alpha_1 = 0.05, beta_1 = 0.85.
/// L >= 1: GARCH block from a null fit, amplitudes 0.5 alpha_0 with
/// alternating sign kept feasible, eta = 0.8, locations equally spaced.
AtvGarchSpec heuristic_start(const SeriesData& series, int L);

/// Constrained quasi-maximum-likelihood fit of a GARCH(1,1) model augmented
/// with L logistic transitions. Maximizes the Gaussian quasi log-likelihood
/// over the feasible set; non-convergence is flagged, not thrown. Throws
/// InfeasibleStart if a user-supplied start violates the constraints.
FitResult fit(const SeriesData& series, int L, const FitConfig& config = {},
              const std::optional<AtvGarchSpec>& start = std::nullopt);

/// Plain and sandwich standard errors at the fitted point. The Hessian is
/// computed by central differences of the analytic score; the middle matrix
/// of the sandwich is the outer product of per-observation scores.
/// Recomputes and overwrites `fit.se` / `fit.robust_se`.
void standard_errors(const SeriesData& series, FitResult& fit);

} // namespace atv
