#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "atv/errors.hpp"

namespace atv {

/// One logistic transition G(u; gamma, c) = 1 / (1 + exp(-gamma (u - c)))
/// scaled by an amplitude in variance units.
struct TransitionParams {
    double amplitude = 0.0; ///< alpha_0l, may be negative
    double slope = 1.0;     ///< gamma_l > 0
    double location = 0.5;  ///< c_l in [0, 1], rescaled time
};

/// Plain GARCH(p,q) block of the volatility equation.
struct GarchParams {
    double intercept = 0.0;         ///< alpha_0 > 0
    std::vector<double> arch;       ///< alpha_1..alpha_p
    std::vector<double> garch;      ///< beta_1..beta_q

    int p() const { return static_cast<int>(arch.size()); }
    int q() const { return static_cast<int>(garch.size()); }

    double persistence() const;
    /// alpha_0 / (1 - sum alpha - sum beta); valid when persistence < 1.
    double unconditional_variance() const;
};

/// Full parameterization: GARCH coefficients plus L logistic transitions.
struct AtvGarchSpec {
    GarchParams garch;
    std::vector<TransitionParams> transitions;

    int num_transitions() const { return static_cast<int>(transitions.size()); }
    int num_params() const { return 1 + garch.p() + garch.q() + 3 * num_transitions(); }
};

enum class InnovationKind { StandardNormal, StudentT };

/// Innovation distribution; t draws are rescaled to unit variance.
struct InnovationDist {
    InnovationKind kind = InnovationKind::StandardNormal;
    double dof = 5.0; ///< only for StudentT, must be > 4

    static InnovationDist normal() { return {InnovationKind::StandardNormal, 0.0}; }
    static InnovationDist student_t(double nu) { return {InnovationKind::StudentT, nu}; }
};

/// An observed or simulated return series; rescaled time of observation t
/// (1-based) is exactly t / T.
struct SeriesData {
    Eigen::VectorXd x;

    int size() const { return static_cast<int>(x.size()); }
    double rescaled_time(int t) const { return static_cast<double>(t) / x.size(); }
};

enum class VarianceInitMode {
    SampleVariance,  ///< sigma2_0 = x2_0 = sample variance of the series
    FirstObsSquared, ///< sigma2_0 = x2_0 = X_1^2
    Explicit,        ///< user-supplied presample values
};

/// Presample values seeding the variance recursion.
struct VarianceInit {
    VarianceInitMode mode = VarianceInitMode::SampleVariance;
    double sigma2_0 = 1.0; ///< used when mode == Explicit
    double x2_0 = 1.0;     ///< used when mode == Explicit

    static VarianceInit sample_variance() { return {VarianceInitMode::SampleVariance, 0, 0}; }
    static VarianceInit first_obs_squared() { return {VarianceInitMode::FirstObsSquared, 0, 0}; }
    static VarianceInit explicit_values(double s2, double x2) {
        return {VarianceInitMode::Explicit, s2, x2};
    }

    /// Resolve the presample (sigma2_0, x2_0) pair for a concrete series.
    std::pair<double, double> resolve(const SeriesData& series) const;
};

/// Overflow-safe logistic transition value in (0, 1); exactly 1/2 at u = c.
double logistic_transition(double u, const TransitionParams& params);

/// Time-varying intercept g(u) = sum_l alpha_0l G_l(u); 0 when L = 0.
double intercept_g(double u, const AtvGarchSpec& spec);

/// Validity checks used by the estimator's feasibility tests. The pointwise
/// positivity of alpha_0 + g is checked on the grid {t/T} plus transition
/// centers; `grid_size` controls the grid resolution.
bool spec_is_valid(const AtvGarchSpec& spec, int grid_size = 512,
                   double eps = 1e-12, std::string* why = nullptr);

/// Conditional-variance recursion sigma2_t = alpha_0 + g(t/T) +
/// sum alpha_i X^2_{t-i} + sum beta_j sigma2_{t-j}, t = 1..T.
/// Throws NonPositiveVariance if any sigma2_t <= 0.
Eigen::VectorXd conditional_variance_path(const SeriesData& series,
                                          const AtvGarchSpec& spec,
                                          const VarianceInit& init);

/// Simulate burn_in + T observations of X_t = sigma_t Z_t and keep the last
/// T. During burn-in the intercept is frozen at g(1/T); rescaled time runs
/// over the retained sample only. The recursion starts at the unconditional
/// variance of the L = 0 skeleton. Bit-reproducible given the seed.
SeriesData simulate(const AtvGarchSpec& spec, int T, const InnovationDist& dist,
                    int burn_in, std::uint64_t seed);

} // namespace atv
