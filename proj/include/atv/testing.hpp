#pragma once

#include <string>
#include <vector>

#include "atv/estimation.hpp"
#include "atv/likelihood.hpp"

namespace atv {

enum class TestVariant { LM, RobustLM };

std::string to_string(TestVariant v);

struct TestResult {
    TestVariant variant = TestVariant::LM;
    double statistic = 0.0;
    int df = 3;
    double p_value = 1.0;     ///< clamped display value (0 below 1e-16)
    double p_value_raw = 1.0; ///< unclamped
    int null_transitions = 0;
    double ssr0 = 0.0;        ///< auxiliary-regression diagnostics
    double ssr1 = 0.0;        ///< (SSR for the robust variant lives in ssr1)
    bool boundary_null = false;
};

struct TestOptions {
    /// Orthogonalize Z^2 - 1 against the null scores before the auxiliary
    /// regressions. Applied in both variants by default.
    bool orthogonalize = true;
    /// Relative singular-value cutoff for rank decisions.
    double rank_tol = 1e-10;
};

/// Upper tail P(chi2(df) > x) via the regularized incomplete gamma
/// function; absolute accuracy ~1e-10.
double chi2_upper_tail(double x, int df);

/// TR^2 LM test of L transitions against L + 1:
///   1. e' = residual of (Z^2 - 1) on r1, SSR0 = sum e'^2
///   2. regress e' on (r1, r2), SSR1
///   3. LM = T (SSR0 - SSR1) / SSR0, p-value from chi2(3).
TestResult lm_test(const SeriesData& series, const FitResult& null_fit,
                   const TestOptions& opts = {});

/// Wooldridge robust LM test:
///   1. residuals e' as above
///   2. regress r2 component-wise on r1, residuals w_t
///   3. regress 1 on e'_t w_t, LMr = T - SSR.
TestResult robust_lm_test(const SeriesData& series, const FitResult& null_fit,
                          const TestOptions& opts = {});

/// Quadratic-form statistic 1/2 e' S (S'S)^-1 S' e over the stacked score
/// matrix; asymptotically equivalent to the TR^2 form.
double lm_quadratic_form(const SeriesData& series, const FitResult& null_fit,
                         const TestOptions& opts = {});

struct SpecificationStep {
    int null_transitions = 0;
    TestResult lm;
    TestResult robust;
    bool rejected = false;
    bool fit_converged = true;
    double p_used = 1.0; ///< p-value of the deciding variant
};

struct SpecificationTrace {
    std::vector<SpecificationStep> steps;
    int selected_transitions = 0;
    double level = 0.05;
    TestVariant deciding_variant = TestVariant::RobustLM;
    FitResult final_fit;     ///< fit of the selected model
    bool terminated_by_nonconvergence = false;
};

/// Specific-to-general sequence: fit L = 0, test against L + 1; on rejection
/// increment L and repeat; stop at the first non-rejection or max_L.
/// Starts are heuristic unless `start_for_null` provides one per level.
SpecificationTrace sequential_specify(
    const SeriesData& series, int max_L, double level, const FitConfig& config,
    TestVariant variant = TestVariant::RobustLM, const TestOptions& opts = {});

} // namespace atv
