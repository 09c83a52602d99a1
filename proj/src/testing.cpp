#include "atv/testing.hpp"

#include <cmath>
#include <limits>

namespace atv {

namespace {

/// Rank-revealing least squares: returns the residual y - A b and reports
/// the numeric rank of A. Deterministic for identical inputs.
Eigen::VectorXd ls_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                            double rank_tol, int* rank_out = nullptr) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rank_tol);
    if (rank_out) *rank_out = static_cast<int>(svd.rank());
    return y - a * svd.solve(y);
}

/// Regularized upper incomplete gamma Q(a, x) by the standard series /
/// continued-fraction split.
double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        // lower series P(a, x); Q = 1 - P
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(log_prefix);
    }
    // Lentz continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(log_prefix);
}

int numeric_rank(const Eigen::MatrixXd& a, double rank_tol) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    svd.setThreshold(rank_tol);
    return static_cast<int>(svd.rank());
}

/// The statistics are projection-based, so rank deficiency inside the null
/// score block is harmless (pseudo-inverse solves); they are undefined only
/// when the Taylor columns add fewer than 3 dimensions beyond the null span.
void require_taylor_rank(const ScoreMatrix& sm, const Eigen::MatrixXd& stacked,
                         double rank_tol) {
    if (numeric_rank(stacked, rank_tol) - numeric_rank(sm.r1, rank_tol) < 3)
        throw RankDeficientRegressors(
            "Taylor regressors are numerically collinear with the null scores");
}

TestResult make_result(TestVariant variant, double stat, const FitResult& null_fit) {
    TestResult r;
    r.variant = variant;
    r.statistic = stat;
    r.df = 3;
    r.p_value_raw = chi2_upper_tail(stat, 3);
    r.p_value = r.p_value_raw < 1e-16 ? 0.0 : r.p_value_raw;
    r.null_transitions = null_fit.spec.num_transitions();
    r.boundary_null = null_fit.boundary;
    return r;
}

} // namespace

std::string to_string(TestVariant v) {
    return v == TestVariant::LM ? "LM" : "robust-LM";
}

double chi2_upper_tail(double x, int df) {
    if (x < 0.0) throw std::domain_error("chi2_upper_tail: x must be >= 0");
    return gamma_q(0.5 * df, 0.5 * x);
}

TestResult lm_test(const SeriesData& series, const FitResult& null_fit,
                   const TestOptions& opts) {
    const int T = series.size();
    const ScoreMatrix sm = build_score_matrix(series, null_fit.spec, null_fit.init);

    const Eigen::MatrixXd stacked = sm.stacked();
    require_taylor_rank(sm, stacked, opts.rank_tol);

    const Eigen::VectorXd e_orth =
        opts.orthogonalize ? ls_residual(sm.r1, sm.e, opts.rank_tol) : sm.e;
    const double ssr0 = e_orth.squaredNorm();
    const double ssr1 = ls_residual(stacked, e_orth, opts.rank_tol).squaredNorm();

    TestResult r = make_result(TestVariant::LM, T * (ssr0 - ssr1) / ssr0, null_fit);
    r.ssr0 = ssr0;
    r.ssr1 = ssr1;
    return r;
}

TestResult robust_lm_test(const SeriesData& series, const FitResult& null_fit,
                          const TestOptions& opts) {
    const int T = series.size();
    const ScoreMatrix sm = build_score_matrix(series, null_fit.spec, null_fit.init);

    const Eigen::VectorXd e_orth =
        opts.orthogonalize ? ls_residual(sm.r1, sm.e, opts.rank_tol) : sm.e;

    Eigen::MatrixXd w(T, 3);
    for (int j = 0; j < 3; ++j)
        w.col(j) = ls_residual(sm.r1, sm.r2.col(j), opts.rank_tol);
    const double w_scale = w.norm();
    const double r2_scale = sm.r2.norm();
    if (w_scale <= opts.rank_tol * std::max(r2_scale, 1.0))
        throw RankDeficientRegressors("Taylor regressors are spanned by the null scores");

    Eigen::MatrixXd ew = w.array().colwise() * e_orth.array();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(ew);
    svd.setThreshold(opts.rank_tol);
    if (svd.rank() < 3)
        throw RankDeficientRegressors("weighted residual products are collinear");

    const double ssr =
        ls_residual(ew, Eigen::VectorXd::Ones(T), opts.rank_tol).squaredNorm();
    double stat = T - ssr;
    // T - SSR is nonnegative up to regression round-off.
    if (stat < 0.0) stat = 0.0;

    TestResult r = make_result(TestVariant::RobustLM, stat, null_fit);
    r.ssr1 = ssr;
    return r;
}

double lm_quadratic_form(const SeriesData& series, const FitResult& null_fit,
                         const TestOptions& opts) {
    const ScoreMatrix sm = build_score_matrix(series, null_fit.spec, null_fit.init);
    const Eigen::MatrixXd stacked = sm.stacked();
    require_taylor_rank(sm, stacked, opts.rank_tol);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(opts.rank_tol);
    const Eigen::VectorXd fitted = stacked * svd.solve(sm.e);
    return 0.5 * sm.e.dot(fitted);
}

SpecificationTrace sequential_specify(const SeriesData& series, int max_L,
                                      double level, const FitConfig& config,
                                      TestVariant variant, const TestOptions& opts) {
    if (max_L < 1) throw std::invalid_argument("sequential_specify: max_L must be >= 1");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("sequential_specify: level must lie in (0, 1)");

    SpecificationTrace trace;
    trace.level = level;
    trace.deciding_variant = variant;

    for (int L0 = 0; L0 < max_L; ++L0) {
        FitConfig cfg = config;
        // Stationary null: sample variance; nonstationary null: first
        // observation squared.
        cfg.init = L0 == 0 ? VarianceInit::sample_variance()
                           : VarianceInit::first_obs_squared();
        FitResult null_fit = fit(series, L0, cfg);

        SpecificationStep step;
        step.null_transitions = L0;
        step.fit_converged = null_fit.converged;
        if (!null_fit.converged) {
            trace.steps.push_back(step);
            trace.selected_transitions = L0;
            trace.final_fit = std::move(null_fit);
            trace.terminated_by_nonconvergence = true;
            return trace;
        }
        step.lm = lm_test(series, null_fit, opts);
        step.robust = robust_lm_test(series, null_fit, opts);
        step.p_used = variant == TestVariant::LM ? step.lm.p_value_raw
                                                 : step.robust.p_value_raw;
        step.rejected = step.p_used < level;
        trace.steps.push_back(step);
        if (!step.rejected) {
            trace.selected_transitions = L0;
            trace.final_fit = std::move(null_fit);
            return trace;
        }
    }
    // Every null up to max_L - 1 was rejected: the selected model has max_L
    // transitions and is fitted without a further test.
    FitConfig cfg = config;
    cfg.init = VarianceInit::first_obs_squared();
    trace.final_fit = fit(series, max_L, cfg);
    trace.selected_transitions = max_L;
    return trace;
}

} // namespace atv
