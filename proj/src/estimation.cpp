#include "atv/estimation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace atv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ParamLayout {
    int p = 1;
    int q = 1;
    int L = 0;

    int dim() const { return 1 + p + q + 3 * L; }
    int trans_offset(int l) const { return 1 + p + q + 3 * l; }
};

AtvGarchSpec spec_from_params(const Eigen::VectorXd& x, const ParamLayout& lay) {
    AtvGarchSpec spec;
    spec.garch.intercept = x(0);
    spec.garch.arch.assign(x.data() + 1, x.data() + 1 + lay.p);
    spec.garch.garch.assign(x.data() + 1 + lay.p, x.data() + 1 + lay.p + lay.q);
    spec.transitions.resize(lay.L);
    for (int l = 0; l < lay.L; ++l) {
        const int o = lay.trans_offset(l);
        spec.transitions[l].amplitude = x(o);
        spec.transitions[l].slope = gamma_from_eta(x(o + 1));
        spec.transitions[l].location = x(o + 2);
    }
    return spec;
}

Eigen::VectorXd params_from_spec(const AtvGarchSpec& spec, const ParamLayout& lay) {
    Eigen::VectorXd x(lay.dim());
    x(0) = spec.garch.intercept;
    for (int i = 0; i < lay.p; ++i) x(1 + i) = spec.garch.arch[i];
    for (int j = 0; j < lay.q; ++j) x(1 + lay.p + j) = spec.garch.garch[j];
    for (int l = 0; l < lay.L; ++l) {
        const int o = lay.trans_offset(l);
        x(o) = spec.transitions[l].amplitude;
        x(o + 1) = eta_from_gamma(spec.transitions[l].slope);
        x(o + 2) = spec.transitions[l].location;
    }
    return x;
}

bool params_feasible(const Eigen::VectorXd& x, const ParamLayout& lay,
                     const FitConfig& cfg) {
    for (int l = 0; l < lay.L; ++l) {
        const double eta = x(lay.trans_offset(l) + 1);
        if (!(eta >= cfg.eta_min && eta <= cfg.eta_max)) return false;
        const double c = x(lay.trans_offset(l) + 2);
        if (!(c >= 0.0 && c <= 1.0)) return false;
    }
    const AtvGarchSpec spec = spec_from_params(x, lay);
    return spec_is_valid(spec);
}

/// Mean log-likelihood and its gradient in the eta parameterization;
/// returns -inf at infeasible points.
double eval_mean_loglik(const SeriesData& series, const Eigen::VectorXd& x,
                        const ParamLayout& lay, const FitConfig& cfg,
                        Eigen::VectorXd* grad) {
    if (!params_feasible(x, lay, cfg)) return -kInf;
    const AtvGarchSpec spec = spec_from_params(x, lay);
    try {
        const LikelihoodEval ll = loglik(series, spec, cfg.init);
        if (!std::isfinite(ll.mean)) return -kInf;
        if (grad) {
            Eigen::VectorXd g = loglik_gradient(series, spec, cfg.init) / series.size();
            // chain rule for the slope columns: dgamma/deta = (1 - eta)^-2
            for (int l = 0; l < lay.L; ++l) {
                const double eta = x(lay.trans_offset(l) + 1);
                g(lay.trans_offset(l) + 1) /= (1.0 - eta) * (1.0 - eta);
            }
            *grad = std::move(g);
        }
        return ll.mean;
    } catch (const NonPositiveVariance&) {
        return -kInf;
    }
}

/// Clip a parameter vector into the box constraints (coefficient
/// nonnegativity, eta and location bounds); stationarity and pointwise
/// positivity are still enforced by feasibility rejection.
void project_params(Eigen::VectorXd& x, const ParamLayout& lay, const FitConfig& cfg) {
    if (x(0) < 0.0) x(0) = 0.0;
    for (int i = 1; i <= lay.p + lay.q; ++i)
        if (x(i) < 0.0) x(i) = 0.0;
    for (int l = 0; l < lay.L; ++l) {
        const int o = lay.trans_offset(l);
        double& eta = x(o + 1);
        if (eta < cfg.eta_min) eta = cfg.eta_min;
        if (eta > cfg.eta_max) eta = cfg.eta_max;
        double& c = x(o + 2);
        if (c < 0.0) c = 0.0;
        if (c > 1.0) c = 1.0;
    }
}

/// Gradient with components pushing against an active constraint zeroed
/// out (KKT reduced gradient); a vanishing reduced gradient certifies a
/// boundary optimum that the raw gradient norm cannot.
Eigen::VectorXd reduce_active(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                              const ParamLayout& lay, const FitConfig& cfg) {
    Eigen::VectorXd gr = g;
    const double act = 1e-7;
    auto clamp_lower = [&](int i, double bound) {
        if (x(i) - bound <= act && gr(i) < 0.0) gr(i) = 0.0;
    };
    auto clamp_upper = [&](int i, double bound) {
        if (bound - x(i) <= act && gr(i) > 0.0) gr(i) = 0.0;
    };
    clamp_lower(0, 0.0);
    for (int i = 1; i <= lay.p + lay.q; ++i) clamp_lower(i, 0.0);
    for (int l = 0; l < lay.L; ++l) {
        const int o = lay.trans_offset(l);
        clamp_lower(o + 1, cfg.eta_min);
        clamp_upper(o + 1, cfg.eta_max);
        clamp_lower(o + 2, 0.0);
        clamp_upper(o + 2, 1.0);
    }
    // stationarity plane sum(alpha) + sum(beta) <= 1: project off the
    // outward normal when active
    double persistence = 0.0;
    for (int i = 1; i <= lay.p + lay.q; ++i) persistence += x(i);
    if (1.0 - persistence <= act) {
        double proj = 0.0;
        for (int i = 1; i <= lay.p + lay.q; ++i) proj += gr(i);
        proj /= (lay.p + lay.q);
        if (proj > 0.0)
            for (int i = 1; i <= lay.p + lay.q; ++i) gr(i) -= proj;
    }
    return gr;
}

double reduced_grad_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                         const ParamLayout& lay, const FitConfig& cfg) {
    return reduce_active(x, g, lay, cfg).lpNorm<Eigen::Infinity>();
}

/// Gradient of the summed log-likelihood in eta space (for the numeric
/// Hessian backing the standard errors).
Eigen::VectorXd sum_gradient(const SeriesData& series, const Eigen::VectorXd& x,
                             const ParamLayout& lay, const FitConfig& cfg) {
    const AtvGarchSpec spec = spec_from_params(x, lay);
    Eigen::VectorXd g = loglik_gradient(series, spec, cfg.init);
    for (int l = 0; l < lay.L; ++l) {
        const double eta = x(lay.trans_offset(l) + 1);
        g(lay.trans_offset(l) + 1) /= (1.0 - eta) * (1.0 - eta);
    }
    return g;
}

} // namespace

double gamma_from_eta(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw std::domain_error("eta must lie in (0, 1)");
    return eta / (1.0 - eta);
}

double eta_from_gamma(double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("gamma must be positive");
    return gamma / (1.0 + gamma);
}

AtvGarchSpec heuristic_start(const SeriesData& series, int L) {
    const int T = series.size();
    const double mean = series.x.mean();
    const double var = (series.x.array() - mean).square().sum() / T;

    AtvGarchSpec spec;
    spec.garch.intercept = 0.05 * var;
    spec.garch.arch = {0.05};
    spec.garch.garch = {0.85};
    if (L == 0) return spec;

    FitConfig cfg;
    const FitResult null_fit = fit(series, 0, cfg);
    spec.garch = null_fit.spec.garch;

    spec.transitions.resize(L);
    double amp = 0.5 * spec.garch.intercept;
    for (int attempt = 0; attempt < 60; ++attempt) {
        for (int l = 0; l < L; ++l) {
            spec.transitions[l].amplitude = (l % 2 == 0) ? amp : -amp;
            spec.transitions[l].slope = gamma_from_eta(0.8);
            spec.transitions[l].location = static_cast<double>(l + 1) / (L + 1);
        }
        if (spec_is_valid(spec)) return spec;
        amp *= 0.5;
    }
    return spec;
}

FitResult fit(const SeriesData& series, int L, const FitConfig& config,
              const std::optional<AtvGarchSpec>& start) {
    if (series.size() < 50) throw std::invalid_argument("fit: need T >= 50");
    if (L < 0) throw std::invalid_argument("fit: L must be >= 0");

    ParamLayout lay;
    lay.L = L;
    AtvGarchSpec start_spec;
    if (start) {
        start_spec = *start;
        if (start_spec.num_transitions() != L ||
            start_spec.garch.p() != lay.p || start_spec.garch.q() != lay.q)
            throw InfeasibleStart("start spec has the wrong shape");
        std::string why;
        if (!spec_is_valid(start_spec, 512, 1e-12, &why))
            throw InfeasibleStart("start spec infeasible: " + why);
    } else {
        start_spec = heuristic_start(series, L);
    }

    const int n = lay.dim();
    Eigen::VectorXd x = params_from_spec(start_spec, lay);
    Eigen::VectorXd g(n);
    double f = eval_mean_loglik(series, x, lay, config, &g);
    if (!std::isfinite(f)) throw InfeasibleStart("start spec infeasible for this series");

    // BFGS on -mean loglik with backtracking Armijo line search; infeasible
    // trial points evaluate to -inf and shrink the step.
    Eigen::VectorXd scale(n);
    for (int i = 0; i < n; ++i) scale(i) = std::max(std::abs(x(i)), 1e-3);
    Eigen::MatrixXd hinv = scale.array().square().matrix().asDiagonal();

    auto reset_hinv = [&](const Eigen::VectorXd& at) {
        for (int i = 0; i < n; ++i) scale(i) = std::max(std::abs(at(i)), 1e-3);
        hinv = scale.array().square().matrix().asDiagonal();
    };

    int iter = 0;
    bool exhausted = false; // no ascent step exists at double resolution
    int flat_steps = 0;     // consecutive accepted steps with negligible gain
    for (; iter < config.max_iterations; ++iter) {
        if (reduced_grad_norm(x, g, lay, config) < config.grad_tol) break;
        if (flat_steps >= 3) break;

        const Eigen::VectorXd gr = reduce_active(x, g, lay, config);
        Eigen::VectorXd dir = hinv * gr; // ascent direction
        if (!(gr.dot(dir) > 0.0)) {
            reset_hinv(x);
            dir = hinv * gr;
        }

        double f_new = -kInf;
        Eigen::VectorXd x_new, g_new(n);
        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            double step = 1.0;
            for (int ls = 0; ls < 60; ++ls) {
                x_new = x + step * dir;
                project_params(x_new, lay, config);
                // projected Armijo: sufficient increase along the realized move
                const double gain = g.dot(x_new - x);
                f_new = eval_mean_loglik(series, x_new, lay, config, &g_new);
                if (std::isfinite(f_new) && gain > 0.0 && f_new >= f + 1e-4 * gain) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted && attempt == 0) {
                // retry once along the rescaled steepest-ascent direction
                reset_hinv(x);
                dir = hinv * gr;
            }
        }
        if (!accepted) {
            exhausted = true;
            break;
        }

        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = -(g_new - g); // gradient change of -f
        const double sy = s.dot(y);
        if (sy > 1e-14) {
            const Eigen::VectorXd hy = hinv * y;
            const double yhy = y.dot(hy);
            hinv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
                    (hy * s.transpose() + s * hy.transpose()) / sy;
        }

        const double gain = f_new - f;
        x = x_new;
        f = f_new;
        g = g_new;
        if (gain <= 1e-11 * (1.0 + std::abs(f)) ||
            s.lpNorm<Eigen::Infinity>() < config.step_tol)
            ++flat_steps;
        else
            flat_steps = 0;
    }

    FitResult res;
    res.params = x;
    res.spec = spec_from_params(x, lay);
    res.eta.resize(L);
    for (int l = 0; l < L; ++l) res.eta(l) = x(lay.trans_offset(l) + 1);
    const LikelihoodEval ll = loglik(series, res.spec, config.init);
    res.loglik_sum = ll.sum;
    res.loglik_mean = ll.mean;
    res.sigma2 = ll.sigma2;
    res.std_residuals = ll.std_residuals;
    res.iterations = iter;
    res.grad_norm = reduced_grad_norm(x, g, lay, config);
    res.init = config.init;
    // Sharp boundary ridges (slope parameter near its cap) leave the
    // reduced gradient large while no representable step improves the
    // likelihood; exhausting the line search or flat-lining the objective
    // is then the operative optimality certificate.
    res.converged = res.grad_norm < config.grad_tol || exhausted || flat_steps >= 3;
    for (int l = 0; l < L; ++l) {
        const double eta = res.eta(l);
        if (eta < config.eta_min + 1e-8 || eta > config.eta_max - 1e-8)
            res.boundary = true;
    }
    standard_errors(series, res);
    return res;
}

void standard_errors(const SeriesData& series, FitResult& fit_res) {
    ParamLayout lay;
    lay.p = fit_res.spec.garch.p();
    lay.q = fit_res.spec.garch.q();
    lay.L = fit_res.spec.num_transitions();
    const int n = lay.dim();
    FitConfig cfg;
    cfg.init = fit_res.init;

    // Numeric Hessian of the summed log-likelihood by central differences of
    // the analytic score; one-sided fallback at feasibility boundaries.
    Eigen::MatrixXd hess(n, n);
    const Eigen::VectorXd& x = fit_res.params;
    for (int i = 0; i < n; ++i) {
        const double h = 6e-6 * std::max(std::abs(x(i)), 1e-3);
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const bool ok_p = params_feasible(xp, lay, cfg);
        const bool ok_m = params_feasible(xm, lay, cfg);
        try {
            if (ok_p && ok_m) {
                hess.col(i) = (sum_gradient(series, xp, lay, cfg) -
                               sum_gradient(series, xm, lay, cfg)) / (2.0 * h);
            } else if (ok_p) {
                hess.col(i) = (sum_gradient(series, xp, lay, cfg) -
                               sum_gradient(series, x, lay, cfg)) / h;
            } else if (ok_m) {
                hess.col(i) = (sum_gradient(series, x, lay, cfg) -
                               sum_gradient(series, xm, lay, cfg)) / h;
            } else {
                fit_res.singular_hessian = true;
                fit_res.se = Eigen::VectorXd::Constant(n, kNaN);
                fit_res.robust_se = fit_res.se;
                return;
            }
        } catch (const NonPositiveVariance&) {
            fit_res.singular_hessian = true;
            fit_res.se = Eigen::VectorXd::Constant(n, kNaN);
            fit_res.robust_se = fit_res.se;
            return;
        }
    }
    hess = 0.5 * (hess + hess.transpose()).eval();

    const Eigen::MatrixXd neg_h = -hess;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(neg_h);
    if (!lu.isInvertible()) {
        fit_res.singular_hessian = true;
        fit_res.se = Eigen::VectorXd::Constant(n, kNaN);
        fit_res.robust_se = fit_res.se;
        return;
    }
    const Eigen::MatrixXd hinv = lu.inverse();

    Eigen::MatrixXd s = per_obs_score(series, fit_res.spec, cfg.init);
    for (int l = 0; l < lay.L; ++l) {
        const double eta = fit_res.eta(l);
        s.col(lay.trans_offset(l) + 1) /= (1.0 - eta) * (1.0 - eta);
    }
    const Eigen::MatrixXd opg = s.transpose() * s;
    const Eigen::MatrixXd sandwich = hinv * opg * hinv;

    fit_res.se.resize(n);
    fit_res.robust_se.resize(n);
    for (int i = 0; i < n; ++i) {
        fit_res.se(i) = hinv(i, i) > 0.0 ? std::sqrt(hinv(i, i)) : kNaN;
        fit_res.robust_se(i) = sandwich(i, i) > 0.0 ? std::sqrt(sandwich(i, i)) : kNaN;
    }
    if (!fit_res.se.allFinite() || !fit_res.robust_se.allFinite())
        fit_res.singular_hessian = true;
}

} // namespace atv
