#include "atv/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace atv {

namespace {

AtvGarchSpec garch_only(double a0, double a1, double b1) {
    AtvGarchSpec s;
    s.garch.intercept = a0;
    s.garch.arch = {a1};
    s.garch.garch = {b1};
    return s;
}

AtvGarchSpec with_transitions(double a0, double a1, double b1,
                              std::vector<TransitionParams> tr) {
    AtvGarchSpec s = garch_only(a0, a1, b1);
    s.transitions = std::move(tr);
    return s;
}

std::map<std::string, DgpConfig> build_registry() {
    std::map<std::string, DgpConfig> reg;
    auto add = [&](const std::string& id, AtvGarchSpec spec,
                   InnovationDist dist = InnovationDist::normal()) {
        reg[id] = DgpConfig{id, std::move(spec), dist};
    };
    add("DGP1", garch_only(0.1, 0.1, 0.85));
    add("DGP2", garch_only(0.05, 0.05, 0.9));
    add("DGP3", garch_only(0.005, 0.05, 0.8));
    add("DGP3t", garch_only(0.005, 0.05, 0.8), InnovationDist::student_t(5.0));
    add("DGP4", with_transitions(0.005, 0.05, 0.8, {{0.015, 10.0, 0.5}}));
    add("DGP5", with_transitions(0.005, 0.05, 0.8, {{0.005, 10.0, 0.5}}));
    add("DGP6", with_transitions(0.005, 0.05, 0.8, {{0.0025, 10.0, 0.5}}));
    add("DGP7", with_transitions(0.005, 0.05, 0.8, {{0.015, 5.0, 0.5}}));
    add("DGP8", with_transitions(0.005, 0.05, 0.8, {{0.005, 5.0, 0.5}}));
    add("DGP9", with_transitions(0.005, 0.05, 0.8, {{0.0025, 5.0, 0.5}}));
    add("DGP10", with_transitions(0.005, 0.05, 0.8,
                                  {{0.01, 10.0, 0.25}, {-0.01, 10.0, 0.75}}));
    add("DGP11", with_transitions(0.005, 0.05, 0.8,
                                  {{0.005, 10.0, 0.25}, {0.005, 10.0, 0.75}}));
    return reg;
}

struct RepOutcome {
    bool ok = false;
    double lm_stat = 0.0;
    double robust_stat = 0.0;
};

RepOutcome run_replication(const DgpConfig& dgp, const McExperiment& exp, int rep) {
    RepOutcome out;
    try {
        const SeriesData series = simulate(dgp.spec, exp.T, dgp.dist, exp.burn_in,
                                           exp.base_seed + static_cast<std::uint64_t>(rep));
        // Null start: the DGP's values truncated to the null transition count.
        AtvGarchSpec start = dgp.spec;
        start.transitions.resize(exp.null_transitions);

        FitConfig cfg;
        cfg.init = exp.null_transitions == 0 ? VarianceInit::sample_variance()
                                             : VarianceInit::first_obs_squared();
        const FitResult null_fit =
            exp.true_start ? fit(series, exp.null_transitions, cfg, start)
                           : fit(series, exp.null_transitions, cfg);
        if (!null_fit.converged) return out;
        out.lm_stat = lm_test(series, null_fit).statistic;
        out.robust_stat = robust_lm_test(series, null_fit).statistic;
        out.ok = true;
    } catch (const std::exception&) {
        out.ok = false;
    }
    return out;
}

McResult run_experiment(const McExperiment& exp) {
    const auto& reg = dgp_registry();
    const auto it = reg.find(exp.dgp_id);
    if (it == reg.end()) throw std::invalid_argument("unknown DGP id: " + exp.dgp_id);
    const DgpConfig& dgp = it->second;

    const auto t_start = std::chrono::steady_clock::now();
    std::vector<RepOutcome> outcomes(exp.replications);

    const int n_threads = std::max(1, exp.threads);
    if (n_threads == 1) {
        for (int r = 0; r < exp.replications; ++r)
            outcomes[r] = run_replication(dgp, exp, r);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        for (int w = 0; w < n_threads; ++w) {
            workers.emplace_back([&, w] {
                for (int r = w; r < exp.replications; r += n_threads)
                    outcomes[r] = run_replication(dgp, exp, r);
            });
        }
        for (auto& th : workers) th.join();
    }

    McResult res;
    res.dgp_id = exp.dgp_id;
    res.T = exp.T;
    res.replications = exp.replications;
    res.levels = exp.levels;
    // Aggregation in replication order keeps the result independent of the
    // worker count.
    for (const auto& o : outcomes) {
        if (!o.ok) {
            ++res.n_failed;
            continue;
        }
        ++res.n_converged;
        res.lm_stats.push_back(o.lm_stat);
        res.robust_stats.push_back(o.robust_stat);
    }
    const int R = res.n_converged;
    for (double level : exp.levels) {
        // level 0 has an empty rejection region; critical value is +inf.
        const double crit = level > 0.0
                                ? [&] {
                                      double lo = 0.0, hi = 1e4;
                                      for (int i = 0; i < 200; ++i) {
                                          const double mid = 0.5 * (lo + hi);
                                          (chi2_upper_tail(mid, 3) > level ? lo : hi) = mid;
                                      }
                                      return 0.5 * (lo + hi);
                                  }()
                                : std::numeric_limits<double>::infinity();
        int lm_rej = 0, rob_rej = 0;
        for (double s : res.lm_stats) lm_rej += s > crit;
        for (double s : res.robust_stats) rob_rej += s > crit;
        const double p_lm = R > 0 ? static_cast<double>(lm_rej) / R : 0.0;
        const double p_rob = R > 0 ? static_cast<double>(rob_rej) / R : 0.0;
        res.lm_reject.push_back(p_lm);
        res.robust_reject.push_back(p_rob);
        res.lm_mc_se.push_back(R > 0 ? std::sqrt(p_lm * (1.0 - p_lm) / R) : 0.0);
        res.robust_mc_se.push_back(R > 0 ? std::sqrt(p_rob * (1.0 - p_rob) / R) : 0.0);
    }
    res.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

} // namespace

const std::map<std::string, DgpConfig>& dgp_registry() {
    static const std::map<std::string, DgpConfig> reg = build_registry();
    return reg;
}

McResult run_size(const McExperiment& experiment) {
    const auto& reg = dgp_registry();
    const auto it = reg.find(experiment.dgp_id);
    if (it == reg.end()) throw std::invalid_argument("unknown DGP id: " + experiment.dgp_id);
    if (it->second.spec.num_transitions() != experiment.null_transitions)
        throw std::invalid_argument("run_size: the null must be true for the DGP");
    return run_experiment(experiment);
}

McResult run_power(const McExperiment& experiment) {
    const auto& reg = dgp_registry();
    const auto it = reg.find(experiment.dgp_id);
    if (it == reg.end()) throw std::invalid_argument("unknown DGP id: " + experiment.dgp_id);
    if (it->second.spec.num_transitions() <= experiment.null_transitions)
        throw std::invalid_argument("run_power: the DGP must exceed the null");
    return run_experiment(experiment);
}

std::vector<CurvePoint> emit_curves(const McResult& result, CurveKind kind,
                                    TestVariant variant) {
    const auto& freq =
        variant == TestVariant::LM ? result.lm_reject : result.robust_reject;
    std::vector<CurvePoint> pts;
    pts.reserve(result.levels.size());
    for (std::size_t i = 0; i < result.levels.size(); ++i) {
        const double nominal = result.levels[i];
        const double value =
            kind == CurveKind::SizeDiscrepancy ? freq[i] - nominal : freq[i];
        pts.push_back({nominal, value});
    }
    return pts;
}

std::string mc_result_csv(const McResult& result) {
    std::ostringstream os;
    os.precision(17);
    os << "dgp,T,variant,nominal_level,rejection_freq,mc_se,n_converged,n_failed\n";
    auto emit = [&](TestVariant v, const std::vector<double>& freq,
                    const std::vector<double>& se) {
        for (std::size_t i = 0; i < result.levels.size(); ++i) {
            os << result.dgp_id << ',' << result.T << ',' << to_string(v) << ','
               << result.levels[i] << ',' << freq[i] << ',' << se[i] << ','
               << result.n_converged << ',' << result.n_failed << '\n';
        }
    };
    emit(TestVariant::LM, result.lm_reject, result.lm_mc_se);
    emit(TestVariant::RobustLM, result.robust_reject, result.robust_mc_se);
    return os.str();
}

std::string curve_csv(const std::vector<CurvePoint>& points) {
    std::ostringstream os;
    os.precision(17);
    os << "nominal,value\n";
    for (const auto& p : points) os << p.nominal << ',' << p.value << '\n';
    return os.str();
}

} // namespace atv
