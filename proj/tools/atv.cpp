// Command-line front end: composes the library into the simulate / fit /
// test / specify / mc-size / mc-power / summary pipelines.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "atv/data.hpp"
#include "atv/estimation.hpp"
#include "atv/montecarlo.hpp"
#include "atv/testing.hpp"

namespace {

using nlohmann::json;

std::string fmt3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::ostream& machine(std::ostream& os) {
    os << std::setprecision(17);
    return os;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

struct InputOpts {
    atv::DatasetConfig cfg;
    std::string kind = "returns";

    void attach(CLI::App* cmd) {
        cmd->add_option("--input", cfg.path, "input CSV")->required();
        cmd->add_option("--date-column", cfg.date_column, "date column name");
        cmd->add_option("--value-column", cfg.value_column, "value column name");
        cmd->add_option("--kind", kind, "prices|returns")
            ->check(CLI::IsMember({"prices", "returns"}));
        cmd->add_option("--scale", cfg.scale, "multiply returns by this factor")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--date-min", cfg.date_min, "inclusive ISO date lower bound");
        cmd->add_option("--date-max", cfg.date_max, "inclusive ISO date upper bound");
    }

    atv::SeriesData load() {
        cfg.kind = kind == "prices" ? atv::ValueKind::Prices : atv::ValueKind::Returns;
        atv::SeriesData s = atv::load_returns(cfg);
        if (cfg.dropped_rows > 0)
            std::cerr << "dropped " << cfg.dropped_rows << " rows with missing values\n";
        return s;
    }
};

atv::FitConfig make_fit_config(const std::string& init_mode) {
    atv::FitConfig cfg;
    cfg.init = init_mode == "first-obs" ? atv::VarianceInit::first_obs_squared()
                                        : atv::VarianceInit::sample_variance();
    return cfg;
}

json fit_to_json(const atv::FitResult& r) {
    const auto& g = r.spec.garch;
    json j;
    j["intercept"] = g.intercept;
    j["arch"] = g.arch;
    j["garch"] = g.garch;
    json trans = json::array();
    for (int l = 0; l < r.spec.num_transitions(); ++l) {
        const auto& t = r.spec.transitions[l];
        trans.push_back({{"amplitude", t.amplitude},
                         {"slope", t.slope},
                         {"eta", r.eta(l)},
                         {"location", t.location}});
    }
    j["transitions"] = trans;
    j["se"] = std::vector<double>(r.se.data(), r.se.data() + r.se.size());
    j["robust_se"] =
        std::vector<double>(r.robust_se.data(), r.robust_se.data() + r.robust_se.size());
    j["loglik_sum"] = r.loglik_sum;
    j["loglik_mean"] = r.loglik_mean;
    j["converged"] = r.converged;
    j["boundary"] = r.boundary;
    j["singular_hessian"] = r.singular_hessian;
    j["iterations"] = r.iterations;
    j["grad_norm"] = r.grad_norm;
    return j;
}

// Free-parameter names in the order of FitResult::params / se.
std::vector<std::string> param_names(const atv::AtvGarchSpec& spec) {
    std::vector<std::string> names{"alpha0"};
    for (int i = 0; i < spec.garch.p(); ++i) names.push_back("alpha" + std::to_string(i + 1));
    for (int j = 0; j < spec.garch.q(); ++j) names.push_back("beta" + std::to_string(j + 1));
    for (int l = 0; l < spec.num_transitions(); ++l) {
        const std::string s = std::to_string(l + 1);
        names.push_back("alpha0" + s);
        names.push_back("eta" + s);
        names.push_back("c" + s);
    }
    return names;
}

void print_fit_table(const atv::FitResult& r) {
    const auto names = param_names(r.spec);
    std::cout << "parameter  estimate     se  robust se\n";
    for (std::size_t i = 0; i < names.size(); ++i)
        std::cout << std::left << std::setw(9) << names[i] << std::right << std::setw(10)
                  << fmt3(r.params(static_cast<int>(i))) << std::setw(7)
                  << fmt3(r.se(static_cast<int>(i))) << std::setw(11)
                  << fmt3(r.robust_se(static_cast<int>(i))) << "\n";
    std::cout << "log-likelihood " << fmt3(r.loglik_sum) << ", "
              << (r.converged ? "converged" : "NOT converged") << " in " << r.iterations
              << " iterations\n";
}

std::string tests_csv(const std::vector<atv::TestResult>& results) {
    std::ostringstream os;
    machine(os) << "variant,null_L,statistic,df,p_value\n";
    for (const auto& t : results)
        os << to_string(t.variant) << ',' << t.null_transitions << ',' << t.statistic
           << ',' << t.df << ',' << t.p_value_raw << "\n";
    return os.str();
}

std::string trace_csv(const atv::SpecificationTrace& tr) {
    std::ostringstream os;
    machine(os) << "null_L,lm_stat,lm_p,robust_stat,robust_p,rejected,fit_converged\n";
    for (const auto& s : tr.steps)
        os << s.null_transitions << ',' << s.lm.statistic << ',' << s.lm.p_value_raw << ','
           << s.robust.statistic << ',' << s.robust.p_value_raw << ',' << (s.rejected ? 1 : 0)
           << ',' << (s.fit_converged ? 1 : 0) << "\n";
    return os.str();
}

void print_trace(const atv::SpecificationTrace& tr) {
    std::cout << "null L     LM  p-value    LMr  p-value  decision\n";
    for (const auto& s : tr.steps) {
        if (!s.fit_converged) {
            std::cout << std::setw(6) << s.null_transitions
                      << "  null fit did not converge\n";
            continue;
        }
        std::cout << std::setw(6) << s.null_transitions << std::setw(7)
                  << fmt3(s.lm.statistic) << std::setw(9) << fmt3(s.lm.p_value)
                  << std::setw(7) << fmt3(s.robust.statistic) << std::setw(9)
                  << fmt3(s.robust.p_value) << "  "
                  << (s.rejected ? "reject" : "accept") << "\n";
    }
    if (tr.terminated_by_nonconvergence)
        std::cout << "terminated by non-convergence\n";
    std::cout << "selected L = " << tr.selected_transitions << " at level "
              << tr.level << " (" << to_string(tr.deciding_variant) << ")\n";
}

void print_summary(const atv::SummaryStats& s, int T) {
    std::cout << "T        " << T << "\n"
              << "mean     " << fmt3(s.mean) << "\n"
              << "sd       " << fmt3(s.sd) << "\n"
              << "median   " << fmt3(s.median) << "\n"
              << "min      " << fmt3(s.min) << "\n"
              << "max      " << fmt3(s.max) << "\n"
              << "skew     " << fmt3(s.skewness) << "\n"
              << "kurt     " << fmt3(s.kurtosis) << "\n"
              << "r skew   " << fmt3(s.robust_skewness) << "\n"
              << "r kurt   " << fmt3(s.robust_kurtosis) << "\n";
}

const atv::DgpConfig& lookup_dgp(const std::string& id) {
    const auto& reg = atv::dgp_registry();
    const auto it = reg.find(id);
    if (it == reg.end()) throw CLI::ValidationError("--dgp", "unknown DGP id: " + id);
    return it->second;
}

void write_mc_outputs(const atv::McResult& res, const std::string& out,
                      const std::string& curves_prefix, atv::CurveKind kind) {
    write_file(out, mc_result_csv(res));
    if (!curves_prefix.empty()) {
        write_file(curves_prefix + "_lm.csv",
                   curve_csv(emit_curves(res, kind, atv::TestVariant::LM)));
        write_file(curves_prefix + "_robust.csv",
                   curve_csv(emit_curves(res, kind, atv::TestVariant::RobustLM)));
    }
    std::cout << "level    LM  robust\n";
    for (std::size_t i = 0; i < res.levels.size(); ++i)
        std::cout << std::setw(5) << res.levels[i] << std::setw(8) << fmt3(res.lm_reject[i])
                  << std::setw(8) << fmt3(res.robust_reject[i]) << "\n";
    std::cout << res.n_converged << " converged, " << res.n_failed << " failed, "
              << fmt3(res.elapsed_seconds) << "s\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"additive time-varying GARCH: estimation, testing, simulation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file; flags override");

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "simulate a registered DGP to CSV");
    std::string sim_dgp, sim_out = "sim.csv";
    int sim_T = 1000, sim_burn = 200;
    std::uint64_t sim_seed = 1;
    sim->add_option("--dgp", sim_dgp, "DGP id (DGP1..DGP11, DGP3t)")->required();
    sim->add_option("--T", sim_T, "sample size")->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--burn-in", sim_burn, "burn-in length")->check(CLI::NonNegativeNumber);
    sim->add_option("--out", sim_out, "output CSV path");

    // ---- shared input options ----
    InputOpts fit_in, test_in, spec_in, sum_in;

    // ---- fit ----
    auto* fitc = app.add_subcommand("fit", "estimate an ATV-GARCH model");
    int fit_L = 0;
    std::string fit_out = "fit.json", fit_init = "sample";
    fit_in.attach(fitc);
    fitc->add_option("--L", fit_L, "number of transitions")->check(CLI::NonNegativeNumber);
    fitc->add_option("--init", fit_init, "variance initialization: sample|first-obs")
        ->check(CLI::IsMember({"sample", "first-obs"}));
    fitc->add_option("--out", fit_out, "output JSON path");

    // ---- test ----
    auto* testc = app.add_subcommand("test", "LM and robust LM tests against a null fit");
    int test_L = 0;
    std::string test_out = "test.csv", test_init = "sample";
    test_in.attach(testc);
    testc->add_option("--L", test_L, "null transition count")->check(CLI::NonNegativeNumber);
    testc->add_option("--init", test_init, "variance initialization: sample|first-obs")
        ->check(CLI::IsMember({"sample", "first-obs"}));
    testc->add_option("--out", test_out, "output CSV path");

    // ---- specify ----
    auto* specc = app.add_subcommand("specify", "sequential specification of L");
    int spec_max_L = 3;
    double spec_level = 0.05;
    std::string spec_out = "trace.csv", spec_variant = "robust", spec_fit_out;
    spec_in.attach(specc);
    specc->add_option("--max-L", spec_max_L, "largest model considered")
        ->check(CLI::PositiveNumber);
    specc->add_option("--level", spec_level, "significance level")
        ->check(CLI::Range(1e-12, 0.999999));
    specc->add_option("--variant", spec_variant, "deciding test: lm|robust")
        ->check(CLI::IsMember({"lm", "robust"}));
    specc->add_option("--out", spec_out, "trace CSV path");
    specc->add_option("--fit-out", spec_fit_out, "JSON path for the selected fit");

    // ---- mc-size / mc-power ----
    auto* mcs = app.add_subcommand("mc-size", "Monte Carlo size study");
    auto* mcp = app.add_subcommand("mc-power", "Monte Carlo power study");
    atv::McExperiment exp_size, exp_power;
    std::string mcs_out = "mc_size.csv", mcp_out = "mc_power.csv";
    std::string mcs_curves, mcp_curves;
    bool mcs_heuristic = false, mcp_heuristic = false;
    auto add_mc_opts = [](CLI::App* cmd, atv::McExperiment& e, std::string& out,
                          std::string& curves, bool& heuristic) {
        cmd->add_option("--dgp", e.dgp_id, "DGP id")->required();
        cmd->add_option("--T", e.T, "sample size")->check(CLI::PositiveNumber);
        cmd->add_option("--reps", e.replications, "replications")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", e.base_seed, "base seed");
        cmd->add_option("--burn-in", e.burn_in, "burn-in length");
        cmd->add_option("--threads", e.threads, "worker threads")
            ->envname("ATV_THREADS")
            ->check(CLI::PositiveNumber);
        cmd->add_flag("--heuristic-start", heuristic,
                      "start null fits heuristically instead of at true values");
        cmd->add_option("--out", out, "result CSV path");
        cmd->add_option("--curves", curves, "prefix for plot-ready curve CSVs");
    };
    add_mc_opts(mcs, exp_size, mcs_out, mcs_curves, mcs_heuristic);
    add_mc_opts(mcp, exp_power, mcp_out, mcp_curves, mcp_heuristic);
    int mcp_null_L = 0;
    mcp->add_option("--null-L", mcp_null_L, "null transition count (< DGP's L)")
        ->required()
        ->check(CLI::NonNegativeNumber);

    // ---- summary ----
    auto* sumc = app.add_subcommand("summary", "summary statistics of a return series");
    std::string sum_out;
    sum_in.attach(sumc);
    sumc->add_option("--out", sum_out, "optional CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const atv::DgpConfig& dgp = lookup_dgp(sim_dgp);
            const atv::SeriesData s = simulate(dgp.spec, sim_T, dgp.dist, sim_burn, sim_seed);
            std::ostringstream os;
            machine(os) << "date,value\n";
            for (int t = 0; t < s.size(); ++t) os << (t + 1) << ',' << s.x(t) << "\n";
            write_file(sim_out, os.str());
            std::cout << "wrote " << s.size() << " observations to " << sim_out << "\n";
        } else if (fitc->parsed()) {
            const atv::SeriesData s = fit_in.load();
            const atv::FitResult r = fit(s, fit_L, make_fit_config(fit_init));
            write_file(fit_out, fit_to_json(r).dump(2) + "\n");
            print_fit_table(r);
            return r.converged ? 0 : 1;
        } else if (testc->parsed()) {
            const atv::SeriesData s = test_in.load();
            const atv::FitResult r = fit(s, test_L, make_fit_config(test_init));
            if (!r.converged) {
                std::cerr << "null fit did not converge\n";
                return 1;
            }
            const atv::TestResult lm = lm_test(s, r);
            const atv::TestResult rob = robust_lm_test(s, r);
            write_file(test_out, tests_csv({lm, rob}));
            std::cout << "LM  = " << fmt3(lm.statistic) << "  p = " << fmt3(lm.p_value)
                      << "\nLMr = " << fmt3(rob.statistic) << "  p = " << fmt3(rob.p_value)
                      << "\n";
        } else if (specc->parsed()) {
            const atv::SeriesData s = spec_in.load();
            const atv::TestVariant variant =
                spec_variant == "lm" ? atv::TestVariant::LM : atv::TestVariant::RobustLM;
            const atv::SpecificationTrace tr =
                sequential_specify(s, spec_max_L, spec_level, atv::FitConfig{}, variant);
            write_file(spec_out, trace_csv(tr));
            if (!spec_fit_out.empty())
                write_file(spec_fit_out, fit_to_json(tr.final_fit).dump(2) + "\n");
            print_trace(tr);
        } else if (mcs->parsed()) {
            exp_size.true_start = !mcs_heuristic;
            exp_size.null_transitions =
                lookup_dgp(exp_size.dgp_id).spec.num_transitions();
            const atv::McResult res = run_size(exp_size);
            write_mc_outputs(res, mcs_out, mcs_curves, atv::CurveKind::SizeDiscrepancy);
        } else if (mcp->parsed()) {
            exp_power.true_start = !mcp_heuristic;
            exp_power.null_transitions = mcp_null_L;
            const atv::McResult res = run_power(exp_power);
            write_mc_outputs(res, mcp_out, mcp_curves, atv::CurveKind::SizePower);
        } else if (sumc->parsed()) {
            const atv::SeriesData s = sum_in.load();
            const atv::SummaryStats st = summary(s);
            print_summary(st, s.size());
            if (!sum_out.empty()) {
                std::ostringstream os;
                machine(os) << "stat,value\n"
                            << "T," << s.size() << "\nmean," << st.mean << "\nsd," << st.sd
                            << "\nmedian," << st.median << "\nmin," << st.min << "\nmax,"
                            << st.max << "\nskewness," << st.skewness << "\nkurtosis,"
                            << st.kurtosis << "\nexcess_kurtosis," << st.excess_kurtosis
                            << "\nrobust_skewness," << st.robust_skewness
                            << "\nrobust_kurtosis," << st.robust_kurtosis << "\n";
                write_file(sum_out, os.str());
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
