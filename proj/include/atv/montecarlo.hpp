#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "atv/estimation.hpp"
#include "atv/model.hpp"
#include "atv/testing.hpp"

namespace atv {

/// One data-generating process of the simulation study.
struct DgpConfig {
    std::string id;
    AtvGarchSpec spec;
    InnovationDist dist = InnovationDist::normal();
};

/// The built-in DGPs: DGP1..DGP11 plus DGP3t (DGP3 with t(5) errors).
const std::map<std::string, DgpConfig>& dgp_registry();

struct McExperiment {
    std::string dgp_id;
    int T = 1000;
    int replications = 1000;
    int burn_in = 200;
    int null_transitions = 0;
    std::vector<double> levels = {0.001, 0.0025, 0.005, 0.01, 0.025, 0.05, 0.075, 0.10};
    std::uint64_t base_seed = 1;
    int threads = 1;
    bool true_start = true; ///< start the null fit at the DGP's true values
};

struct McResult {
    std::string dgp_id;
    int T = 0;
    int replications = 0;
    std::vector<double> levels;
    std::vector<double> lm_reject;      ///< rejection frequency per level
    std::vector<double> robust_reject;
    std::vector<double> lm_mc_se;       ///< sqrt(p (1-p) / R)
    std::vector<double> robust_mc_se;
    std::vector<double> lm_stats;       ///< per converged replication
    std::vector<double> robust_stats;
    int n_converged = 0;
    int n_failed = 0;
    double elapsed_seconds = 0.0;
};

/// Size experiment: the DGP's transition count must equal the null L0.
McResult run_size(const McExperiment& experiment);

/// Power experiment: the DGP's transition count must exceed the null L0.
/// Power is not size-adjusted.
McResult run_power(const McExperiment& experiment);

enum class CurveKind { SizeDiscrepancy, SizePower };

struct CurvePoint {
    double nominal = 0.0;
    double value = 0.0;
};

/// Size-discrepancy rows are (nominal, empirical - nominal); size-power rows
/// are (nominal, empirical power).
std::vector<CurvePoint> emit_curves(const McResult& result, CurveKind kind,
                                    TestVariant variant);

/// CSV with columns dgp,T,variant,nominal_level,rejection_freq,mc_se,
/// n_converged,n_failed. Deterministic for a fixed seed.
std::string mc_result_csv(const McResult& result);

std::string curve_csv(const std::vector<CurvePoint>& points);

} // namespace atv
