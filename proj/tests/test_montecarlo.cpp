#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "atv/montecarlo.hpp"

using namespace atv;

TEST_CASE("registry reproduces the DGP table") {
    const auto& reg = dgp_registry();
    CHECK(reg.size() == 12);

    auto garch = [&](const std::string& id) { return reg.at(id).spec.garch; };
    CHECK(garch("DGP1").intercept == 0.1);
    CHECK(garch("DGP1").arch[0] == 0.1);
    CHECK(garch("DGP1").garch[0] == 0.85);
    CHECK(garch("DGP2").intercept == 0.05);
    CHECK(garch("DGP2").arch[0] == 0.05);
    CHECK(garch("DGP2").garch[0] == 0.9);
    for (const std::string id : {"DGP3", "DGP3t", "DGP4", "DGP5", "DGP6", "DGP7",
                                 "DGP8", "DGP9", "DGP10", "DGP11"}) {
        CHECK(garch(id).intercept == 0.005);
        CHECK(garch(id).arch[0] == 0.05);
        CHECK(garch(id).garch[0] == 0.8);
    }
    CHECK(reg.at("DGP3t").dist.kind == InnovationKind::StudentT);
    CHECK(reg.at("DGP3t").dist.dof == 5.0);

    auto tr = [&](const std::string& id, int l) { return reg.at(id).spec.transitions[l]; };
    CHECK(tr("DGP4", 0).amplitude == 0.015);
    CHECK(tr("DGP4", 0).slope == 10.0);
    CHECK(tr("DGP4", 0).location == 0.5);
    CHECK(tr("DGP5", 0).amplitude == 0.005);
    CHECK(tr("DGP6", 0).amplitude == 0.0025);
    CHECK(tr("DGP7", 0).slope == 5.0);
    CHECK(tr("DGP8", 0).slope == 5.0);
    CHECK(tr("DGP9", 0).amplitude == 0.0025);
    CHECK(tr("DGP10", 0).amplitude == 0.01);
    CHECK(tr("DGP10", 1).amplitude == -0.01);
    CHECK(tr("DGP10", 0).location == 0.25);
    CHECK(tr("DGP10", 1).location == 0.75);
    CHECK(tr("DGP11", 0).amplitude == 0.005);
    CHECK(tr("DGP11", 1).amplitude == 0.005);
    for (const std::string id : {"DGP1", "DGP2", "DGP3", "DGP3t"})
        CHECK(reg.at(id).spec.num_transitions() == 0);
}

TEST_CASE("size experiment basics") {
    McExperiment exp;
    exp.dgp_id = "DGP3";
    exp.T = 300;
    exp.replications = 40;
    exp.base_seed = 11;
    exp.levels = {0.0, 0.01, 0.05, 0.10};
    const McResult res = run_size(exp);

    CHECK(res.n_converged + res.n_failed == 40);
    CHECK(res.lm_reject[0] == 0.0); // level 0: empty rejection region
    CHECK(res.robust_reject[0] == 0.0);
    for (std::size_t i = 1; i < res.levels.size(); ++i) {
        CHECK(res.lm_reject[i] >= res.lm_reject[i - 1]); // nested regions
        CHECK(res.robust_reject[i] >= res.robust_reject[i - 1]);
        CHECK(res.lm_reject[i] >= 0.0);
        CHECK(res.lm_reject[i] <= 1.0);
    }
}

TEST_CASE("size requires a true null and power a false one") {
    McExperiment exp;
    exp.dgp_id = "DGP4";
    exp.null_transitions = 0;
    CHECK_THROWS_AS(run_size(exp), std::invalid_argument);
    exp.dgp_id = "DGP3";
    CHECK_THROWS_AS(run_power(exp), std::invalid_argument);
    exp.dgp_id = "nope";
    CHECK_THROWS_AS(run_size(exp), std::invalid_argument);
}

TEST_CASE("results are deterministic and thread-count independent") {
    McExperiment exp;
    exp.dgp_id = "DGP3";
    exp.T = 250;
    exp.replications = 24;
    exp.base_seed = 99;

    exp.threads = 1;
    const std::string csv1 = mc_result_csv(run_size(exp));
    exp.threads = 3;
    const std::string csv3 = mc_result_csv(run_size(exp));
    CHECK(csv1 == csv3);

    exp.threads = 1;
    CHECK(mc_result_csv(run_size(exp)) == csv1);
}

TEST_CASE("curve emission") {
    McResult perfect;
    perfect.dgp_id = "X";
    perfect.T = 100;
    perfect.levels = {0.01, 0.05, 0.10};
    perfect.lm_reject = {0.01, 0.05, 0.10};
    perfect.robust_reject = {0.02, 0.06, 0.11};

    const auto disc = emit_curves(perfect, CurveKind::SizeDiscrepancy, TestVariant::LM);
    for (const auto& p : disc) CHECK(p.value == 0.0);

    const auto power = emit_curves(perfect, CurveKind::SizePower, TestVariant::RobustLM);
    for (std::size_t i = 1; i < power.size(); ++i)
        CHECK(power[i].value >= power[i - 1].value);
    CHECK(power[0].nominal == 0.01);
    CHECK(power[0].value == 0.02);

    const std::string csv = curve_csv(power);
    CHECK(csv.rfind("nominal,value\n", 0) == 0);
}
