#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <unistd.h>

#include "atv/data.hpp"

using namespace atv;

namespace {

struct TempCsv {
    std::string path;
    explicit TempCsv(const std::string& content) {
        char tmpl[] = "/tmp/atv_test_XXXXXX";
        const int fd = mkstemp(tmpl);
        REQUIRE(fd >= 0);
        close(fd);
        path = tmpl;
        std::ofstream out(path);
        out << content;
    }
    ~TempCsv() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("prices become scaled log-returns") {
    TempCsv f("date,value\n2020-01-01,100\n2020-01-02,105\n");
    DatasetConfig cfg;
    cfg.path = f.path;
    cfg.kind = ValueKind::Prices;
    cfg.scale = 10.0;
    const SeriesData s = load_returns(cfg);
    REQUIRE(s.size() == 1);
    CHECK(s.x(0) == doctest::Approx(10.0 * std::log(1.05)).epsilon(1e-12));
    CHECK(s.x(0) == doctest::Approx(0.48790).epsilon(1e-4));
}

TEST_CASE("constant prices give zero returns") {
    TempCsv f("date,value\n1,50\n2,50\n3,50\n4,50\n");
    DatasetConfig cfg;
    cfg.path = f.path;
    cfg.kind = ValueKind::Prices;
    const SeriesData s = load_returns(cfg);
    REQUIRE(s.size() == 3);
    CHECK(s.x.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("missing rows are dropped and counted") {
    TempCsv f("date,value\n1,0.5\n2,NA\n3,\n4,-0.25\n");
    DatasetConfig cfg;
    cfg.path = f.path;
    cfg.scale = 1.0;
    const SeriesData s = load_returns(cfg);
    CHECK(s.size() == 2);
    CHECK(cfg.dropped_rows == 2);
    CHECK(s.x(0) == 0.5);
    CHECK(s.x(1) == -0.25);
}

TEST_CASE("date filtering uses ISO string order") {
    TempCsv f("date,value\n2020-01-01,1\n2020-06-01,2\n2021-01-01,3\n");
    DatasetConfig cfg;
    cfg.path = f.path;
    cfg.scale = 1.0;
    cfg.date_min = "2020-02-01";
    cfg.date_max = "2020-12-31";
    const SeriesData s = load_returns(cfg);
    REQUIRE(s.size() == 1);
    CHECK(s.x(0) == 2.0);
}

TEST_CASE("error paths") {
    SUBCASE("bad value") {
        TempCsv f("date,value\n1,abc\n");
        DatasetConfig cfg;
        cfg.path = f.path;
        CHECK_THROWS_AS(load_returns(cfg), ParseError);
    }
    SUBCASE("missing column") {
        TempCsv f("date,price\n1,2\n");
        DatasetConfig cfg;
        cfg.path = f.path;
        CHECK_THROWS_AS(load_returns(cfg), ParseError);
    }
    SUBCASE("no rows") {
        TempCsv f("date,value\n");
        DatasetConfig cfg;
        cfg.path = f.path;
        CHECK_THROWS_AS(load_returns(cfg), EmptySeries);
    }
    SUBCASE("non-positive price") {
        TempCsv f("date,value\n1,10\n2,0\n");
        DatasetConfig cfg;
        cfg.path = f.path;
        cfg.kind = ValueKind::Prices;
        CHECK_THROWS_AS(load_returns(cfg), NonPositivePrice);
    }
    SUBCASE("nonexistent file") {
        DatasetConfig cfg;
        cfg.path = "/no/such/file.csv";
        CHECK_THROWS_AS(load_returns(cfg), ParseError);
    }
}

TEST_CASE("summary of a symmetric fixture") {
    SeriesData s;
    s.x.resize(9);
    s.x << -1, 0, 1, -1, 0, 1, -1, 0, 1;
    const SummaryStats st = summary(s);
    CHECK(st.mean == 0.0);
    CHECK(st.median == 0.0);
    CHECK(st.robust_skewness == 0.0);
    CHECK(st.skewness == doctest::Approx(0.0));
    CHECK(st.min == -1.0);
    CHECK(st.max == 1.0);
    CHECK(st.min <= st.median);
    CHECK(st.median <= st.max);
    CHECK(st.sd >= 0.0);
    CHECK(st.robust_skewness >= -1.0);
    CHECK(st.robust_skewness <= 1.0);
}

TEST_CASE("summary of a large Gaussian sample") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal(0.0, 1.0);
    SeriesData s;
    s.x.resize(1000000);
    for (int i = 0; i < s.x.size(); ++i) s.x(i) = normal(rng);
    const SummaryStats st = summary(s);
    CHECK(std::abs(st.kurtosis - 3.0) < 0.05);
    CHECK(std::abs(st.excess_kurtosis) < 0.05);
    CHECK(std::abs(st.robust_kurtosis) < 0.01); // Moors centering at 1.233
    CHECK(std::abs(st.robust_skewness) < 0.01);
    CHECK(std::abs(st.sd - 1.0) < 0.01);
}

TEST_CASE("degenerate quantiles are rejected") {
    SeriesData s;
    s.x = Eigen::VectorXd::Zero(10);
    CHECK_THROWS_AS(summary(s), DegenerateQuantiles);
}

TEST_CASE("type 7 quantiles interpolate order statistics") {
    Eigen::VectorXd v(5);
    v << 1, 2, 3, 4, 5;
    CHECK(quantile_type7(v, 0.0) == 1.0);
    CHECK(quantile_type7(v, 1.0) == 5.0);
    CHECK(quantile_type7(v, 0.5) == 3.0);
    CHECK(quantile_type7(v, 0.25) == 2.0);
    CHECK(quantile_type7(v, 0.625) == 3.5);
}

TEST_CASE("file round trip preserves a simulated series") {
    AtvGarchSpec spec;
    spec.garch.intercept = 0.1;
    spec.garch.arch = {0.1};
    spec.garch.garch = {0.85};
    const SeriesData s = simulate(spec, 200, InnovationDist::normal(), 100, 8);

    std::ostringstream os;
    os.precision(17);
    os << "t,value\n";
    for (int t = 0; t < s.size(); ++t) os << (t + 1) << ',' << s.x(t) << '\n';
    TempCsv f(os.str());

    DatasetConfig cfg;
    cfg.path = f.path;
    cfg.date_column = "t";
    cfg.scale = 1.0;
    const SeriesData back = load_returns(cfg);
    REQUIRE(back.size() == s.size());
    CHECK(back.x == s.x); // lossless at 17 significant digits
}
