#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "windh2/forecast.hpp"

using namespace windh2;
using forecast::ForecastModel;
using forecast::Rng;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        static int counter = 0;
        path = "windh2_test_series_" + std::to_string(counter++) + ".csv";
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("rng streams are deterministic and purpose-separated") {
    Rng a = Rng::forStream(42, "truth", 3);
    Rng b = Rng::forStream(42, "truth", 3);
    Rng c = Rng::forStream(42, "fan", 3);
    Rng d = Rng::forStream(43, "truth", 3);
    for (int i = 0; i < 16; ++i) {
        const uint64_t va = a.nextU64();
        CHECK(va == b.nextU64());
        CHECK(va != c.nextU64());  // different purpose
        CHECK(va != d.nextU64());  // different seed
    }
}

TEST_CASE("normal draws have plausible first moments") {
    Rng rng(99);
    const int n = 200000;
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal();
        acc += v;
        acc2 += v * v;
    }
    const double mean = acc / n;
    const double variance = acc2 / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(double(n)));
    CHECK(variance == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("evolveForecast degenerate cases") {
    ForecastModel zeroStd{0.0, 1, std::nullopt};
    Rng rng(1);
    CHECK(forecast::evolveForecast(123.25, zeroStd, rng) == 123.25);  // exact

    ForecastModel m{0.3, 1, std::nullopt};
    Rng rng2(2);
    CHECK(forecast::evolveForecast(0.0, m, rng2) == 0.0);  // absorbing at zero
}

TEST_CASE("martingale property of a single step") {
    ForecastModel m{0.1, 7, std::nullopt};
    const double f0 = 100.0;
    const int n = 100000;
    double acc = 0.0;
    Rng rng = Rng::forStream(7, "mc", 0);
    for (int i = 0; i < n; ++i) acc += forecast::evolveForecast(f0, m, rng);
    const double mean = acc / n;
    const double sigma = m.relativeStd * f0;
    // zero-clamping bias is negligible at 10 sigma from 0
    CHECK(std::abs(mean - f0) < 3.0 * sigma / std::sqrt(double(n)));
}

TEST_CASE("clamping keeps draws inside [0, clampMax]") {
    ForecastModel m{1.5, 5, 120.0};
    Rng rng = Rng::forStream(5, "mc", 1);
    for (int i = 0; i < 5000; ++i) {
        const double v = forecast::evolveForecast(100.0, m, rng);
        CHECK(v >= 0.0);
        CHECK(v <= 120.0);
    }
}

TEST_CASE("sampleFan shape and degenerate fans") {
    ForecastModel flat{0.0, 3, std::nullopt};
    const auto fan = forecast::sampleFan(50.0, 4, 3, flat);
    REQUIRE(fan.horizon() == 4);
    REQUIRE(fan.scenarioCount() == 3);
    for (const auto& path : fan.paths)
        for (double v : path) CHECK(v == 50.0);  // rho = 0: flat paths
    for (double v : fan.pointForecast) CHECK(v == 50.0);

    const auto single = forecast::sampleFan(50.0, 4, 1, ForecastModel{0.2, 3, std::nullopt});
    CHECK(single.scenarioCount() == 1);
}

TEST_CASE("fan variance grows with lead time") {
    ForecastModel m{0.1, 11, std::nullopt};
    const int count = 10000, h = 5;
    const auto fan = forecast::sampleFan(100.0, h, count, m);
    auto varAtLead = [&](int lead) {
        double acc = 0.0, acc2 = 0.0;
        for (const auto& path : fan.paths) {
            acc += path[size_t(lead)];
            acc2 += path[size_t(lead)] * path[size_t(lead)];
        }
        const double mean = acc / count;
        return acc2 / count - mean * mean;
    };
    CHECK(varAtLead(h - 1) > varAtLead(0));
    for (const auto& path : fan.paths)
        for (double v : path) CHECK(v >= 0.0);
}

TEST_CASE("truth paths are reproducible and mean-preserving") {
    forecast::ExogenousSeries exo;
    exo.demand = {1, 1, 1, 1, 1};
    exo.hydrogenPrice = {0, 0, 0, 0, 0};
    exo.initialWind = 80.0;

    ForecastModel m{0.1, 123, std::nullopt};
    const auto p1 = forecast::truthPath(m, exo, 5, 9);
    const auto p2 = forecast::truthPath(m, exo, 5, 9);
    REQUIRE(p1.size() == 5);
    CHECK(p1 == p2);  // bitwise
    CHECK(p1[0] == 80.0);

    ForecastModel flat{0.0, 123, std::nullopt};
    for (double v : forecast::truthPath(flat, exo, 5, 0)) CHECK(v == 80.0);

    // ensemble mean of the last step stays near the initial value
    const int n = 10000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += forecast::truthPath(m, exo, 5, uint64_t(i)).back();
    const double sigmaT = 0.1 * 80.0 * std::sqrt(4.0);  // coarse upper bound
    CHECK(std::abs(acc / n - 80.0) < 3.0 * sigmaT / std::sqrt(double(n)) + 0.2);
}

TEST_CASE("csv round trip and ingestion errors") {
    SUBCASE("valid three-row file") {
        TempFile f("step,demand_mwh,h2_price_per_mwh\n0,10.5,3\n1,11,3.5\n2,9.25,4\n");
        const auto s = forecast::loadSeries(f.path);
        REQUIRE(s.length() == 3);
        CHECK(s.demand[0] == 10.5);
        CHECK(s.hydrogenPrice[2] == 4.0);
    }
    SUBCASE("negative demand names the line") {
        TempFile f("step,demand_mwh,h2_price_per_mwh\n0,10,3\n1,-1,3\n");
        try {
            forecast::loadSeries(f.path);
            FAIL("expected ingestion error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("bad header is rejected") {
        TempFile f("time,load,price\n0,10,3\n");
        CHECK_THROWS_AS(forecast::loadSeries(f.path), ValidationError);
    }
    SUBCASE("missing file names the path") {
        try {
            forecast::loadSeries("definitely_not_here.csv");
            FAIL("expected open error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("definitely_not_here.csv") != std::string::npos);
        }
    }
}

TEST_CASE("synthesized series hits the requested peak exactly") {
    const auto s = forecast::synthesizeSeries(1913.0, 365, 3);
    REQUIRE(s.length() == 365);
    double peak = 0.0;
    for (double v : s.demand) {
        CHECK(v >= 0.0);
        peak = std::max(peak, v);
    }
    CHECK(std::abs(peak - 1913.0) <= 1e-9);
    for (double v : s.hydrogenPrice) CHECK(v >= 0.0);
    CHECK(s.initialWind > 0.0);

    // deterministic given the seed
    const auto s2 = forecast::synthesizeSeries(1913.0, 365, 3);
    CHECK(s.demand == s2.demand);
    CHECK(s.hydrogenPrice == s2.hydrogenPrice);
}
