#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "windh2/lp.hpp"
#include "windh2/risk.hpp"

using namespace windh2;

namespace {

// oracle: minimize z + mean[(X-z)+]/(1-alpha) over z in the sample values
// (the optimum of the piecewise-linear program sits on an atom)
double cvarByMinimization(const std::vector<double>& sample, double alpha) {
    double best = std::numeric_limits<double>::infinity();
    for (double z : sample) {
        double acc = 0.0;
        for (double v : sample) acc += std::max(v - z, 0.0);
        best = std::min(best, z + acc / ((1.0 - alpha) * double(sample.size())));
    }
    return best;
}

// oracle: invert cvar in alpha by bisection; bpoe(zeta) = 1 - alpha*
double bpoeByCvarInversion(const std::vector<double>& sample, double zeta) {
    const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / double(sample.size());
    const double maxv = *std::max_element(sample.begin(), sample.end());
    if (zeta > maxv) return 0.0;
    if (zeta <= mean) return 1.0;
    double lo = 0.0, hi = 1.0 - 1e-12;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (risk::cvar(sample, mid) < zeta) lo = mid;
        else hi = mid;
    }
    return 1.0 - 0.5 * (lo + hi);
}

std::vector<double> randomSample(std::mt19937_64& rng, size_t maxN = 50) {
    std::uniform_real_distribution<double> val(-5.0, 20.0);
    const size_t n = 1 + rng() % maxN;
    std::vector<double> s(n);
    for (auto& v : s) v = val(rng);
    return s;
}

}  // namespace

TEST_CASE("var order statistic") {
    std::vector<double> s{1, 2, 3, 4};
    CHECK(risk::var(s, 0.5) == 2.0);
    CHECK(risk::var(s, 0.0) == 1.0);
    CHECK(risk::var(std::vector<double>{7}, 0.3) == 7.0);
    CHECK(risk::var(s, 0.75) == 3.0);
    CHECK(risk::var(s, 0.76) == 4.0);
}

TEST_CASE("cvar closed form matches the stated values") {
    std::vector<double> s{1, 2, 3, 4};
    CHECK(risk::cvar(s, 0.0) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(risk::cvar(s, 0.5) == doctest::Approx(3.5).epsilon(1e-12));
    std::vector<double> c{4.2, 4.2, 4.2};
    CHECK(risk::cvar(c, 0.6) == doctest::Approx(4.2).epsilon(1e-12));
    CHECK_THROWS_AS(risk::cvar(s, 1.0), ValidationError);
}

TEST_CASE("cvar equals the 1-D minimization oracle") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 300; ++rep) {
        const auto s = randomSample(rng);
        std::uniform_real_distribution<double> al(0.0, 0.95);
        const double alpha = al(rng);
        CHECK(risk::cvar(s, alpha) ==
              doctest::Approx(cvarByMinimization(s, alpha)).epsilon(1e-9));
    }
}

TEST_CASE("poe direct counts") {
    std::vector<double> s{1, 2, 3, 4};
    CHECK(risk::poe(s, 2.0) == 0.5);
    CHECK(risk::poe(s, 5.0) == 0.0);
    CHECK(risk::poe(s, 0.0) == 1.0);
}

TEST_CASE("bpoe special values") {
    std::vector<double> s{1, 2, 3, 4};
    CHECK(risk::bpoe(s, 3.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(risk::bpoe(s, 5.0) == 0.0);
    CHECK(risk::bpoe(s, 2.5) == doctest::Approx(1.0).epsilon(1e-12));  // zeta at the mean
    CHECK(risk::bpoe(s, 4.0) == doctest::Approx(0.25).epsilon(1e-12));  // mass at the maximum
}

TEST_CASE("bpoe equals the cvar-inversion oracle") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 300; ++rep) {
        const auto s = randomSample(rng);
        const double mean = std::accumulate(s.begin(), s.end(), 0.0) / double(s.size());
        const double maxv = *std::max_element(s.begin(), s.end());
        std::uniform_real_distribution<double> ze(mean - 1.0, maxv + 1.0);
        const double zeta = ze(rng);
        CHECK(risk::bpoe(s, zeta) ==
              doctest::Approx(bpoeByCvarInversion(s, zeta)).epsilon(1e-7));
    }
}

TEST_CASE("monotonicity and ordering properties") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 100; ++rep) {
        const auto s = randomSample(rng);
        const double mean = std::accumulate(s.begin(), s.end(), 0.0) / double(s.size());
        const double maxv = *std::max_element(s.begin(), s.end());

        double prevCvar = -1e300;
        for (double alpha : {0.0, 0.2, 0.4, 0.6, 0.8, 0.95}) {
            const double c = risk::cvar(s, alpha);
            CHECK(c >= prevCvar - 1e-12);
            CHECK(c >= mean - 1e-12);
            CHECK(c <= maxv + 1e-12);
            CHECK(risk::var(s, alpha) <= c + 1e-12);
            prevCvar = c;
        }
        double prevBpoe = 2.0, prevPoe = 2.0;
        for (double zeta = mean - 0.5; zeta <= maxv + 0.5; zeta += 0.25) {
            const double b = risk::bpoe(s, zeta);
            const double p = risk::poe(s, zeta);
            CHECK(b <= prevBpoe + 1e-12);
            CHECK(p <= prevPoe + 1e-12);
            CHECK(b >= p - 1e-12);  // buffered probability dominates
            prevBpoe = b;
            prevPoe = p;
        }
    }
}

TEST_CASE("cvar-bpoe inversion at atom boundaries") {
    std::mt19937_64 rng(19);
    int tested = 0;
    for (int rep = 0; rep < 200; ++rep) {
        // distinct atoms
        const size_t n = 3 + rng() % 20;
        std::vector<double> s(n);
        std::uniform_real_distribution<double> val(0.0, 10.0);
        for (auto& v : s) v = val(rng);
        std::sort(s.begin(), s.end());
        bool distinct = true;
        for (size_t i = 1; i < n; ++i)
            if (s[i] - s[i - 1] < 1e-6) distinct = false;
        if (!distinct) continue;

        const double mean = std::accumulate(s.begin(), s.end(), 0.0) / double(n);
        const double maxv = s.back();
        for (size_t k = 1; k < n; ++k) {
            const double alpha = double(k) / double(n);
            const double zeta = risk::cvar(s, alpha);
            if (zeta <= mean + 1e-9 || zeta >= maxv - 1e-9) continue;
            CHECK(std::abs(risk::bpoe(s, zeta) - (1.0 - alpha)) <= 1e-9);
            ++tested;
        }
    }
    CHECK(tested > 200);
}

TEST_CASE("cvar epigraph fragment optimum equals the closed form") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 100; ++rep) {
        const auto s = randomSample(rng, 30);
        std::uniform_real_distribution<double> al(0.0, 0.9);
        const double alpha = al(rng);

        lp::LpModel m;
        std::vector<lp::AffineExpr> costs(s.size());
        for (size_t w = 0; w < s.size(); ++w) costs[w].constant = s[w];
        risk::cvarEpigraphRows(m, costs, alpha);
        const auto sol = lp::solve(m);
        REQUIRE(sol.status == lp::Status::Optimal);
        CHECK(sol.objective == doctest::Approx(risk::cvar(s, alpha)).epsilon(1e-8));
    }

    // single scenario, alpha = 0
    lp::LpModel m;
    std::vector<lp::AffineExpr> one(1);
    one[0].constant = 3.25;
    risk::cvarEpigraphRows(m, one, 0.0);
    CHECK(lp::solve(m).objective == doctest::Approx(3.25).epsilon(1e-9));

    // all-equal costs
    lp::LpModel m2;
    std::vector<lp::AffineExpr> eq(5);
    for (auto& e : eq) e.constant = -1.5;
    risk::cvarEpigraphRows(m2, eq, 0.7);
    CHECK(lp::solve(m2).objective == doctest::Approx(-1.5).epsilon(1e-9));
}

TEST_CASE("bpoe epigraph fragment with variable gamma equals the closed form") {
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 100; ++rep) {
        const auto s = randomSample(rng, 30);
        const double mean = std::accumulate(s.begin(), s.end(), 0.0) / double(s.size());
        const double maxv = *std::max_element(s.begin(), s.end());
        std::uniform_real_distribution<double> ze(mean, maxv + 0.5);
        const double zeta = ze(rng);

        lp::LpModel m;
        std::vector<lp::AffineExpr> losses(s.size());
        for (size_t w = 0; w < s.size(); ++w) losses[w].constant = s[w];
        risk::bpoeEpigraphRows(m, losses, zeta, risk::GammaVariable{});
        const auto sol = lp::solve(m);
        REQUIRE(sol.status == lp::Status::Optimal);
        CHECK(sol.objective == doctest::Approx(risk::bpoe(s, zeta)).epsilon(1e-7));
    }
}

TEST_CASE("bpoe fragment edge cases") {
    // gamma fixed at 0: every row reads 1 - eta <= 0
    lp::LpModel m;
    std::vector<lp::AffineExpr> losses(4);
    for (size_t w = 0; w < 4; ++w) losses[w].constant = double(w);
    risk::bpoeEpigraphRows(m, losses, 2.0, 0.0);
    CHECK(lp::solve(m).objective == doctest::Approx(1.0).epsilon(1e-9));

    // zeta above the maximum with variable gamma
    lp::LpModel m2;
    risk::bpoeEpigraphRows(m2, losses, 10.0, risk::GammaVariable{});
    CHECK(lp::solve(m2).objective == doctest::Approx(0.0).epsilon(1e-9));

    // variable gamma demands constant losses
    lp::LpModel m3;
    const int x = m3.addVariable(0.0, 1.0, "x");
    std::vector<lp::AffineExpr> nonconst(1);
    nonconst[0].add(x, 1.0);
    CHECK_THROWS_AS(risk::bpoeEpigraphRows(m3, nonconst, 1.0, risk::GammaVariable{}),
                    ValidationError);
}

TEST_CASE("fragments embedded next to other variables stay consistent") {
    // minimize t + cvar fragment where cost_w = s_w * t, t in [1, 1]
    // (costs depend on a model variable; with t pinned the fragment optimum
    // must equal cvar of the induced sample)
    std::vector<double> s{2.0, 4.0, 6.0, 8.0};
    lp::LpModel m;
    const int t = m.addVariable(1.0, 1.0, "t");
    std::vector<lp::AffineExpr> costs(s.size());
    for (size_t w = 0; w < s.size(); ++w) costs[w].add(t, s[w]);
    risk::cvarEpigraphRows(m, costs, 0.5);
    const auto sol = lp::solve(m);
    REQUIRE(sol.status == lp::Status::Optimal);
    CHECK(sol.objective == doctest::Approx(risk::cvar(s, 0.5)).epsilon(1e-8));
}
