#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "windh2/policy.hpp"
#include "windh2/risk.hpp"

using namespace windh2;
using policy::RiskConfig;
using policy::Theta;

namespace {

struct RandomInstance {
    SystemParams params;
    SystemState state;
    std::vector<double> demand;
    std::vector<double> price;
};

RandomInstance randomInstance(std::mt19937_64& rng, int T, int horizon, int t) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    RandomInstance ri;
    auto& p = ri.params;
    p.batteryCapacity = 0.5 + 4.0 * u01(rng);
    p.hydrogenCapacity = 0.5 + 8.0 * u01(rng);
    p.chargeEff = 0.6 + 0.4 * u01(rng);
    p.dischargeEff = 0.6 + 0.4 * u01(rng);
    p.fuelCellEff = 0.4 + 0.6 * u01(rng);
    p.chargeLimit = 0.3 + 1.5 * u01(rng);
    p.dischargeLimit = 0.3 + 1.5 * u01(rng);
    p.fuelCellLimit = 0.3 + 1.5 * u01(rng);
    p.lossPenalty = 200.0 + 800.0 * u01(rng);
    p.curtailPenalty = 50.0 * u01(rng);
    p.episodeLength = T;
    p.horizon = horizon;
    p.acquisitionSchedule.assign(size_t(T), 0);
    for (int i = 0; i < T; ++i) p.acquisitionSchedule[size_t(i)] = (rng() % 3 == 0) ? 1 : 0;

    ri.demand.resize(size_t(T));
    ri.price.resize(size_t(T));
    for (int i = 0; i < T; ++i) {
        ri.demand[size_t(i)] = 2.0 * u01(rng);
        ri.price[size_t(i)] = 30.0 * u01(rng);
    }

    ri.state.t = t;
    ri.state.demand = ri.demand[size_t(t)];
    ri.state.wind = 2.0 * u01(rng);
    ri.state.hydrogenPrice = ri.price[size_t(t)];
    ri.state.batteryLevel = p.batteryCapacity * u01(rng);
    ri.state.hydrogenLevel = p.hydrogenCapacity * u01(rng);
    return ri;
}

std::vector<double> randomPath(std::mt19937_64& rng, int length) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> path(static_cast<size_t>(length), 0.0);
    for (auto& v : path) v = 2.5 * u01(rng);
    return path;
}

}  // namespace

TEST_CASE("wind budget scaling and monotone conservatism") {
    CHECK(policy::windBudget(100.0, Theta::constant(0.5), 3) == 50.0);
    CHECK(policy::windBudget(100.0, Theta::constant(1.2), 1) == 120.0);
    const auto table = Theta::lookupTable({0.5, 1.0, 0.0});
    CHECK(policy::windBudget(80.0, table, 1) == 40.0);
    CHECK(policy::windBudget(80.0, table, 3) == 0.0);
    CHECK_THROWS_AS(policy::windBudget(80.0, table, 4), ValidationError);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int rep = 0; rep < 200; ++rep) {
        const double lowTheta = u(rng), f = 100.0 * u(rng);
        const double highTheta = lowTheta + u(rng);
        CHECK(policy::windBudget(f, Theta::constant(lowTheta), 1) <=
              policy::windBudget(f, Theta::constant(highTheta), 1) + 1e-12);
    }
}

TEST_CASE("constant-theta budget appears in the look-ahead rows") {
    // one look-ahead step with demand 100, forecast 100, theta 0.5 and no
    // storage: the look-ahead can serve at most 50
    SystemParams p;
    p.batteryCapacity = 0.0;
    p.hydrogenCapacity = 0.0;
    p.chargeEff = p.dischargeEff = p.fuelCellEff = 1.0;
    p.chargeLimit = p.dischargeLimit = p.fuelCellLimit = 0.0;
    p.lossPenalty = 1.0;
    p.curtailPenalty = 0.0;
    p.episodeLength = 2;
    p.horizon = 1;
    p.acquisitionSchedule = {0, 0};

    SystemState s;
    s.t = 0;
    s.demand = 0.0;
    s.wind = 0.0;
    s.hydrogenPrice = 0.0;

    const std::vector<double> demand{0.0, 100.0};
    const std::vector<double> price{0.0, 0.0};
    const std::vector<double> point{100.0};

    const auto pd = policy::decideDLA(s, p, demand, price, point, Theta::constant(0.5));
    REQUIRE(pd.scenarioLosses.size() == 1);
    CHECK(pd.scenarioLosses[0] == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(pd.lookaheadObjective == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("zero theta buys at least as much fuel as theta one") {
    SystemParams p;
    p.batteryCapacity = 0.0;
    p.hydrogenCapacity = 10.0;
    p.chargeEff = p.dischargeEff = 1.0;
    p.fuelCellEff = 1.0;
    p.chargeLimit = 0.0;
    p.dischargeLimit = 0.0;
    p.fuelCellLimit = 5.0;
    p.lossPenalty = 100.0;
    p.curtailPenalty = 0.0;
    p.episodeLength = 3;
    p.horizon = 2;
    p.acquisitionSchedule = {1, 0, 0};  // buy now or never

    SystemState s;
    s.t = 0;
    s.demand = 1.0;
    s.wind = 1.0;
    s.hydrogenPrice = 1.0;  // cheap fuel vs. loss penalty 100
    s.batteryLevel = 0.0;
    s.hydrogenLevel = 0.0;

    const std::vector<double> demand{1.0, 2.0, 2.0};
    const std::vector<double> price{1.0, 1.0, 1.0};
    const std::vector<double> point{1.5, 1.5};

    const auto pessimist = policy::decideDLA(s, p, demand, price, point, Theta::constant(0.0));
    const auto trusting = policy::decideDLA(s, p, demand, price, point, Theta::constant(1.0));
    CHECK(pessimist.decision.hydrogenPurchase >= trusting.decision.hydrogenPurchase - 1e-9);
    CHECK(pessimist.decision.hydrogenPurchase == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("returned decisions are feasible at the input state") {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 50; ++rep) {
        const int T = 8, H = 3;
        const int t = int(rng() % uint64_t(T - 1));
        auto ri = randomInstance(rng, T, H, t);
        const int lead = std::min(H, T - 1 - t);

        forecast::ScenarioFan fan;
        for (int w = 0; w < 4; ++w) fan.paths.push_back(randomPath(rng, lead));
        fan.pointForecast.assign(size_t(lead), ri.state.wind);

        const auto dla = policy::decideDLA(ri.state, ri.params, ri.demand, ri.price,
                                           fan.pointForecast, Theta::constant(0.7));
        CHECK(feasibilityViolation(ri.state, ri.params,
                                   ri.params.acquisitionAllowed(t), dla.decision) <= 1e-6);

        const auto sla = policy::decideSLA(ri.state, ri.params, ri.demand, ri.price, fan);
        CHECK(feasibilityViolation(ri.state, ri.params,
                                   ri.params.acquisitionAllowed(t), sla.decision) <= 1e-6);
    }
}

TEST_CASE("single-scenario S-LA coincides with D-LA at theta one") {
    std::mt19937_64 rng(43);
    for (int rep = 0; rep < 100; ++rep) {
        const int T = 8, H = 3;
        const int t = int(rng() % uint64_t(T));
        auto ri = randomInstance(rng, T, H, t);
        const int lead = std::min(H, T - 1 - t);

        const auto path = randomPath(rng, lead);
        forecast::ScenarioFan fan;
        fan.paths = {path};
        fan.pointForecast = path;

        const auto sla = policy::decideSLA(ri.state, ri.params, ri.demand, ri.price, fan);
        const auto dla = policy::decideDLA(ri.state, ri.params, ri.demand, ri.price, path,
                                           Theta::constant(1.0));
        CHECK(std::abs(sla.lookaheadObjective - dla.lookaheadObjective) <= 1e-6);
    }
}

TEST_CASE("S-CVaR at alpha zero coincides with S-LA") {
    std::mt19937_64 rng(47);
    RiskConfig rc;
    rc.alpha = 0.0;
    for (int rep = 0; rep < 60; ++rep) {
        const int T = 8, H = 3;
        const int t = int(rng() % uint64_t(T));
        auto ri = randomInstance(rng, T, H, t);
        const int lead = std::min(H, T - 1 - t);

        forecast::ScenarioFan fan;
        for (int w = 0; w < 5; ++w) fan.paths.push_back(randomPath(rng, lead));
        fan.pointForecast.assign(size_t(lead), ri.state.wind);

        const auto sla = policy::decideSLA(ri.state, ri.params, ri.demand, ri.price, fan);
        const auto scvar = policy::decideSCVaR(ri.state, ri.params, ri.demand, ri.price, fan, rc);
        CHECK(std::abs(sla.lookaheadObjective - scvar.lookaheadObjective) <= 1e-6);
    }
}

TEST_CASE("identical scenarios collapse to the single-scenario case") {
    std::mt19937_64 rng(53);
    RiskConfig rc;
    rc.alpha = 0.6;
    auto ri = randomInstance(rng, 8, 3, 2);
    const auto path = randomPath(rng, 3);
    forecast::ScenarioFan fanMany, fanOne;
    for (int w = 0; w < 6; ++w) fanMany.paths.push_back(path);
    fanOne.paths = {path};

    const auto slaMany = policy::decideSLA(ri.state, ri.params, ri.demand, ri.price, fanMany);
    const auto sla = policy::decideSLA(ri.state, ri.params, ri.demand, ri.price, fanOne);
    CHECK(std::abs(slaMany.lookaheadObjective - sla.lookaheadObjective) <= 1e-6);

    const auto many = policy::decideSCVaR(ri.state, ri.params, ri.demand, ri.price, fanMany, rc);
    const auto one = policy::decideSCVaR(ri.state, ri.params, ri.demand, ri.price, fanOne, rc);
    CHECK(std::abs(many.lookaheadObjective - one.lookaheadObjective) <= 1e-6);
    CHECK(std::abs(one.lookaheadObjective - sla.lookaheadObjective) <= 1e-6);
}

TEST_CASE("S-CVaR objective is nondecreasing in alpha") {
    std::mt19937_64 rng(59);
    auto ri = randomInstance(rng, 8, 3, 1);
    forecast::ScenarioFan fan;
    for (int w = 0; w < 6; ++w) fan.paths.push_back(randomPath(rng, 3));

    double prev = -1e300;
    for (double alpha : {0.0, 0.3, 0.5, 0.7, 0.9}) {
        RiskConfig rc;
        rc.alpha = alpha;
        const auto pd = policy::decideSCVaR(ri.state, ri.params, ri.demand, ri.price, fan, rc);
        CHECK(pd.lookaheadObjective >= prev - 1e-7);
        prev = pd.lookaheadObjective;
    }
}

TEST_CASE("horizon truncation near the episode end") {
    std::mt19937_64 rng(61);
    auto ri = randomInstance(rng, 5, 3, 4);  // last step: no look-ahead left
    const auto pd = policy::decideDLA(ri.state, ri.params, ri.demand, ri.price, {},
                                      Theta::constant(1.0));
    CHECK(pd.scenarioLosses.size() == 1);
    CHECK(pd.scenarioLosses[0] == 0.0);
    // the full stage row set still applies
    CHECK(feasibilityViolation(ri.state, ri.params, ri.params.acquisitionAllowed(4),
                               pd.decision) <= 1e-6);

    forecast::ScenarioFan fan;
    fan.paths = {{}, {}};
    const auto sla = policy::decideSLA(ri.state, ri.params, ri.demand, ri.price, fan);
    CHECK(std::abs(sla.lookaheadObjective - pd.lookaheadObjective) <= 1e-6);
}

// ---------------------------------------------------------------------------
// Independent re-encoding of the two-stage program: explicit storage-level
// variables tied by equality transition rows, costs assembled from scratch.
// Exercises a different path through the solver (equalities need phase 1)
// and cross-checks the level-substitution algebra in the policy builder.
// ---------------------------------------------------------------------------
namespace {

double slaByExplicitLevels(const SystemState& state, const SystemParams& p,
                           std::span<const double> demand, std::span<const double> price,
                           const forecast::ScenarioFan& fan) {
    const double bc = p.chargeEff, bd = p.dischargeEff, bh = p.fuelCellEff;
    const double cp = p.lossPenalty, cw = p.curtailPenalty;
    const int scount = fan.scenarioCount();
    const int h = fan.paths.empty() ? 0 : static_cast<int>(fan.paths[0].size());

    lp::LpModel m;
    // stage variables
    const int wd = m.addVariable(0.0, lp::kInf);
    const int rd = m.addVariable(0.0, lp::kInf);
    const int hd = m.addVariable(0.0, lp::kInf);
    const int wr = m.addVariable(0.0, lp::kInf);
    const int hr = m.addVariable(0.0, lp::kInf);
    const int hv = m.addVariable(0.0, lp::kInf);
    const int wx = m.addVariable(0.0, lp::kInf);
    for (const auto& row : feasibilityRows(state, p, p.acquisitionAllowed(state.t))) {
        std::vector<lp::Term> terms;
        const std::array<int, 7> ids{wd, rd, hd, wr, hr, hv, wx};
        for (int i = 0; i < 7; ++i)
            if (row.coeffs[size_t(i)] != 0.0) terms.emplace_back(ids[size_t(i)], row.coeffs[size_t(i)]);
        m.addConstraint(std::move(terms), lp::Sense::LessEq, row.rhs);
    }
    m.addObjectiveConstant(cp * state.demand);
    m.addObjectiveTerm(wd, -cp);
    m.addObjectiveTerm(rd, -cp * bd);
    m.addObjectiveTerm(hd, -cp * bh);
    m.addObjectiveTerm(wx, cw);
    m.addObjectiveTerm(hv, state.hydrogenPrice);

    int prevRd = rd, prevHd = hd, prevWr = wr, prevHr = hr, prevHv = hv;
    int prevRE = -1, prevRH = -1;  // -1: use the numeric initial level
    for (int lead = 1; lead <= h; ++lead) {
        const int tp = state.t + lead;
        const double dem = demand[size_t(tp)];
        const double pr = price[size_t(tp)];

        // level variables for this stage, tied to the previous stage
        const int RE = m.addVariable(0.0, p.batteryCapacity);
        const int RH = m.addVariable(0.0, p.hydrogenCapacity);
        {
            // RE - prevRE + rd_prev - bc wr_prev - bc bh hr_prev = [RE0]
            std::vector<lp::Term> t1{{RE, 1.0}, {prevRd, 1.0}, {prevWr, -bc}, {prevHr, -bc * bh}};
            double rhs1 = 0.0;
            if (prevRE < 0) rhs1 = state.batteryLevel;
            else t1.emplace_back(prevRE, -1.0);
            m.addConstraint(std::move(t1), lp::Sense::Equal, rhs1);

            std::vector<lp::Term> t2{{RH, 1.0}, {prevHd, 1.0}, {prevHr, 1.0}, {prevHv, -1.0}};
            double rhs2 = 0.0;
            if (prevRH < 0) rhs2 = state.hydrogenLevel;
            else t2.emplace_back(prevRH, -1.0);
            m.addConstraint(std::move(t2), lp::Sense::Equal, rhs2);
        }

        const int rdL = m.addVariable(0.0, p.dischargeLimit);
        const int hdL = m.addVariable(0.0, lp::kInf);
        const int wrL = m.addVariable(0.0, lp::kInf);
        const int hrL = m.addVariable(0.0, lp::kInf);
        const int hvL = m.addVariable(0.0, p.acquisitionAllowed(tp) ? p.hydrogenCapacity : 0.0);

        m.addConstraint({{rdL, 1.0}, {RE, -1.0}}, lp::Sense::LessEq, 0.0);
        m.addConstraint({{hrL, 1.0}, {hdL, 1.0}, {RH, -1.0}}, lp::Sense::LessEq, 0.0);
        m.addConstraint({{hvL, 1.0}, {RH, 1.0}}, lp::Sense::LessEq, p.hydrogenCapacity);
        m.addConstraint({{wrL, bc}, {hrL, bc * bh}, {rdL, -1.0}, {RE, 1.0}}, lp::Sense::LessEq,
                        p.batteryCapacity);
        m.addConstraint({{wrL, 1.0}, {hrL, bh}}, lp::Sense::LessEq, p.chargeLimit);
        m.addConstraint({{hrL, bh}, {hdL, bh}}, lp::Sense::LessEq, p.fuelCellLimit);

        for (int w = 0; w < scount; ++w) {
            const int wdW = m.addVariable(0.0, lp::kInf);
            const int wxW = m.addVariable(0.0, lp::kInf);
            m.addConstraint({{wdW, 1.0}, {rdL, bd}, {hdL, bh}}, lp::Sense::LessEq, dem);
            m.addConstraint({{wrL, 1.0}, {wdW, 1.0}, {wxW, 1.0}}, lp::Sense::LessEq,
                            fan.paths[size_t(w)][size_t(lead - 1)]);
            const double wgt = 1.0 / double(scount);
            m.addObjectiveConstant(wgt * cp * dem);
            m.addObjectiveTerm(wdW, -wgt * cp);
            m.addObjectiveTerm(rdL, -wgt * cp * bd);
            m.addObjectiveTerm(hdL, -wgt * cp * bh);
            m.addObjectiveTerm(wxW, wgt * cw);
            m.addObjectiveTerm(hvL, wgt * pr);
        }

        prevRd = rdL;
        prevHd = hdL;
        prevWr = wrL;
        prevHr = hrL;
        prevHv = hvL;
        prevRE = RE;
        prevRH = RH;
    }
    const auto sol = lp::solve(m);
    REQUIRE(sol.status == lp::Status::Optimal);
    return sol.objective;
}

}  // namespace

TEST_CASE("level substitution agrees with an explicit-level encoding") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 40; ++rep) {
        const int T = 9, H = 3;
        const int t = int(rng() % uint64_t(T));
        auto ri = randomInstance(rng, T, H, t);
        const int lead = std::min(H, T - 1 - t);

        forecast::ScenarioFan fan;
        const int scount = 1 + int(rng() % 4);
        for (int w = 0; w < scount; ++w) fan.paths.push_back(randomPath(rng, lead));

        const auto viaSubstitution =
            policy::decideSLA(ri.state, ri.params, ri.demand, ri.price, fan);
        const double viaLevels =
            slaByExplicitLevels(ri.state, ri.params, ri.demand, ri.price, fan);
        CHECK(std::abs(viaSubstitution.lookaheadObjective - viaLevels) <= 1e-6);
    }
}

// ---------------------------------------------------------------------------
// Tiny-instance brute force. One charge decision now, one shared discharge
// decision in the single look-ahead step, scenario wind-to-load completed
// analytically. Serving current demand dominates storing (same penalty now,
// efficiency-discounted later), so x_wd = min(D0, E0 - x_wr) is optimal and
// the oracle grids only (x_wr, x_rd').
// ---------------------------------------------------------------------------
namespace {

struct TinyInstance {
    SystemParams params;
    SystemState state;
    std::vector<double> demand{0.5, 0.8};
    std::vector<double> price{0.0, 0.0};
    std::vector<double> fanValues{0.1, 0.5};

    TinyInstance() {
        params.batteryCapacity = 1.0;
        params.hydrogenCapacity = 0.0;
        params.chargeEff = 0.9;
        params.dischargeEff = 0.9;
        params.fuelCellEff = 1.0;
        params.chargeLimit = 1.0;
        params.dischargeLimit = 1.0;
        params.fuelCellLimit = 0.0;
        params.lossPenalty = 1.0;
        params.curtailPenalty = 0.0;
        params.episodeLength = 2;
        params.horizon = 1;
        params.acquisitionSchedule = {0, 0};

        state.t = 0;
        state.demand = demand[0];
        state.wind = 0.6;
        state.hydrogenPrice = 0.0;
        state.batteryLevel = 0.0;
        state.hydrogenLevel = 0.0;
    }

    forecast::ScenarioFan fan() const {
        forecast::ScenarioFan f;
        for (double v : fanValues) f.paths.push_back({v});
        f.pointForecast = {0.3};
        return f;
    }

    // objective for fixed (wr, rd) with analytic per-scenario completion
    template <typename Combine>
    double objectiveAt(double wr, double rd, Combine combine) const {
        const double bd = params.dischargeEff, bc = params.chargeEff;
        const double cp = params.lossPenalty;
        const double e0 = state.wind, d0 = demand[0], d1 = demand[1];
        if (wr > e0 + 1e-12) return 1e18;
        const double r1 = state.batteryLevel + bc * wr;
        if (rd > std::min({r1, params.dischargeLimit, d1 / bd}) + 1e-12) return 1e18;
        const double wd0 = std::min(d0, e0 - wr);
        const double stage = cp * (d0 - wd0);
        std::vector<double> costs, losses;
        for (double f : fanValues) {
            const double wd1 = std::min(f, d1 - bd * rd);
            const double loss = d1 - wd1 - bd * rd;
            costs.push_back(cp * loss);
            losses.push_back(loss);
        }
        return stage + combine(costs, losses);
    }

    template <typename Combine>
    double bruteForce(Combine combine, double step = 5e-4) const {
        double best = 1e18;
        for (double wr = 0.0; wr <= state.wind + 1e-12; wr += step) {
            const double r1 = state.batteryLevel + params.chargeEff * wr;
            const double rdMax =
                std::min({r1, params.dischargeLimit, demand[1] / params.dischargeEff});
            for (double rd = 0.0; rd <= rdMax + 1e-12; rd += step)
                best = std::min(best, objectiveAt(wr, rd, combine));
        }
        return best;
    }
};

}  // namespace

TEST_CASE("tiny S-LA optimum matches the dense grid oracle") {
    TinyInstance tiny;
    const auto pd = policy::decideSLA(tiny.state, tiny.params, tiny.demand, tiny.price,
                                      tiny.fan());
    const double oracle = tiny.bruteForce([](const std::vector<double>& costs,
                                             const std::vector<double>&) {
        double acc = 0.0;
        for (double c : costs) acc += c;
        return acc / double(costs.size());
    });
    CHECK(std::abs(pd.lookaheadObjective - oracle) <= 2e-3);
    CHECK(pd.lookaheadObjective <= oracle + 1e-9);  // the LP can only be better
}

TEST_CASE("tiny S-CVaR optimum matches the dense grid oracle") {
    TinyInstance tiny;
    RiskConfig rc;
    rc.alpha = 0.5;  // CVaR of two atoms at 0.5 is their maximum
    const auto pd = policy::decideSCVaR(tiny.state, tiny.params, tiny.demand, tiny.price,
                                        tiny.fan(), rc);
    const double oracle = tiny.bruteForce([](const std::vector<double>& costs,
                                             const std::vector<double>&) {
        return *std::max_element(costs.begin(), costs.end());
    });
    CHECK(std::abs(pd.lookaheadObjective - oracle) <= 2e-3);
    CHECK(pd.lookaheadObjective <= oracle + 1e-9);
}

TEST_CASE("tiny S-BPoE optimum matches the dense grid oracle") {
    TinyInstance tiny;
    RiskConfig rc;
    rc.zeta = 0.15;
    rc.bigM = 1.0;  // unit scale keeps the comparison meaningful at grid resolution
    const auto pd = policy::decideSBPoE(tiny.state, tiny.params, tiny.demand, tiny.price,
                                        tiny.fan(), rc);
    const double zeta = rc.zeta, M = rc.bigM;
    const double oracle = tiny.bruteForce([zeta, M](const std::vector<double>& costs,
                                                    const std::vector<double>& losses) {
        double acc = 0.0;
        for (double c : costs) acc += c;
        return acc / double(costs.size()) + M * risk::bpoe(losses, zeta);
    });
    CHECK(std::abs(pd.lookaheadObjective - oracle) <= 2e-3);
}

TEST_CASE("S-BPoE with only gamma zero reduces to S-LA plus M") {
    TinyInstance tiny;
    RiskConfig rc;
    rc.zeta = 0.15;
    rc.bigM = 7.0;
    rc.gammaGridSize = 0;  // gamma = 0 only: every eta pins at 1
    const auto bp = policy::decideSBPoE(tiny.state, tiny.params, tiny.demand, tiny.price,
                                        tiny.fan(), rc);
    const auto sla = policy::decideSLA(tiny.state, tiny.params, tiny.demand, tiny.price,
                                       tiny.fan());
    CHECK(bp.lookaheadObjective ==
          doctest::Approx(sla.lookaheadObjective + rc.bigM).epsilon(1e-9));
}

TEST_CASE("S-BPoE with an unreachable threshold reduces to S-LA") {
    TinyInstance tiny;
    RiskConfig rc;
    rc.zeta = 10.0;  // larger than any possible cumulative loss
    rc.bigM = 7.0;
    const auto bp = policy::decideSBPoE(tiny.state, tiny.params, tiny.demand, tiny.price,
                                        tiny.fan(), rc);
    const auto sla = policy::decideSLA(tiny.state, tiny.params, tiny.demand, tiny.price,
                                       tiny.fan());
    CHECK(bp.lookaheadObjective ==
          doctest::Approx(sla.lookaheadObjective).epsilon(1e-6));
}
