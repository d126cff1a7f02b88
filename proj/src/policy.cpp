#include "windh2/policy.hpp"

#include <algorithm>
#include <cmath>

#include "windh2/risk.hpp"

namespace windh2::policy {

Theta Theta::constant(double value) { return Theta(true, {value}); }

Theta Theta::lookupTable(std::vector<double> perLead) {
    if (perLead.empty()) throw ValidationError("theta: look-up table must be nonempty");
    return Theta(false, std::move(perLead));
}

double Theta::at(int lead) const {
    if (lead < 1) throw ValidationError("theta: lead time must be >= 1");
    if (constant_) return values_[0];
    if (lead > static_cast<int>(values_.size()))
        throw ValidationError("theta: look-up table shorter than requested lead time");
    return values_[static_cast<size_t>(lead - 1)];
}

void Theta::validate() const {
    for (double v : values_)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError("theta: entries must be finite and >= 0");
}

double windBudget(double forecastValue, const Theta& theta, int lead) {
    return theta.at(lead) * forecastValue;
}

void RiskConfig::validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ValidationError("risk config: alpha must lie in [0,1)");
    if (!(zeta >= 0.0)) throw ValidationError("risk config: zeta must be >= 0");
    if (!(bigM > 0.0)) throw ValidationError("risk config: M must be > 0");
    if (gammaGridSize < 0 || !(gammaMin > 0.0) || !(gammaMax >= gammaMin))
        throw ValidationError("risk config: malformed gamma grid");
}

std::string PolicySpec::name() const {
    switch (kind) {
        case Kind::DLA: return "dla";
        case Kind::SLA: return "sla";
        case Kind::SCVAR: return "scvar";
        case Kind::SBPOE: return "sbpoe";
    }
    return "?";
}

namespace {

constexpr int kWd = 0, kRd = 1, kHd = 2, kWr = 3, kHr = 4, kH = 5, kWx = 6;

// Shared look-ahead LP skeleton: stage-t decision in full, then per look-ahead
// stage the shared storage/purchase flows plus scenario-indexed wind-to-load
// and curtailment. Storage levels are substituted out so that every row is a
// "<=" with nonnegative rhs and the slack basis starts feasible.
struct LookaheadModel {
    lp::LpModel model;
    std::array<int, Decision::kComponents> stage{};
    lp::AffineExpr stageCost;                   // includes the C_P * D_t constant
    std::vector<lp::AffineExpr> scenarioCosts;  // cumulative look-ahead cost per scenario
    std::vector<lp::AffineExpr> scenarioLosses; // cumulative look-ahead unserved load
    int scenarios = 0;
    int leadSteps = 0;
};

LookaheadModel buildLookahead(const SystemState& state, const SystemParams& params,
                              std::span<const double> demand, std::span<const double> price,
                              const std::vector<std::vector<double>>& windBudgets) {
    params.validate();
    state.validate(params);

    const int scount = static_cast<int>(windBudgets.size());
    if (scount < 1) throw ValidationError("policy: need at least one scenario");
    const int h = static_cast<int>(windBudgets[0].size());
    for (const auto& b : windBudgets)
        if (static_cast<int>(b.size()) != h)
            throw ValidationError("policy: scenario budget paths must share one length");
    const int T = params.episodeLength;
    if (state.t < 0 || state.t >= T) throw ValidationError("policy: state step outside episode");
    if (h > T - 1 - state.t)
        throw ValidationError("policy: look-ahead extends past the exogenous series");
    if (static_cast<int>(demand.size()) < state.t + h + 1 ||
        static_cast<int>(price.size()) < state.t + h + 1)
        throw ValidationError("policy: exogenous series shorter than the look-ahead window");

    const double bc = params.chargeEff, bd = params.dischargeEff, bh = params.fuelCellEff;
    const double cp = params.lossPenalty, cw = params.curtailPenalty;
    // levels as seen by the LP are projected into the box; closed-loop states
    // may sit a solver tolerance outside it
    const double battery0 = std::clamp(state.batteryLevel, 0.0, params.batteryCapacity);
    const double hydrogen0 = std::clamp(state.hydrogenLevel, 0.0, params.hydrogenCapacity);

    LookaheadModel out;
    out.scenarios = scount;
    out.leadSteps = h;
    lp::LpModel& m = out.model;

    // --- stage t variables and rows (full static row set; bounds left wide,
    // the instantiated rows carry the limits)
    const bool gate0 = params.acquisitionAllowed(state.t);
    static const char* kStageNames[] = {"wd_t", "rd_t", "hd_t", "wr_t", "hr_t", "h_t", "wx_t"};
    for (int i = 0; i < Decision::kComponents; ++i)
        out.stage[static_cast<size_t>(i)] = m.addVariable(0.0, lp::kInf, kStageNames[i]);

    {
        SystemState projected = state;
        projected.batteryLevel = battery0;
        projected.hydrogenLevel = hydrogen0;
        for (const auto& row : feasibilityRows(projected, params, gate0)) {
            std::vector<lp::Term> terms;
            for (int i = 0; i < Decision::kComponents; ++i)
                if (row.coeffs[i] != 0.0) terms.emplace_back(out.stage[i], row.coeffs[i]);
            m.addConstraint(std::move(terms), lp::Sense::LessEq, row.rhs);
        }
    }

    out.stageCost.constant = cp * state.demand;
    out.stageCost.add(out.stage[kWd], -cp);
    out.stageCost.add(out.stage[kRd], -cp * bd);
    out.stageCost.add(out.stage[kHd], -cp * bh);
    out.stageCost.add(out.stage[kWx], cw);
    out.stageCost.add(out.stage[kH], state.hydrogenPrice);

    out.scenarioCosts.assign(static_cast<size_t>(scount), {});
    out.scenarioLosses.assign(static_cast<size_t>(scount), {});

    // cumulative net-inflow expressions over all stages before the current one
    lp::AffineExpr batteryInflow;   // sum of beta_c (wr + beta_h hr) - rd
    lp::AffineExpr hydrogenInflow;  // sum of h - hd - hr
    auto accumulateStage = [&](int wr, int hr, int rd, int hd, int hvar) {
        batteryInflow.add(wr, bc);
        batteryInflow.add(hr, bc * bh);
        batteryInflow.add(rd, -1.0);
        hydrogenInflow.add(hvar, 1.0);
        hydrogenInflow.add(hd, -1.0);
        hydrogenInflow.add(hr, -1.0);
    };
    accumulateStage(out.stage[kWr], out.stage[kHr], out.stage[kRd], out.stage[kHd],
                    out.stage[kH]);

    // --- look-ahead stages
    for (int lead = 1; lead <= h; ++lead) {
        const int tp = state.t + lead;
        const std::string suffix = "_" + std::to_string(tp);
        const double dem = demand[static_cast<size_t>(tp)];
        const double pr = price[static_cast<size_t>(tp)];
        const bool gate = params.acquisitionAllowed(tp);

        const int rd = m.addVariable(0.0, params.dischargeLimit, "rd" + suffix);
        const int hd = m.addVariable(0.0, lp::kInf, "hd" + suffix);
        const int wr = m.addVariable(0.0, lp::kInf, "wr" + suffix);
        const int hr = m.addVariable(0.0, lp::kInf, "hr" + suffix);
        const int hv = m.addVariable(0.0, gate ? params.hydrogenCapacity : 0.0, "h" + suffix);

        // battery draw: rd - inflow_so_far <= R^E_t
        {
            std::vector<lp::Term> terms{{rd, 1.0}};
            for (auto [v, c] : batteryInflow.terms) terms.emplace_back(v, -c);
            m.addConstraint(std::move(terms), lp::Sense::LessEq, battery0);
        }
        // hydrogen draw: hr + hd - inflow_so_far <= R^H_t
        {
            std::vector<lp::Term> terms{{hr, 1.0}, {hd, 1.0}};
            for (auto [v, c] : hydrogenInflow.terms) terms.emplace_back(v, -c);
            m.addConstraint(std::move(terms), lp::Sense::LessEq, hydrogen0);
        }
        // hydrogen headroom: h + inflow_so_far <= capacity - R^H_t
        {
            std::vector<lp::Term> terms{{hv, 1.0}};
            for (auto [v, c] : hydrogenInflow.terms) terms.emplace_back(v, c);
            m.addConstraint(std::move(terms), lp::Sense::LessEq,
                            params.hydrogenCapacity - hydrogen0);
        }
        // battery headroom: bc (wr + bh hr) - rd + inflow_so_far <= capacity - R^E_t
        {
            std::vector<lp::Term> terms{{wr, bc}, {hr, bc * bh}, {rd, -1.0}};
            for (auto [v, c] : batteryInflow.terms) terms.emplace_back(v, c);
            m.addConstraint(std::move(terms), lp::Sense::LessEq,
                            params.batteryCapacity - battery0);
        }
        // ratings
        m.addConstraint({{wr, 1.0}, {hr, bh}}, lp::Sense::LessEq, params.chargeLimit);
        m.addConstraint({{hr, bh}, {hd, bh}}, lp::Sense::LessEq, params.fuelCellLimit);

        accumulateStage(wr, hr, rd, hd, hv);

        for (int w = 0; w < scount; ++w) {
            const std::string ws = "_w" + std::to_string(w) + suffix;
            const int wd = m.addVariable(0.0, lp::kInf, "wd" + ws);
            const int wx = m.addVariable(0.0, lp::kInf, "wx" + ws);
            // scenario supply row and scenario wind budget
            m.addConstraint({{wd, 1.0}, {rd, bd}, {hd, bh}}, lp::Sense::LessEq, dem);
            m.addConstraint({{wr, 1.0}, {wd, 1.0}, {wx, 1.0}}, lp::Sense::LessEq,
                            windBudgets[static_cast<size_t>(w)][static_cast<size_t>(lead - 1)]);

            auto& cost = out.scenarioCosts[static_cast<size_t>(w)];
            cost.constant += cp * dem;
            cost.add(wd, -cp);
            cost.add(rd, -cp * bd);
            cost.add(hd, -cp * bh);
            cost.add(wx, cw);
            cost.add(hv, pr);

            auto& loss = out.scenarioLosses[static_cast<size_t>(w)];
            loss.constant += dem;
            loss.add(wd, -1.0);
            loss.add(rd, -bd);
            loss.add(hd, -bh);
        }
    }
    return out;
}

void addExprToObjective(lp::LpModel& m, const lp::AffineExpr& e, double weight) {
    for (auto [v, c] : e.terms) m.addObjectiveTerm(v, weight * c);
    m.addObjectiveConstant(weight * e.constant);
}

Decision extractStage(const LookaheadModel& lm, const std::vector<double>& primal) {
    Decision d;
    d.windToLoad = primal[static_cast<size_t>(lm.stage[kWd])];
    d.batteryToLoad = primal[static_cast<size_t>(lm.stage[kRd])];
    d.fuelCellToLoad = primal[static_cast<size_t>(lm.stage[kHd])];
    d.windToBattery = primal[static_cast<size_t>(lm.stage[kWr])];
    d.fuelCellToBattery = primal[static_cast<size_t>(lm.stage[kHr])];
    d.hydrogenPurchase = primal[static_cast<size_t>(lm.stage[kH])];
    d.windCurtailed = primal[static_cast<size_t>(lm.stage[kWx])];
    return d;
}

PolicyDecision finishSolve(const LookaheadModel& lm, const lp::LpSolution& sol,
                           const SystemState& state, const SystemParams& params) {
    if (sol.status == lp::Status::Infeasible)
        throw SimulationError("policy: look-ahead LP infeasible at t=" + std::to_string(state.t) +
                              " (the all-shed decision should always be feasible)");
    if (sol.status == lp::Status::Unbounded)
        throw SimulationError("policy: look-ahead LP unbounded at t=" + std::to_string(state.t) +
                              " (model construction bug)");

    PolicyDecision out;
    out.decision = extractStage(lm, sol.primal);
    out.lookaheadObjective = sol.objective;
    out.scenarioCosts.reserve(lm.scenarioCosts.size());
    out.scenarioLosses.reserve(lm.scenarioLosses.size());
    for (const auto& e : lm.scenarioCosts) out.scenarioCosts.push_back(e.evaluate(sol.primal));
    for (const auto& e : lm.scenarioLosses) out.scenarioLosses.push_back(e.evaluate(sol.primal));

    const double viol = feasibilityViolation(state, params, params.acquisitionAllowed(state.t),
                                             out.decision);
    if (viol > 1e-6)
        throw SimulationError("policy: returned decision violates feasibility by " +
                              std::to_string(viol) + " at t=" + std::to_string(state.t));
    return out;
}

std::vector<std::vector<double>> thetaBudgets(std::span<const double> pointForecast,
                                              const Theta& theta) {
    std::vector<double> path(pointForecast.size());
    for (size_t i = 0; i < pointForecast.size(); ++i)
        path[i] = windBudget(pointForecast[i], theta, static_cast<int>(i) + 1);
    return {std::move(path)};
}

}  // namespace

PolicyDecision decideDLA(const SystemState& state, const SystemParams& params,
                         std::span<const double> demand, std::span<const double> price,
                         std::span<const double> pointForecast, const Theta& theta) {
    theta.validate();
    LookaheadModel lm = buildLookahead(state, params, demand, price,
                                       thetaBudgets(pointForecast, theta));
    addExprToObjective(lm.model, lm.stageCost, 1.0);
    addExprToObjective(lm.model, lm.scenarioCosts[0], 1.0);
    return finishSolve(lm, lp::solve(lm.model), state, params);
}

PolicyDecision decideSLA(const SystemState& state, const SystemParams& params,
                         std::span<const double> demand, std::span<const double> price,
                         const forecast::ScenarioFan& fan) {
    if (fan.paths.empty()) throw ValidationError("policy: scenario fan is empty");
    LookaheadModel lm = buildLookahead(state, params, demand, price, fan.paths);
    addExprToObjective(lm.model, lm.stageCost, 1.0);
    const double w = 1.0 / double(lm.scenarios);
    for (const auto& cost : lm.scenarioCosts) addExprToObjective(lm.model, cost, w);
    return finishSolve(lm, lp::solve(lm.model), state, params);
}

PolicyDecision decideSCVaR(const SystemState& state, const SystemParams& params,
                           std::span<const double> demand, std::span<const double> price,
                           const forecast::ScenarioFan& fan, const RiskConfig& riskConfig) {
    if (fan.paths.empty()) throw ValidationError("policy: scenario fan is empty");
    riskConfig.validate();
    LookaheadModel lm = buildLookahead(state, params, demand, price, fan.paths);
    addExprToObjective(lm.model, lm.stageCost, 1.0);
    // look-ahead costs are nonnegative, so z may be bounded at 0
    risk::cvarEpigraphRows(lm.model, lm.scenarioCosts, riskConfig.alpha, /*zLower=*/0.0);
    return finishSolve(lm, lp::solve(lm.model), state, params);
}

PolicyDecision decideSBPoE(const SystemState& state, const SystemParams& params,
                           std::span<const double> demand, std::span<const double> price,
                           const forecast::ScenarioFan& fan, const RiskConfig& riskConfig) {
    if (fan.paths.empty()) throw ValidationError("policy: scenario fan is empty");
    riskConfig.validate();

    auto solveAtGamma = [&](double gamma) -> PolicyDecision {
        LookaheadModel lm = buildLookahead(state, params, demand, price, fan.paths);
        addExprToObjective(lm.model, lm.stageCost, 1.0);
        const double w = 1.0 / double(lm.scenarios);
        for (const auto& cost : lm.scenarioCosts) addExprToObjective(lm.model, cost, w);
        risk::bpoeEpigraphRows(lm.model, lm.scenarioLosses, riskConfig.zeta, gamma,
                               riskConfig.bigM);
        return finishSolve(lm, lp::solve(lm.model), state, params);
    };

    // gamma = 0 collapses the exceedance rows to eta = 1; it is both the
    // safe fallback and one end of the quasi-convex family. gridSize 0 keeps
    // only that point.
    std::vector<double> grid;
    grid.push_back(0.0);
    if (riskConfig.gammaGridSize == 1) {
        grid.push_back(riskConfig.gammaMin);
    } else if (riskConfig.gammaGridSize > 1) {
        const double ratio = std::log(riskConfig.gammaMax / riskConfig.gammaMin) /
                             double(riskConfig.gammaGridSize - 1);
        for (int i = 0; i < riskConfig.gammaGridSize; ++i)
            grid.push_back(riskConfig.gammaMin * std::exp(ratio * double(i)));
    }

    PolicyDecision best = solveAtGamma(grid[0]);
    size_t bestIdx = 0;
    for (size_t i = 1; i < grid.size(); ++i) {
        PolicyDecision cand = solveAtGamma(grid[i]);
        if (cand.lookaheadObjective < best.lookaheadObjective) {
            best = std::move(cand);
            bestIdx = i;
        }
    }

    // one golden-section refinement between the incumbent's grid neighbours
    const double lo = bestIdx > 0 ? grid[bestIdx - 1] : grid[bestIdx];
    const double hi = bestIdx + 1 < grid.size() ? grid[bestIdx + 1] : grid[bestIdx];
    if (hi > lo) {
        const double invphi = 0.6180339887498949;
        double a = lo, b = hi;
        auto evalObj = [&](double g) {
            PolicyDecision cand = solveAtGamma(g);
            const double obj = cand.lookaheadObjective;
            if (obj < best.lookaheadObjective) best = std::move(cand);
            return obj;
        };
        double x1 = b - invphi * (b - a);
        double x2 = a + invphi * (b - a);
        double f1 = evalObj(x1);
        double f2 = evalObj(x2);
        for (int it = 0; it < riskConfig.goldenIterations && (b - a) > 1e-12 * (1.0 + b); ++it) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - invphi * (b - a);
                f1 = evalObj(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + invphi * (b - a);
                f2 = evalObj(x2);
            }
        }
    }
    return best;
}

}  // namespace windh2::policy
