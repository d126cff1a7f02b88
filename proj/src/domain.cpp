#include "windh2/domain.hpp"

#include <algorithm>
#include <cmath>

namespace windh2 {

namespace {
constexpr int kWd = 0, kRd = 1, kHd = 2, kWr = 3, kHr = 4, kH = 5, kWx = 6;

void requireNonneg(double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v))
        throw ValidationError(std::string("params: ") + what + " must be finite and >= 0");
}

void requireEff(double v, const char* what) {
    if (!(v > 0.0 && v <= 1.0))
        throw ValidationError(std::string("params: ") + what + " must lie in (0,1]");
}
}  // namespace

void SystemParams::validate() const {
    requireNonneg(batteryCapacity, "battery capacity");
    requireNonneg(hydrogenCapacity, "hydrogen capacity");
    requireNonneg(chargeLimit, "charge limit");
    requireNonneg(dischargeLimit, "discharge limit");
    requireNonneg(fuelCellLimit, "fuel cell limit");
    requireNonneg(lossPenalty, "loss penalty");
    requireNonneg(curtailPenalty, "curtailment penalty");
    requireEff(chargeEff, "charge efficiency");
    requireEff(dischargeEff, "discharge efficiency");
    requireEff(fuelCellEff, "fuel cell efficiency");
    if (horizon < 0) throw ValidationError("params: horizon must be >= 0");
    if (episodeLength < 1) throw ValidationError("params: episode length must be >= 1");
    if (acquisitionSchedule.size() != static_cast<size_t>(episodeLength))
        throw ValidationError("params: acquisition schedule length must equal episode length");
}

void SystemState::validate(const SystemParams& params) const {
    if (!(demand >= 0.0) || !(wind >= 0.0) || !(hydrogenPrice >= 0.0))
        throw ValidationError("state: demand, wind and price must be >= 0");
    // levels produced by LP-driven transitions may sit a solver tolerance
    // outside the box
    if (batteryLevel < -1e-6 || batteryLevel > params.batteryCapacity + 1e-6)
        throw ValidationError("state: battery level outside [0, capacity]");
    if (hydrogenLevel < -1e-6 || hydrogenLevel > params.hydrogenCapacity + 1e-6)
        throw ValidationError("state: hydrogen level outside [0, capacity]");
}

std::vector<FeasibilityRow> feasibilityRows(const SystemState& state, const SystemParams& params,
                                            bool acquisitionAllowed) {
    const double bc = params.chargeEff;
    const double bd = params.dischargeEff;
    const double bh = params.fuelCellEff;

    std::vector<FeasibilityRow> rows;
    rows.reserve(10);
    auto row = [&rows](const char* label, double rhs) -> FeasibilityRow& {
        rows.push_back(FeasibilityRow{{}, rhs, label});
        return rows.back();
    };

    {  // wind budget
        auto& r = row("wind_budget", state.wind);
        r.coeffs[kWr] = 1.0;
        r.coeffs[kWd] = 1.0;
        r.coeffs[kWx] = 1.0;
    }
    {  // supply may not exceed demand
        auto& r = row("supply_le_demand", state.demand);
        r.coeffs[kWd] = 1.0;
        r.coeffs[kRd] = bd;
        r.coeffs[kHd] = bh;
    }
    {  // purchase gating
        auto& r = row("purchase_gate", acquisitionAllowed ? params.hydrogenCapacity : 0.0);
        r.coeffs[kH] = 1.0;
    }
    {  // battery draw limited by level
        auto& r = row("battery_draw", state.batteryLevel);
        r.coeffs[kRd] = 1.0;
    }
    {  // fuel cell draw limited by hydrogen level
        auto& r = row("hydrogen_draw", state.hydrogenLevel);
        r.coeffs[kHr] = 1.0;
        r.coeffs[kHd] = 1.0;
    }
    {  // purchase limited by hydrogen headroom
        auto& r = row("hydrogen_headroom", params.hydrogenCapacity - state.hydrogenLevel);
        r.coeffs[kH] = 1.0;
    }
    {  // battery headroom; fuel-cell inflow converted by the cell efficiency
        auto& r = row("battery_headroom", params.batteryCapacity - state.batteryLevel);
        r.coeffs[kWr] = bc;
        r.coeffs[kHr] = bc * bh;
        r.coeffs[kRd] = -1.0;
    }
    {  // charging rating (electric side, pre-efficiency)
        auto& r = row("charge_rating", params.chargeLimit);
        r.coeffs[kWr] = 1.0;
        r.coeffs[kHr] = bh;
    }
    {  // discharging rating
        auto& r = row("discharge_rating", params.dischargeLimit);
        r.coeffs[kRd] = 1.0;
    }
    {  // fuel cell rating (electric side)
        auto& r = row("fuel_cell_rating", params.fuelCellLimit);
        r.coeffs[kHr] = bh;
        r.coeffs[kHd] = bh;
    }
    return rows;
}

double feasibilityViolation(const SystemState& state, const SystemParams& params,
                            bool acquisitionAllowed, const Decision& d) {
    const auto x = d.asArray();
    double worst = 0.0;
    for (double v : x) worst = std::max(worst, -v);  // nonnegativity
    for (const auto& r : feasibilityRows(state, params, acquisitionAllowed)) {
        double lhs = 0.0;
        for (int i = 0; i < Decision::kComponents; ++i) lhs += r.coeffs[i] * x[i];
        worst = std::max(worst, lhs - r.rhs);
    }
    return worst;
}

SystemState transition(const SystemState& state, const Decision& d, const SystemParams& params,
                       const Exogenous& next, double tolerance) {
    const double nextHydrogen =
        state.hydrogenLevel - d.fuelCellToLoad - d.fuelCellToBattery + d.hydrogenPurchase;
    const double nextBattery =
        state.batteryLevel - d.batteryToLoad +
        params.chargeEff * (d.windToBattery + params.fuelCellEff * d.fuelCellToBattery);

    if (nextHydrogen < -tolerance || nextHydrogen > params.hydrogenCapacity + tolerance)
        throw SimulationError("transition: hydrogen level left [0, capacity] at t=" +
                              std::to_string(state.t));
    if (nextBattery < -tolerance || nextBattery > params.batteryCapacity + tolerance)
        throw SimulationError("transition: battery level left [0, capacity] at t=" +
                              std::to_string(state.t));

    // raw values, not clamped: episode-level telescoping checks rely on the
    // transition arithmetic being exact
    SystemState out;
    out.t = state.t + 1;
    out.demand = next.demand;
    out.wind = next.wind;
    out.hydrogenPrice = next.hydrogenPrice;
    out.batteryLevel = nextBattery;
    out.hydrogenLevel = nextHydrogen;
    return out;
}

double unservedLoad(const SystemState& state, const Decision& d, const SystemParams& params) {
    return state.demand -
           (d.windToLoad + params.dischargeEff * d.batteryToLoad +
            params.fuelCellEff * d.fuelCellToLoad);
}

double stageCost(const SystemState& state, const Decision& d, const SystemParams& params) {
    return params.lossPenalty * unservedLoad(state, d, params) +
           params.curtailPenalty * d.windCurtailed + state.hydrogenPrice * d.hydrogenPurchase;
}

}  // namespace windh2
