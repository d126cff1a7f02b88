#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "windh2/errors.hpp"

namespace windh2 {

/// The 7-component dispatch vector. All entries are energy per step and
/// must be nonnegative.
struct Decision {
    double windToLoad = 0.0;       // x_wd
    double batteryToLoad = 0.0;    // x_rd
    double fuelCellToLoad = 0.0;   // x_hd (hydrogen-side units)
    double windToBattery = 0.0;    // x_wr
    double fuelCellToBattery = 0.0;// x_hr (hydrogen-side units)
    double hydrogenPurchase = 0.0; // x_h
    double windCurtailed = 0.0;    // x_wx

    static constexpr int kComponents = 7;
    std::array<double, kComponents> asArray() const {
        return {windToLoad, batteryToLoad, fuelCellToLoad, windToBattery,
                fuelCellToBattery, hydrogenPurchase, windCurtailed};
    }
};

/// Static system description. Storage levels are energy; ratings and flows
/// are energy per step (one step = one day).
struct SystemParams {
    double batteryCapacity = 0.0;   // upper bound on battery level
    double hydrogenCapacity = 0.0;  // upper bound on hydrogen level (fuel units)
    double chargeEff = 1.0;         // battery charging efficiency, (0,1]
    double dischargeEff = 1.0;      // battery discharging efficiency, (0,1]
    double fuelCellEff = 1.0;       // fuel-to-electric efficiency, (0,1]
    double chargeLimit = 0.0;       // electric-side charging rating
    double dischargeLimit = 0.0;    // battery discharge rating
    double fuelCellLimit = 0.0;     // electric-side fuel cell rating
    double lossPenalty = 0.0;       // cost per unit unserved load
    double curtailPenalty = 0.0;    // cost per unit curtailed wind
    std::vector<uint8_t> acquisitionSchedule;  // length T; 1 = purchase allowed
    int horizon = 0;                // look-ahead length H
    int episodeLength = 1;          // T

    void validate() const;
    bool acquisitionAllowed(int t) const {
        return t >= 0 && t < static_cast<int>(acquisitionSchedule.size()) &&
               acquisitionSchedule[static_cast<size_t>(t)] != 0;
    }
};

/// Per-step state: exogenous observations plus storage levels.
struct SystemState {
    int t = 0;
    double demand = 0.0;
    double wind = 0.0;           // available wind this step
    double hydrogenPrice = 0.0;
    double batteryLevel = 0.0;
    double hydrogenLevel = 0.0;

    void validate(const SystemParams& params) const;
};

/// One inequality a·x <= rhs over the 7 decision components.
struct FeasibilityRow {
    std::array<double, Decision::kComponents> coeffs{};
    double rhs = 0.0;
    const char* label = "";
};

/// Instantiates the static per-step constraint rows (wind budget, supply
/// limit, purchase gating, draw limits, headroom, ratings) at the given
/// state. Transition rows are handled by transition().
std::vector<FeasibilityRow> feasibilityRows(const SystemState& state, const SystemParams& params,
                                            bool acquisitionAllowed);

/// Max violation of the row set and nonnegativity at a decision.
double feasibilityViolation(const SystemState& state, const SystemParams& params,
                            bool acquisitionAllowed, const Decision& d);

struct Exogenous {
    double demand = 0.0;
    double wind = 0.0;
    double hydrogenPrice = 0.0;
};

/// Applies the storage transition and advances to the next step's exogenous
/// values. Throws SimulationError if a storage level leaves its bounds by
/// more than tolerance (an upstream feasibility bug).
SystemState transition(const SystemState& state, const Decision& d, const SystemParams& params,
                       const Exogenous& next, double tolerance = 1e-6);

/// Demand not met by wind, battery or fuel cell this step.
double unservedLoad(const SystemState& state, const Decision& d, const SystemParams& params);

/// Per-step operating cost: loss penalty + curtailment penalty + fuel bill.
double stageCost(const SystemState& state, const Decision& d, const SystemParams& params);

}  // namespace windh2
