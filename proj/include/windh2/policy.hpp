#pragma once

#include <span>
#include <string>
#include <vector>

#include "windh2/domain.hpp"
#include "windh2/forecast.hpp"
#include "windh2/lp.hpp"

namespace windh2::policy {

/// Wind-budget discount for the deterministic look-ahead: either one scalar
/// applied to every lead time, or one entry per lead time 1..H. Entries may
/// exceed 1 (over-trusting the forecast is a legal, if unusual, setting).
class Theta {
public:
    static Theta constant(double value);
    static Theta lookupTable(std::vector<double> perLead);

    bool isConstant() const { return constant_; }
    int dimension() const { return static_cast<int>(values_.size()); }

    /// Discount for 1-based lead time tau.
    double at(int lead) const;

    std::span<const double> values() const { return values_; }
    std::vector<double>& mutableValues() { return values_; }

    void validate() const;

private:
    Theta(bool c, std::vector<double> v) : constant_(c), values_(std::move(v)) {}
    bool constant_;
    std::vector<double> values_;
};

/// Look-ahead wind budget b(f, theta) at the given lead time.
double windBudget(double forecastValue, const Theta& theta, int lead);

struct RiskConfig {
    double alpha = 0.9;       // CVaR level
    double zeta = 0.0;        // BPoE threshold on cumulative unserved load
    double bigM = 1e6;        // reliability weight in the S-BPoE objective
    // outer search over the bpoe scaling factor
    int gammaGridSize = 33;
    double gammaMin = 1e-4;
    double gammaMax = 1e2;
    int goldenIterations = 80;

    void validate() const;
};

struct PolicyDecision {
    Decision decision;
    double lookaheadObjective = 0.0;
    std::vector<double> scenarioCosts;   // cumulative look-ahead cost per scenario
    std::vector<double> scenarioLosses;  // cumulative look-ahead unserved load per scenario
};

/// Deterministic look-ahead with theta-discounted wind budgets.
PolicyDecision decideDLA(const SystemState& state, const SystemParams& params,
                         std::span<const double> demand, std::span<const double> price,
                         std::span<const double> pointForecast, const Theta& theta);

/// Risk-neutral two-stage look-ahead over a scenario fan.
PolicyDecision decideSLA(const SystemState& state, const SystemParams& params,
                         std::span<const double> demand, std::span<const double> price,
                         const forecast::ScenarioFan& fan);

/// CVaR-averse look-ahead: minimizes current cost plus the CVaR of the
/// cumulative scenario costs.
PolicyDecision decideSCVaR(const SystemState& state, const SystemParams& params,
                           std::span<const double> demand, std::span<const double> price,
                           const forecast::ScenarioFan& fan, const RiskConfig& risk);

/// BPoE-constrained look-ahead: adds M-weighted buffered exceedance of the
/// cumulative unserved load. The bilinear gamma is handled by an outer
/// search over fixed values (log grid plus golden-section refinement).
PolicyDecision decideSBPoE(const SystemState& state, const SystemParams& params,
                           std::span<const double> demand, std::span<const double> price,
                           const forecast::ScenarioFan& fan, const RiskConfig& risk);

/// Which policy the closed-loop simulator should run.
struct PolicySpec {
    enum class Kind { DLA, SLA, SCVAR, SBPOE };
    Kind kind = Kind::DLA;
    Theta theta = Theta::constant(1.0);
    RiskConfig risk;
    int fanSize = 100;  // |Omega| for the stochastic policies

    std::string name() const;
};

}  // namespace windh2::policy
