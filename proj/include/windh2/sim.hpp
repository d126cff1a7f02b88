#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "windh2/domain.hpp"
#include "windh2/forecast.hpp"
#include "windh2/policy.hpp"

namespace windh2::sim {

struct StepRecord {
    SystemState state;   // state the decision was taken in
    Decision decision;
    double stageCost = 0.0;
    double unservedLoad = 0.0;
    double curtailment = 0.0;
    double purchase = 0.0;
    double decisionSeconds = 0.0;
};

struct EpisodeTrace {
    std::vector<StepRecord> steps;  // length T
    SystemState finalState;        // levels after the last transition
    double totalCost = 0.0;
    double totalLoss = 0.0;
    double meanDecisionSeconds = 0.0;
};

struct EvaluationSummary {
    double meanCost = 0.0;
    double q80 = 0.0;
    double q90 = 0.0;
    double q95 = 0.0;
    double bpoeLoss = 0.0;          // bpoe of the total-loss sample at zeta
    double meanDecisionSeconds = 0.0;
    std::vector<double> costSample;  // per-episode totals, by scenario index
    std::vector<double> lossSample;
};

/// Everything one closed-loop run needs besides the policy.
struct Instance {
    SystemParams params;
    forecast::ExogenousSeries exogenous;
    forecast::ForecastModel forecastModel;
    double initialBattery = 0.0;
    double initialHydrogen = 0.0;

    void validate() const;
    SystemState initialState(double firstWind) const;
};

/// Rolling-horizon closed loop: at each step reveal the truth, build the
/// policy's forecast information from it, commit the here-and-now decision,
/// apply the transition. Infeasibility is an error, never clamped away.
/// episodeIndex partitions the fan sampling streams for stochastic policies.
EpisodeTrace runEpisode(const policy::PolicySpec& spec, std::span<const double> truthPath,
                        const Instance& instance, uint64_t episodeIndex = 0);

/// Out-of-sample evaluation over seeded truth paths. The same (seed,
/// scenarioCount) pair yields identical truths for any policy, so competing
/// policies can be compared pairwise.
EvaluationSummary evaluate(const policy::PolicySpec& spec, int scenarioCount, uint64_t seed,
                           double zeta, const Instance& instance);

}  // namespace windh2::sim
