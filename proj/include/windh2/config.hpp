#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "windh2/policy.hpp"
#include "windh2/sim.hpp"
#include "windh2/tuning.hpp"

namespace windh2::config {

/// Strict INI-style key/value sections. Unknown keys are rejected at load so
/// typos surface immediately.
struct ExperimentConfig {
    // [system]
    SystemParams params;  // acquisition schedule derived from period/start
    int acquisitionPeriod = 7;
    int acquisitionStart = 1;
    double batteryInitial = 0.0;
    double hydrogenInitial = 0.0;

    // [forecast]
    forecast::ForecastModel forecastModel;
    std::optional<double> initialWind;  // required with CSV data, optional otherwise

    // [data]
    std::optional<std::string> csvPath;
    std::optional<double> syntheticPeak;

    // [policy]
    policy::PolicySpec policy;

    // [evaluate]
    std::vector<policy::PolicySpec> evalPolicies;
    std::vector<std::string> evalPolicyLabels;  // original tokens, one per policy
    int evalScenarios = 100;
    double evalZeta = 0.0;

    // [tune]
    enum class TuneMode { Grid, Sgd } tuneMode = TuneMode::Grid;
    tuning::TuningObjective tuneObjective;
    bool tuneQuadratic = false;  // built-in test objective, bypasses the simulator
    std::vector<double> tuneGrid{1.0};
    int tuneSamples = 20;
    int tuneIterations = 2000;
    int tuneBatch = 10;
    std::vector<double> tuneTheta0{1.0};
    bool tuneThetaTable = false;
    double etaBase = 0.1, etaExp = 0.25;
    double psiBase = 0.3, psiExp = 0.1;

    // [sweep]
    std::vector<double> sweepThetas;
    std::vector<double> sweepZetas;
    int sweepScenarios = 100;

    static ExperimentConfig load(const std::string& path);

    /// Resolves the data source and builds the runnable instance.
    sim::Instance makeInstance() const;
};

/// "name[@param]" policy tokens: dla@0.9, dla@0.5|1.0|1.0 (look-up table),
/// sla, scvar@0.9, sbpoe@7000. Defaults come from the loaded [policy]
/// section.
policy::PolicySpec parsePolicyToken(const std::string& token, const policy::PolicySpec& defaults);

std::vector<double> parseNumberList(const std::string& text, char sep = ',');

}  // namespace windh2::config
