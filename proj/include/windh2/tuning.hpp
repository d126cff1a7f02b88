#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "windh2/policy.hpp"
#include "windh2/sim.hpp"

namespace windh2::tuning {

enum class ObjectiveKind { ExpectedCost, CVaRCost, BPoELoss };

struct TuningObjective {
    ObjectiveKind kind = ObjectiveKind::ExpectedCost;
    double alpha = 0.9;  // CVaRCost level
    double zeta = 0.0;   // BPoELoss threshold

    void validate() const;
};

/// Per-scenario sample functional F(theta, omega). omega identifies a
/// seeded truth path (or any other scenario source for synthetic tests).
using SampleFunctional = std::function<double(const policy::Theta&, uint64_t)>;

/// Closed-loop D-LA episode total cost on the truth path indexed by omega.
double episodeCost(const sim::Instance& instance, const policy::Theta& theta, uint64_t omega);

/// Closed-loop D-LA episode total unserved load on the same path.
double episodeLoss(const sim::Instance& instance, const policy::Theta& theta, uint64_t omega);

/// Monte Carlo estimate of the chosen objective at theta. The omega set is
/// derived from (seed, i) only, so different theta values share truth paths
/// (common random numbers).
double evaluateObjective(const sim::Instance& instance, const TuningObjective& objective,
                         const policy::Theta& theta, int sampleCount, uint64_t seed);

struct SgdConfig {
    int iterationCap = 2000;  // N
    int batchSize = 10;       // m_k
    std::function<double(int)> eta;  // smoothing schedule, default 0.1 k^-1/4
    std::function<double(int)> psi;  // step schedule, default 0.3 k^-0.1
    std::function<double(int)> phi;  // averaging schedule, default 2/(k+2)
    // stopping iteration R is uniform on {ceil(N/2)..N} unless overridden
    int stopMin = 0;
    int stopMax = 0;
    policy::Theta initialTheta = policy::Theta::constant(1.0);
    uint64_t seed = 0;

    void validate() const;
    double etaAt(int k) const;
    double psiAt(int k) const;
    double phiAt(int k) const;
};

struct TraceEntry {
    int iteration = 0;
    std::vector<double> theta;       // after the update and projection
    std::vector<double> gbarBefore;  // averaged gradient driving this update
    double psi = 0.0;
    double phi = 0.0;
    double objectiveEstimate = 0.0;
    double gradientNorm = 0.0;  // |Gbar| after the gradient update
};

struct TuningReport {
    policy::Theta thetaFinal = policy::Theta::constant(1.0);
    std::vector<TraceEntry> trace;
};

/// Smoothed stochastic gradient descent: draw R, then per iteration update
/// theta from the averaged gradient, project onto theta >= 0, and refresh
/// the gradient from batched forward differences along one shared Gaussian
/// direction. The trace's objective estimate applies the requested
/// statistic (mean/cvar/bpoe) to the batch samples.
TuningReport tuneSgd(const SampleFunctional& F, const TuningObjective& objective,
                     const SgdConfig& config);

/// Common-random-number grid search; ties keep the earliest grid point.
TuningReport tuneGrid(const sim::Instance& instance, const TuningObjective& objective,
                      const std::vector<policy::Theta>& grid, int sampleCount, uint64_t seed);

/// Grid search over an arbitrary per-scenario functional (cost samples feed
/// mean/cvar statistics, loss-kind objectives treat the samples as losses).
TuningReport tuneGrid(const SampleFunctional& F, const TuningObjective& objective,
                      const std::vector<policy::Theta>& grid, int sampleCount, uint64_t seed);

}  // namespace windh2::tuning
