#include "windh2/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "windh2/risk.hpp"

namespace windh2::tuning {

void TuningObjective::validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw ValidationError("tuning: alpha must lie in [0,1)");
    if (!(zeta >= 0.0)) throw ValidationError("tuning: zeta must be >= 0");
}

void SgdConfig::validate() const {
    if (iterationCap < 1) throw ValidationError("sgd: iteration cap must be >= 1");
    if (batchSize < 1) throw ValidationError("sgd: batch size must be >= 1");
    if (stopMin < 0 || stopMax < 0 || (stopMax > 0 && stopMax < stopMin) ||
        stopMax > iterationCap)
        throw ValidationError("sgd: malformed stopping range");
    initialTheta.validate();
}

double SgdConfig::etaAt(int k) const {
    return eta ? eta(k) : 0.1 * std::pow(double(k), -0.25);
}
double SgdConfig::psiAt(int k) const {
    return psi ? psi(k) : 0.3 * std::pow(double(k), -0.1);
}
double SgdConfig::phiAt(int k) const { return phi ? phi(k) : 2.0 / double(k + 2); }

namespace {

std::pair<double, double> runDlaEpisode(const sim::Instance& instance,
                                        const policy::Theta& theta, uint64_t omega) {
    policy::PolicySpec spec;
    spec.kind = policy::PolicySpec::Kind::DLA;
    spec.theta = theta;
    const auto truth = forecast::truthPath(instance.forecastModel, instance.exogenous,
                                           instance.params.episodeLength, omega);
    const auto trace = sim::runEpisode(spec, truth, instance, omega);
    return {trace.totalCost, trace.totalLoss};
}

// scenario indices derived from the evaluation seed only: different theta
// values see the same truth paths
std::vector<uint64_t> scenarioSet(uint64_t seed, int count) {
    forecast::Rng rng = forecast::Rng::forStream(seed, "scenario-set", 0);
    std::vector<uint64_t> out(static_cast<size_t>(count));
    for (auto& w : out) w = rng.nextU64();
    return out;
}

double batchStatistic(const TuningObjective& objective, std::span<const double> costs,
                      std::span<const double> losses) {
    switch (objective.kind) {
        case ObjectiveKind::ExpectedCost: {
            double acc = 0.0;
            for (double c : costs) acc += c;
            return acc / double(costs.size());
        }
        case ObjectiveKind::CVaRCost: return risk::cvar(costs, objective.alpha);
        case ObjectiveKind::BPoELoss: return risk::bpoe(losses, objective.zeta);
    }
    return 0.0;
}

}  // namespace

double episodeCost(const sim::Instance& instance, const policy::Theta& theta, uint64_t omega) {
    return runDlaEpisode(instance, theta, omega).first;
}

double episodeLoss(const sim::Instance& instance, const policy::Theta& theta, uint64_t omega) {
    return runDlaEpisode(instance, theta, omega).second;
}

double evaluateObjective(const sim::Instance& instance, const TuningObjective& objective,
                         const policy::Theta& theta, int sampleCount, uint64_t seed) {
    objective.validate();
    if (sampleCount < 1) throw ValidationError("tuning: sample count must be >= 1");
    const auto omegas = scenarioSet(seed, sampleCount);
    std::vector<double> costs, losses;
    costs.reserve(omegas.size());
    losses.reserve(omegas.size());
    for (uint64_t w : omegas) {
        const auto [c, l] = runDlaEpisode(instance, theta, w);
        costs.push_back(c);
        losses.push_back(l);
    }
    return batchStatistic(objective, costs, losses);
}

TuningReport tuneSgd(const SampleFunctional& F, const TuningObjective& objective,
                     const SgdConfig& config) {
    objective.validate();
    config.validate();

    const int N = config.iterationCap;
    const int d = config.initialTheta.dimension();
    std::vector<double> theta(config.initialTheta.values().begin(),
                              config.initialTheta.values().end());
    std::vector<double> gbar(static_cast<size_t>(d), 0.0);

    auto makeTheta = [&](const std::vector<double>& v) {
        return config.initialTheta.isConstant() ? policy::Theta::constant(v[0])
                                                : policy::Theta::lookupTable(v);
    };

    // stopping iteration R
    const int stopLo = config.stopMin > 0 ? config.stopMin : (N + 1) / 2;
    const int stopHi = config.stopMax > 0 ? config.stopMax : N;
    forecast::Rng stopRng = forecast::Rng::forStream(config.seed, "sgd-stop", 0);
    const int R = stopLo + static_cast<int>(stopRng.nextU64() %
                                            uint64_t(stopHi - stopLo + 1));

    TuningReport report;
    report.trace.reserve(static_cast<size_t>(R));

    for (int k = 1; k <= R; ++k) {
        const double psiK = config.psiAt(k);
        const double phiK = config.phiAt(k);
        const double etaK = config.etaAt(k);

        TraceEntry entry;
        entry.iteration = k;
        entry.gbarBefore = gbar;
        entry.psi = psiK;
        entry.phi = phiK;

        // theta update from the averaged gradient, then projection
        for (int j = 0; j < d; ++j) {
            const double ty = theta[static_cast<size_t>(j)] - psiK * gbar[static_cast<size_t>(j)];
            double t = (1.0 - phiK) * theta[static_cast<size_t>(j)] + phiK * ty;
            if (t < 0.0) t = 0.0;  // nonnegative orthant
            theta[static_cast<size_t>(j)] = t;
        }
        entry.theta = theta;

        // one shared Gaussian direction per iteration
        forecast::Rng dirRng = forecast::Rng::forStream(config.seed, "sgd-direction",
                                                        uint64_t(k));
        std::vector<double> dir(static_cast<size_t>(d));
        for (auto& v : dir) v = dirRng.normal();

        std::vector<double> perturbed(theta);
        for (int j = 0; j < d; ++j)
            perturbed[static_cast<size_t>(j)] += etaK * dir[static_cast<size_t>(j)];
        // the shifted point must stay a valid parameter vector
        for (auto& v : perturbed) v = std::max(v, 0.0);

        const policy::Theta thetaNow = makeTheta(theta);
        const policy::Theta thetaShift = makeTheta(perturbed);

        forecast::Rng batchRng = forecast::Rng::forStream(config.seed, "sgd-batch", uint64_t(k));
        std::vector<double> diffAcc(static_cast<size_t>(d), 0.0);
        std::vector<double> batchSamples;
        batchSamples.reserve(static_cast<size_t>(config.batchSize));
        for (int i = 0; i < config.batchSize; ++i) {
            const uint64_t omega = batchRng.nextU64();
            const double fBase = F(thetaNow, omega);
            const double fShift = F(thetaShift, omega);
            if (!std::isfinite(fBase) || !std::isfinite(fShift))
                throw SimulationError("sgd: non-finite objective sample at iteration " +
                                      std::to_string(k) + ", scenario seed " +
                                      std::to_string(omega));
            batchSamples.push_back(fBase);
            const double slope = (fShift - fBase) / etaK;
            for (int j = 0; j < d; ++j)
                diffAcc[static_cast<size_t>(j)] += slope * dir[static_cast<size_t>(j)];
        }
        double gnorm = 0.0;
        for (int j = 0; j < d; ++j) {
            const double g = diffAcc[static_cast<size_t>(j)] / double(config.batchSize);
            gbar[static_cast<size_t>(j)] = (1.0 - phiK) * gbar[static_cast<size_t>(j)] + phiK * g;
            gnorm += gbar[static_cast<size_t>(j)] * gbar[static_cast<size_t>(j)];
        }
        entry.gradientNorm = std::sqrt(gnorm);
        entry.objectiveEstimate = batchStatistic(objective, batchSamples, batchSamples);
        report.trace.push_back(std::move(entry));
    }

    report.thetaFinal = makeTheta(theta);
    return report;
}

namespace {

TuningReport gridSearch(const std::function<double(const policy::Theta&)>& estimate,
                        const std::vector<policy::Theta>& grid) {
    if (grid.empty()) throw ValidationError("tuning: grid must be nonempty");
    TuningReport report;
    report.trace.reserve(grid.size());
    size_t bestIdx = 0;
    double bestValue = 0.0;
    for (size_t i = 0; i < grid.size(); ++i) {
        grid[i].validate();
        const double value = estimate(grid[i]);
        TraceEntry entry;
        entry.iteration = static_cast<int>(i);
        entry.theta.assign(grid[i].values().begin(), grid[i].values().end());
        entry.objectiveEstimate = value;
        report.trace.push_back(std::move(entry));
        if (i == 0 || value < bestValue) {
            bestValue = value;
            bestIdx = i;
        }
    }
    report.thetaFinal = grid[bestIdx];
    return report;
}

}  // namespace

TuningReport tuneGrid(const sim::Instance& instance, const TuningObjective& objective,
                      const std::vector<policy::Theta>& grid, int sampleCount, uint64_t seed) {
    objective.validate();
    return gridSearch(
        [&](const policy::Theta& theta) {
            return evaluateObjective(instance, objective, theta, sampleCount, seed);
        },
        grid);
}

TuningReport tuneGrid(const SampleFunctional& F, const TuningObjective& objective,
                      const std::vector<policy::Theta>& grid, int sampleCount, uint64_t seed) {
    objective.validate();
    if (sampleCount < 1) throw ValidationError("tuning: sample count must be >= 1");
    return gridSearch(
        [&](const policy::Theta& theta) {
            const auto omegas = scenarioSet(seed, sampleCount);
            std::vector<double> samples;
            samples.reserve(omegas.size());
            for (uint64_t w : omegas) samples.push_back(F(theta, w));
            return batchStatistic(objective, samples, samples);
        },
        grid);
}

}  // namespace windh2::tuning
