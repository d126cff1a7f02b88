#include "windh2/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <string>
#include <thread>

#include "windh2/risk.hpp"

namespace windh2::sim {

void Instance::validate() const {
    params.validate();
    exogenous.validate();
    forecastModel.validate();
    if (exogenous.length() != params.episodeLength)
        throw ValidationError("instance: exogenous series length must equal episode length");
    if (params.horizon > params.episodeLength)
        throw ValidationError("instance: horizon must not exceed episode length");
    if (initialBattery < 0.0 || initialBattery > params.batteryCapacity)
        throw ValidationError("instance: initial battery level outside [0, capacity]");
    if (initialHydrogen < 0.0 || initialHydrogen > params.hydrogenCapacity)
        throw ValidationError("instance: initial hydrogen level outside [0, capacity]");
}

SystemState Instance::initialState(double firstWind) const {
    SystemState s;
    s.t = 0;
    s.demand = exogenous.demand.front();
    s.wind = firstWind;
    s.hydrogenPrice = exogenous.hydrogenPrice.front();
    s.batteryLevel = initialBattery;
    s.hydrogenLevel = initialHydrogen;
    return s;
}

EpisodeTrace runEpisode(const policy::PolicySpec& spec, std::span<const double> truthPath,
                        const Instance& instance, uint64_t episodeIndex) {
    instance.validate();
    const SystemParams& params = instance.params;
    const int T = params.episodeLength;
    if (static_cast<int>(truthPath.size()) != T)
        throw ValidationError("episode: truth path length must equal episode length");

    const auto& demand = instance.exogenous.demand;
    const auto& price = instance.exogenous.hydrogenPrice;
    const std::string fanPurpose = "fan:" + std::to_string(episodeIndex);

    EpisodeTrace trace;
    trace.steps.reserve(static_cast<size_t>(T));

    SystemState state = instance.initialState(truthPath[0]);
    double timeAcc = 0.0;
    for (int t = 0; t < T; ++t) {
        state.wind = truthPath[static_cast<size_t>(t)];  // reveal the truth
        const int lead = std::min(params.horizon, T - 1 - t);

        const auto tick = std::chrono::steady_clock::now();
        policy::PolicyDecision pd;
        switch (spec.kind) {
            case policy::PolicySpec::Kind::DLA: {
                // flat martingale extension of the revealed value
                std::vector<double> point(static_cast<size_t>(lead), state.wind);
                pd = policy::decideDLA(state, params, demand, price, point, spec.theta);
                break;
            }
            case policy::PolicySpec::Kind::SLA: {
                auto fan = forecast::sampleFan(state.wind, lead, spec.fanSize,
                                               instance.forecastModel, fanPurpose,
                                               uint64_t(t) * uint64_t(spec.fanSize));
                pd = policy::decideSLA(state, params, demand, price, fan);
                break;
            }
            case policy::PolicySpec::Kind::SCVAR: {
                auto fan = forecast::sampleFan(state.wind, lead, spec.fanSize,
                                               instance.forecastModel, fanPurpose,
                                               uint64_t(t) * uint64_t(spec.fanSize));
                pd = policy::decideSCVaR(state, params, demand, price, fan, spec.risk);
                break;
            }
            case policy::PolicySpec::Kind::SBPOE: {
                auto fan = forecast::sampleFan(state.wind, lead, spec.fanSize,
                                               instance.forecastModel, fanPurpose,
                                               uint64_t(t) * uint64_t(spec.fanSize));
                pd = policy::decideSBPoE(state, params, demand, price, fan, spec.risk);
                break;
            }
        }
        const auto tock = std::chrono::steady_clock::now();
        const double seconds = std::chrono::duration<double>(tock - tick).count();
        timeAcc += seconds;

        StepRecord rec;
        rec.state = state;
        rec.decision = pd.decision;
        rec.stageCost = stageCost(state, pd.decision, params);
        rec.unservedLoad = unservedLoad(state, pd.decision, params);
        rec.curtailment = pd.decision.windCurtailed;
        rec.purchase = pd.decision.hydrogenPurchase;
        rec.decisionSeconds = seconds;
        trace.totalCost += rec.stageCost;
        trace.totalLoss += rec.unservedLoad;
        trace.steps.push_back(rec);

        Exogenous next{};
        if (t + 1 < T) {
            next.demand = demand[static_cast<size_t>(t + 1)];
            next.wind = truthPath[static_cast<size_t>(t + 1)];
            next.hydrogenPrice = price[static_cast<size_t>(t + 1)];
        }
        try {
            state = transition(state, pd.decision, params, next);
        } catch (const SimulationError& e) {
            throw SimulationError(std::string(e.what()) + " (episode step " + std::to_string(t) +
                                  ")");
        }
    }
    trace.finalState = state;
    trace.meanDecisionSeconds = timeAcc / double(T);
    return trace;
}

EvaluationSummary evaluate(const policy::PolicySpec& spec, int scenarioCount, uint64_t seed,
                           double zeta, const Instance& instance) {
    if (scenarioCount < 1) throw ValidationError("evaluate: scenario count must be >= 1");
    instance.validate();

    // the evaluation seed overrides the forecast model's base seed so that
    // policies sharing (seed, scenarioCount) see identical truth paths
    Instance seeded = instance;
    seeded.forecastModel.seed = seed;
    const int T = seeded.params.episodeLength;

    EvaluationSummary out;
    out.costSample.resize(static_cast<size_t>(scenarioCount));
    out.lossSample.resize(static_cast<size_t>(scenarioCount));
    std::vector<double> times(static_cast<size_t>(scenarioCount));

    auto runOne = [&](int ep) {
        const auto truth =
            forecast::truthPath(seeded.forecastModel, seeded.exogenous, T, uint64_t(ep));
        try {
            EpisodeTrace trace = runEpisode(spec, truth, seeded, uint64_t(ep));
            out.costSample[static_cast<size_t>(ep)] = trace.totalCost;
            out.lossSample[static_cast<size_t>(ep)] = trace.totalLoss;
            times[static_cast<size_t>(ep)] = trace.meanDecisionSeconds;
        } catch (const SimulationError& e) {
            throw SimulationError(std::string(e.what()) + " (evaluation scenario " +
                                  std::to_string(ep) + ")");
        }
    };

    const unsigned hw = std::thread::hardware_concurrency();
    if (hw > 1 && scenarioCount > 1) {
        // episodes are independent; a shared atomic cursor keeps the pool busy
        std::atomic<int> cursor{0};
        std::vector<std::future<void>> workers;
        const unsigned nWorkers = std::min<unsigned>(hw, static_cast<unsigned>(scenarioCount));
        for (unsigned w = 0; w < nWorkers; ++w) {
            workers.push_back(std::async(std::launch::async, [&]() {
                for (int ep = cursor.fetch_add(1); ep < scenarioCount; ep = cursor.fetch_add(1))
                    runOne(ep);
            }));
        }
        for (auto& f : workers) f.get();
    } else {
        for (int ep = 0; ep < scenarioCount; ++ep) runOne(ep);
    }

    double costAcc = 0.0, timeAcc = 0.0;
    for (int ep = 0; ep < scenarioCount; ++ep) {
        costAcc += out.costSample[static_cast<size_t>(ep)];
        timeAcc += times[static_cast<size_t>(ep)];
    }
    out.meanCost = costAcc / double(scenarioCount);
    out.q80 = risk::var(out.costSample, 0.80);
    out.q90 = risk::var(out.costSample, 0.90);
    out.q95 = risk::var(out.costSample, 0.95);
    out.bpoeLoss = risk::bpoe(out.lossSample, zeta);
    out.meanDecisionSeconds = timeAcc / double(scenarioCount);
    return out;
}

}  // namespace windh2::sim
