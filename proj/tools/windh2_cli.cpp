// Command-line front end: simulate / evaluate / tune / sweep-bpoe / risk.
// All numeric output is printed through one fixed format so reruns with the
// same seed produce byte-identical files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "windh2/config.hpp"
#include "windh2/risk.hpp"

namespace {

using namespace windh2;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream openOut(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // fixed newlines everywhere
    if (!out) throw ValidationError("cannot open output file: " + path);
    return out;
}

uint64_t resolveSeed(const std::optional<uint64_t>& flag, const config::ExperimentConfig& cfg) {
    return flag ? *flag : cfg.forecastModel.seed;
}

policy::PolicySpec resolvePolicy(const std::optional<std::string>& flag,
                                 const config::ExperimentConfig& cfg) {
    if (flag) return config::parsePolicyToken(*flag, cfg.policy);
    return cfg.policy;
}

int runSimulate(const std::string& configPath, std::optional<uint64_t> seedFlag,
                std::optional<std::string> policyFlag, std::optional<std::string> thetaFlag,
                const std::string& outPath) {
    auto cfg = config::ExperimentConfig::load(configPath);
    auto instance = cfg.makeInstance();
    const uint64_t seed = resolveSeed(seedFlag, cfg);
    instance.forecastModel.seed = seed;

    policy::PolicySpec spec = resolvePolicy(policyFlag, cfg);
    if (thetaFlag) {
        const auto values = config::parseNumberList(*thetaFlag);
        spec.theta = values.size() == 1 ? policy::Theta::constant(values[0])
                                        : policy::Theta::lookupTable(values);
    }

    const auto truth = forecast::truthPath(instance.forecastModel, instance.exogenous,
                                           instance.params.episodeLength, 0);
    const auto trace = sim::runEpisode(spec, truth, instance, 0);

    auto out = openOut(outPath);
    out << "t,demand,wind,price,R_E,R_H,x_wd,x_rd,x_hd,x_wr,x_hr,x_h,x_wx,cost,loss\n";
    for (const auto& rec : trace.steps) {
        const auto& s = rec.state;
        const auto& d = rec.decision;
        out << s.t << ',' << fmt(s.demand) << ',' << fmt(s.wind) << ',' << fmt(s.hydrogenPrice)
            << ',' << fmt(s.batteryLevel) << ',' << fmt(s.hydrogenLevel) << ','
            << fmt(d.windToLoad) << ',' << fmt(d.batteryToLoad) << ',' << fmt(d.fuelCellToLoad)
            << ',' << fmt(d.windToBattery) << ',' << fmt(d.fuelCellToBattery) << ','
            << fmt(d.hydrogenPurchase) << ',' << fmt(d.windCurtailed) << ',' << fmt(rec.stageCost)
            << ',' << fmt(rec.unservedLoad) << '\n';
    }
    return 0;
}

int runEvaluate(const std::string& configPath, std::optional<uint64_t> seedFlag,
                std::optional<int> scenariosFlag, std::optional<std::string> policyFlag,
                std::optional<double> zetaFlag, bool timing, const std::string& outPath) {
    auto cfg = config::ExperimentConfig::load(configPath);
    auto instance = cfg.makeInstance();
    const uint64_t seed = resolveSeed(seedFlag, cfg);
    const int scenarios = scenariosFlag ? *scenariosFlag : cfg.evalScenarios;
    const double zeta = zetaFlag ? *zetaFlag : cfg.evalZeta;

    std::vector<policy::PolicySpec> policies;
    std::vector<std::string> labels;
    if (policyFlag) {
        policies.push_back(config::parsePolicyToken(*policyFlag, cfg.policy));
        labels.push_back(*policyFlag);
    } else {
        policies = cfg.evalPolicies;
        labels = cfg.evalPolicyLabels;
    }
    if (policies.empty())
        throw ValidationError("evaluate: no policies configured ([evaluate] policies or --policy)");

    auto out = openOut(outPath);
    out << "policy,mean,q80,q90,q95,bpoe_at_zeta,avg_decision_time_s\n";
    for (size_t i = 0; i < policies.size(); ++i) {
        const auto summary = sim::evaluate(policies[i], scenarios, seed, zeta, instance);
        out << labels[i] << ',' << fmt(summary.meanCost) << ',' << fmt(summary.q80) << ','
            << fmt(summary.q90) << ',' << fmt(summary.q95) << ',' << fmt(summary.bpoeLoss) << ',';
        // wall-clock is inherently non-reproducible; suppressed unless asked
        if (timing) out << fmt(summary.meanDecisionSeconds);
        else out << "na";
        out << '\n';
    }
    return 0;
}

int runTune(const std::string& configPath, std::optional<uint64_t> seedFlag,
            std::optional<std::string> thetaFlag, const std::string& outPath) {
    auto cfg = config::ExperimentConfig::load(configPath);
    const uint64_t seed = resolveSeed(seedFlag, cfg);

    tuning::TuningReport report;
    int thetaDim = 1;
    if (cfg.tuneMode == config::ExperimentConfig::TuneMode::Grid) {
        auto instance = cfg.makeInstance();
        std::vector<double> gridValues = thetaFlag ? config::parseNumberList(*thetaFlag)
                                                   : cfg.tuneGrid;
        std::vector<policy::Theta> grid;
        grid.reserve(gridValues.size());
        for (double v : gridValues) grid.push_back(policy::Theta::constant(v));
        report = tuning::tuneGrid(instance, cfg.tuneObjective, grid, cfg.tuneSamples, seed);
    } else {
        tuning::SgdConfig sgd;
        sgd.iterationCap = cfg.tuneIterations;
        sgd.batchSize = cfg.tuneBatch;
        sgd.seed = seed;
        const double etaBase = cfg.etaBase, etaExp = cfg.etaExp;
        const double psiBase = cfg.psiBase, psiExp = cfg.psiExp;
        sgd.eta = [etaBase, etaExp](int k) { return etaBase * std::pow(double(k), -etaExp); };
        sgd.psi = [psiBase, psiExp](int k) { return psiBase * std::pow(double(k), -psiExp); };
        std::vector<double> theta0 = thetaFlag ? config::parseNumberList(*thetaFlag)
                                               : cfg.tuneTheta0;
        sgd.initialTheta = (theta0.size() > 1 || cfg.tuneThetaTable)
                               ? policy::Theta::lookupTable(theta0)
                               : policy::Theta::constant(theta0[0]);
        thetaDim = sgd.initialTheta.dimension();

        tuning::SampleFunctional F;
        if (cfg.tuneQuadratic) {
            // built-in test objective with its minimum at theta = 1
            F = [](const policy::Theta& th, uint64_t) {
                double acc = 0.0;
                for (double v : th.values()) acc += (v - 1.0) * (v - 1.0);
                return acc;
            };
        } else {
            auto instance = cfg.makeInstance();
            const bool lossBased = cfg.tuneObjective.kind == tuning::ObjectiveKind::BPoELoss;
            F = [instance, lossBased](const policy::Theta& th, uint64_t omega) {
                return lossBased ? tuning::episodeLoss(instance, th, omega)
                                 : tuning::episodeCost(instance, th, omega);
            };
        }
        report = tuning::tuneSgd(F, cfg.tuneObjective, sgd);
    }

    thetaDim = report.thetaFinal.dimension();
    auto out = openOut(outPath);
    out << "iteration";
    for (int j = 1; j <= thetaDim; ++j) out << ",theta_" << j;
    out << ",objective,gradient_norm\n";
    for (const auto& e : report.trace) {
        out << e.iteration;
        for (double v : e.theta) out << ',' << fmt(v);
        out << ',' << fmt(e.objectiveEstimate) << ',' << fmt(e.gradientNorm) << '\n';
    }
    return 0;
}

int runSweepBpoe(const std::string& configPath, std::optional<uint64_t> seedFlag,
                 std::optional<int> scenariosFlag, std::optional<std::string> thetaFlag,
                 std::optional<std::string> zetaFlag, const std::string& outPath) {
    auto cfg = config::ExperimentConfig::load(configPath);
    auto instance = cfg.makeInstance();
    const uint64_t seed = resolveSeed(seedFlag, cfg);
    const int scenarios = scenariosFlag ? *scenariosFlag : cfg.sweepScenarios;

    const std::vector<double> thetas =
        thetaFlag ? config::parseNumberList(*thetaFlag) : cfg.sweepThetas;
    const std::vector<double> zetas =
        zetaFlag ? config::parseNumberList(*zetaFlag) : cfg.sweepZetas;
    if (thetas.empty()) throw ValidationError("sweep-bpoe: no theta values (--theta or [sweep])");
    if (zetas.empty()) throw ValidationError("sweep-bpoe: no zeta values (--zeta or [sweep])");

    auto out = openOut(outPath);
    out << "theta,zeta,bpoe\n";
    for (double theta : thetas) {
        policy::PolicySpec spec;
        spec.kind = policy::PolicySpec::Kind::DLA;
        spec.theta = policy::Theta::constant(theta);
        const auto summary = sim::evaluate(spec, scenarios, seed, zetas.front(), instance);
        for (double zeta : zetas)
            out << fmt(theta) << ',' << fmt(zeta) << ',' << fmt(risk::bpoe(summary.lossSample, zeta))
                << '\n';
    }
    return 0;
}

int runRisk(const std::string& samplePath, std::optional<double> alpha,
            std::optional<double> zeta, const std::optional<std::string>& outPath) {
    std::ifstream in(samplePath);
    if (!in) throw ValidationError("risk: cannot open sample file: " + samplePath);
    std::vector<double> sample;
    std::string line;
    size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty() || line == "value") continue;
        try {
            sample.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw ValidationError("risk: unparseable value at line " + std::to_string(lineNo) +
                                  " of " + samplePath);
        }
    }
    if (sample.empty()) throw ValidationError("risk: sample file is empty: " + samplePath);
    if (!alpha && !zeta) throw ValidationError("risk: provide --alpha and/or --zeta");

    std::vector<std::pair<std::string, double>> results;
    if (alpha) {
        results.emplace_back("var", risk::var(sample, *alpha));
        results.emplace_back("cvar", risk::cvar(sample, *alpha));
    }
    if (zeta) {
        results.emplace_back("poe", risk::poe(sample, *zeta));
        results.emplace_back("bpoe", risk::bpoe(sample, *zeta));
    }
    for (const auto& [name, value] : results) std::cout << name << ": " << fmt(value) << "\n";
    if (outPath) {
        auto out = openOut(*outPath);
        out << "measure,value\n";
        for (const auto& [name, value] : results) out << name << ',' << fmt(value) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"risk-aware dispatch for a wind + battery + hydrogen system"};
    app.require_subcommand(1);

    std::string configPath, outPath, samplePath;
    std::optional<uint64_t> seed;
    std::optional<int> scenarios;
    std::optional<std::string> policyToken, thetaList, zetaList;
    std::optional<double> alpha, zetaValue;
    bool timing = false;

    auto addCommon = [&](CLI::App* cmd, bool needsConfig = true) {
        if (needsConfig) cmd->add_option("--config", configPath, "experiment config")->required();
        cmd->add_option("--seed", seed, "seed override");
        cmd->add_option("--out", outPath, "output CSV path");
    };

    auto* simulate = app.add_subcommand("simulate", "run one closed-loop episode");
    addCommon(simulate);
    simulate->add_option("--policy", policyToken, "policy token, e.g. dla@0.2");
    simulate->add_option("--theta", thetaList, "theta override (comma list = look-up table)");

    auto* evaluate = app.add_subcommand("evaluate", "out-of-sample policy comparison");
    addCommon(evaluate);
    evaluate->add_option("--scenarios", scenarios, "out-of-sample episode count");
    evaluate->add_option("--policy", policyToken, "evaluate a single policy token");
    evaluate->add_option("--zeta", zetaValue, "loss threshold for the bpoe column");
    evaluate->add_flag("--timing", timing, "emit measured decision times (non-reproducible)");

    auto* tune = app.add_subcommand("tune", "offline theta tuning (grid or sgd)");
    addCommon(tune);
    tune->add_option("--theta", thetaList, "grid values / sgd initial point");

    auto* sweep = app.add_subcommand("sweep-bpoe", "bpoe of total loss over a theta sweep");
    addCommon(sweep);
    sweep->add_option("--scenarios", scenarios, "episodes per theta");
    sweep->add_option("--theta", thetaList, "theta values");
    sweep->add_option("--zeta", zetaList, "zeta values");

    auto* riskCmd = app.add_subcommand("risk", "risk measures of a sample file");
    riskCmd->add_option("--sample", samplePath, "file with one value per line")->required();
    riskCmd->add_option("--alpha", alpha, "var/cvar level");
    riskCmd->add_option("--zeta", zetaValue, "poe/bpoe threshold");
    riskCmd->add_option("--out", outPath, "optional CSV output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            if (outPath.empty()) throw windh2::ValidationError("simulate: --out is required");
            return runSimulate(configPath, seed, policyToken, thetaList, outPath);
        }
        if (evaluate->parsed()) {
            if (outPath.empty()) throw windh2::ValidationError("evaluate: --out is required");
            return runEvaluate(configPath, seed, scenarios, policyToken, zetaValue, timing,
                               outPath);
        }
        if (tune->parsed()) {
            if (outPath.empty()) throw windh2::ValidationError("tune: --out is required");
            return runTune(configPath, seed, thetaList, outPath);
        }
        if (sweep->parsed()) {
            if (outPath.empty()) throw windh2::ValidationError("sweep-bpoe: --out is required");
            return runSweepBpoe(configPath, seed, scenarios, thetaList, zetaList, outPath);
        }
        if (riskCmd->parsed()) {
            return runRisk(samplePath, alpha, zetaValue,
                           outPath.empty() ? std::nullopt : std::make_optional(outPath));
        }
    } catch (const windh2::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
