#include "windh2/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace windh2::config {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap parseIni(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open file: " + path);
    SectionMap out;
    std::string line, section;
    size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config: malformed section at line " +
                                      std::to_string(lineNo) + " of " + path);
            section = trim(line.substr(1, line.size() - 2));
            out[section];
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos || section.empty())
            throw ValidationError("config: expected key = value at line " +
                                  std::to_string(lineNo) + " of " + path);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError("config: empty key at line " + std::to_string(lineNo) + " of " +
                                  path);
        out[section][key] = value;
    }
    return out;
}

double toDouble(const std::string& v, const std::string& what) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ValidationError("config: cannot parse number for " + what + ": '" + v + "'");
    }
}

int toInt(const std::string& v, const std::string& what) {
    try {
        size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ValidationError("config: cannot parse integer for " + what + ": '" + v + "'");
    }
}

uint64_t toU64(const std::string& v, const std::string& what) {
    try {
        size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return static_cast<uint64_t>(x);
    } catch (const std::exception&) {
        throw ValidationError("config: cannot parse seed for " + what + ": '" + v + "'");
    }
}

// consume-and-validate helper: keys left over in a section are typos
class SectionReader {
public:
    SectionReader(SectionMap& map, const std::string& name) : name_(name) {
        auto it = map.find(name);
        if (it != map.end()) entries_ = &it->second;
    }

    std::optional<std::string> take(const std::string& key) {
        if (!entries_) return std::nullopt;
        auto it = entries_->find(key);
        if (it == entries_->end()) return std::nullopt;
        std::string v = it->second;
        entries_->erase(it);
        return v;
    }

    void finish() const {
        if (entries_ && !entries_->empty())
            throw ValidationError("config: unknown key '" + entries_->begin()->first +
                                  "' in section [" + name_ + "]");
    }

private:
    std::string name_;
    std::map<std::string, std::string>* entries_ = nullptr;
};

}  // namespace

std::vector<double> parseNumberList(const std::string& text, char sep) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(toDouble(item, "list entry"));
    }
    if (out.empty()) throw ValidationError("config: empty number list: '" + text + "'");
    return out;
}

policy::PolicySpec parsePolicyToken(const std::string& token,
                                    const policy::PolicySpec& defaults) {
    policy::PolicySpec spec = defaults;
    std::string name = trim(token);
    std::string param;
    const size_t at = name.find('@');
    if (at != std::string::npos) {
        param = trim(name.substr(at + 1));
        name = trim(name.substr(0, at));
    }
    std::transform(name.begin(), name.end(), name.begin(), ::tolower);
    if (name == "dla") {
        spec.kind = policy::PolicySpec::Kind::DLA;
        if (!param.empty()) {
            const auto values = parseNumberList(param, '|');
            spec.theta = values.size() == 1 ? policy::Theta::constant(values[0])
                                            : policy::Theta::lookupTable(values);
        }
    } else if (name == "sla") {
        spec.kind = policy::PolicySpec::Kind::SLA;
    } else if (name == "scvar") {
        spec.kind = policy::PolicySpec::Kind::SCVAR;
        if (!param.empty()) spec.risk.alpha = toDouble(param, "scvar alpha");
    } else if (name == "sbpoe") {
        spec.kind = policy::PolicySpec::Kind::SBPOE;
        if (!param.empty()) spec.risk.zeta = toDouble(param, "sbpoe zeta");
    } else {
        throw ValidationError("config: unknown policy '" + token +
                              "' (expected dla|sla|scvar|sbpoe)");
    }
    return spec;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    SectionMap map = parseIni(path);
    ExperimentConfig cfg;

    {
        SectionReader s(map, "system");
        auto need = [&](const char* key) {
            auto v = s.take(key);
            if (!v) throw ValidationError(std::string("config: [system] requires ") + key);
            return *v;
        };
        cfg.params.batteryCapacity = toDouble(need("battery_capacity"), "battery_capacity");
        cfg.params.hydrogenCapacity = toDouble(need("hydrogen_capacity"), "hydrogen_capacity");
        cfg.params.chargeEff = toDouble(need("charge_eff"), "charge_eff");
        cfg.params.dischargeEff = toDouble(need("discharge_eff"), "discharge_eff");
        cfg.params.fuelCellEff = toDouble(need("fuel_cell_eff"), "fuel_cell_eff");
        cfg.params.chargeLimit = toDouble(need("charge_limit"), "charge_limit");
        cfg.params.dischargeLimit = toDouble(need("discharge_limit"), "discharge_limit");
        cfg.params.fuelCellLimit = toDouble(need("fuel_cell_limit"), "fuel_cell_limit");
        cfg.params.lossPenalty = toDouble(need("loss_penalty"), "loss_penalty");
        cfg.params.curtailPenalty = toDouble(need("curtail_penalty"), "curtail_penalty");
        cfg.params.episodeLength = toInt(need("episode_length"), "episode_length");
        cfg.params.horizon = toInt(need("horizon"), "horizon");
        if (auto v = s.take("acquisition_period"))
            cfg.acquisitionPeriod = toInt(*v, "acquisition_period");
        if (auto v = s.take("acquisition_start"))
            cfg.acquisitionStart = toInt(*v, "acquisition_start");
        if (auto v = s.take("battery_initial"))
            cfg.batteryInitial = toDouble(*v, "battery_initial");
        if (auto v = s.take("hydrogen_initial"))
            cfg.hydrogenInitial = toDouble(*v, "hydrogen_initial");
        s.finish();
    }
    {
        SectionReader s(map, "forecast");
        if (auto v = s.take("relative_std"))
            cfg.forecastModel.relativeStd = toDouble(*v, "relative_std");
        if (auto v = s.take("seed")) cfg.forecastModel.seed = toU64(*v, "forecast seed");
        if (auto v = s.take("clamp_max")) {
            const double c = toDouble(*v, "clamp_max");
            if (c > 0.0) cfg.forecastModel.clampMax = c;
        }
        if (auto v = s.take("initial_wind")) cfg.initialWind = toDouble(*v, "initial_wind");
        s.finish();
    }
    {
        SectionReader s(map, "data");
        if (auto v = s.take("csv")) cfg.csvPath = *v;
        if (auto v = s.take("synthetic_peak"))
            cfg.syntheticPeak = toDouble(*v, "synthetic_peak");
        if (cfg.csvPath && cfg.syntheticPeak)
            throw ValidationError("config: [data] must set either csv or synthetic_peak, not both");
        if (!cfg.csvPath && !cfg.syntheticPeak)
            throw ValidationError("config: [data] requires csv or synthetic_peak");
        s.finish();
    }
    {
        SectionReader s(map, "policy");
        if (auto v = s.take("fan")) cfg.policy.fanSize = toInt(*v, "fan");
        if (auto v = s.take("alpha")) cfg.policy.risk.alpha = toDouble(*v, "alpha");
        if (auto v = s.take("zeta")) cfg.policy.risk.zeta = toDouble(*v, "zeta");
        if (auto v = s.take("big_m")) cfg.policy.risk.bigM = toDouble(*v, "big_m");
        if (auto v = s.take("gamma_grid")) cfg.policy.risk.gammaGridSize = toInt(*v, "gamma_grid");
        if (auto v = s.take("gamma_min")) cfg.policy.risk.gammaMin = toDouble(*v, "gamma_min");
        if (auto v = s.take("gamma_max")) cfg.policy.risk.gammaMax = toDouble(*v, "gamma_max");
        if (auto v = s.take("golden_iters"))
            cfg.policy.risk.goldenIterations = toInt(*v, "golden_iters");
        if (auto v = s.take("theta")) {
            const auto values = parseNumberList(*v);
            cfg.policy.theta = values.size() == 1 ? policy::Theta::constant(values[0])
                                                  : policy::Theta::lookupTable(values);
        }
        if (auto v = s.take("name")) cfg.policy = parsePolicyToken(*v, cfg.policy);
        s.finish();
    }
    {
        SectionReader s(map, "evaluate");
        if (auto v = s.take("scenarios")) cfg.evalScenarios = toInt(*v, "evaluate scenarios");
        if (auto v = s.take("zeta")) cfg.evalZeta = toDouble(*v, "evaluate zeta");
        if (auto v = s.take("policies")) {
            std::istringstream ss(*v);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                tok = trim(tok);
                if (tok.empty()) continue;
                cfg.evalPolicies.push_back(parsePolicyToken(tok, cfg.policy));
                cfg.evalPolicyLabels.push_back(tok);
            }
        }
        s.finish();
    }
    {
        SectionReader s(map, "tune");
        if (auto v = s.take("mode")) {
            std::string m = *v;
            std::transform(m.begin(), m.end(), m.begin(), ::tolower);
            if (m == "grid") cfg.tuneMode = TuneMode::Grid;
            else if (m == "sgd") cfg.tuneMode = TuneMode::Sgd;
            else throw ValidationError("config: tune mode must be grid or sgd");
        }
        if (auto v = s.take("objective")) {
            std::string o = *v;
            std::transform(o.begin(), o.end(), o.begin(), ::tolower);
            if (o == "expected_cost") cfg.tuneObjective.kind = tuning::ObjectiveKind::ExpectedCost;
            else if (o == "cvar") cfg.tuneObjective.kind = tuning::ObjectiveKind::CVaRCost;
            else if (o == "bpoe") cfg.tuneObjective.kind = tuning::ObjectiveKind::BPoELoss;
            else if (o == "quadratic") cfg.tuneQuadratic = true;
            else
                throw ValidationError(
                    "config: tune objective must be expected_cost, cvar, bpoe or quadratic");
        }
        if (auto v = s.take("alpha")) cfg.tuneObjective.alpha = toDouble(*v, "tune alpha");
        if (auto v = s.take("zeta")) cfg.tuneObjective.zeta = toDouble(*v, "tune zeta");
        if (auto v = s.take("grid")) cfg.tuneGrid = parseNumberList(*v);
        if (auto v = s.take("samples")) cfg.tuneSamples = toInt(*v, "tune samples");
        if (auto v = s.take("iterations")) cfg.tuneIterations = toInt(*v, "tune iterations");
        if (auto v = s.take("batch")) cfg.tuneBatch = toInt(*v, "tune batch");
        if (auto v = s.take("theta0")) {
            cfg.tuneTheta0 = parseNumberList(*v);
            cfg.tuneThetaTable = cfg.tuneTheta0.size() > 1;
        }
        if (auto v = s.take("theta0_table")) cfg.tuneThetaTable = toInt(*v, "theta0_table") != 0;
        if (auto v = s.take("eta_base")) cfg.etaBase = toDouble(*v, "eta_base");
        if (auto v = s.take("eta_exp")) cfg.etaExp = toDouble(*v, "eta_exp");
        if (auto v = s.take("psi_base")) cfg.psiBase = toDouble(*v, "psi_base");
        if (auto v = s.take("psi_exp")) cfg.psiExp = toDouble(*v, "psi_exp");
        s.finish();
    }
    {
        SectionReader s(map, "sweep");
        if (auto v = s.take("thetas")) cfg.sweepThetas = parseNumberList(*v);
        if (auto v = s.take("zetas")) cfg.sweepZetas = parseNumberList(*v);
        if (auto v = s.take("scenarios")) cfg.sweepScenarios = toInt(*v, "sweep scenarios");
        s.finish();
    }
    for (const auto& [name, entries] : map) {
        static const char* known[] = {"system", "forecast", "data",  "policy",
                                      "evaluate", "tune",   "sweep"};
        if (std::find(std::begin(known), std::end(known), name) == std::end(known))
            throw ValidationError("config: unknown section [" + name + "]");
    }

    // cross-field checks
    if (cfg.acquisitionPeriod < 1)
        throw ValidationError("config: acquisition_period must be >= 1");
    if (cfg.acquisitionStart < 0)
        throw ValidationError("config: acquisition_start must be >= 0");
    if (cfg.params.horizon > cfg.params.episodeLength)
        throw ValidationError("config: horizon must not exceed episode_length");
    auto checkTable = [&cfg](const policy::Theta& theta, const char* where) {
        if (!theta.isConstant() && theta.dimension() != cfg.params.horizon)
            throw ValidationError(std::string("config: ") + where + " look-up table needs one "
                                  "entry per look-ahead step (horizon is " +
                                  std::to_string(cfg.params.horizon) + ", table has " +
                                  std::to_string(theta.dimension()) + ")");
    };
    checkTable(cfg.policy.theta, "[policy] theta");
    for (const auto& spec : cfg.evalPolicies) checkTable(spec.theta, "[evaluate] policy");
    if (!cfg.tuneQuadratic && cfg.tuneTheta0.size() > 1 &&
        static_cast<int>(cfg.tuneTheta0.size()) != cfg.params.horizon)
        throw ValidationError("config: [tune] theta0 look-up table needs one entry per "
                              "look-ahead step");
    return cfg;
}

sim::Instance ExperimentConfig::makeInstance() const {
    sim::Instance inst;
    inst.params = params;
    const int T = params.episodeLength;
    inst.params.acquisitionSchedule.assign(static_cast<size_t>(T), 0);
    for (int t = acquisitionStart; t < T; t += acquisitionPeriod)
        inst.params.acquisitionSchedule[static_cast<size_t>(t)] = 1;

    if (csvPath) {
        inst.exogenous = forecast::loadSeries(*csvPath);
        if (!initialWind)
            throw ValidationError(
                "config: [forecast] initial_wind is required with CSV data (the file carries no "
                "wind column)");
    } else {
        inst.exogenous = forecast::synthesizeSeries(*syntheticPeak, T, forecastModel.seed);
    }
    if (initialWind) inst.exogenous.initialWind = *initialWind;
    if (inst.exogenous.length() != T)
        throw ValidationError("config: data series length (" +
                              std::to_string(inst.exogenous.length()) +
                              ") must equal episode_length (" + std::to_string(T) + ")");
    inst.forecastModel = forecastModel;
    inst.initialBattery = batteryInitial;
    inst.initialHydrogen = hydrogenInitial;
    inst.validate();
    return inst;
}

}  // namespace windh2::config
