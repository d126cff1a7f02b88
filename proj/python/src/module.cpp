#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "windh2/config.hpp"
#include "windh2/domain.hpp"
#include "windh2/forecast.hpp"
#include "windh2/lp.hpp"
#include "windh2/policy.hpp"
#include "windh2/risk.hpp"
#include "windh2/sim.hpp"
#include "windh2/tuning.hpp"

namespace py = pybind11;
using namespace windh2;

namespace {

policy::Theta makeTheta(const std::vector<double>& values, bool table) {
    if (values.empty()) throw ValidationError("theta: empty value list");
    if (!table && values.size() == 1) return policy::Theta::constant(values[0]);
    return policy::Theta::lookupTable(values);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "risk-aware dispatch for a wind + battery + hydrogen system";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    // risk measures
    m.def("var", [](std::vector<double> s, double a) { return risk::var(s, a); },
          py::arg("sample"), py::arg("alpha"));
    m.def("cvar", [](std::vector<double> s, double a) { return risk::cvar(s, a); },
          py::arg("sample"), py::arg("alpha"));
    m.def("poe", [](std::vector<double> s, double z) { return risk::poe(s, z); },
          py::arg("sample"), py::arg("zeta"));
    m.def("bpoe", [](std::vector<double> s, double z) { return risk::bpoe(s, z); },
          py::arg("sample"), py::arg("zeta"));

    // domain
    py::class_<Decision>(m, "Decision")
        .def(py::init<>())
        .def_readwrite("wind_to_load", &Decision::windToLoad)
        .def_readwrite("battery_to_load", &Decision::batteryToLoad)
        .def_readwrite("fuel_cell_to_load", &Decision::fuelCellToLoad)
        .def_readwrite("wind_to_battery", &Decision::windToBattery)
        .def_readwrite("fuel_cell_to_battery", &Decision::fuelCellToBattery)
        .def_readwrite("hydrogen_purchase", &Decision::hydrogenPurchase)
        .def_readwrite("wind_curtailed", &Decision::windCurtailed);

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init<>())
        .def_readwrite("battery_capacity", &SystemParams::batteryCapacity)
        .def_readwrite("hydrogen_capacity", &SystemParams::hydrogenCapacity)
        .def_readwrite("charge_eff", &SystemParams::chargeEff)
        .def_readwrite("discharge_eff", &SystemParams::dischargeEff)
        .def_readwrite("fuel_cell_eff", &SystemParams::fuelCellEff)
        .def_readwrite("charge_limit", &SystemParams::chargeLimit)
        .def_readwrite("discharge_limit", &SystemParams::dischargeLimit)
        .def_readwrite("fuel_cell_limit", &SystemParams::fuelCellLimit)
        .def_readwrite("loss_penalty", &SystemParams::lossPenalty)
        .def_readwrite("curtail_penalty", &SystemParams::curtailPenalty)
        .def_readwrite("acquisition_schedule", &SystemParams::acquisitionSchedule)
        .def_readwrite("horizon", &SystemParams::horizon)
        .def_readwrite("episode_length", &SystemParams::episodeLength);

    py::class_<SystemState>(m, "SystemState")
        .def(py::init<>())
        .def_readwrite("t", &SystemState::t)
        .def_readwrite("demand", &SystemState::demand)
        .def_readwrite("wind", &SystemState::wind)
        .def_readwrite("hydrogen_price", &SystemState::hydrogenPrice)
        .def_readwrite("battery_level", &SystemState::batteryLevel)
        .def_readwrite("hydrogen_level", &SystemState::hydrogenLevel);

    m.def("stage_cost", &stageCost, py::arg("state"), py::arg("decision"), py::arg("params"));
    m.def("unserved_load", &unservedLoad, py::arg("state"), py::arg("decision"),
          py::arg("params"));
    m.def(
        "transition",
        [](const SystemState& s, const Decision& d, const SystemParams& p, double demand,
           double wind, double price) {
            return transition(s, d, p, Exogenous{demand, wind, price});
        },
        py::arg("state"), py::arg("decision"), py::arg("params"), py::arg("next_demand"),
        py::arg("next_wind"), py::arg("next_price"));

    // forecast
    py::class_<forecast::ForecastModel>(m, "ForecastModel")
        .def(py::init<>())
        .def_readwrite("relative_std", &forecast::ForecastModel::relativeStd)
        .def_readwrite("seed", &forecast::ForecastModel::seed)
        .def_readwrite("clamp_max", &forecast::ForecastModel::clampMax);

    py::class_<forecast::ExogenousSeries>(m, "ExogenousSeries")
        .def(py::init<>())
        .def_readwrite("demand", &forecast::ExogenousSeries::demand)
        .def_readwrite("hydrogen_price", &forecast::ExogenousSeries::hydrogenPrice)
        .def_readwrite("initial_wind", &forecast::ExogenousSeries::initialWind);

    py::class_<forecast::ScenarioFan>(m, "ScenarioFan")
        .def(py::init<>())
        .def_readwrite("point_forecast", &forecast::ScenarioFan::pointForecast)
        .def_readwrite("paths", &forecast::ScenarioFan::paths);

    m.def("synthesize_series", &forecast::synthesizeSeries, py::arg("peak_demand"), py::arg("T"),
          py::arg("seed"));
    m.def("load_series", &forecast::loadSeries, py::arg("path"));
    m.def(
        "load_instance",
        [](const std::string& path) {
            return config::ExperimentConfig::load(path).makeInstance();
        },
        py::arg("config_path"),
        "Build a runnable instance from an experiment config file");
    m.def(
        "truth_path",
        [](const forecast::ForecastModel& model, const forecast::ExogenousSeries& exo, int T,
           uint64_t index) { return forecast::truthPath(model, exo, T, index); },
        py::arg("model"), py::arg("exogenous"), py::arg("T"), py::arg("index") = 0);
    m.def(
        "sample_fan",
        [](double current, int horizon, int count, const forecast::ForecastModel& model,
           uint64_t offset) {
            return forecast::sampleFan(current, horizon, count, model, "fan", offset);
        },
        py::arg("current"), py::arg("horizon"), py::arg("count"), py::arg("model"),
        py::arg("stream_offset") = 0);

    // policies
    py::class_<policy::RiskConfig>(m, "RiskConfig")
        .def(py::init<>())
        .def_readwrite("alpha", &policy::RiskConfig::alpha)
        .def_readwrite("zeta", &policy::RiskConfig::zeta)
        .def_readwrite("big_m", &policy::RiskConfig::bigM)
        .def_readwrite("gamma_grid_size", &policy::RiskConfig::gammaGridSize)
        .def_readwrite("gamma_min", &policy::RiskConfig::gammaMin)
        .def_readwrite("gamma_max", &policy::RiskConfig::gammaMax)
        .def_readwrite("golden_iterations", &policy::RiskConfig::goldenIterations);

    py::class_<policy::PolicyDecision>(m, "PolicyDecision")
        .def_readonly("decision", &policy::PolicyDecision::decision)
        .def_readonly("lookahead_objective", &policy::PolicyDecision::lookaheadObjective)
        .def_readonly("scenario_costs", &policy::PolicyDecision::scenarioCosts)
        .def_readonly("scenario_losses", &policy::PolicyDecision::scenarioLosses);

    m.def(
        "decide_dla",
        [](const SystemState& s, const SystemParams& p, std::vector<double> demand,
           std::vector<double> price, std::vector<double> point, std::vector<double> theta,
           bool table) {
            return policy::decideDLA(s, p, demand, price, point, makeTheta(theta, table));
        },
        py::arg("state"), py::arg("params"), py::arg("demand"), py::arg("price"),
        py::arg("point_forecast"), py::arg("theta"), py::arg("table") = false);
    m.def(
        "decide_sla",
        [](const SystemState& s, const SystemParams& p, std::vector<double> demand,
           std::vector<double> price, const forecast::ScenarioFan& fan) {
            return policy::decideSLA(s, p, demand, price, fan);
        },
        py::arg("state"), py::arg("params"), py::arg("demand"), py::arg("price"), py::arg("fan"));
    m.def(
        "decide_scvar",
        [](const SystemState& s, const SystemParams& p, std::vector<double> demand,
           std::vector<double> price, const forecast::ScenarioFan& fan,
           const policy::RiskConfig& rc) {
            return policy::decideSCVaR(s, p, demand, price, fan, rc);
        },
        py::arg("state"), py::arg("params"), py::arg("demand"), py::arg("price"), py::arg("fan"),
        py::arg("risk"));
    m.def(
        "decide_sbpoe",
        [](const SystemState& s, const SystemParams& p, std::vector<double> demand,
           std::vector<double> price, const forecast::ScenarioFan& fan,
           const policy::RiskConfig& rc) {
            return policy::decideSBPoE(s, p, demand, price, fan, rc);
        },
        py::arg("state"), py::arg("params"), py::arg("demand"), py::arg("price"), py::arg("fan"),
        py::arg("risk"));

    // closed loop
    py::class_<sim::Instance>(m, "Instance")
        .def(py::init<>())
        .def_readwrite("params", &sim::Instance::params)
        .def_readwrite("exogenous", &sim::Instance::exogenous)
        .def_readwrite("forecast_model", &sim::Instance::forecastModel)
        .def_readwrite("initial_battery", &sim::Instance::initialBattery)
        .def_readwrite("initial_hydrogen", &sim::Instance::initialHydrogen);

    py::class_<policy::PolicySpec> spec(m, "PolicySpec");
    py::enum_<policy::PolicySpec::Kind>(spec, "Kind")
        .value("DLA", policy::PolicySpec::Kind::DLA)
        .value("SLA", policy::PolicySpec::Kind::SLA)
        .value("SCVAR", policy::PolicySpec::Kind::SCVAR)
        .value("SBPOE", policy::PolicySpec::Kind::SBPOE);
    spec.def(py::init<>())
        .def_readwrite("kind", &policy::PolicySpec::kind)
        .def_readwrite("risk", &policy::PolicySpec::risk)
        .def_readwrite("fan_size", &policy::PolicySpec::fanSize)
        .def_property(
            "theta",
            [](const policy::PolicySpec& s) {
                return std::vector<double>(s.theta.values().begin(), s.theta.values().end());
            },
            [](policy::PolicySpec& s, const std::vector<double>& v) {
                s.theta = makeTheta(v, v.size() > 1);
            })
        .def("name", &policy::PolicySpec::name);

    py::class_<sim::StepRecord>(m, "StepRecord")
        .def_readonly("state", &sim::StepRecord::state)
        .def_readonly("decision", &sim::StepRecord::decision)
        .def_readonly("stage_cost", &sim::StepRecord::stageCost)
        .def_readonly("unserved_load", &sim::StepRecord::unservedLoad)
        .def_readonly("curtailment", &sim::StepRecord::curtailment)
        .def_readonly("purchase", &sim::StepRecord::purchase);

    py::class_<sim::EpisodeTrace>(m, "EpisodeTrace")
        .def_readonly("steps", &sim::EpisodeTrace::steps)
        .def_readonly("total_cost", &sim::EpisodeTrace::totalCost)
        .def_readonly("total_loss", &sim::EpisodeTrace::totalLoss)
        .def_readonly("mean_decision_seconds", &sim::EpisodeTrace::meanDecisionSeconds);

    py::class_<sim::EvaluationSummary>(m, "EvaluationSummary")
        .def_readonly("mean_cost", &sim::EvaluationSummary::meanCost)
        .def_readonly("q80", &sim::EvaluationSummary::q80)
        .def_readonly("q90", &sim::EvaluationSummary::q90)
        .def_readonly("q95", &sim::EvaluationSummary::q95)
        .def_readonly("bpoe_loss", &sim::EvaluationSummary::bpoeLoss)
        .def_readonly("mean_decision_seconds", &sim::EvaluationSummary::meanDecisionSeconds)
        .def_readonly("cost_sample", &sim::EvaluationSummary::costSample)
        .def_readonly("loss_sample", &sim::EvaluationSummary::lossSample);

    m.def(
        "run_episode",
        [](const policy::PolicySpec& s, std::vector<double> truth, const sim::Instance& inst,
           uint64_t episodeIndex) { return sim::runEpisode(s, truth, inst, episodeIndex); },
        py::arg("spec"), py::arg("truth_path"), py::arg("instance"), py::arg("episode_index") = 0);
    m.def("evaluate", &sim::evaluate, py::arg("spec"), py::arg("scenario_count"), py::arg("seed"),
          py::arg("zeta"), py::arg("instance"));

    // tuning
    py::enum_<tuning::ObjectiveKind>(m, "ObjectiveKind")
        .value("EXPECTED_COST", tuning::ObjectiveKind::ExpectedCost)
        .value("CVAR_COST", tuning::ObjectiveKind::CVaRCost)
        .value("BPOE_LOSS", tuning::ObjectiveKind::BPoELoss);

    m.def(
        "episode_cost",
        [](const sim::Instance& inst, std::vector<double> theta, bool table, uint64_t omega) {
            return tuning::episodeCost(inst, makeTheta(theta, table), omega);
        },
        py::arg("instance"), py::arg("theta"), py::arg("table"), py::arg("omega"));
    m.def(
        "episode_loss",
        [](const sim::Instance& inst, std::vector<double> theta, bool table, uint64_t omega) {
            return tuning::episodeLoss(inst, makeTheta(theta, table), omega);
        },
        py::arg("instance"), py::arg("theta"), py::arg("table"), py::arg("omega"));
    m.def(
        "evaluate_objective",
        [](const sim::Instance& inst, tuning::ObjectiveKind kind, double alpha, double zeta,
           std::vector<double> theta, bool table, int sampleCount, uint64_t seed) {
            tuning::TuningObjective obj{kind, alpha, zeta};
            return tuning::evaluateObjective(inst, obj, makeTheta(theta, table), sampleCount,
                                             seed);
        },
        py::arg("instance"), py::arg("kind"), py::arg("alpha"), py::arg("zeta"), py::arg("theta"),
        py::arg("table"), py::arg("sample_count"), py::arg("seed"));
    m.def(
        "tune_grid",
        [](const sim::Instance& inst, tuning::ObjectiveKind kind, double alpha, double zeta,
           std::vector<double> grid, int sampleCount, uint64_t seed) {
            tuning::TuningObjective obj{kind, alpha, zeta};
            std::vector<policy::Theta> thetas;
            for (double v : grid) thetas.push_back(policy::Theta::constant(v));
            auto report = tuning::tuneGrid(inst, obj, thetas, sampleCount, seed);
            return report.thetaFinal.values()[0];
        },
        py::arg("instance"), py::arg("kind"), py::arg("alpha"), py::arg("zeta"), py::arg("grid"),
        py::arg("sample_count"), py::arg("seed"));
    m.def(
        "tune_sgd",
        [](const std::function<double(std::vector<double>, uint64_t)>& F,
           std::vector<double> theta0, bool table, int iterations, int batch, uint64_t seed) {
            tuning::SgdConfig cfg;
            cfg.iterationCap = iterations;
            cfg.batchSize = batch;
            cfg.seed = seed;
            cfg.initialTheta = makeTheta(theta0, table);
            tuning::TuningObjective obj;
            auto report = tuning::tuneSgd(
                [&F](const policy::Theta& th, uint64_t omega) {
                    return F(std::vector<double>(th.values().begin(), th.values().end()), omega);
                },
                obj, cfg);
            return std::vector<double>(report.thetaFinal.values().begin(),
                                       report.thetaFinal.values().end());
        },
        py::arg("objective"), py::arg("theta0"), py::arg("table"), py::arg("iterations"),
        py::arg("batch"), py::arg("seed"));
}
