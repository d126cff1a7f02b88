#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "windh2/errors.hpp"

namespace windh2::forecast {

/// Small self-contained PRNG (splitmix64 core, Box-Muller normals) so that
/// sampled paths are bit-identical across platforms and standard libraries.
/// Streams are derived, not advanced-and-shared: forStream mixes the base
/// seed with a purpose label and an index, which keeps parallel scenario
/// sampling reproducible regardless of evaluation order.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    static Rng forStream(uint64_t seed, std::string_view purpose, uint64_t index);

    uint64_t nextU64();
    double uniform();  // [0, 1)
    double normal();   // standard normal

private:
    uint64_t state_;
};

struct ExogenousSeries {
    std::vector<double> demand;         // length T
    std::vector<double> hydrogenPrice;  // length T
    double initialWind = 0.0;

    void validate() const;
    int length() const { return static_cast<int>(demand.size()); }
};

struct ForecastModel {
    double relativeStd = 0.0;             // rho_E
    uint64_t seed = 0;
    std::optional<double> clampMax;       // optional cap on generated wind

    void validate() const;
};

/// Two-stage scenario set over lead times 1..h: one shared point forecast
/// (the flat martingale extension) plus |Omega| sampled paths.
struct ScenarioFan {
    std::vector<double> pointForecast;
    std::vector<std::vector<double>> paths;  // paths[w][lead]

    int horizon() const { return static_cast<int>(pointForecast.size()); }
    int scenarioCount() const { return static_cast<int>(paths.size()); }
};

/// One martingale step: max(0, f + eps), eps ~ N(0, (rho*f)^2), optionally
/// clamped above.
double evolveForecast(double current, const ForecastModel& model, Rng& rng);

/// Samples the fan forward from the current value. Path w advances an
/// independent stream derived from (model.seed, purpose, streamOffset + w),
/// so callers can partition streams per decision step or episode.
ScenarioFan sampleFan(double current, int horizon, int count, const ForecastModel& model,
                      std::string_view purpose = "fan", uint64_t streamOffset = 0);

/// One realized trajectory of the same recursion, starting at (and
/// including) the series' initial wind value.
std::vector<double> truthPath(const ForecastModel& model, const ExogenousSeries& exogenous, int T,
                              uint64_t streamIndex = 0);

/// Reads `step,demand_mwh,h2_price_per_mwh` CSV with a header row.
ExogenousSeries loadSeries(const std::string& path);

/// Seasonal-sinusoid demand hitting the given peak exactly, with
/// piecewise-constant monthly hydrogen prices.
ExogenousSeries synthesizeSeries(double peakDemand, int T, uint64_t seed);

}  // namespace windh2::forecast
