#include "windh2/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace windh2::forecast {

namespace {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t fnv1a(std::string_view text) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

Rng Rng::forStream(uint64_t seed, std::string_view purpose, uint64_t index) {
    uint64_t s = seed;
    uint64_t a = splitmix64(s);
    s ^= fnv1a(purpose);
    uint64_t b = splitmix64(s);
    s ^= index * 0x9e3779b97f4a7c15ULL + 0x517cc1b727220a95ULL;
    uint64_t c = splitmix64(s);
    return Rng(a ^ (b * 0x2545f4914f6cdd1dULL) ^ c);
}

uint64_t Rng::nextU64() { return splitmix64(state_); }

double Rng::uniform() {
    // 53 random bits into [0, 1)
    return double(nextU64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    // Box-Muller, cosine branch only: two uniforms per draw, no hidden state
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void ExogenousSeries::validate() const {
    if (demand.empty()) throw ValidationError("series: empty demand series");
    if (demand.size() != hydrogenPrice.size())
        throw ValidationError("series: demand and price lengths differ");
    for (double v : demand)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError("series: demand values must be finite and >= 0");
    for (double v : hydrogenPrice)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError("series: price values must be finite and >= 0");
    if (!(initialWind >= 0.0)) throw ValidationError("series: initial wind must be >= 0");
}

void ForecastModel::validate() const {
    if (!(relativeStd >= 0.0)) throw ValidationError("forecast: relative std must be >= 0");
    if (clampMax && !(*clampMax >= 0.0))
        throw ValidationError("forecast: clamp level must be >= 0");
}

double evolveForecast(double current, const ForecastModel& model, Rng& rng) {
    const double sigma = model.relativeStd * current;
    double next = current + sigma * rng.normal();
    if (next < 0.0) next = 0.0;
    if (model.clampMax && next > *model.clampMax) next = *model.clampMax;
    return next;
}

ScenarioFan sampleFan(double current, int horizon, int count, const ForecastModel& model,
                      std::string_view purpose, uint64_t streamOffset) {
    if (horizon < 0) throw ValidationError("forecast: fan horizon must be >= 0");
    if (count < 1) throw ValidationError("forecast: fan needs at least one scenario");
    ScenarioFan fan;
    fan.pointForecast.assign(static_cast<size_t>(horizon), current);
    fan.paths.reserve(static_cast<size_t>(count));
    for (int w = 0; w < count; ++w) {
        Rng rng = Rng::forStream(model.seed, purpose, streamOffset + uint64_t(w));
        std::vector<double> path;
        path.reserve(static_cast<size_t>(horizon));
        double f = current;
        for (int lead = 0; lead < horizon; ++lead) {
            f = evolveForecast(f, model, rng);
            path.push_back(f);
        }
        fan.paths.push_back(std::move(path));
    }
    return fan;
}

std::vector<double> truthPath(const ForecastModel& model, const ExogenousSeries& exogenous, int T,
                              uint64_t streamIndex) {
    if (T < 1) throw ValidationError("forecast: truth path needs T >= 1");
    Rng rng = Rng::forStream(model.seed, "truth", streamIndex);
    std::vector<double> path;
    path.reserve(static_cast<size_t>(T));
    double f = exogenous.initialWind;
    path.push_back(f);
    for (int t = 1; t < T; ++t) {
        f = evolveForecast(f, model, rng);
        path.push_back(f);
    }
    return path;
}

ExogenousSeries loadSeries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("series: cannot open file: " + path);
    ExogenousSeries out;
    std::string line;
    size_t lineNo = 0;
    if (!std::getline(in, line)) throw ValidationError("series: empty file: " + path);
    ++lineNo;
    // header is mandatory; accept it verbatim or with surrounding whitespace
    {
        std::string h = line;
        h.erase(std::remove_if(h.begin(), h.end(), [](char c) { return std::isspace(c); }),
                h.end());
        if (h != "step,demand_mwh,h2_price_per_mwh")
            throw ValidationError("series: bad header at line 1 of " + path +
                                  " (expected step,demand_mwh,h2_price_per_mwh)");
    }
    int expectedStep = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string stepStr, demandStr, priceStr;
        if (!std::getline(ss, stepStr, ',') || !std::getline(ss, demandStr, ',') ||
            !std::getline(ss, priceStr))
            throw ValidationError("series: malformed row at line " + std::to_string(lineNo) +
                                  " of " + path);
        try {
            size_t pos = 0;
            const int step = std::stoi(stepStr, &pos);
            const double demand = std::stod(demandStr);
            const double price = std::stod(priceStr);
            if (step != expectedStep)
                throw ValidationError("series: unexpected step index at line " +
                                      std::to_string(lineNo) + " of " + path);
            if (demand < 0.0)
                throw ValidationError("series: negative demand at line " +
                                      std::to_string(lineNo) + " of " + path);
            if (price < 0.0)
                throw ValidationError("series: negative price at line " + std::to_string(lineNo) +
                                      " of " + path);
            out.demand.push_back(demand);
            out.hydrogenPrice.push_back(price);
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception&) {
            throw ValidationError("series: unparseable row at line " + std::to_string(lineNo) +
                                  " of " + path);
        }
        ++expectedStep;
    }
    if (out.demand.empty()) throw ValidationError("series: no data rows in " + path);
    return out;
}

ExogenousSeries synthesizeSeries(double peakDemand, int T, uint64_t seed) {
    if (!(peakDemand > 0.0)) throw ValidationError("series: peak demand must be > 0");
    if (T < 1) throw ValidationError("series: T must be >= 1");

    // seasonal base plus a weekly ripple; normalized so the maximum equals
    // the requested peak exactly
    std::vector<double> base(static_cast<size_t>(T));
    uint64_t s = seed ^ 0xabcdef1234567890ULL;
    const double phase = double(splitmix64(s) >> 40) * 0x1.0p-24 * 2.0 * std::numbers::pi;
    double maxBase = 0.0;
    for (int t = 0; t < T; ++t) {
        const double yearly = std::sin(2.0 * std::numbers::pi * double(t) / 365.0 + phase);
        const double weekly = std::sin(2.0 * std::numbers::pi * double(t) / 7.0);
        const double b = 0.70 + 0.25 * yearly + 0.05 * weekly;
        base[static_cast<size_t>(t)] = b;
        maxBase = std::max(maxBase, b);
    }
    ExogenousSeries out;
    out.demand.resize(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t)
        out.demand[static_cast<size_t>(t)] = peakDemand * (base[static_cast<size_t>(t)] / maxBase);

    // piecewise-constant monthly prices around 3% of the loss-penalty scale
    out.hydrogenPrice.resize(static_cast<size_t>(T));
    const int monthLen = 30;
    double level = 0.0;
    for (int t = 0; t < T; ++t) {
        if (t % monthLen == 0) level = 20.0 + 40.0 * (double(splitmix64(s) >> 11) * 0x1.0p-53);
        out.hydrogenPrice[static_cast<size_t>(t)] = level;
    }
    out.initialWind = 0.8 * peakDemand;
    return out;
}

}  // namespace windh2::forecast
