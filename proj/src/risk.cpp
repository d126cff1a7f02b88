#include "windh2/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace windh2::risk {

namespace {

void requireSample(std::span<const double> sample) {
    if (sample.empty()) throw ValidationError("risk: sample must be nonempty");
    for (double v : sample)
        if (!std::isfinite(v)) throw ValidationError("risk: sample values must be finite");
}

std::vector<double> sorted(std::span<const double> sample) {
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace

double var(std::span<const double> sample, double alpha) {
    requireSample(sample);
    if (alpha < 0.0 || alpha >= 1.0) {
        if (alpha != 0.0) throw ValidationError("risk: alpha must lie in [0,1)");
    }
    const auto s = sorted(sample);
    const size_t n = s.size();
    if (alpha <= 0.0) return s.front();
    // ceil with a guard against ratios like 0.5*4 landing just above 2
    size_t k = static_cast<size_t>(std::ceil(alpha * double(n) - 1e-9));
    k = std::clamp<size_t>(k, 1, n);
    return s[k - 1];
}

double cvar(std::span<const double> sample, double alpha) {
    requireSample(sample);
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ValidationError("risk: alpha must lie in [0,1)");
    const auto s = sorted(sample);
    const size_t n = s.size();
    const double w = 1.0 / double(n);
    size_t k = static_cast<size_t>(std::ceil(alpha * double(n) - 1e-9));
    k = std::min(k, n);
    // tail mass: fractional piece of atom k plus full atoms above it
    double acc = 0.0;
    if (k >= 1) acc += (double(k) * w - alpha) * s[k - 1];
    for (size_t i = k; i < n; ++i) acc += w * s[i];
    return acc / (1.0 - alpha);
}

double poe(std::span<const double> sample, double zeta) {
    requireSample(sample);
    size_t count = 0;
    for (double v : sample)
        if (v > zeta) ++count;
    return double(count) / double(sample.size());
}

double bpoe(std::span<const double> sample, double zeta) {
    requireSample(sample);
    const size_t n = sample.size();
    const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / double(n);
    const double maxv = *std::max_element(sample.begin(), sample.end());
    if (zeta > maxv) return 0.0;
    if (zeta <= mean) return 1.0;

    auto objective = [&](double gamma) {
        double acc = 0.0;
        for (double v : sample) acc += std::max(gamma * (v - zeta) + 1.0, 0.0);
        return acc / double(n);
    };
    // piecewise-linear convex in gamma; the minimum sits on a breakpoint
    double best = 1.0;  // gamma = 0
    for (double v : sample) {
        if (v < zeta) best = std::min(best, objective(1.0 / (zeta - v)));
    }
    return best;
}

CvarFragment cvarEpigraphRows(lp::LpModel& model, std::span<const lp::AffineExpr> costs,
                              double alpha, double zLower) {
    if (costs.empty()) throw ValidationError("risk: cvar fragment needs at least one scenario");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ValidationError("risk: alpha must lie in [0,1)");
    const size_t count = costs.size();

    CvarFragment frag;
    frag.z = model.addVariable(zLower, lp::kInf, "cvar_z");
    model.addObjectiveTerm(frag.z, 1.0);
    const double tailWeight = 1.0 / ((1.0 - alpha) * double(count));
    frag.tail.reserve(count);
    for (size_t w = 0; w < count; ++w) {
        const int y = model.addVariable(0.0, lp::kInf, "cvar_y" + std::to_string(w));
        model.addObjectiveTerm(y, tailWeight);
        frag.tail.push_back(y);
        std::vector<lp::Term> terms = costs[w].terms;
        terms.emplace_back(frag.z, -1.0);
        terms.emplace_back(y, -1.0);
        model.addConstraint(std::move(terms), lp::Sense::LessEq, -costs[w].constant);
    }
    return frag;
}

BpoeFragment bpoeEpigraphRows(lp::LpModel& model, std::span<const lp::AffineExpr> losses,
                              double zeta, double gammaFixed, double objectiveWeight) {
    if (losses.empty()) throw ValidationError("risk: bpoe fragment needs at least one scenario");
    if (!std::isfinite(zeta)) throw ValidationError("risk: zeta must be finite");
    if (!(gammaFixed >= 0.0)) throw ValidationError("risk: gamma must be >= 0");
    const size_t count = losses.size();

    BpoeFragment frag;
    frag.eta.reserve(count);
    for (size_t w = 0; w < count; ++w) {
        const int eta = model.addVariable(0.0, lp::kInf, "bpoe_eta" + std::to_string(w));
        model.addObjectiveTerm(eta, objectiveWeight / double(count));
        frag.eta.push_back(eta);
        // gamma L_w - gamma zeta + 1 - eta_w <= 0
        std::vector<lp::Term> terms;
        terms.reserve(losses[w].terms.size() + 1);
        for (const auto& [idx, c] : losses[w].terms) terms.emplace_back(idx, gammaFixed * c);
        terms.emplace_back(eta, -1.0);
        model.addConstraint(std::move(terms), lp::Sense::LessEq,
                            gammaFixed * zeta - gammaFixed * losses[w].constant - 1.0);
    }
    return frag;
}

BpoeFragment bpoeEpigraphRows(lp::LpModel& model, std::span<const lp::AffineExpr> losses,
                              double zeta, GammaVariable) {
    if (losses.empty()) throw ValidationError("risk: bpoe fragment needs at least one scenario");
    if (!std::isfinite(zeta)) throw ValidationError("risk: zeta must be finite");
    for (const auto& l : losses)
        if (!l.terms.empty())
            throw ValidationError(
                "risk: variable gamma requires constant losses (the product would be bilinear)");
    const size_t count = losses.size();

    BpoeFragment frag;
    frag.gamma = model.addVariable(0.0, lp::kInf, "bpoe_gamma");
    frag.eta.reserve(count);
    for (size_t w = 0; w < count; ++w) {
        const int eta = model.addVariable(0.0, lp::kInf, "bpoe_eta" + std::to_string(w));
        model.addObjectiveTerm(eta, 1.0 / double(count));
        frag.eta.push_back(eta);
        // gamma (L_w - zeta) + 1 - eta_w <= 0 with constant L_w
        model.addConstraint({{frag.gamma, losses[w].constant - zeta}, {eta, -1.0}},
                            lp::Sense::LessEq, -1.0);
    }
    return frag;
}

}  // namespace windh2::risk
