#pragma once

#include <span>
#include <vector>

#include "windh2/lp.hpp"

namespace windh2::risk {

/// Smallest sample value z with empirical P(X <= z) >= alpha; the
/// ceil(alpha*n)-th order statistic, alpha = 0 returning the minimum.
double var(std::span<const double> sample, double alpha);

/// Mean of the worst (1-alpha) tail with fractional atom splitting; the
/// optimal value of min_z { z + mean[(X-z)+]/(1-alpha) }. Requires alpha < 1.
double cvar(std::span<const double> sample, double alpha);

/// Fraction of values strictly greater than the threshold.
double poe(std::span<const double> sample, double zeta);

/// Buffered probability of exceedance: min over gamma >= 0 of
/// mean[(gamma*(X - zeta) + 1)+], evaluated exactly on the breakpoint set.
/// 1 for zeta <= mean, 0 for zeta > max, the mass at the maximum for
/// zeta == max.
double bpoe(std::span<const double> sample, double zeta);

/// Indices of the auxiliary variables a fragment added to a model.
struct CvarFragment {
    int z = -1;                 // free threshold variable
    std::vector<int> tail;      // y_w >= 0, one per scenario
};

/// Appends the epigraph representation of CVaR over per-scenario cost
/// expressions: rows  cost_w - z - y_w <= 0  and objective term
/// z + sum y_w / ((1-alpha) |Omega|).
///
/// zLower: lower bound for z. Callers whose costs are provably nonnegative
/// may pass 0 to keep the model's slack basis feasible; the default leaves
/// z free.
CvarFragment cvarEpigraphRows(lp::LpModel& model, std::span<const lp::AffineExpr> costs,
                              double alpha, double zLower = -lp::kInf);

struct BpoeFragment {
    int gamma = -1;             // only set when gamma is a decision variable
    std::vector<int> eta;       // eta_w >= 0, one per scenario
};

/// Marker type selecting whether the bpoe scaling factor is a fixed
/// constant (rows stay linear in arbitrary loss expressions) or a decision
/// variable (losses must be constants, otherwise the row would be bilinear).
struct GammaVariable {};

/// objectiveWeight scales the sum eta_w / |Omega| objective term; the
/// default 1 makes the fragment optimum equal bpoe of the induced sample,
/// policies pass their reliability weight M.
BpoeFragment bpoeEpigraphRows(lp::LpModel& model, std::span<const lp::AffineExpr> losses,
                              double zeta, double gammaFixed, double objectiveWeight = 1.0);
BpoeFragment bpoeEpigraphRows(lp::LpModel& model, std::span<const lp::AffineExpr> losses,
                              double zeta, GammaVariable);

}  // namespace windh2::risk
