/// @file equilibrium.hpp
/// Fixed points of the model by relaxation: simulate with constant
/// parameters until the derivatives die out.

#pragma once

#include <algorithm>
#include <cmath>

#include "pbm/integrate.hpp"
#include "pbm/model.hpp"

namespace pbm {

struct FixedPointResult {
    StockState state;
    double max_residual = 0.0;     ///< max |derivative component| at the final state
    double horizon_used = 0.0;     ///< months simulated
    bool converged = false;
};

constexpr double kFixedPointTol = 1e-8;
constexpr double kFixedPointMaxHorizon = 5000.0;

namespace detail {

inline double max_residual(const StockState& state, const Parameters& params) {
    Overrides ov;
    AuxiliaryValues a = evaluate_auxiliaries(state, params, ov);
    StateDerivative d = derivatives(state, params, ov);
    return std::max({std::abs(d.dB), std::abs(d.dM), std::abs(d.dihat_P),
                     std::abs(d.dihat_B), std::abs(a.B_star - state.B),
                     std::abs(a.D_M - state.M)});
}

}  // namespace detail

/// Relaxes the dynamics from `guess` under constant parameters until every
/// residual (derivatives plus the recruitment and demand gaps) is below tol
/// or the horizon runs out. The returned point is by construction an
/// attractor of the simulated dynamics, not just a root.
inline FixedPointResult find_fixed_point(const Parameters& params, StockState guess,
                                         double tol = kFixedPointTol,
                                         double max_horizon = kFixedPointMaxHorizon,
                                         const IntegrationConfig& config = {}) {
    Overrides ov;
    FixedPointResult result;
    bool clamped = false;
    guess.P = params.N - guess.B - guess.M;  // conservation before the first step
    StockState state = detail::enforce_bounds(guess, params, clamped);
    state.t = 0.0;
    double t = 0.0;
    while (true) {
        result.max_residual = detail::max_residual(state, params);
        if (result.max_residual < tol) {
            result.converged = true;
            break;
        }
        if (t >= max_horizon) break;
        state = step(state, params, ov, config.dt, config.method);
        t += config.dt;
    }
    state.t = 0.0;
    result.state = state;
    result.horizon_used = t;
    return result;
}

struct ResidualReport {
    double dB = 0.0;
    double dM = 0.0;
    double dihat_P = 0.0;
    double dihat_B = 0.0;
    double recruitment_gap = 0.0;  ///< |B* - B|
    double demand_gap = 0.0;       ///< |D_M - M|
    bool pass = false;
};

/// Evaluates how far a state is from being a fixed point of the model.
inline ResidualReport verify_fixed_point(const StockState& state, const Parameters& params,
                                         double tol) {
    Overrides ov;
    AuxiliaryValues a = evaluate_auxiliaries(state, params, ov);
    StateDerivative d = derivatives(state, params, ov);
    ResidualReport r;
    r.dB = std::abs(d.dB);
    r.dM = std::abs(d.dM);
    r.dihat_P = std::abs(d.dihat_P);
    r.dihat_B = std::abs(d.dihat_B);
    r.recruitment_gap = std::abs(a.B_star - state.B);
    r.demand_gap = std::abs(a.D_M - state.M);
    r.pass = r.dB < tol && r.dM < tol && r.dihat_P < tol && r.dihat_B < tol &&
             r.recruitment_gap < tol && r.demand_gap < tol;
    return r;
}

}  // namespace pbm
