/// @file integrate.hpp
/// Fixed-step integration of the stock equations with conservation and
/// clamping, producing sampled trajectories.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbm/model.hpp"
#include "pbm/scenario.hpp"

namespace pbm {

/// Raised when a run produces non-finite values. Maps to CLI exit code 1.
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Method { Euler, RK4 };

struct IntegrationConfig {
    double dt = 0.125;            ///< months per step
    Method method = Method::Euler;
    double sample_interval = 1.0; ///< months between recorded samples

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
        if (sample_interval < dt) throw ConfigError("sample_interval must be >= dt");
        double steps = sample_interval / dt;
        if (std::abs(steps - std::round(steps)) > 1e-9) {
            throw ConfigError("sample_interval must be an integer multiple of dt");
        }
    }
};

struct Sample {
    double t = 0.0;
    StockState state;
    AuxiliaryValues aux;
    Parameters params;   ///< parameter values in effect at this sample
    Overrides overrides; ///< override flags in effect at this sample
};

struct Trajectory {
    std::vector<Sample> samples;
    IntegrationConfig config;
    bool clamping_activated = false; ///< any stock hit the [0,N] floor during the run
};

namespace detail {

inline void check_finite(const StockState& s, const Parameters& p, const Overrides& ov) {
    AuxiliaryValues a = evaluate_auxiliaries(s, p, ov);
    struct { const char* name; double v; } checks[] = {
        {"Y", a.Y},       {"F", a.F},       {"pi", a.pi},     {"R_B", a.R_B},
        {"i_B", a.i_B},   {"i_P", a.i_P},   {"B_star", a.B_star},
        {"p_M", a.p_M},   {"D_M", a.D_M},   {"lambda_M", a.lambda_M},
    };
    for (const auto& c : checks) {
        if (!std::isfinite(c.v)) {
            throw SimulationError(std::string("non-finite auxiliary ") + c.name +
                                  " at t=" + format_number(s.t));
        }
    }
}

/// Clamps B and M into the feasible simplex and restores P = N - B - M.
/// Sets `clamped` when any value actually moved.
inline StockState enforce_bounds(StockState s, const Parameters& p, bool& clamped) {
    auto clamp_to = [&clamped](double v, double lo, double hi) {
        double c = std::clamp(v, lo, hi);
        if (c != v) clamped = true;
        return c;
    };
    s.B = clamp_to(s.B, 0.0, p.N);
    s.M = clamp_to(s.M, 0.0, p.N - s.B);
    s.P = p.N - s.B - s.M;
    s.ihat_P = clamp_to(s.ihat_P, 0.0, std::numeric_limits<double>::infinity());
    s.ihat_B = clamp_to(s.ihat_B, 0.0, std::numeric_limits<double>::infinity());
    return s;
}

inline StockState advance(const StockState& s, const StateDerivative& d, double dt) {
    StockState next = s;
    next.B = s.B + d.dB * dt;
    next.M = s.M + d.dM * dt;
    next.ihat_P = s.ihat_P + d.dihat_P * dt;
    next.ihat_B = s.ihat_B + d.dihat_B * dt;
    next.t = s.t + dt;
    return next;
}

}  // namespace detail

/// One fixed step of the chosen scheme. Parameters and overrides are held
/// constant across the step; interventions land at step boundaries only.
inline StockState step(const StockState& state, const Parameters& params,
                       const Overrides& ov, double dt, Method method,
                       bool* clamped = nullptr) {
    detail::check_finite(state, params, ov);
    bool hit = false;
    StockState next;
    if (method == Method::Euler) {
        StateDerivative d = derivatives(state, params, ov);
        next = detail::advance(state, d, dt);
    } else {
        StateDerivative k1 = derivatives(state, params, ov);
        StateDerivative k2 = derivatives(detail::advance(state, k1, dt / 2.0), params, ov);
        StateDerivative k3 = derivatives(detail::advance(state, k2, dt / 2.0), params, ov);
        StateDerivative k4 = derivatives(detail::advance(state, k3, dt), params, ov);
        StateDerivative d;
        d.dB = (k1.dB + 2.0 * k2.dB + 2.0 * k3.dB + k4.dB) / 6.0;
        d.dM = (k1.dM + 2.0 * k2.dM + 2.0 * k3.dM + k4.dM) / 6.0;
        d.dihat_P = (k1.dihat_P + 2.0 * k2.dihat_P + 2.0 * k3.dihat_P + k4.dihat_P) / 6.0;
        d.dihat_B = (k1.dihat_B + 2.0 * k2.dihat_B + 2.0 * k3.dihat_B + k4.dihat_B) / 6.0;
        next = detail::advance(state, d, dt);
    }
    next = detail::enforce_bounds(next, params, hit);
    if (clamped) *clamped = hit;
    return next;
}

/// Runs a scenario from `initial` to `horizon`, applying interventions at
/// step boundaries (before the step that begins at that time) and recording
/// a sample every `sample_interval` months plus the final instant.
inline Trajectory simulate(const StockState& initial, const Parameters& params,
                           const Scenario& scenario, double horizon,
                           const IntegrationConfig& config) {
    config.validate();
    if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
    for (const auto& iv : scenario.interventions) {
        if (iv.time < 0.0 || iv.time > horizon) {
            throw ConfigError("intervention time " + format_number(iv.time) +
                              " outside [0, horizon]");
        }
        double steps = iv.time / config.dt;
        if (std::abs(steps - std::round(steps)) > 1e-9) {
            throw ConfigError("intervention time " + format_number(iv.time) +
                              " is not a multiple of dt");
        }
    }

    Trajectory traj;
    traj.config = config;

    Parameters active = params;
    Overrides ov;
    StockState state = initial;
    state.t = 0.0;

    const std::size_t total_steps =
        static_cast<std::size_t>(std::llround(horizon / config.dt));
    const std::size_t steps_per_sample =
        static_cast<std::size_t>(std::llround(config.sample_interval / config.dt));
    std::size_t next_intervention = 0;

    for (std::size_t i = 0; i <= total_steps; ++i) {
        double t = static_cast<double>(i) * config.dt;
        state.t = t;
        while (next_intervention < scenario.interventions.size() &&
               scenario.interventions[next_intervention].time <= t + 1e-9) {
            const Intervention& iv = scenario.interventions[next_intervention];
            if (iv.kind == Intervention::Kind::SetParameter) {
                active.*(detail::parameter_fields().at(iv.target)) = iv.value;
            } else if (iv.target == "demand_zero") {
                ov.demand_zero = iv.value != 0.0;
            } else {
                ov.potential_bandits_zero = iv.value != 0.0;
            }
            ++next_intervention;
        }
        if (i % steps_per_sample == 0 || i == total_steps) {
            Sample s;
            s.t = t;
            s.state = state;
            s.aux = evaluate_auxiliaries(state, active, ov);
            s.params = active;
            s.overrides = ov;
            traj.samples.push_back(s);
        }
        if (i == total_steps) break;
        bool clamped = false;
        state = step(state, active, ov, config.dt, config.method, &clamped);
        if (clamped) traj.clamping_activated = true;
    }
    return traj;
}

/// Earliest sample time after which the per-month relative change of each
/// of P, B, M stays below `epsilon` through the end of the trajectory.
inline std::optional<double> settling_time(const Trajectory& traj, double epsilon) {
    if (traj.samples.empty() || !(epsilon > 0.0)) return std::nullopt;
    if (traj.samples.size() == 1) return traj.samples.front().t;

    const double floor = 1e-9;
    std::size_t n = traj.samples.size();
    // quiet[i]: the interval starting at sample i is below threshold
    std::vector<bool> quiet(n - 1, false);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Sample& a = traj.samples[i];
        const Sample& b = traj.samples[i + 1];
        double dt = b.t - a.t;
        auto rate = [&](double x0, double x1) {
            return std::abs(x1 - x0) / dt / std::max(std::abs(x0), floor);
        };
        quiet[i] = rate(a.state.P, b.state.P) < epsilon &&
                   rate(a.state.B, b.state.B) < epsilon &&
                   rate(a.state.M, b.state.M) < epsilon;
    }
    std::size_t first = n - 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        if (!quiet[i]) break;
        first = i;
    }
    if (first == n - 1) return std::nullopt;
    return traj.samples[first].t;
}

}  // namespace pbm
