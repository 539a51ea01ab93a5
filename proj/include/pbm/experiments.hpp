/// @file experiments.hpp
/// The six built-in experiments, directional outcome classification, and
/// the reference sign table they are checked against.

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "pbm/equilibrium.hpp"
#include "pbm/integrate.hpp"
#include "pbm/scenario.hpp"

namespace pbm {

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "base",           "low-output", "productivity-shock",
        "eliminate-mafia", "no-bandits", "state-control",
    };
    return names;
}

/// Builds one of the six built-in scenarios. All share the 300-month
/// horizon and the unification intervention (lambda_A -> 0 at t=60); the
/// low-output family starts from a_P = 1 instead of 10.
inline Scenario builtin_experiment(const std::string& name) {
    Scenario sc;
    sc.name = name;
    sc.horizon = 300.0;
    sc.initial_params = Parameters{};  // defaults are the base-run constants
    sc.initial.P = 107.0;
    sc.initial.B = 3.0;
    sc.initial.M = 0.0;
    sc.initial.ihat_P = 9.98;
    sc.initial.ihat_B = 0.28;

    auto low_output_start = [&sc] {
        sc.initial_params.a_P = 1.0;
        sc.initial.P = 100.0;
        sc.initial.B = 10.0;
        sc.initial.ihat_P = 1.0;
        sc.initial.ihat_B = 0.1;
    };
    auto set_param = [](double time, const std::string& target, double value) {
        return Intervention{time, Intervention::Kind::SetParameter, target, value};
    };
    auto set_override = [](double time, const std::string& target) {
        return Intervention{time, Intervention::Kind::SetOverride, target, 1.0};
    };

    sc.interventions.push_back(set_param(60.0, "lambda_A", 0.0));
    if (name == "base") {
        // unification only
    } else if (name == "low-output") {
        low_output_start();
    } else if (name == "productivity-shock") {
        low_output_start();
        sc.interventions.push_back(set_param(150.0, "a_P", 10.0));
    } else if (name == "eliminate-mafia") {
        sc.interventions.push_back(set_override(150.0, "demand_zero"));
    } else if (name == "no-bandits") {
        sc.interventions.push_back(set_override(150.0, "potential_bandits_zero"));
    } else if (name == "state-control") {
        sc.interventions.push_back(set_param(150.0, "lambda_A", 0.5));
    } else {
        std::string valid;
        for (const auto& n : experiment_names()) {
            if (!valid.empty()) valid += ", ";
            valid += n;
        }
        throw ConfigError("unknown experiment '" + name + "' (valid: " + valid + ")");
    }
    sc.validate();
    return sc;
}

enum class Sign { Plus, Minus, NoChange };

inline char sign_char(Sign s) {
    switch (s) {
        case Sign::Plus: return '+';
        case Sign::Minus: return '-';
        default: return '=';
    }
}

inline std::string sign_label(Sign s) {
    switch (s) {
        case Sign::Plus: return "+";
        case Sign::Minus: return "-";
        default: return "n/c";
    }
}

/// Directional outcome for the five reported quantities.
struct OutcomeSigns {
    Sign peasants = Sign::NoChange;
    Sign bandits = Sign::NoChange;
    Sign mafia = Sign::NoChange;
    Sign lawlessness = Sign::NoChange;
    Sign integrity = Sign::NoChange;

    bool operator==(const OutcomeSigns&) const = default;
};

struct Window {
    double t0 = 0.0;
    double t1 = 0.0;
};

namespace detail {

inline double window_mean(const Trajectory& traj, const Window& w,
                          double (*get)(const Sample&)) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : traj.samples) {
        if (s.t >= w.t0 - 1e-9 && s.t <= w.t1 + 1e-9) {
            sum += get(s);
            ++count;
        }
    }
    if (count == 0) throw ConfigError("empty classification window");
    return sum / static_cast<double>(count);
}

inline Sign classify_change(double pre, double post, double threshold, double scale) {
    if (pre < 0.01 * scale) {
        // relative change is meaningless for a negligible quantity; use an
        // absolute band sized to the quantity's natural scale
        if (post - pre > 0.005 * scale) return Sign::Plus;
        if (pre - post > 0.005 * scale) return Sign::Minus;
        return Sign::NoChange;
    }
    double rel = (post - pre) / pre;
    if (rel > threshold) return Sign::Plus;
    if (rel < -threshold) return Sign::Minus;
    return Sign::NoChange;
}

}  // namespace detail

/// Compares window means of P, B, M and the two indices between a pre and a
/// post window; a quantity gets '+' or '-' only when it moved by more than
/// `threshold` relative to the pre mean. Population stocks measure "small"
/// against N, the unit-interval indices against 1.
inline OutcomeSigns classify_outcomes(const Trajectory& traj, const Window& pre,
                                      const Window& post, double threshold) {
    if (!(threshold > 0.0)) throw ConfigError("threshold must be > 0");
    if (pre.t1 > post.t0) throw ConfigError("pre window must precede post window");
    if (traj.samples.empty()) throw ConfigError("empty trajectory");
    double n = traj.samples.front().params.N;
    auto classify = [&](double (*get)(const Sample&), double scale) {
        return detail::classify_change(detail::window_mean(traj, pre, get),
                                       detail::window_mean(traj, post, get), threshold,
                                       scale);
    };
    OutcomeSigns out;
    out.peasants = classify(+[](const Sample& s) { return s.state.P; }, n);
    out.bandits = classify(+[](const Sample& s) { return s.state.B; }, n);
    out.mafia = classify(+[](const Sample& s) { return s.state.M; }, n);
    out.lawlessness = classify(+[](const Sample& s) { return s.aux.lawlessness; }, 1.0);
    out.integrity = classify(+[](const Sample& s) { return s.aux.integrity; }, 1.0);
    return out;
}

constexpr double kOutcomeThreshold = 0.01;

/// Pre/post comparison windows for an experiment's outcome row. The
/// two-intervention experiments are judged against the regime established
/// between the interventions, not the pre-unification start.
inline std::pair<Window, Window> outcome_windows(const std::string& name) {
    Window post{280.0, 300.0};
    if (name == "base" || name == "low-output") {
        return {Window{40.0, 60.0}, post};
    }
    return {Window{130.0, 150.0}, post};
}

/// Reference directional outcomes for the six experiments.
inline OutcomeSigns reference_signs(const std::string& name) {
    using S = Sign;
    if (name == "base") return {S::Minus, S::Plus, S::Plus, S::Plus, S::Minus};
    if (name == "low-output") return {S::Minus, S::Plus, S::NoChange, S::Plus, S::Minus};
    if (name == "productivity-shock") return {S::Plus, S::Minus, S::Plus, S::Minus, S::Plus};
    if (name == "eliminate-mafia") return {S::Minus, S::Plus, S::Minus, S::Plus, S::Minus};
    if (name == "no-bandits") return {S::Plus, S::Minus, S::Minus, S::Minus, S::Plus};
    if (name == "state-control") return {S::Plus, S::Minus, S::Minus, S::Minus, S::Plus};
    throw ConfigError("unknown experiment '" + name + "'");
}

struct ExperimentRun {
    Scenario scenario;
    FixedPointResult equilibrium;
    Trajectory trajectory;
    OutcomeSigns signs;
};

/// Derives an initial stock guess from a scenario, filling unset fields
/// with a nearly-all-peasant split and self-consistent incomes.
inline StockState initial_guess(const Scenario& sc) {
    const Parameters& p = sc.initial_params;
    StockState g;
    g.B = sc.initial.B.value_or(0.03 * p.N);
    g.M = sc.initial.M.value_or(0.0);
    g.P = sc.initial.P.value_or(p.N - g.B - g.M);
    if (sc.initial.ihat_P && sc.initial.ihat_B) {
        g.ihat_P = *sc.initial.ihat_P;
        g.ihat_B = *sc.initial.ihat_B;
    } else {
        Overrides ov;
        AuxiliaryValues a = evaluate_auxiliaries(g, p, ov);
        g.ihat_P = sc.initial.ihat_P.value_or(std::max(a.i_P, 0.0));
        g.ihat_B = sc.initial.ihat_B.value_or(std::max(a.i_B, 0.0));
    }
    return g;
}

/// Full pipeline for one scenario: equilibrium-initialize from the guess,
/// simulate, classify. Used by both `run` and `experiment`.
inline ExperimentRun run_scenario(const Scenario& sc, const IntegrationConfig& config,
                                  const Window& pre, const Window& post) {
    ExperimentRun run;
    run.scenario = sc;
    run.equilibrium = find_fixed_point(sc.initial_params, initial_guess(sc),
                                       kFixedPointTol, kFixedPointMaxHorizon, config);
    run.trajectory = simulate(run.equilibrium.state, sc.initial_params, sc, sc.horizon,
                              config);
    run.signs = classify_outcomes(run.trajectory, pre, post, kOutcomeThreshold);
    return run;
}

inline ExperimentRun run_experiment(const std::string& name,
                                    const IntegrationConfig& config = {}) {
    Scenario sc = builtin_experiment(name);
    auto [pre, post] = outcome_windows(name);
    return run_scenario(sc, config, pre, post);
}

}  // namespace pbm
