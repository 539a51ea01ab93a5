/// @file model.hpp
/// Algebraic layer of the peasant/bandit/mafia economy: every per-symbol
/// formula as a pure function, plus the stock derivatives.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace pbm {

/// Exogenous constants of the model. All rates are per month.
struct Parameters {
    double a_P = 10.0;      ///< marginal product (output units per peasant per month)
    double theta_B = 3.0;   ///< effectiveness of bandit technology, > 0
    double theta_M = 0.2;   ///< mafia marginal protection effectiveness, in [0,1]
    double c_M = 10.0;      ///< fixed cost of being a mafioso (output units per month)
    double lambda_A = 0.9;  ///< authority control, in [0,1]
    double tbar_M = 0.2;    ///< maximum mafia tribute share, in [0,1]
    double tau = 10.0;      ///< perception delay (months)
    double tau_B = 3.0;     ///< bandit recruitment delay (months)
    double tau_M = 5.0;     ///< mafia recruitment delay (months)
    double N = 110.0;       ///< total population, constant

    /// Returns an error message naming the first violated invariant, or
    /// nothing when all parameter bounds hold.
    std::optional<std::string> validate() const {
        auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
        if (!(a_P > 0.0)) return "a_P must be > 0";
        if (!(theta_B > 0.0)) return "theta_B must be > 0";
        if (!in01(theta_M)) return "theta_M must be in [0,1]";
        if (!(c_M > 0.0)) return "c_M must be > 0";
        if (!in01(lambda_A)) return "lambda_A must be in [0,1]";
        if (!in01(tbar_M)) return "tbar_M must be in [0,1]";
        if (!(tau > 0.0)) return "tau must be > 0";
        if (!(tau_B > 0.0)) return "tau_B must be > 0";
        if (!(tau_M > 0.0)) return "tau_M must be > 0";
        if (!(N > 0.0)) return "N must be > 0";
        return std::nullopt;
    }
};

/// Structural overrides used by the what-if experiments. Once switched on
/// they stay on for the rest of a run.
struct Overrides {
    bool demand_zero = false;            ///< force protection demand D_M = 0
    bool potential_bandits_zero = false; ///< force potential bandits B* = 0

    bool operator==(const Overrides&) const = default;
};

/// Integrated state at one time instant. P is the residual N - B - M, kept
/// in the struct so samples carry the full population split.
struct StockState {
    double P = 0.0;       ///< peasants
    double B = 0.0;       ///< bandits
    double M = 0.0;       ///< mafiosi
    double ihat_P = 0.0;  ///< perceived disposable income per peasant
    double ihat_B = 0.0;  ///< perceived disposable income per bandit
    double t = 0.0;       ///< simulation time (months)
};

/// Every algebraic quantity computed from a StockState.
struct AuxiliaryValues {
    double Y = 0.0;              ///< total peasant output
    double F = 0.0;              ///< probability of avoiding banditry
    double pi = 0.0;             ///< theft success rate
    double R_B = 0.0;            ///< bandit appropriations
    double T_B = 0.0;            ///< bandit tribute to mafia
    double I_B = 0.0;            ///< bandit disposable income
    double i_B = 0.0;            ///< disposable income per bandit
    double T_P = 0.0;            ///< peasant payoff for protection
    double I_P = 0.0;            ///< peasant disposable income
    double i_P = 0.0;            ///< disposable income per peasant
    double attractiveness = 0.0; ///< economic attractiveness of banditry
    double B_star = 0.0;         ///< potential bandits
    double W = 0.0;              ///< willingness to pay for protection
    double L = 0.0;              ///< protection budget
    double l = 0.0;              ///< protection spending
    double p_M = 0.0;            ///< protection price
    double D_M = 0.0;            ///< protection demand (persons)
    double m_B = 0.0;            ///< mafia size required for bandit control
    double lambda_M = 0.0;       ///< mafia control
    double lawlessness = 0.0;    ///< (B+M)/(P+B+M)
    double integrity = 0.0;      ///< I_P/Y
};

/// Time derivatives of the four independently integrated stocks. P has no
/// derivative of its own; it is the residual N - B - M.
struct StateDerivative {
    double dB = 0.0;
    double dM = 0.0;
    double dihat_P = 0.0;
    double dihat_B = 0.0;
};

/// F(B/P) = 1/(1 + theta_B * B/P). Returns 1 when B = 0, and 0 by
/// convention when P = 0 with bandits present.
inline double avoidance_probability(double B, double P, double theta_B) {
    if (B <= 0.0) return 1.0;
    if (P <= 0.0) return 0.0;
    return 1.0 / (1.0 + theta_B * B / P);
}

/// pi = (1 - lambda_A)(1 - lambda_M).
inline double theft_success(double lambda_A, double lambda_M) {
    return (1.0 - lambda_A) * (1.0 - lambda_M);
}

/// R_B = pi * (1 - F) * Y.
inline double bandit_appropriations(double pi, double F, double Y) {
    return pi * (1.0 - F) * Y;
}

struct BanditIncome {
    double T_B = 0.0;
    double I_B = 0.0;
    double i_B = 0.0;
};

/// Tribute T_B = tbar_M * lambda_M * R_B, disposable income I_B = R_B - T_B,
/// per-bandit income i_B = I_B/B (0 when there are no bandits).
inline BanditIncome bandit_income(double R_B, double lambda_M, double tbar_M, double B) {
    BanditIncome r;
    r.T_B = tbar_M * lambda_M * R_B;
    r.I_B = R_B - r.T_B;
    r.i_B = B > 0.0 ? r.I_B / B : 0.0;
    return r;
}

struct PeasantIncome {
    double T_P = 0.0;
    double I_P = 0.0;
    double i_P = 0.0;
};

/// T_P = p_M * M, I_P = Y - R_B - T_P, i_P = I_P/P (0 when P = 0).
/// I_P is reported as computed and may be negative; the budget clamp
/// happens downstream in the protection market.
inline PeasantIncome peasant_income(double Y, double R_B, double p_M, double M, double P) {
    PeasantIncome r;
    r.T_P = p_M * M;
    r.I_P = Y - R_B - r.T_P;
    r.i_P = P > 0.0 ? r.I_P / P : 0.0;
    return r;
}

/// ihat_B / (ihat_B + ihat_P); 0 by convention when both incomes are 0.
inline double banditry_attractiveness(double ihat_B, double ihat_P) {
    double total = ihat_B + ihat_P;
    if (total <= 0.0) return 0.0;
    return ihat_B / total;
}

/// B* = (P + B) * attractiveness, or 0 under the no-bandits override.
inline double potential_bandits(double P, double B, double attractiveness,
                                const Overrides& ov) {
    if (ov.potential_bandits_zero) return 0.0;
    return (P + B) * attractiveness;
}

struct ProtectionMarket {
    double W = 0.0;
    double L = 0.0;
    double l = 0.0;
    double p_M = 0.0;
    double D_M = 0.0;
};

/// W = R_B, L = max(I_P, 0), l = min(W, L), p_M = max(ihat_P, ihat_B) + c_M,
/// D_M = l/p_M (or 0 under the demand override).
inline ProtectionMarket protection_market(double R_B, double I_P, double ihat_P,
                                          double ihat_B, double c_M,
                                          const Overrides& ov) {
    ProtectionMarket r;
    r.W = R_B;
    r.L = std::max(I_P, 0.0);
    r.l = std::min(r.W, r.L);
    r.p_M = std::max(ihat_P, ihat_B) + c_M;
    r.D_M = ov.demand_zero ? 0.0 : r.l / r.p_M;
    return r;
}

struct MafiaControl {
    double m_B = 0.0;
    double lambda_M = 0.0;
};

/// m_B = (1 - lambda_A) * theta_M * B; lambda_M = min(1, M/m_B). When no
/// mafiosi are needed (m_B = 0), control is 1 if any mafia exists, else 0.
inline MafiaControl mafia_control(double M, double B, double lambda_A, double theta_M) {
    MafiaControl r;
    r.m_B = (1.0 - lambda_A) * theta_M * B;
    if (r.m_B > 0.0) {
        r.lambda_M = std::min(1.0, M / r.m_B);
    } else {
        r.lambda_M = M > 0.0 ? 1.0 : 0.0;
    }
    return r;
}

struct Indices {
    double lawlessness = 0.0;
    double integrity = 0.0;
};

/// lawlessness = (B+M)/(P+B+M); integrity = I_P/Y, both clamped to [0,1].
/// integrity is 1 by convention when there is no output at all.
inline Indices indices(double P, double B, double M, double I_P, double Y) {
    Indices r;
    double total = P + B + M;
    r.lawlessness = total > 0.0 ? std::clamp((B + M) / total, 0.0, 1.0) : 0.0;
    r.integrity = Y > 0.0 ? std::clamp(I_P / Y, 0.0, 1.0) : 1.0;
    return r;
}

/// Computes the full algebraic layer in dependency order.
inline AuxiliaryValues evaluate_auxiliaries(const StockState& s, const Parameters& p,
                                            const Overrides& ov) {
    AuxiliaryValues a;
    a.Y = p.a_P * s.P;

    MafiaControl mc = mafia_control(s.M, s.B, p.lambda_A, p.theta_M);
    a.m_B = mc.m_B;
    a.lambda_M = mc.lambda_M;

    a.pi = theft_success(p.lambda_A, a.lambda_M);
    a.F = avoidance_probability(s.B, s.P, p.theta_B);
    a.R_B = bandit_appropriations(a.pi, a.F, a.Y);

    BanditIncome bi = bandit_income(a.R_B, a.lambda_M, p.tbar_M, s.B);
    a.T_B = bi.T_B;
    a.I_B = bi.I_B;
    a.i_B = bi.i_B;

    // p_M depends on perceived incomes only, so it is known before I_P.
    double price = std::max(s.ihat_P, s.ihat_B) + p.c_M;
    PeasantIncome pi_ = peasant_income(a.Y, a.R_B, price, s.M, s.P);
    a.T_P = pi_.T_P;
    a.I_P = pi_.I_P;
    a.i_P = pi_.i_P;

    a.attractiveness = banditry_attractiveness(s.ihat_B, s.ihat_P);
    a.B_star = potential_bandits(s.P, s.B, a.attractiveness, ov);

    ProtectionMarket pm = protection_market(a.R_B, a.I_P, s.ihat_P, s.ihat_B, p.c_M, ov);
    a.W = pm.W;
    a.L = pm.L;
    a.l = pm.l;
    a.p_M = pm.p_M;
    a.D_M = pm.D_M;

    Indices idx = indices(s.P, s.B, s.M, a.I_P, a.Y);
    a.lawlessness = idx.lawlessness;
    a.integrity = idx.integrity;
    return a;
}

/// Stock derivatives: recruitment toward B* and D_M, exponential smoothing
/// of perceived incomes toward the instantaneous ones.
inline StateDerivative derivatives(const StockState& s, const Parameters& p,
                                   const Overrides& ov) {
    AuxiliaryValues a = evaluate_auxiliaries(s, p, ov);
    StateDerivative d;
    d.dB = (a.B_star - s.B) / p.tau_B;
    d.dM = (a.D_M - s.M) / p.tau_M;
    d.dihat_P = (a.i_P - s.ihat_P) / p.tau;
    d.dihat_B = (a.i_B - s.ihat_B) / p.tau;
    return d;
}

}  // namespace pbm
