#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pbm/model.hpp"

using namespace pbm;

namespace {

// Base-run constants used across the examples.
Parameters base_params() { return Parameters{}; }

StockState base_state() {
    StockState s;
    s.P = 107.0;
    s.B = 3.0;
    s.M = 0.0;
    s.ihat_P = 9.98;
    s.ihat_B = 0.28;
    return s;
}

struct RandomInputs {
    std::mt19937 rng{12345};
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    std::uniform_real_distribution<double> pop{0.0, 200.0};
    std::uniform_real_distribution<double> money{0.0, 2000.0};

    double u() { return unit(rng); }
    double persons() { return pop(rng); }
    double output() { return money(rng); }
};

}  // namespace

TEST_CASE("avoidance_probability examples") {
    CHECK(avoidance_probability(0, 107, 3) == 1.0);
    CHECK(avoidance_probability(3, 107, 3) == doctest::Approx(107.0 / 116.0).epsilon(1e-12));
    CHECK(avoidance_probability(10, 100, 3) == doctest::Approx(1.0 / 1.3).epsilon(1e-12));
    CHECK(avoidance_probability(5, 0, 3) == 0.0);  // no peasants left to rob
}

TEST_CASE("avoidance_probability strictly decreasing in B") {
    RandomInputs in;
    for (int i = 0; i < 1000; ++i) {
        double P = in.persons() + 1.0;
        double theta = in.u() * 5.0 + 0.1;
        double b1 = in.persons() + 0.1;
        double b2 = b1 + in.persons() + 0.1;
        CHECK(avoidance_probability(b2, P, theta) < avoidance_probability(b1, P, theta));
    }
}

TEST_CASE("theft_success examples and monotonicity") {
    CHECK(theft_success(0.9, 0.0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(theft_success(0.0, 0.0) == 1.0);
    CHECK(theft_success(1.0, 0.5) == 0.0);
    RandomInputs in;
    for (int i = 0; i < 1000; ++i) {
        double a = in.u(), m = in.u(), bump = in.u() * (1.0 - a);
        CHECK(theft_success(a + bump, m) <= theft_success(a, m));
    }
}

TEST_CASE("bandit_appropriations examples") {
    double F = avoidance_probability(3, 107, 3);
    CHECK(bandit_appropriations(0.1, F, 1070) == doctest::Approx(8.30172).epsilon(1e-5));
    CHECK(bandit_appropriations(0, 0.5, 1000) == 0.0);
    CHECK(bandit_appropriations(1, 0, 1000) == 1000.0);
}

TEST_CASE("bandit_appropriations bounded by output and increasing in Y") {
    RandomInputs in;
    for (int i = 0; i < 1000; ++i) {
        double pi = in.u(), F = in.u(), Y = in.output();
        double r = bandit_appropriations(pi, F, Y);
        CHECK(r >= 0.0);
        CHECK(r <= Y);
        CHECK(bandit_appropriations(pi, F, Y + 1.0) >= r);
    }
}

TEST_CASE("bandit_income examples") {
    auto r = bandit_income(100, 0.5, 0.2, 10);
    CHECK(r.T_B == doctest::Approx(10.0));
    CHECK(r.I_B == doctest::Approx(90.0));
    CHECK(r.i_B == doctest::Approx(9.0));

    r = bandit_income(8.30172, 0.0, 0.2, 3);
    CHECK(r.T_B == 0.0);
    CHECK(r.I_B == doctest::Approx(8.30172));
    CHECK(r.i_B == doctest::Approx(2.76724));

    r = bandit_income(50, 1.0, 0.0, 5);
    CHECK(r.T_B == 0.0);
    CHECK(r.i_B == doctest::Approx(10.0));

    CHECK(bandit_income(50, 0.5, 0.2, 0).i_B == 0.0);
}

TEST_CASE("tribute never exceeds the maximum share of the loot") {
    RandomInputs in;
    for (int i = 0; i < 1000; ++i) {
        double R = in.output(), lm = in.u(), tbar = in.u();
        auto r = bandit_income(R, lm, tbar, in.persons());
        CHECK(r.T_B <= tbar * R + 1e-12);
        CHECK(r.T_B >= 0.0);
        CHECK(r.I_B == doctest::Approx(R - r.T_B));
    }
}

TEST_CASE("peasant_income examples") {
    auto r = peasant_income(1070, 8.30172, 19.98, 0, 107);
    CHECK(r.T_P == 0.0);
    CHECK(r.I_P == doctest::Approx(1061.698).epsilon(1e-6));
    CHECK(r.i_P == doctest::Approx(9.92241).epsilon(1e-5));

    r = peasant_income(1000, 0, 20, 5, 100);
    CHECK(r.T_P == doctest::Approx(100.0));
    CHECK(r.I_P == doctest::Approx(900.0));
    CHECK(r.i_P == doctest::Approx(9.0));

    r = peasant_income(0, 0, 10, 0, 0);
    CHECK(r.T_P == 0.0);
    CHECK(r.I_P == 0.0);
    CHECK(r.i_P == 0.0);
}

TEST_CASE("banditry_attractiveness examples") {
    CHECK(banditry_attractiveness(0.28, 9.98) == doctest::Approx(0.0272904).epsilon(1e-5));
    CHECK(banditry_attractiveness(0, 5) == 0.0);
    CHECK(banditry_attractiveness(4, 4) == 0.5);
    CHECK(banditry_attractiveness(3, 0) == 1.0);
    CHECK(banditry_attractiveness(0, 0) == 0.0);
}

TEST_CASE("potential_bandits examples") {
    Overrides none;
    CHECK(potential_bandits(107, 3, 0.0272904, none) == doctest::Approx(3.00194).epsilon(1e-5));
    CHECK(potential_bandits(100, 10, 0.0909091, none) == doctest::Approx(10.0).epsilon(1e-5));
    Overrides off;
    off.potential_bandits_zero = true;
    CHECK(potential_bandits(50, 50, 0.9, off) == 0.0);
}

TEST_CASE("protection_market examples") {
    Overrides none;
    auto r = protection_market(8.30172, 1061.698, 9.98, 0.28, 10, none);
    CHECK(r.W == doctest::Approx(8.30172));
    CHECK(r.L == doctest::Approx(1061.698));
    CHECK(r.l == doctest::Approx(8.30172));
    CHECK(r.p_M == doctest::Approx(19.98));
    CHECK(r.D_M == doctest::Approx(0.415502).epsilon(1e-5));

    r = protection_market(100, 40, 5, 8, 10, none);
    CHECK(r.W == 100.0);
    CHECK(r.L == 40.0);
    CHECK(r.l == 40.0);
    CHECK(r.p_M == doctest::Approx(18.0));
    CHECK(r.D_M == doctest::Approx(40.0 / 18.0).epsilon(1e-4));

    Overrides off;
    off.demand_zero = true;
    CHECK(protection_market(100, 500, 5, 2, 10, off).D_M == 0.0);

    // negative disposable income clamps the budget, not the demand sign
    CHECK(protection_market(100, -50, 5, 2, 10, none).L == 0.0);
    CHECK(protection_market(100, -50, 5, 2, 10, none).D_M == 0.0);
}

TEST_CASE("mafia_control examples") {
    auto r = mafia_control(2, 20, 0, 0.2);
    CHECK(r.m_B == doctest::Approx(4.0));
    CHECK(r.lambda_M == doctest::Approx(0.5));

    r = mafia_control(10, 20, 0, 0.2);
    CHECK(r.lambda_M == 1.0);

    r = mafia_control(0, 0, 0, 0.2);
    CHECK(r.m_B == 0.0);
    CHECK(r.lambda_M == 0.0);

    CHECK(mafia_control(1, 0, 0, 0.2).lambda_M == 1.0);
}

TEST_CASE("indices examples") {
    auto r = indices(107, 3, 0, 1061.698, 1070);
    CHECK(r.lawlessness == doctest::Approx(0.0272727).epsilon(1e-5));
    CHECK(r.integrity == doctest::Approx(0.992241).epsilon(1e-5));

    r = indices(110, 0, 0, 1100, 1100);
    CHECK(r.lawlessness == 0.0);
    CHECK(r.integrity == 1.0);

    r = indices(0, 110, 0, 0, 0);
    CHECK(r.lawlessness == 1.0);
    CHECK(r.integrity == 1.0);
}

TEST_CASE("evaluate_auxiliaries composes the per-symbol operations") {
    Overrides none;
    auto a = evaluate_auxiliaries(base_state(), base_params(), none);
    CHECK(a.Y == doctest::Approx(1070.0));
    CHECK(a.F == doctest::Approx(0.922414).epsilon(1e-5));
    CHECK(a.pi == doctest::Approx(0.1));
    CHECK(a.R_B == doctest::Approx(8.30172).epsilon(1e-5));
    CHECK(a.lambda_M == 0.0);
    CHECK(a.D_M == doctest::Approx(0.415502).epsilon(1e-5));

    StockState quiet = base_state();
    quiet.P = 110.0;
    quiet.B = 0.0;
    quiet.ihat_B = 0.0;
    a = evaluate_auxiliaries(quiet, base_params(), none);
    CHECK(a.R_B == 0.0);
    CHECK(a.i_B == 0.0);
    CHECK(a.W == 0.0);
    CHECK(a.l == 0.0);
    CHECK(a.D_M == 0.0);
    CHECK(a.B_star == 0.0);

    Parameters low = base_params();
    low.a_P = 1.0;
    StockState s2;
    s2.P = 100.0;
    s2.B = 10.0;
    s2.ihat_P = 1.0;
    s2.ihat_B = 0.1;
    a = evaluate_auxiliaries(s2, low, none);
    CHECK(a.Y == doctest::Approx(100.0));
    CHECK(a.F == doctest::Approx(0.769231).epsilon(1e-5));
    CHECK(a.pi == doctest::Approx(0.1));
    CHECK(a.R_B == doctest::Approx(2.30769).epsilon(1e-5));
}

TEST_CASE("derivatives examples") {
    SUBCASE("recruitment gap drives dB") {
        // engineered so B* = 10 with B = 4: attractiveness 1/11 over P+B = 110
        Parameters p = base_params();
        StockState s;
        s.B = 4.0;
        s.M = 0.0;
        s.P = 106.0;
        s.ihat_B = 1.0;
        s.ihat_P = 10.0;
        Overrides none;
        auto a = evaluate_auxiliaries(s, p, none);
        CHECK(a.B_star == doctest::Approx(10.0));
        CHECK(derivatives(s, p, none).dB == doctest::Approx(2.0));
    }
    SUBCASE("demand override drains the mafia") {
        Parameters p = base_params();
        StockState s;
        s.B = 10.0;
        s.M = 5.0;
        s.P = 95.0;
        s.ihat_P = 5.0;
        s.ihat_B = 1.0;
        Overrides off;
        off.demand_zero = true;
        CHECK(derivatives(s, p, off).dM == doctest::Approx(-1.0));
    }
}

TEST_CASE("boundedness under randomized valid inputs") {
    RandomInputs in;
    Overrides none;
    for (int i = 0; i < 10000; ++i) {
        Parameters p;
        p.a_P = in.u() * 20.0 + 0.01;
        p.theta_B = in.u() * 5.0 + 0.01;
        p.theta_M = in.u();
        p.c_M = in.u() * 20.0 + 0.01;
        p.lambda_A = in.u();
        p.tbar_M = in.u();
        p.N = 110.0;
        StockState s;
        s.B = in.u() * p.N;
        s.M = in.u() * (p.N - s.B);
        s.P = p.N - s.B - s.M;
        s.ihat_P = in.output() / 100.0;
        s.ihat_B = in.output() / 100.0;
        auto a = evaluate_auxiliaries(s, p, none);
        CHECK(a.F >= 0.0); CHECK(a.F <= 1.0);
        CHECK(a.pi >= 0.0); CHECK(a.pi <= 1.0);
        CHECK(a.lambda_M >= 0.0); CHECK(a.lambda_M <= 1.0);
        CHECK(a.attractiveness >= 0.0); CHECK(a.attractiveness <= 1.0);
        CHECK(a.lawlessness >= 0.0); CHECK(a.lawlessness <= 1.0);
        CHECK(a.integrity >= 0.0); CHECK(a.integrity <= 1.0);
        CHECK(a.R_B <= a.Y + 1e-9);
        CHECK(a.l <= a.L + 1e-12);
        CHECK(a.T_B <= a.R_B + 1e-12);
        CHECK(a.B_star <= s.P + s.B + 1e-9);
    }
}

TEST_CASE("public and private enforcement are substitutes") {
    // for fixed lambda_M, raising lambda_A weakly lowers pi, R_B and m_B
    RandomInputs in;
    for (int i = 0; i < 1000; ++i) {
        double lm = in.u();
        double a1 = in.u();
        double a2 = a1 + in.u() * (1.0 - a1);
        double F = in.u(), Y = in.output(), B = in.persons(), tm = in.u();
        CHECK(theft_success(a2, lm) <= theft_success(a1, lm));
        CHECK(bandit_appropriations(theft_success(a2, lm), F, Y) <=
              bandit_appropriations(theft_success(a1, lm), F, Y) + 1e-12);
        CHECK(mafia_control(0.0, B, a2, tm).m_B <= mafia_control(0.0, B, a1, tm).m_B + 1e-12);
    }
}

TEST_CASE("derivative signs follow the gaps") {
    RandomInputs in;
    Overrides none;
    Parameters p;
    for (int i = 0; i < 1000; ++i) {
        StockState s;
        s.B = in.u() * p.N;
        s.M = in.u() * (p.N - s.B);
        s.P = p.N - s.B - s.M;
        s.ihat_P = in.output() / 100.0;
        s.ihat_B = in.output() / 100.0;
        auto a = evaluate_auxiliaries(s, p, none);
        auto d = derivatives(s, p, none);
        if (a.B_star < s.B) CHECK(d.dB < 0.0);
        if (a.D_M < s.M) CHECK(d.dM < 0.0);
    }
}
