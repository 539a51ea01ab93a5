#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pbm/equilibrium.hpp"

using namespace pbm;

namespace {
StockState table_base_state() { return {107.0, 3.0, 0.0, 9.98, 0.28, 0.0}; }
}

TEST_CASE("base parameters relax to a self-consistent fixed point") {
    Parameters p;
    FixedPointResult fp = find_fixed_point(p, table_base_state());
    REQUIRE(fp.converged);
    Overrides none;
    AuxiliaryValues a = evaluate_auxiliaries(fp.state, p, none);
    CHECK(std::abs(a.B_star - fp.state.B) < kFixedPointTol);
    CHECK(std::abs(a.D_M - fp.state.M) < kFixedPointTol);
    CHECK(std::abs(a.i_P - fp.state.ihat_P) < kFixedPointTol * p.tau);
    CHECK(std::abs(a.i_B - fp.state.ihat_B) < kFixedPointTol * p.tau);
    CHECK(fp.state.P + fp.state.B + fp.state.M == doctest::Approx(p.N).epsilon(1e-12));
}

TEST_CASE("no loot means no banditry") {
    Parameters p;
    p.theta_B = 1e-9;  // theft technology effectively disabled
    FixedPointResult fp = find_fixed_point(p, table_base_state());
    REQUIRE(fp.converged);
    CHECK(fp.state.B < 0.01);
    CHECK(fp.state.M < 0.01);
    CHECK(fp.state.P > 0.99 * p.N);
}

TEST_CASE("low-output parameters converge from the tabulated guess") {
    Parameters p;
    p.a_P = 1.0;
    FixedPointResult fp = find_fixed_point(p, {100.0, 10.0, 0.0, 1.0, 0.1, 0.0});
    REQUIRE(fp.converged);
    CHECK(verify_fixed_point(fp.state, p, kFixedPointTol).pass);
}

TEST_CASE("solver restarted from its own result stays put") {
    Parameters p;
    FixedPointResult fp = find_fixed_point(p, table_base_state());
    REQUIRE(fp.converged);
    FixedPointResult again = find_fixed_point(p, fp.state);
    REQUIRE(again.converged);
    CHECK(std::abs(again.state.B - fp.state.B) < 1e-6);
    CHECK(std::abs(again.state.M - fp.state.M) < 1e-6);
    CHECK(again.horizon_used == 0.0);
}

TEST_CASE("verify_fixed_point") {
    Parameters p;
    SUBCASE("solver output passes at the solver tolerance") {
        FixedPointResult fp = find_fixed_point(p, table_base_state());
        REQUIRE(fp.converged);
        CHECK(verify_fixed_point(fp.state, p, kFixedPointTol).pass);
    }
    SUBCASE("the tabulated state is not a fixed point of the printed equations") {
        ResidualReport r = verify_fixed_point(table_base_state(), p, 1e-3);
        CHECK(!r.pass);
        CHECK(r.dihat_B > 1e-3);  // i_B ~ 2.77 against perceived 0.28
    }
    SUBCASE("any state passes a vacuous tolerance") {
        CHECK(verify_fixed_point(table_base_state(), p, 1e18).pass);
    }
}

TEST_CASE("fixed points respect the model bounds") {
    Parameters p;
    for (double lambda_A : {0.0, 0.5, 0.9}) {
        p.lambda_A = lambda_A;
        FixedPointResult fp = find_fixed_point(p, table_base_state());
        REQUIRE(fp.converged);
        Overrides none;
        AuxiliaryValues a = evaluate_auxiliaries(fp.state, p, none);
        CHECK(fp.state.B >= 0.0);
        CHECK(fp.state.M >= 0.0);
        CHECK(fp.state.P >= 0.0);
        CHECK(a.lambda_M >= 0.0);
        CHECK(a.lambda_M <= 1.0);
        CHECK(a.integrity >= 0.0);
        CHECK(a.integrity <= 1.0);
    }
}
