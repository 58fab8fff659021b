#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tsc/als.hpp"
#include "tsc/sim.hpp"
#include "tsc/structure.hpp"

#include <cmath>
#include <numbers>

using tsc::Matrix;

TEST_CASE("identity builder") {
    const tsc::StructureMatrix S = tsc::build_identity(3);
    CHECK(S.tau == 3);
    CHECK(S.T == 3);
    CHECK(S.m_lambda_tau == 1.0);
    CHECK((S.lambda - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(tsc::build_identity(0), std::invalid_argument);
}

TEST_CASE("periodic builder lays out identity blocks") {
    const tsc::StructureMatrix S = tsc::build_periodic(25, 125);
    CHECK(S.tau == 25);
    CHECK(S.T == 125);
    for (int l = 0; l < 25; ++l)
        for (int t = 0; t < 125; ++t) CHECK(S.lambda(l, t) == (l == t % 25 ? 1.0 : 0.0));
    CHECK(S.m_lambda_tau == 1.0);
}

TEST_CASE("periodic with tau == T equals the identity") {
    const tsc::StructureMatrix P = tsc::build_periodic(4, 4);
    const tsc::StructureMatrix I = tsc::build_identity(4);
    CHECK((P.lambda - I.lambda).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("periodic Lambda times its transpose is (T/tau) I") {
    const tsc::StructureMatrix S = tsc::build_periodic(3, 9);
    const Matrix G = S.lambda * S.lambda.transpose();
    CHECK((G - 3.0 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("periodic preconditions") {
    CHECK_THROWS_WITH_AS(tsc::build_periodic(4, 10), doctest::Contains("divide"),
                         std::invalid_argument);
    CHECK_THROWS_AS(tsc::build_periodic(0, 10), std::invalid_argument);
    CHECK_THROWS_AS(tsc::build_periodic(11, 10), std::invalid_argument);
}

TEST_CASE("periodic columns have exactly one unit entry") {
    const tsc::StructureMatrix S = tsc::build_periodic(7, 42);
    for (int t = 0; t < S.T; ++t) {
        int nonzeros = 0;
        for (int l = 0; l < S.tau; ++l) {
            if (S.lambda(l, t) != 0.0) {
                ++nonzeros;
                CHECK(S.lambda(l, t) == 1.0);
            }
        }
        CHECK(nonzeros == 1);
    }
}

TEST_CASE("trigonometric builder") {
    SUBCASE("N = 0 gives the constant row") {
        const tsc::StructureMatrix S = tsc::build_trigonometric(0, 5);
        CHECK(S.tau == 1);
        CHECK((S.lambda - Matrix::Ones(1, 5)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("N = 1, T = 4 evaluates at t = 1..T") {
        const tsc::StructureMatrix S = tsc::build_trigonometric(1, 4);
        CHECK(S.tau == 3);
        CHECK(S.m_lambda_tau == 3.0);
        for (int t = 0; t < 4; ++t) {
            const double x = std::numbers::pi * (t + 1) / 2.0;  // 2*pi*(t+1)/4
            CHECK(S.lambda(0, t) == 1.0);
            CHECK(S.lambda(1, t) == doctest::Approx(std::cos(x)).epsilon(1e-15));
            CHECK(S.lambda(2, t) == doctest::Approx(std::sin(x)).epsilon(1e-15));
        }
    }
    SUBCASE("rows are orthogonal over a full period") {
        const tsc::StructureMatrix S = tsc::build_trigonometric(2, 12);
        const Matrix G = S.lambda * S.lambda.transpose();
        for (int a = 0; a < S.tau; ++a)
            for (int b = 0; b < S.tau; ++b)
                if (a != b) CHECK(std::abs(G(a, b)) < 1e-9);
    }
    SUBCASE("entries stay within [-1, 1]") {
        const tsc::StructureMatrix S = tsc::build_trigonometric(3, 17);
        CHECK(S.lambda.maxCoeff() <= 1.0 + 1e-15);
        CHECK(S.lambda.minCoeff() >= -1.0 - 1e-15);
    }
    SUBCASE("too many rows rejected") {
        CHECK_THROWS_AS(tsc::build_trigonometric(3, 6), std::invalid_argument);
        CHECK_THROWS_AS(tsc::build_trigonometric(-1, 6), std::invalid_argument);
    }
}

TEST_CASE("fold_observations moves entries to t mod tau") {
    tsc::ObservationSet obs;
    obs.d = 5;
    obs.T = 40;
    obs.entries = {{3, 27, 1.0}, {0, 0, 2.0}, {4, 25, 3.0}, {4, 25, 4.0}};
    const tsc::ObservationSet folded = tsc::fold_observations(obs, 25);
    CHECK(folded.T == 25);
    CHECK(folded.d == 5);
    REQUIRE(folded.n() == 4);
    CHECK(folded.entries[0].j == 3);
    CHECK(folded.entries[0].t == 2);
    CHECK(folded.entries[2].t == 0);
    CHECK(folded.entries[3].t == 0);  // collision kept as duplicate

    const tsc::ObservationSet to_zero = tsc::fold_observations(obs, 1);
    for (const auto& e : to_zero.entries) CHECK(e.t == 0);

    const tsc::ObservationSet twice = tsc::fold_observations(folded, 25);
    for (int i = 0; i < folded.n(); ++i) {
        CHECK(twice.entries[i].t == folded.entries[i].t);
        CHECK(twice.entries[i].y == folded.entries[i].y);
    }
}

TEST_CASE("identity fit equals periodic fit when tau == T") {
    tsc::SimulationSpec spec;
    spec.d = 12;
    spec.T = 8;
    spec.tau = 8;
    spec.k = 2;
    spec.structure_kind = tsc::StructureKind::Periodic;
    spec.sigma_eps = 0.0;
    spec.observe_fraction = 0.8;
    spec.seed = 99;
    const tsc::SimulationResult sim = tsc::simulate(spec);

    tsc::AlsConfig cfg;
    cfg.seed = 5;
    const double risk_identity =
        tsc::als_fit(sim.obs, tsc::build_identity(8), 2, cfg).fitted_risk;
    const double risk_periodic =
        tsc::als_fit(sim.obs, tsc::build_periodic(8, 8), 2, cfg).fitted_risk;
    CHECK(risk_identity == doctest::Approx(risk_periodic).epsilon(1e-10));
}

TEST_CASE("folding then fitting flat equals fitting with periodic structure") {
    tsc::SimulationSpec spec;
    spec.d = 15;
    spec.T = 20;
    spec.tau = 5;
    spec.k = 2;
    spec.sigma_eps = 0.1;
    spec.ar_error = tsc::NoiseLaw::uniform(1.0);
    spec.observe_fraction = 0.6;
    spec.seed = 123;
    const tsc::SimulationResult sim = tsc::simulate(spec);

    tsc::AlsConfig cfg;
    cfg.seed = 7;
    const double direct =
        tsc::als_fit(sim.obs, tsc::build_periodic(5, 20), 2, cfg).fitted_risk;
    const double folded =
        tsc::als_fit(tsc::fold_observations(sim.obs, 5), tsc::build_identity(5), 2, cfg)
            .fitted_risk;
    CHECK(direct == doctest::Approx(folded).epsilon(1e-8));
}
