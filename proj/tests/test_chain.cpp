#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ioncavity/chain.hpp"
#include "ioncavity/constants.hpp"
#include "ioncavity/errors.hpp"

using namespace ioncavity;

namespace {

const double kOmega444 = constants::two_pi * 444e3;

ChainSolution solved(int ions, double omega = kOmega444) {
    TrapConfig config;
    config.num_ions = ions;
    return solve_chain(config, omega);
}

double dimensionless(const ChainSolution& solution, int i) {
    return solution.positions[static_cast<size_t>(i)] / solution.length_scale;
}

} // namespace

TEST_CASE("length scale matches its closed form for calcium at 444 kHz") {
    const TrapConfig config;
    CHECK(length_scale(config, kOmega444) ==
          doctest::Approx(7.642037115301408e-06).epsilon(1e-12));
    CHECK_THROWS_AS(length_scale(config, 0.0), std::domain_error);
    CHECK_THROWS_AS(length_scale(config, -1.0), std::domain_error);
}

TEST_CASE("a single ion sits at the trap centre with a unit mode") {
    const ChainSolution solution = solved(1);
    REQUIRE(solution.num_ions == 1);
    CHECK(solution.positions[0] == 0.0);
    CHECK(solution.mode_eigenvalues[0] == doctest::Approx(1.0));
    CHECK(solution.mode_component(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("small-chain equilibria match energy-minimisation references") {
    // Dimensionless positions, frozen from an independent minimiser.
    const ChainSolution two = solved(2);
    CHECK(dimensionless(two, 1) == doctest::Approx(0.6299605249474366).epsilon(1e-10));
    CHECK(dimensionless(two, 1) ==
          doctest::Approx(std::cbrt(0.25)).epsilon(1e-12));

    const ChainSolution three = solved(3);
    CHECK(dimensionless(three, 0) ==
          doctest::Approx(-1.077217345015942).epsilon(1e-10));
    CHECK(std::abs(dimensionless(three, 1)) < 1e-12);
    CHECK(dimensionless(three, 2) ==
          doctest::Approx(std::cbrt(1.25)).epsilon(1e-12));

    const ChainSolution four = solved(4);
    CHECK(dimensionless(four, 2) ==
          doctest::Approx(0.4543792806856709).epsilon(1e-10));
    CHECK(dimensionless(four, 3) ==
          doctest::Approx(1.4368019919241755).epsilon(1e-10));

    const ChainSolution five = solved(5);
    CHECK(std::abs(dimensionless(five, 2)) < 1e-12);
    CHECK(dimensionless(five, 3) ==
          doctest::Approx(0.8221007565680857).epsilon(1e-10));
    CHECK(dimensionless(five, 4) ==
          doctest::Approx(1.7429032118739347).epsilon(1e-10));
}

TEST_CASE("equilibria are ordered, antisymmetric and force balanced") {
    for (int ions = 2; ions <= 20; ++ions) {
        const ChainSolution solution = solved(ions);
        CAPTURE(ions);
        CHECK(force_balance_residual(solution) < 1e-12);
        for (int i = 1; i < ions; ++i) {
            CHECK(solution.positions[i] > solution.positions[i - 1]);
        }
        for (int i = 0; i < ions; ++i) {
            CHECK(solution.positions[i] ==
                  -solution.positions[static_cast<size_t>(ions - 1 - i)]);
        }
    }
}

TEST_CASE("gaps shrink towards the chain centre") {
    const ChainSolution seven = solved(7);
    double gaps[6];
    for (int i = 0; i < 6; ++i) {
        gaps[i] = seven.positions[i + 1] - seven.positions[i];
    }
    CHECK(gaps[0] > gaps[1]);
    CHECK(gaps[1] > gaps[2]);
    CHECK(gaps[2] == doctest::Approx(gaps[3]).epsilon(1e-12));
    CHECK(gaps[4] > gaps[3]);
    CHECK(gaps[5] > gaps[4]);
}

TEST_CASE("positions scale with frequency to the power -2/3") {
    const ChainSolution base = solved(3, kOmega444);
    const ChainSolution shifted = solved(3, 2.0 * kOmega444);
    const double expected = std::pow(2.0, -2.0 / 3.0);
    CHECK(shifted.positions[2] / base.positions[2] ==
          doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("mode spectra start with the uniform and stretch modes") {
    const ChainSolution three = solved(3);
    CHECK(three.mode_eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(three.mode_eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(three.mode_eigenvalues[2] == doctest::Approx(5.8).epsilon(1e-10));

    const ChainSolution four = solved(4);
    CHECK(four.mode_eigenvalues[2] ==
          doctest::Approx(5.809937300562424).epsilon(1e-10));
    CHECK(four.mode_eigenvalues[3] ==
          doctest::Approx(9.308350249774904).epsilon(1e-10));

    const ChainSolution five = solved(5);
    CHECK(five.mode_eigenvalues[2] ==
          doctest::Approx(5.817696146416536).epsilon(1e-10));
    CHECK(five.mode_eigenvalues[3] ==
          doctest::Approx(9.332153338765144).epsilon(1e-10));
    CHECK(five.mode_eigenvalues[4] ==
          doctest::Approx(13.474837218458712).epsilon(1e-10));

    // The two lowest eigenvalues are 1 and 3 for every chain length.
    for (int ions = 2; ions <= 12; ++ions) {
        const ChainSolution solution = solved(ions);
        CAPTURE(ions);
        CHECK(solution.mode_eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(solution.mode_eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-9));
    }
}

TEST_CASE("the first mode is uniform and the matrix is orthonormal") {
    const ChainSolution five = solved(5);
    const double uniform = 1.0 / std::sqrt(5.0);
    for (int i = 0; i < 5; ++i) {
        CHECK(five.mode_component(i, 0) == doctest::Approx(uniform).epsilon(1e-9));
    }
    for (int p = 0; p < 5; ++p) {
        for (int q = 0; q < 5; ++q) {
            double dot = 0.0;
            for (int i = 0; i < 5; ++i) {
                dot += five.mode_component(i, p) * five.mode_component(i, q);
            }
            CHECK(dot == doctest::Approx(p == q ? 1.0 : 0.0).epsilon(1e-11));
        }
    }
}

TEST_CASE("mode frequencies scale as the eigenvalue square root") {
    const ChainSolution two = solved(2);
    CHECK(two.mode_frequency(0) == doctest::Approx(kOmega444).epsilon(1e-12));
    CHECK(two.mode_frequency(1) ==
          doctest::Approx(kOmega444 * std::sqrt(3.0)).epsilon(1e-10));
}

TEST_CASE("normal modes refuse positions that are not in equilibrium") {
    ChainSolution bogus = solved(3);
    bogus.positions[1] += 0.1 * bogus.length_scale;
    bogus.mode_eigenvalues.clear();
    bogus.mode_matrix.clear();
    CHECK_THROWS_AS(normal_modes(bogus), NumericError);
}

TEST_CASE("zigzag heuristic flags weak radial confinement only") {
    TrapConfig config;
    config.num_ions = 5;
    // radial 1.23 MHz: five ions buckle near 620 kHz but not at 400 kHz.
    CHECK(chain_expected_linear(config, constants::two_pi * 400e3));
    CHECK_FALSE(chain_expected_linear(config, constants::two_pi * 620e3));

    config.num_ions = 2;
    CHECK(chain_expected_linear(config, constants::two_pi * 620e3));

    config.num_ions = 5;
    config.radial_frequency = 0.0;
    CHECK(chain_expected_linear(config, constants::two_pi * 620e3));
}
