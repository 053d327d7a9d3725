#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ioncavity/errors.hpp"
#include "ioncavity/linalg.hpp"

using namespace ioncavity;

TEST_CASE("linear solve recovers a known solution") {
    SquareMatrix a(3);
    a(0, 0) = 4.0;  a(0, 1) = 1.0;  a(0, 2) = 2.0;
    a(1, 0) = 1.0;  a(1, 1) = 5.0;  a(1, 2) = 1.0;
    a(2, 0) = 2.0;  a(2, 1) = 1.0;  a(2, 2) = 6.0;
    const std::vector<double> x_true = {1.5, -2.0, 0.25};
    std::vector<double> b(3, 0.0);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            b[r] += a(r, c) * x_true[c];
        }
    }
    const std::vector<double> x = solve_linear(a, b);
    for (int i = 0; i < 3; ++i) {
        CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-13));
    }
}

TEST_CASE("linear solve needs pivoting for a zero leading element") {
    SquareMatrix a(2);
    a(0, 0) = 0.0;  a(0, 1) = 1.0;
    a(1, 0) = 1.0;  a(1, 1) = 0.0;
    const std::vector<double> x = solve_linear(a, {3.0, 7.0});
    CHECK(x[0] == doctest::Approx(7.0));
    CHECK(x[1] == doctest::Approx(3.0));
}

TEST_CASE("singular systems raise a numeric error") {
    SquareMatrix a(2);
    a(0, 0) = 1.0;  a(0, 1) = 2.0;
    a(1, 0) = 2.0;  a(1, 1) = 4.0;
    CHECK_THROWS_AS(solve_linear(a, {1.0, 2.0}), NumericError);
}

TEST_CASE("jacobi diagonalisation reproduces known eigenpairs") {
    // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
    SquareMatrix a(2);
    a(0, 0) = 2.0;  a(0, 1) = 1.0;
    a(1, 0) = 1.0;  a(1, 1) = 2.0;
    const EigenDecomposition eig = jacobi_eigensolve(a);
    REQUIRE(eig.values.size() == 2);
    CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eig.values[1] == doctest::Approx(3.0).epsilon(1e-14));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(eig.vectors(0, 0)) == doctest::Approx(inv_sqrt2));
    CHECK(std::abs(eig.vectors(0, 1)) == doctest::Approx(inv_sqrt2));
}

TEST_CASE("eigenvalues arrive sorted with a deterministic sign convention") {
    SquareMatrix a(4);
    const double diag[4] = {7.0, -1.0, 4.0, 2.5};
    for (int i = 0; i < 4; ++i) {
        a(i, i) = diag[i];
    }
    const EigenDecomposition eig = jacobi_eigensolve(a);
    CHECK(eig.values[0] == doctest::Approx(-1.0));
    CHECK(eig.values[1] == doctest::Approx(2.5));
    CHECK(eig.values[2] == doctest::Approx(4.0));
    CHECK(eig.values[3] == doctest::Approx(7.0));
    for (int j = 0; j < 4; ++j) {
        double first_nonzero = 0.0;
        for (int i = 0; i < 4; ++i) {
            if (std::abs(eig.vectors(i, j)) > 1e-12) {
                first_nonzero = eig.vectors(i, j);
                break;
            }
        }
        CHECK(first_nonzero > 0.0);
    }
}

TEST_CASE("jacobi decomposition reconstructs the input matrix") {
    const int n = 6;
    SquareMatrix a(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double value = 1.0 / (1.0 + i + j) + (i == j ? 2.0 * i : 0.0);
            a(i, j) = value;
            a(j, i) = value;
        }
    }
    const EigenDecomposition eig = jacobi_eigensolve(a);

    // Orthonormal columns.
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            double dot = 0.0;
            for (int i = 0; i < n; ++i) {
                dot += eig.vectors(i, p) * eig.vectors(i, q);
            }
            CHECK(dot == doctest::Approx(p == q ? 1.0 : 0.0).epsilon(1e-12));
        }
    }

    // A = U diag(values) U^T.
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double rebuilt = 0.0;
            for (int k = 0; k < n; ++k) {
                rebuilt += eig.vectors(i, k) * eig.values[k] * eig.vectors(j, k);
            }
            CHECK(rebuilt == doctest::Approx(a(i, j)).epsilon(1e-11));
        }
    }
}
