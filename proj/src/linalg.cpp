#include "ioncavity/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ioncavity/errors.hpp"

namespace ioncavity {

SquareMatrix SquareMatrix::identity(int n) {
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> solve_linear(SquareMatrix a, std::vector<double> b) {
    const int n = a.size();
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row) {
            if (std::abs(a(row, col)) > std::abs(a(pivot, col))) pivot = row;
        }
        if (std::abs(a(pivot, col)) < 1e-300) {
            throw NumericError("singular matrix in linear solve");
        }
        if (pivot != col) {
            for (int j = col; j < n; ++j) std::swap(a(col, j), a(pivot, j));
            std::swap(b[col], b[pivot]);
        }
        for (int row = col + 1; row < n; ++row) {
            const double f = a(row, col) / a(col, col);
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a(row, j) -= f * a(col, j);
            b[row] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int row = n - 1; row >= 0; --row) {
        double s = b[row];
        for (int j = row + 1; j < n; ++j) s -= a(row, j) * x[j];
        x[row] = s / a(row, row);
    }
    return x;
}

namespace {

double off_diagonal_norm(const SquareMatrix& a) {
    const int n = a.size();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

} // namespace

EigenDecomposition jacobi_eigensolve(SquareMatrix a, double tolerance,
                                     int max_sweeps) {
    const int n = a.size();
    SquareMatrix v = SquareMatrix::identity(n);

    int sweep = 0;
    while (off_diagonal_norm(a) > tolerance) {
        if (++sweep > max_sweeps) {
            throw NumericError("Jacobi eigensolver did not converge in " +
                               std::to_string(max_sweeps) + " sweeps");
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Rotation angle that zeroes a(p,q); the stable formulation
                // picks the smaller of the two candidate angles.
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0)
                    ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                    : -1.0 / (-theta + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p);
                const double aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = a(i, p);
                    const double aiq = a(i, q);
                    a(i, p) = aip - s * (aiq + tau * aip);
                    a(p, i) = a(i, p);
                    a(i, q) = aiq + s * (aip - tau * aiq);
                    a(q, i) = a(i, q);
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = vip - s * (viq + tau * vip);
                    v(i, q) = viq + s * (vip - tau * viq);
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return a(i, i) < a(j, j); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = SquareMatrix(n);
    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        out.values[j] = a(src, src);
        // Deterministic sign: first component of noticeable size is positive.
        double sign = 1.0;
        for (int i = 0; i < n; ++i) {
            if (std::abs(v(i, src)) > 1e-12) {
                sign = v(i, src) > 0.0 ? 1.0 : -1.0;
                break;
            }
        }
        for (int i = 0; i < n; ++i) out.vectors(i, j) = sign * v(i, src);
    }
    return out;
}

} // namespace ioncavity
