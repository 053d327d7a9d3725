#pragma once

#include <vector>

namespace ioncavity {

// Row-major square matrix, sized for chains of at most a few tens of ions.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {}

    static SquareMatrix identity(int n);

    int size() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }
    const std::vector<double>& data() const { return a_; }

private:
    int n_ = 0;
    std::vector<double> a_;
};

// Solves A x = b by Gaussian elimination with partial pivoting.
// Throws NumericError on a (numerically) singular matrix.
std::vector<double> solve_linear(SquareMatrix a, std::vector<double> b);

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    SquareMatrix vectors;        // columns are the corresponding eigenvectors
};

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Sweeps run until the off-diagonal Frobenius norm drops below `tolerance`.
// Eigenpairs are returned ascending; each eigenvector column is normalised
// and has its first non-zero component made positive so repeated runs give
// identical output.
EigenDecomposition jacobi_eigensolve(SquareMatrix a, double tolerance = 1e-12,
                                     int max_sweeps = 64);

} // namespace ioncavity
