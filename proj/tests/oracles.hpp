#pragma once

// Test-only oracles, kept independent of the implementation paths they check.

#include <Eigen/Dense>

#include "septrap/fockspace.hpp"

namespace septrap::oracles {

// Matrix exponential of i η (a + a†) on a truncated space via its
// eigendecomposition; element <m+k| e^{iη(a+a†)} |m> is the displacement
// matrix element the sideband Rabi frequencies must reproduce.
inline Matrix displacement_operator(double eta, int n_max) {
    const int d = n_max + 1;
    const Matrix a = annihilation_matrix(d);
    Eigen::MatrixXd x = (eta * (a + Matrix(a.adjoint()))).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
    Matrix u = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const Complex phase = std::polar(1.0, es.eigenvalues()[i]);
        u += phase *
             (es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose()).cast<Complex>();
    }
    return u;
}

} // namespace septrap::oracles
