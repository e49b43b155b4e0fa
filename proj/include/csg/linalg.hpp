// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace csg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Largest relative asymmetry max|A - A^T| / max|A|; 0 for the zero matrix.
inline double asymmetry(const Matrix& a) {
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

/// 2-norm condition number of a symmetric matrix from its eigenvalues.
/// Returns +inf for a matrix with a zero eigenvalue.
inline double symmetric_condition(const Matrix& a) {
    if (a.rows() == 0) return 1.0;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
    const Vector mags = eig.eigenvalues().cwiseAbs();
    const double lo = mags.minCoeff();
    const double hi = mags.maxCoeff();
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

/// Condition of a diagonal matrix given its diagonal.
inline double diagonal_condition(const Vector& diag) {
    const Vector mags = diag.cwiseAbs();
    const double lo = mags.minCoeff();
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return mags.maxCoeff() / lo;
}

/// Infinity norm (max absolute row sum).
inline double inf_norm(const Matrix& a) {
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

} // namespace linalg
} // namespace csg
