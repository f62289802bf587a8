#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace illposed {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kMachineEps = 2.220446049250313e-16;

/// Thin SVD A = U * diag(sigma) * V^T with sigma descending and the
/// largest-magnitude entry of each column of V nonnegative, so repeated
/// factorizations of the same matrix are bitwise identical.
struct SvdTriplet {
  Matrix U;      // m x n, orthonormal columns
  Vector sigma;  // length n, descending, nonnegative
  Matrix V;      // n x n, orthogonal
};

/// Full SVD of a tall-or-square matrix. Throws std::invalid_argument on a
/// wide or non-finite input and std::runtime_error if the underlying
/// iteration fails; never returns silent NaNs.
SvdTriplet svd(const Matrix& A);

/// Largest singular value; 0 for the zero matrix. Wide inputs are handled
/// by transposing.
double spectral_norm(const Matrix& A);

/// ||sin Theta(span X, span Y)||_2 for two n x k matrices with orthonormal
/// columns, computed as sqrt(1 - sigma_min(X^T Y)^2) and clamped to [0, 1].
/// Orthonormality is checked to 1e-8; violations name the offending operand.
double sin_theta_max(const Matrix& X, const Matrix& Y);

/// Orthonormal basis of the column span of M (thin QR). M must have full
/// column rank.
Matrix orthonormal_basis(const Matrix& M);

}  // namespace illposed
