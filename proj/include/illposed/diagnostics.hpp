#pragma once

#include "illposed/bidiag.hpp"
#include "illposed/linalg.hpp"
#include "illposed/problems.hpp"
#include "illposed/selection.hpp"

#include <vector>

namespace illposed {

/// Per-step record of the rank-approximation and subspace-angle quantities.
/// Rows with roundoff_flag set sit at or past the machine-precision floor of
/// the bidiagonalization; no inequality is asserted there.
struct DiagnosticsRow {
  int k = 0;
  double gamma = 0.0;           // ||A - P_{k+1} B_k Q_k^T||_2
  double alpha_next = 0.0;      // alpha_{k+1}
  double sigma_next = 0.0;      // sigma_{k+1}
  double sin_theta = 0.0;       // ||sin Theta(V_k, K_k(A^T A, A^T b))||_2
  double c_k = 0.0;             // max_{j>k}|u_j^T b| / min_{j<=k}|u_j^T b|
  double bound_eqres1 = 0.0;    // (sigma_{k+1}/sigma_k) c_k sqrt(k(n-k))
  double bound_thm22_hi = 0.0;  // sigma_{k+1} + sigma_1 sin_theta
  double ritz_residual = 0.0;   // ||A^T U~_k - V~_k Theta_k^T||_2
  bool roundoff_flag = false;
};

struct DiagnosticsTable {
  std::vector<DiagnosticsRow> rows;
  double sigma1 = 0.0;
};

/// The (n-k) x k coupling block whose norm fixes the angle between the
/// Krylov subspace and the dominant right singular subspace:
/// ||sin Theta||_2 = ||Delta_k|| / sqrt(1 + ||Delta_k||^2).
struct DeltaK {
  Matrix delta;
  double frobenius = 0.0;
  double two_norm = 0.0;
};

/// Quality of the Lanczos rank-k approximation,
/// gamma_k = ||A - P_{k+1} B_k Q_k^T||_2, evaluated as ||A (I - Q_k Q_k^T)||_2
/// with an iterative largest-singular-value solve of the projected operator.
double gamma(const Matrix& A, const Bidiagonalization& f, int k);

struct SinThetaKrylov {
  double value = 0.0;
  bool repeated_sigma_warning = false;  // sigma_k and sigma_{k+1} within 1e-12 rel
};

/// ||sin Theta(V_k, span Q_k)||_2 where V_k holds the k dominant right
/// singular vectors.
SinThetaKrylov sin_theta_krylov(const SvdTriplet& svd, const Bidiagonalization& f, int k);

/// Delta_k = D_2 T_{k2} T_{k1}^{-1} D_1^{-1}, with T_{k2} T_{k1}^{-1} entries
/// evaluated directly as Lagrange polynomials
/// L_i(sigma_j^2) = prod_{l != i} (sigma_l^2 - sigma_j^2)/(sigma_l^2 - sigma_i^2);
/// no Vandermonde system is ever inverted. Guards: k <= 40, consecutive
/// sigma ratios >= 1 + 1e-6 over the Lagrange set, Picard coefficients
/// |u_i^T b| above 1e3 eps ||b|| for i <= k.
DeltaK delta_k(const SvdTriplet& svd, const Vector& b, int k);

/// c_k of the coefficient-ratio estimate; requires 1 <= k < n and a nonzero
/// denominator.
double coefficient_ratio(const PicardData& p, int k);

/// || A^T U~_k - V~_k Theta_k^T ||_2 for the Ritz triplets assembled from the
/// full SVD of B_k (U~_k = P_{k+1} W_k, V~_k = Q_k S_k); also verifies
/// A V~_k = U~_k Theta_k to 1e-8 sigma_1.
double ritz_triplet_residual(const Matrix& A, const Bidiagonalization& f, int k);

/// Assemble the full table for k = 1..kmax. The round-off flag trips when
/// alpha_{k+1} first falls below 1e-13 sigma_1 and stays set afterwards.
DiagnosticsTable build_table(const NoisyInstance& instance, const Bidiagonalization& f,
                             const SvdTriplet& svd, int kmax);

}  // namespace illposed
