#pragma once

#include "illposed/bidiag.hpp"
#include "illposed/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace illposed {

enum class Method { tsvd, lsqr, hybrid_lsqr };

std::string method_name(Method m);

/// Per-iteration record of one solver run, k = 1..kmax.
///
/// residual_norms holds ||b - A x^{(k)}|| for tsvd and hybrid paths; the
/// lsqr path records the projected residual || ||b|| e_1 - B_k y^{(k)} ||,
/// which agrees with the full residual to the cross-check tolerance while
/// the factorization is above the round-off floor and is exactly
/// non-increasing in k.
struct SolverPath {
  Method method = Method::lsqr;
  std::vector<Vector> iterates;
  std::vector<double> residual_norms;
  std::vector<double> solution_norms;
  std::optional<std::vector<double>> relative_errors;  // ||x - x_true|| / ||x_true||
  std::vector<int> inner_truncation;                   // hybrid only

  int kmax() const { return static_cast<int>(iterates.size()); }
};

/// Truncated SVD solution sum_{i<=k} (u_i^T b / sigma_i) v_i.
/// Requires 1 <= k <= n and sigma_k > 0.
Vector tsvd_solve(const SvdTriplet& svd, const Vector& b, int k);

/// TSVD path for k = 1..kmax, truncated early if a singular value hits zero.
SolverPath tsvd_path(const SvdTriplet& svd, const Matrix& A, const Vector& b, int kmax,
                     const Vector* x_true);

/// LSQR iterates x^{(k)} = Q_k y^{(k)}, y^{(k)} minimizing
/// || ||b|| e_1 - B_k y || via Givens QR of B_k recomputed per k. The
/// projected residual is cross-checked against ||b - A x^{(k)}|| at every
/// step above the round-off floor.
SolverPath lsqr_path(const Bidiagonalization& f, const Vector& b, int kmax,
                     const Vector* x_true);

/// LSQR filter factors f_i^{(k)} = 1 - prod_j (theta_j^2 - sigma_i^2)/theta_j^2
/// with theta_j the singular values of B_k (all positive), accumulated in the
/// cancellation-free form f <- f + (sigma_i/theta_j)^2 (1-f). The squares are
/// what make sum_i f_i (u_i^T b / sigma_i) v_i reproduce the LSQR iterate.
std::vector<double> filter_factors(const SvdTriplet& svd, const std::vector<double>& ritz_sigmas,
                                   int k);

/// Inner regularization rule for the hybrid solver: discrete L-curve over
/// the projected TSVD solutions (default) or a fixed truncation rank.
struct TruncationRule {
  enum class Kind { inner_lcurve, fixed_rank };
  Kind kind = Kind::inner_lcurve;
  int rank = 0;

  static TruncationRule lcurve() { return {Kind::inner_lcurve, 0}; }
  static TruncationRule fixed(int r) { return {Kind::fixed_rank, r}; }
};

/// Hybrid LSQR: at each outer k the SVD of B_k is truncated to rank r(k)
/// chosen by `inner`, and x^{(k)} = Q_k (B_k truncated)^+ ||b|| e_1. The
/// chosen ranks are recorded in inner_truncation. With the L-curve rule,
/// outer steps too short to expose a corner fall back to r(k) = k.
SolverPath hybrid_lsqr_path(const Bidiagonalization& f, const Vector& b, int kmax,
                            TruncationRule inner, const Vector* x_true);

}  // namespace illposed
