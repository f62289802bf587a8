#pragma once

#include "illposed/linalg.hpp"
#include "illposed/solvers.hpp"

#include <optional>
#include <vector>

namespace illposed {

/// SVD coefficients of a noisy right-hand side, the data behind the
/// discrete Picard condition.
struct PicardData {
  Vector sigma;         // descending singular values
  Vector coeffs_clean;  // |u_i^T b_hat|
  Vector coeffs_noise;  // |u_i^T e|
  Vector coeffs_total;  // |u_i^T b|
};

PicardData make_picard_data(const SvdTriplet& svd, const Vector& b_hat, const Vector& e);

struct TransitionPoint {
  int k0 = 0;
  bool found = false;  // false: no k satisfies both inequalities; k0 = n
};

/// Smallest k with |u_k^T b_hat| > |u_{k+1}^T e| and
/// |u_{k+1}^T b_hat| <= |u_{k+1}^T e|.
TransitionPoint transition_k0(const PicardData& p);

/// Discrete L-curve corner: index (0-based, into the input sequences) of
/// maximum circumscribed-circle curvature over consecutive point triples of
/// (log residual norm, log solution norm), after dropping points that break
/// residual-decreasing/solution-increasing monotonicity. Ties break toward
/// the smaller index. Returns nullopt when fewer than 4 points survive
/// pruning or the points are collinear.
std::optional<int> try_lcurve_corner(const std::vector<double>& log_resid,
                                     const std::vector<double>& log_soln);

/// Throwing form of try_lcurve_corner ("no corner" -> std::runtime_error).
int lcurve_corner(const std::vector<double>& log_resid, const std::vector<double>& log_soln);

/// argmin_k of the recorded relative errors; ties toward smaller k.
/// Returns the iteration number k (1-based). Evaluation-only oracle.
int oracle_best_k(const SolverPath& path);

}  // namespace illposed
