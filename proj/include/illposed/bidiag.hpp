#pragma once

#include "illposed/linalg.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace illposed {

/// Raised when a candidate Lanczos vector falls below the breakdown
/// threshold. Steps completed before the breakdown remain valid.
class BreakdownError : public std::runtime_error {
 public:
  BreakdownError(int at_step, const std::string& what)
      : std::runtime_error(what), at_step_(at_step) {}

  int at_step() const { return at_step_; }

 private:
  int at_step_;
};

struct BidiagOptions {
  /// Candidate norms below breakdown_factor * sigma1_estimate terminate the
  /// process. The default 10 n eps_mach detects exact rank deficiency; pass
  /// 0 to run through the round-off floor (quantities there are flagged by
  /// the diagnostics instead).
  double breakdown_factor = -1.0;  // -1 => 10 * n * eps_mach
};

/// Golub-Kahan/Lanczos bidiagonalization of (A, b) with full two-pass
/// reorthogonalization of both bases,
///
///   A Q_k = P_{k+1} B_k,
///   A^T P_{k+1} = Q_k B_k^T + alpha_{k+1} q_{k+1} e_{k+1}^T,
///
/// extended incrementally. After extend() has completed k steps the object
/// exposes P_{k+1}, Q_k, the (k+1) x k lower bidiagonal B_k, and the
/// lookahead pair (alpha_{k+1}, q_{k+1}); start() seeds p_1 = b/||b||,
/// q_1 = A^T p_1 / alpha_1.
class Bidiagonalization {
 public:
  static Bidiagonalization start(const Matrix& A, const Vector& b, BidiagOptions opts = {});

  /// Run `steps` further Lanczos steps. Throws BreakdownError if a candidate
  /// norm falls below the threshold; completed steps are kept.
  void extend(int steps);

  /// Number of completed steps: B_k, Q_k, P_{k+1} and alpha_{k+1} are
  /// available for every k <= this. Zero right after start().
  int k() const { return stage_ - 1; }

  /// Largest k for which B_k can be assembled. Equal to k() normally; one
  /// more after a breakdown, whose final (possibly tiny) beta is recorded so
  /// the saturated projected problem remains solvable.
  int max_projected_k() const { return static_cast<int>(betas_.size()); }

  double alpha(int j) const;  // alpha_j, 1 <= j <= k()+1
  double beta(int j) const;   // beta_j,  2 <= j <= max_projected_k()+1

  Matrix P(int cols) const;  // first `cols` left Lanczos vectors
  Matrix Q(int cols) const;  // first `cols` right Lanczos vectors

  /// The (k+1) x k lower bidiagonal projected matrix B_k, k <= max_projected_k().
  Matrix B(int k) const;

  /// Largest singular value of the current projected matrix (also the
  /// internal sigma_1 estimate used by the breakdown test).
  double sigma1_estimate() const { return sigma1_est_; }

  std::optional<int> breakdown_step() const { return breakdown_; }

  const Matrix& matrix() const { return A_; }
  const Vector& rhs() const { return b_; }
  double rhs_norm() const { return b_norm_; }

 private:
  Bidiagonalization() = default;

  void advance_once();
  void reorthogonalize(Vector& v, const Matrix& basis, int cols) const;

  Matrix A_;
  Vector b_;
  double b_norm_ = 0.0;
  Matrix P_;  // m x stage_
  Matrix Q_;  // n x stage_
  std::vector<double> alphas_;  // alpha_1 .. alpha_stage
  std::vector<double> betas_;   // beta_2 .. beta_stage
  int stage_ = 0;               // number of (p_j, q_j, alpha_j) triples
  double tol_factor_ = 0.0;
  double sigma1_est_ = 0.0;
  std::optional<int> breakdown_;
};

/// Free-function form of Bidiagonalization::B.
Matrix projected_matrix(const Bidiagonalization& f, int k);

}  // namespace illposed
