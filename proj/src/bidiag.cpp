#include "illposed/bidiag.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace illposed {

Bidiagonalization Bidiagonalization::start(const Matrix& A, const Vector& b,
                                           BidiagOptions opts) {
  if (A.rows() != b.size()) {
    throw std::invalid_argument("bidiag: dimension mismatch between A and b");
  }
  Bidiagonalization f;
  f.A_ = A;
  f.b_ = b;
  f.b_norm_ = b.norm();
  if (f.b_norm_ == 0.0) {
    throw BreakdownError(1, "bidiag: b is zero");
  }
  f.tol_factor_ = opts.breakdown_factor >= 0.0
                      ? opts.breakdown_factor
                      : 10.0 * static_cast<double>(A.cols()) * kMachineEps;

  const Index m = A.rows();
  const Index n = A.cols();
  f.P_.resize(m, 8);
  f.Q_.resize(n, 8);
  f.P_.col(0) = b / f.b_norm_;
  Vector r = A.transpose() * f.P_.col(0);
  const double a1 = r.norm();
  if (a1 == 0.0) {
    throw BreakdownError(1, "bidiag: A^T b is zero");
  }
  f.Q_.col(0) = r / a1;
  f.alphas_.push_back(a1);
  f.sigma1_est_ = a1;
  f.stage_ = 1;
  return f;
}

void Bidiagonalization::reorthogonalize(Vector& v, const Matrix& basis, int cols) const {
  // Two passes of modified Gram-Schmidt against every previous column.
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < cols; ++j) {
      v -= (basis.col(j).dot(v)) * basis.col(j);
    }
  }
}

void Bidiagonalization::advance_once() {
  const int s = stage_;
  if (P_.cols() < s + 1) {
    P_.conservativeResize(Eigen::NoChange, 2 * s);
    Q_.conservativeResize(Eigen::NoChange, 2 * s);
  }

  Vector u = A_ * Q_.col(s - 1) - alphas_.back() * P_.col(s - 1);
  reorthogonalize(u, P_, s);
  const double beta = u.norm();
  if (beta <= tol_factor_ * sigma1_est_ || beta == 0.0) {
    // Record the final beta so B_s stays assemblable for the projected solve.
    breakdown_ = s + 1;
    betas_.push_back(beta);
    throw BreakdownError(s + 1, "bidiag: breakdown at step " + std::to_string(s + 1) +
                                    " (beta below threshold)");
  }
  P_.col(s) = u / beta;

  Vector r = A_.transpose() * P_.col(s) - beta * Q_.col(s - 1);
  reorthogonalize(r, Q_, s);
  const double alpha = r.norm();
  if (alpha <= tol_factor_ * sigma1_est_ || alpha == 0.0) {
    breakdown_ = s + 1;
    betas_.push_back(beta);
    throw BreakdownError(s + 1, "bidiag: breakdown at step " + std::to_string(s + 1) +
                                    " (alpha below threshold)");
  }
  Q_.col(s) = r / alpha;

  betas_.push_back(beta);
  alphas_.push_back(alpha);
  stage_ = s + 1;

  // sigma_1 estimate: largest singular value of the projected matrix so far.
  Eigen::JacobiSVD<Matrix> dec(B(stage_ - 1));
  sigma1_est_ = std::max(sigma1_est_, dec.singularValues()(0));
}

void Bidiagonalization::extend(int steps) {
  if (steps < 0) throw std::invalid_argument("bidiag: negative step count");
  if (breakdown_) {
    throw BreakdownError(*breakdown_, "bidiag: factorization already broke down");
  }
  for (int i = 0; i < steps; ++i) {
    advance_once();
  }
}

double Bidiagonalization::alpha(int j) const {
  if (j < 1 || j > stage_) throw std::out_of_range("bidiag: alpha index");
  return alphas_[static_cast<std::size_t>(j - 1)];
}

double Bidiagonalization::beta(int j) const {
  if (j < 2 || j > max_projected_k() + 1) throw std::out_of_range("bidiag: beta index");
  return betas_[static_cast<std::size_t>(j - 2)];
}

Matrix Bidiagonalization::P(int cols) const {
  if (cols < 1 || cols > stage_) throw std::out_of_range("bidiag: P columns");
  return P_.leftCols(cols);
}

Matrix Bidiagonalization::Q(int cols) const {
  if (cols < 1 || cols > stage_) throw std::out_of_range("bidiag: Q columns");
  return Q_.leftCols(cols);
}

Matrix Bidiagonalization::B(int k) const {
  if (k < 1 || k > max_projected_k()) throw std::out_of_range("bidiag: B index");
  Matrix B = Matrix::Zero(k + 1, k);
  for (int j = 0; j < k; ++j) {
    B(j, j) = alphas_[static_cast<std::size_t>(j)];
    B(j + 1, j) = betas_[static_cast<std::size_t>(j)];
  }
  return B;
}

Matrix projected_matrix(const Bidiagonalization& f, int k) { return f.B(k); }

}  // namespace illposed
