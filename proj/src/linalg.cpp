#include "illposed/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace illposed {

namespace {

void require_finite(const Matrix& A, const char* who) {
  if (!A.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
  }
}

}  // namespace

SvdTriplet svd(const Matrix& A) {
  require_finite(A, "svd");
  if (A.rows() < A.cols()) {
    throw std::invalid_argument("svd: requires rows >= cols");
  }
  Eigen::BDCSVD<Matrix> dec(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw std::runtime_error("svd: iteration did not converge");
  }
  SvdTriplet out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  if (!out.sigma.allFinite() || !out.U.allFinite() || !out.V.allFinite()) {
    throw std::runtime_error("svd: non-finite factors");
  }
  for (Index j = 0; j < out.V.cols(); ++j) {
    Index imax = 0;
    out.V.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.V(imax, j) < 0.0) {
      out.V.col(j) = -out.V.col(j);
      out.U.col(j) = -out.U.col(j);
    }
  }
  return out;
}

double spectral_norm(const Matrix& A) {
  require_finite(A, "spectral_norm");
  if (A.size() == 0) return 0.0;
  if (A.rows() >= A.cols()) return svd(A).sigma(0);
  Matrix At = A.transpose();
  return svd(At).sigma(0);
}

double sin_theta_max(const Matrix& X, const Matrix& Y) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols()) {
    throw std::invalid_argument("sin_theta_max: X and Y must have equal shape");
  }
  if (X.cols() < 1 || X.cols() > X.rows()) {
    throw std::invalid_argument("sin_theta_max: need 1 <= k <= n columns");
  }
  const Index k = X.cols();
  const Matrix I = Matrix::Identity(k, k);
  if ((X.transpose() * X - I).norm() > 1e-8) {
    throw std::invalid_argument("sin_theta_max: X does not have orthonormal columns");
  }
  if ((Y.transpose() * Y - I).norm() > 1e-8) {
    throw std::invalid_argument("sin_theta_max: Y does not have orthonormal columns");
  }
  // ||(I - Y Y^T) X||_2: identical to sqrt(1 - sigma_min(X^T Y)^2) for
  // orthonormal inputs but resolves small angles to full precision instead
  // of the sqrt(eps) cancellation floor.
  Eigen::JacobiSVD<Matrix> dec(X - Y * (Y.transpose() * X));
  return std::clamp(dec.singularValues()(0), 0.0, 1.0);
}

Matrix orthonormal_basis(const Matrix& M) {
  require_finite(M, "orthonormal_basis");
  if (M.rows() < M.cols()) {
    throw std::invalid_argument("orthonormal_basis: requires rows >= cols");
  }
  Eigen::HouseholderQR<Matrix> qr(M);
  Matrix Q = qr.householderQ() * Matrix::Identity(M.rows(), M.cols());
  return Q;
}

}  // namespace illposed
