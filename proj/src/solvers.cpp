#include "illposed/solvers.hpp"

#include "illposed/selection.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace illposed {

namespace {

constexpr double kRoundoffFloorFactor = 1e-13;

void record(SolverPath& path, Vector x, double residual, const Vector* x_true) {
  path.solution_norms.push_back(x.norm());
  path.residual_norms.push_back(residual);
  if (x_true != nullptr) {
    path.relative_errors->push_back((x - *x_true).norm() / x_true->norm());
  }
  path.iterates.push_back(std::move(x));
}

struct ProjectedSolve {
  Vector y;
  double residual;  // || ||b|| e_1 - B_k y ||
};

// Givens QR of the (k+1) x k lower bidiagonal B_k, right-hand side beta1 e_1.
ProjectedSolve solve_projected(const Bidiagonalization& f, int k, double beta1) {
  std::vector<double> rho(k), theta(k, 0.0), phi(k);
  double dbar = f.alpha(1);
  double phibar = beta1;
  for (int j = 1; j <= k; ++j) {
    const double bsub = f.beta(j + 1);
    const double r = std::hypot(dbar, bsub);
    if (r == 0.0) throw std::runtime_error("lsqr: projected QR encountered a zero column");
    const double c = dbar / r;
    const double s = bsub / r;
    rho[j - 1] = r;
    phi[j - 1] = c * phibar;
    phibar = -s * phibar;
    if (j < k) {
      theta[j - 1] = s * f.alpha(j + 1);
      dbar = c * f.alpha(j + 1);
    }
  }
  Vector y(k);
  y(k - 1) = phi[k - 1] / rho[k - 1];
  for (int j = k - 1; j >= 1; --j) {
    y(j - 1) = (phi[j - 1] - theta[j - 1] * y(j)) / rho[j - 1];
  }
  return ProjectedSolve{std::move(y), std::abs(phibar)};
}

// True while every alpha/beta up to step k sits above the round-off floor.
bool reliable_step(const Bidiagonalization& f, int k) {
  const double floor = kRoundoffFloorFactor * f.sigma1_estimate();
  for (int j = 1; j <= std::min(k + 1, f.k() + 1); ++j) {
    if (f.alpha(j) < floor) return false;
  }
  for (int j = 2; j <= std::min(k + 1, f.max_projected_k() + 1); ++j) {
    if (f.beta(j) < floor) return false;
  }
  return true;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::tsvd: return "tsvd";
    case Method::lsqr: return "lsqr";
    case Method::hybrid_lsqr: return "hybrid_lsqr";
  }
  return "unknown";
}

Vector tsvd_solve(const SvdTriplet& svd, const Vector& b, int k) {
  const Index n = svd.sigma.size();
  if (k < 1 || k > n) throw std::invalid_argument("tsvd_solve: k out of range");
  if (!(svd.sigma(k - 1) > 0.0)) throw std::invalid_argument("tsvd_solve: sigma_k is zero");
  Vector x = Vector::Zero(svd.V.rows());
  for (int i = 0; i < k; ++i) {
    x += (svd.U.col(i).dot(b) / svd.sigma(i)) * svd.V.col(i);
  }
  return x;
}

SolverPath tsvd_path(const SvdTriplet& svd, const Matrix& A, const Vector& b, int kmax,
                     const Vector* x_true) {
  const Index n = svd.sigma.size();
  if (kmax < 1 || kmax > n) throw std::invalid_argument("tsvd_path: kmax out of range");
  SolverPath path;
  path.method = Method::tsvd;
  if (x_true != nullptr) path.relative_errors.emplace();
  Vector x = Vector::Zero(svd.V.rows());
  const double sigma_floor = svd.sigma(0) * 1e-300;
  for (int k = 1; k <= kmax; ++k) {
    if (!(svd.sigma(k - 1) > sigma_floor)) break;  // numerically zero tail
    x += (svd.U.col(k - 1).dot(b) / svd.sigma(k - 1)) * svd.V.col(k - 1);
    record(path, x, (b - A * x).norm(), x_true);
  }
  return path;
}

SolverPath lsqr_path(const Bidiagonalization& f, const Vector& b, int kmax,
                     const Vector* x_true) {
  if (kmax < 1 || kmax > f.max_projected_k()) {
    throw std::invalid_argument("lsqr_path: factorization has not reached kmax steps");
  }
  const double beta1 = b.norm();
  SolverPath path;
  path.method = Method::lsqr;
  if (x_true != nullptr) path.relative_errors.emplace();
  for (int k = 1; k <= kmax; ++k) {
    ProjectedSolve sol = solve_projected(f, k, beta1);
    Vector x = f.Q(k) * sol.y;
    if (reliable_step(f, k)) {
      const double full = (b - f.matrix() * x).norm();
      if (std::abs(full - sol.residual) > 1e-8 * (beta1 + full)) {
        throw std::runtime_error("lsqr_path: projected residual disagrees with ||b - A x||");
      }
    }
    record(path, std::move(x), sol.residual, x_true);
  }
  return path;
}

std::vector<double> filter_factors(const SvdTriplet& svd, const std::vector<double>& ritz_sigmas,
                                   int k) {
  if (k < 1 || static_cast<int>(ritz_sigmas.size()) != k) {
    throw std::invalid_argument("filter_factors: need exactly k Ritz values");
  }
  for (double t : ritz_sigmas) {
    if (!(t > 0.0)) throw std::invalid_argument("filter_factors: zero Ritz value");
  }
  const Index n = svd.sigma.size();
  // The LSQR residual polynomial lives on the sigma^2 axis (CG applied to
  // the normal equations), so each product factor is
  // (theta_j^2 - sigma_i^2)/theta_j^2.
  std::vector<double> factors(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    double fi = 0.0;
    for (int j = 0; j < k; ++j) {
      const double r = svd.sigma(i) / ritz_sigmas[static_cast<std::size_t>(j)];
      fi += r * r * (1.0 - fi);
    }
    factors[static_cast<std::size_t>(i)] = fi;
  }
  return factors;
}

SolverPath hybrid_lsqr_path(const Bidiagonalization& f, const Vector& b, int kmax,
                            TruncationRule inner, const Vector* x_true) {
  if (kmax < 1 || kmax > f.max_projected_k()) {
    throw std::invalid_argument("hybrid_lsqr_path: factorization has not reached kmax steps");
  }
  if (inner.kind == TruncationRule::Kind::fixed_rank && inner.rank < 1) {
    throw std::invalid_argument("hybrid_lsqr_path: fixed rank must be >= 1");
  }
  const double beta1 = b.norm();
  SolverPath path;
  path.method = Method::hybrid_lsqr;
  if (x_true != nullptr) path.relative_errors.emplace();
  for (int k = 1; k <= kmax; ++k) {
    const Matrix Bk = f.B(k);
    Eigen::JacobiSVD<Matrix> dec(Bk, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& th = dec.singularValues();
    // Projected TSVD candidates y_r; the residual follows from the first-row
    // coefficients of W since B_k s_i = theta_i w_i.
    std::vector<double> log_resid, log_soln;
    std::vector<int> usable;
    double wsum = 0.0, ynorm2 = 0.0;
    std::vector<double> coef(static_cast<std::size_t>(k));
    for (int r = 1; r <= k; ++r) {
      if (!(th(r - 1) > 0.0)) break;
      const double w0 = dec.matrixU()(0, r - 1);
      coef[static_cast<std::size_t>(r - 1)] = beta1 * w0 / th(r - 1);
      wsum = std::min(1.0, wsum + w0 * w0);
      ynorm2 += coef[static_cast<std::size_t>(r - 1)] * coef[static_cast<std::size_t>(r - 1)];
      const double resid = beta1 * std::sqrt(std::max(0.0, 1.0 - wsum));
      if (resid > 0.0 && ynorm2 > 0.0) {
        usable.push_back(r);
        log_resid.push_back(std::log(resid));
        log_soln.push_back(0.5 * std::log(ynorm2));
      }
    }
    int rank = k;
    if (inner.kind == TruncationRule::Kind::fixed_rank) {
      rank = std::min(inner.rank, k);
    } else if (auto corner = try_lcurve_corner(log_resid, log_soln)) {
      rank = usable[static_cast<std::size_t>(*corner)];
    }
    rank = std::min(rank, static_cast<int>(th.size()));
    while (rank > 1 && !(th(rank - 1) > 0.0)) --rank;

    // No truncation means the step is plain LSQR; use the same projected
    // solve so the iterates coincide bitwise.
    Vector y;
    if (rank == k) {
      y = solve_projected(f, k, beta1).y;
    } else {
      y = Vector::Zero(k);
      for (int i = 0; i < rank; ++i) {
        y += coef[static_cast<std::size_t>(i)] * dec.matrixV().col(i);
      }
    }
    Vector x = f.Q(k) * y;
    const double full = (b - f.matrix() * x).norm();
    path.inner_truncation.push_back(rank);
    record(path, std::move(x), full, x_true);
  }
  return path;
}

}  // namespace illposed
