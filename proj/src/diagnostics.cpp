#include "illposed/diagnostics.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <functional>

namespace illposed {

namespace {

constexpr double kRoundoffFloorFactor = 1e-13;

using Apply = std::function<Vector(const Vector&)>;

void reorth_against(Vector& v, const std::vector<Vector>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vector& q : basis) {
      v -= q.dot(v) * q;
    }
  }
}

// Deterministic unit start vector for the iterative solves below.
Vector start_vector(Index n, const Vector* hint) {
  GaussianSampler g(0x5eed0f1e);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = g.next();
  v.normalize();
  if (hint != nullptr && hint->size() == n && hint->norm() > 0.0) {
    v = 0.5 * v + (*hint / hint->norm());
    v.normalize();
  }
  return v;
}

struct TopSingular {
  double value = 0.0;
  Vector right;
};

// Largest singular value of the operator pair (apply, apply_t) by
// Golub-Kahan bidiagonalization with full reorthogonalization. The Ritz
// value theta is accepted once its residual bound beta_{j+1} |w_j| drops
// below max(tol_rel * theta, tol_abs); theta is a monotone lower bound.
// tol_abs must sit below the round-off floor of the quantities being
// resolved or the iteration stops before locating the dominant direction.
TopSingular top_singular_value(const Apply& apply, const Apply& apply_t, Index rows, Index cols,
                               const Vector* hint, double tol_rel, double tol_abs) {
  const int max_steps = static_cast<int>(std::min<Index>(cols, 240));
  const int min_steps = static_cast<int>(std::min<Index>(cols, 8));
  std::vector<Vector> us, vs;
  std::vector<double> alphas, betas;  // M v_i = beta_i u_{i-1} + alpha_i u_i

  Vector v = start_vector(cols, hint);
  vs.push_back(v);
  Vector u = apply(v);
  double a = u.norm();
  if (a == 0.0) return TopSingular{0.0, Vector::Zero(cols)};
  u /= a;
  us.push_back(u);
  alphas.push_back(a);

  TopSingular best{a, vs[0]};
  for (int j = 1; j <= max_steps; ++j) {
    Vector r = apply_t(us.back()) - alphas.back() * vs.back();
    reorth_against(r, vs);
    const double b = r.norm();

    const bool check = j >= min_steps && (j <= 48 || j % 4 == 0);
    if (check || b == 0.0 || j == max_steps) {
      // Ritz estimate from the j x j upper bidiagonal.
      Matrix R = Matrix::Zero(j, j);
      for (int i = 0; i < j; ++i) {
        R(i, i) = alphas[static_cast<std::size_t>(i)];
        if (i > 0) R(i - 1, i) = betas[static_cast<std::size_t>(i - 1)];
      }
      Eigen::JacobiSVD<Matrix> dec(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const double theta = dec.singularValues()(0);
      const double eta = b * std::abs(dec.matrixU()(j - 1, 0));
      Vector right = Vector::Zero(cols);
      for (int i = 0; i < j; ++i) {
        right += dec.matrixV()(i, 0) * vs[static_cast<std::size_t>(i)];
      }
      best = TopSingular{theta, std::move(right)};
      if (eta <= std::max(tol_rel * theta, tol_abs) || b == 0.0 || j == max_steps) break;
    }

    v = r / b;
    vs.push_back(v);
    betas.push_back(b);
    Vector w = apply(v) - b * us.back();
    reorth_against(w, us);
    a = w.norm();
    if (a == 0.0) break;
    us.push_back(w / a);
    alphas.push_back(a);
  }
  return best;
}

double projected_top_singular(const Matrix& A, const Matrix& Qk, const Vector* hint,
                              double scale, Vector* right_out) {
  Apply apply = [&](const Vector& v) -> Vector {
    Vector w = v - Qk * (Qk.transpose() * v);
    return A * w;
  };
  Apply apply_t = [&](const Vector& u) -> Vector {
    Vector w = A.transpose() * u;
    return w - Qk * (Qk.transpose() * w);
  };
  TopSingular top =
      top_singular_value(apply, apply_t, A.rows(), A.cols(), hint, 1e-11, 1e-14 * scale);
  if (right_out != nullptr) *right_out = top.right;
  return top.value;
}

// Same quantity through the SVD of A: with Y = V^T Q_k (orthonormal
// columns), ||A (I - Q Q^T)||_2 = ||Sigma (I - Y Y^T)||_2. The operator
// applies in O(nk) which makes the per-k sweep in build_table cheap.
double projected_top_singular_sigma(const Vector& sigma, const Matrix& Y, const Vector* hint,
                                    double scale, Vector* right_out) {
  Apply apply = [&](const Vector& v) -> Vector {
    Vector w = v - Y * (Y.transpose() * v);
    return sigma.asDiagonal() * w;
  };
  Apply apply_t = [&](const Vector& u) -> Vector {
    Vector w = sigma.asDiagonal() * u;
    return w - Y * (Y.transpose() * w);
  };
  TopSingular top =
      top_singular_value(apply, apply_t, sigma.size(), sigma.size(), hint, 1e-11, 1e-14 * scale);
  if (right_out != nullptr) *right_out = top.right;
  return top.value;
}

}  // namespace

double gamma(const Matrix& A, const Bidiagonalization& f, int k) {
  if (k < 1 || k > f.k() + 1) throw std::invalid_argument("gamma: k out of range");
  const Matrix Qk = f.Q(k);
  return projected_top_singular(A, Qk, nullptr, f.sigma1_estimate(), nullptr);
}

SinThetaKrylov sin_theta_krylov(const SvdTriplet& svd, const Bidiagonalization& f, int k) {
  if (k < 1 || k > f.k() + 1) throw std::invalid_argument("sin_theta_krylov: k out of range");
  SinThetaKrylov out;
  const Index n = svd.sigma.size();
  if (k < n) {
    const double gap = svd.sigma(k - 1) - svd.sigma(k);
    out.repeated_sigma_warning = !(gap > 1e-12 * svd.sigma(k - 1));
  }
  out.value = sin_theta_max(svd.V.leftCols(k), f.Q(k));
  return out;
}

DeltaK delta_k(const SvdTriplet& svd, const Vector& b, int k) {
  const Index n = svd.sigma.size();
  if (k < 1 || k >= n) throw std::invalid_argument("delta_k: need 1 <= k < n");
  if (k > 40) throw std::invalid_argument("delta_k: k > 40 refused (Lagrange conditioning)");
  for (int i = 1; i < k; ++i) {
    if (!(svd.sigma(i - 1) >= (1.0 + 1e-6) * svd.sigma(i))) {
      throw std::invalid_argument(
          "delta_k: consecutive singular-value ratio below 1 + 1e-6 in the Lagrange set");
    }
  }
  const Vector ub = svd.U.transpose() * b;
  const double bnorm = b.norm();
  for (int i = 0; i < k; ++i) {
    if (std::abs(ub(i)) < 1e3 * kMachineEps * bnorm) {
      throw std::runtime_error("delta_k: Picard coefficient vanishes at i = " +
                               std::to_string(i + 1));
    }
  }

  DeltaK out;
  out.delta = Matrix::Zero(n - k, k);
  for (Index j = k; j < n; ++j) {
    const double sj2 = svd.sigma(j) * svd.sigma(j);
    for (int i = 0; i < k; ++i) {
      const double si2 = svd.sigma(i) * svd.sigma(i);
      double lag = 1.0;
      for (int l = 0; l < k; ++l) {
        if (l == i) continue;
        const double sl2 = svd.sigma(l) * svd.sigma(l);
        lag *= (sl2 - sj2) / (sl2 - si2);
      }
      out.delta(j - k, i) = svd.sigma(j) * ub(j) * lag / (svd.sigma(i) * ub(i));
    }
  }
  if (!out.delta.allFinite()) {
    throw std::runtime_error("delta_k: Lagrange products overflowed");
  }
  out.frobenius = out.delta.norm();
  out.two_norm = spectral_norm(out.delta);
  return out;
}

double coefficient_ratio(const PicardData& p, int k) {
  const Index n = p.coeffs_total.size();
  if (k < 1 || k >= n) throw std::invalid_argument("coefficient_ratio: need 1 <= k < n");
  const double den = p.coeffs_total.head(k).minCoeff();
  if (den == 0.0) throw std::runtime_error("coefficient_ratio: zero coefficient below k");
  return p.coeffs_total.tail(n - k).maxCoeff() / den;
}

double ritz_triplet_residual(const Matrix& A, const Bidiagonalization& f, int k) {
  if (k < 1 || k > f.k()) throw std::invalid_argument("ritz_triplet_residual: k out of range");
  const Matrix Bk = f.B(k);
  Eigen::JacobiSVD<Matrix> dec(Bk, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix Pk1 = f.P(k + 1);
  const Matrix Ut = Pk1 * dec.matrixU();               // m x (k+1)
  const Matrix Vt = f.Q(k) * dec.matrixV();            // n x k
  const Vector& theta = dec.singularValues();          // k

  const double scale = std::max(f.sigma1_estimate(), theta(0));
  if (spectral_norm(A * Vt - Ut.leftCols(k) * theta.asDiagonal()) > 1e-8 * scale) {
    throw std::runtime_error("ritz_triplet_residual: A V~ = U~ Theta violated");
  }
  Matrix R = A.transpose() * Ut;
  R.leftCols(k) -= Vt * theta.asDiagonal();
  return spectral_norm(R);
}

DiagnosticsTable build_table(const NoisyInstance& instance, const Bidiagonalization& f,
                             const SvdTriplet& svd, int kmax) {
  if (kmax < 1 || kmax > f.k()) {
    throw std::invalid_argument("build_table: factorization not extended to kmax");
  }
  const Matrix& A = instance.problem.A;
  const Index n = svd.sigma.size();
  const Vector b = instance.b();
  const double sigma1 = svd.sigma(0);
  const PicardData picard = make_picard_data(svd, instance.problem.b_hat, instance.e);

  const Matrix Qall = f.Q(kmax);
  const Matrix Y = svd.V.transpose() * Qall;     // n x kmax, orthonormal columns
  const Matrix AtP = A.transpose() * f.P(kmax + 1);  // n x (kmax+1)

  DiagnosticsTable table;
  table.sigma1 = sigma1;
  table.rows.reserve(static_cast<std::size_t>(kmax));

  bool flagged = false;
  Vector gamma_hint;
  for (int k = 1; k <= kmax; ++k) {
    DiagnosticsRow row;
    row.k = k;
    row.alpha_next = f.alpha(k + 1);
    row.sigma_next = k < n ? svd.sigma(k) : 0.0;

    Vector hint_out;
    row.gamma = projected_top_singular_sigma(
        svd.sigma, Y.leftCols(k), gamma_hint.size() ? &gamma_hint : nullptr, sigma1, &hint_out);
    gamma_hint = hint_out;

    row.sin_theta = sin_theta_max(svd.V.leftCols(k), Qall.leftCols(k));
    if (k < n) {
      row.c_k = coefficient_ratio(picard, k);
      row.bound_eqres1 = (svd.sigma(k) / svd.sigma(k - 1)) * row.c_k *
                         std::sqrt(static_cast<double>(k) * static_cast<double>(n - k));
    }
    row.bound_thm22_hi = row.sigma_next + sigma1 * row.sin_theta;

    {
      const Matrix Bk = f.B(k);
      Eigen::JacobiSVD<Matrix> dec(Bk, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Matrix R = AtP.leftCols(k + 1) * dec.matrixU();
      R.leftCols(k) -= (Qall.leftCols(k) * dec.matrixV()) * dec.singularValues().asDiagonal();
      row.ritz_residual = spectral_norm(R);
    }

    if (row.alpha_next < kRoundoffFloorFactor * sigma1) flagged = true;
    row.roundoff_flag = flagged;
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace illposed
