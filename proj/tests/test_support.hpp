#pragma once

#include "illposed/linalg.hpp"
#include "illposed/problems.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace illposed::testing {

inline Matrix random_matrix(Index rows, Index cols, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix A(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) A(i, j) = dist(gen);
  }
  return A;
}

inline Vector random_vector(Index n, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = dist(gen);
  return v;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Slope of log(sigma_j) vs j over 1-based indices [j_lo, j_hi], skipping
/// values at or below the numerical floor sigma_1 * n * eps.
inline double log_decay_slope(const Vector& sigma, int j_lo, int j_hi) {
  const double floor = sigma(0) * static_cast<double>(sigma.size()) * kMachineEps;
  std::vector<double> xs, ys;
  for (int j = j_lo; j <= j_hi && j <= sigma.size(); ++j) {
    if (sigma(j - 1) > floor) {
      xs.push_back(static_cast<double>(j));
      ys.push_back(std::log(sigma(j - 1)));
    }
  }
  return fit_slope(xs, ys);
}

/// Slope of log(sigma_j) vs log(j): the power-law exponent (negated decay
/// rate) over the same floor-filtered window.
inline double powerlaw_slope(const Vector& sigma, int j_lo, int j_hi) {
  const double floor = sigma(0) * static_cast<double>(sigma.size()) * kMachineEps;
  std::vector<double> xs, ys;
  for (int j = j_lo; j <= j_hi && j <= sigma.size(); ++j) {
    if (sigma(j - 1) > floor) {
      xs.push_back(std::log(static_cast<double>(j)));
      ys.push_back(std::log(sigma(j - 1)));
    }
  }
  return fit_slope(xs, ys);
}

/// Explicit Krylov basis [w, Cw, C^2 w, ...] of K_k(A^T A, A^T b); the
/// brute-force counterpart of the bidiagonalization's Q_k.
inline Matrix krylov_basis(const Matrix& A, const Vector& b, int k) {
  Matrix K(A.cols(), k);
  Vector w = A.transpose() * b;
  for (int j = 0; j < k; ++j) {
    K.col(j) = w;
    if (j + 1 < k) w = A.transpose() * (A * w);
  }
  return K;
}

}  // namespace illposed::testing
