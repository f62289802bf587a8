#include "illposed/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace illposed {

PicardData make_picard_data(const SvdTriplet& svd, const Vector& b_hat, const Vector& e) {
  if (svd.U.rows() != b_hat.size() || b_hat.size() != e.size()) {
    throw std::invalid_argument("make_picard_data: dimension mismatch");
  }
  PicardData p;
  p.sigma = svd.sigma;
  p.coeffs_clean = (svd.U.transpose() * b_hat).cwiseAbs();
  p.coeffs_noise = (svd.U.transpose() * e).cwiseAbs();
  p.coeffs_total = (svd.U.transpose() * (b_hat + e)).cwiseAbs();
  return p;
}

TransitionPoint transition_k0(const PicardData& p) {
  const Index n = p.sigma.size();
  if (p.coeffs_clean.size() != n || p.coeffs_noise.size() != n) {
    throw std::invalid_argument("transition_k0: sequences not populated");
  }
  for (Index k = 1; k < n; ++k) {
    if (p.coeffs_clean(k - 1) > p.coeffs_noise(k) && p.coeffs_clean(k) <= p.coeffs_noise(k)) {
      return TransitionPoint{static_cast<int>(k), true};
    }
  }
  return TransitionPoint{static_cast<int>(n), false};
}

std::optional<int> try_lcurve_corner(const std::vector<double>& log_resid,
                                     const std::vector<double>& log_soln) {
  if (log_resid.size() != log_soln.size()) {
    throw std::invalid_argument("lcurve_corner: sequences must have equal length");
  }
  for (std::size_t i = 0; i < log_resid.size(); ++i) {
    if (!std::isfinite(log_resid[i]) || !std::isfinite(log_soln[i])) {
      throw std::invalid_argument("lcurve_corner: non-finite input");
    }
  }
  if (log_resid.size() < 4) return std::nullopt;

  // Monotone pruning: keep the subsequence with strictly decreasing residual
  // and strictly increasing solution norm.
  std::vector<int> kept;
  for (int i = 0; i < static_cast<int>(log_resid.size()); ++i) {
    if (kept.empty()) {
      kept.push_back(i);
      continue;
    }
    const int p = kept.back();
    if (log_resid[i] < log_resid[p] && log_soln[i] > log_soln[p]) {
      kept.push_back(i);
    }
  }
  if (kept.size() < 4) return std::nullopt;

  double xmin = log_resid[kept[0]], xmax = xmin;
  double ymin = log_soln[kept[0]], ymax = ymin;
  for (int i : kept) {
    xmin = std::min(xmin, log_resid[i]);
    xmax = std::max(xmax, log_resid[i]);
    ymin = std::min(ymin, log_soln[i]);
    ymax = std::max(ymax, log_soln[i]);
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  if (span <= 0.0) return std::nullopt;

  // Circumscribed-circle (Menger) curvature over consecutive kept triples;
  // only corner-oriented turns count (clockwise in the (log resid, log norm)
  // plane, which is how an L bends).
  double best = 0.0;
  int best_idx = -1;
  for (std::size_t t = 1; t + 1 < kept.size(); ++t) {
    const double x1 = log_resid[kept[t - 1]], y1 = log_soln[kept[t - 1]];
    const double x2 = log_resid[kept[t]], y2 = log_soln[kept[t]];
    const double x3 = log_resid[kept[t + 1]], y3 = log_soln[kept[t + 1]];
    const double cross = (x2 - x1) * (y3 - y2) - (y2 - y1) * (x3 - x2);
    if (cross >= 0.0) continue;
    const double a = std::hypot(x2 - x1, y2 - y1);
    const double b = std::hypot(x3 - x2, y3 - y2);
    const double c = std::hypot(x3 - x1, y3 - y1);
    if (a == 0.0 || b == 0.0 || c == 0.0) continue;
    const double curvature = 2.0 * std::abs(cross) / (a * b * c);
    if (curvature > best) {
      best = curvature;
      best_idx = kept[t];
    }
  }
  if (best_idx < 0 || best <= 1e-9 / span) return std::nullopt;
  return best_idx;
}

int lcurve_corner(const std::vector<double>& log_resid, const std::vector<double>& log_soln) {
  auto idx = try_lcurve_corner(log_resid, log_soln);
  if (!idx) throw std::runtime_error("lcurve_corner: no corner");
  return *idx;
}

int oracle_best_k(const SolverPath& path) {
  if (!path.relative_errors || path.relative_errors->empty()) {
    throw std::invalid_argument("oracle_best_k: relative errors not recorded");
  }
  const auto& err = *path.relative_errors;
  int best = 0;
  for (int k = 1; k < static_cast<int>(err.size()); ++k) {
    if (err[k] < err[best]) best = k;
  }
  return best + 1;
}

}  // namespace illposed
