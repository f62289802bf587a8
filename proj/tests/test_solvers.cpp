#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "illposed/selection.hpp"
#include "illposed/solvers.hpp"
#include "golden.hpp"
#include "test_support.hpp"

#include <Eigen/SVD>

#include <cmath>

using namespace illposed;
using namespace illposed::testing;

namespace {

BidiagOptions through_floor() {
  BidiagOptions o;
  o.breakdown_factor = 0.0;
  return o;
}

Bidiagonalization factorize(const Matrix& A, const Vector& b, int kmax) {
  auto f = Bidiagonalization::start(A, b, through_floor());
  try {
    f.extend(kmax);
  } catch (const BreakdownError&) {
  }
  return f;
}

// Independent partial-sum evaluation of the TSVD solution.
Vector tsvd_oracle(const SvdTriplet& d, const Vector& b, int k) {
  Vector x = Vector::Zero(d.V.rows());
  for (int i = 0; i < k; ++i) {
    x += d.V.col(i) * (d.U.col(i).dot(b) / d.sigma(i));
  }
  return x;
}

}  // namespace

TEST_CASE("tsvd_solve: full expansion inverts a nonsingular system") {
  Matrix A = random_matrix(8, 8, 71u) + 8.0 * Matrix::Identity(8, 8);
  Vector b = random_vector(8, 72u);
  const Vector x = tsvd_solve(svd(A), b, 8);
  CHECK((A * x - b).norm() <= 1e-8 * b.norm());
}

TEST_CASE("tsvd_solve: one-term expansion of diag(2,1)") {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 2.0;
  A(1, 1) = 1.0;
  Vector b(2);
  b << 4.0, 3.0;
  const Vector x = tsvd_solve(svd(A), b, 1);
  CHECK(x(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(x(1) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("tsvd_solve preconditions") {
  const SvdTriplet d = svd(Matrix::Identity(3, 3));
  Vector b = Vector::Ones(3);
  CHECK_THROWS_AS(tsvd_solve(d, b, 0), std::invalid_argument);
  CHECK_THROWS_AS(tsvd_solve(d, b, 4), std::invalid_argument);
}

TEST_CASE("tsvd error curve minimum matches a brute-force sweep") {
  const NoisyInstance inst = add_noise(shaw(64), 1e-3, 7);
  const SvdTriplet d = svd(inst.problem.A);
  const Vector b = inst.b();
  const SolverPath path = tsvd_path(d, inst.problem.A, b, 40, &inst.problem.x_true);

  int best_k = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= path.kmax(); ++k) {
    const double err =
        (tsvd_oracle(d, b, k) - inst.problem.x_true).norm() / inst.problem.x_true.norm();
    if (err < best_err) {
      best_err = err;
      best_k = k;
    }
  }
  CHECK(oracle_best_k(path) == best_k);
  CHECK((*path.relative_errors)[best_k - 1] == doctest::Approx(best_err).epsilon(1e-12));
}

TEST_CASE("tsvd_solve equals the independent partial-sum oracle") {
  const NoisyInstance inst = add_noise(deriv2(48), 1e-3, 11);
  const SvdTriplet d = svd(inst.problem.A);
  const Vector b = inst.b();
  for (int k : {1, 5, 17, 33}) {
    const Vector x = tsvd_solve(d, b, k);
    const Vector y = tsvd_oracle(d, b, k);
    CHECK((x - y).norm() <= 1e-10 * std::max(1.0, y.norm()));
  }
}

TEST_CASE("lsqr over the full Krylov space solves the system") {
  Matrix A = random_matrix(8, 8, 81u) + 8.0 * Matrix::Identity(8, 8);
  Vector b = random_vector(8, 82u);
  const auto f = factorize(A, b, 8);
  REQUIRE(f.max_projected_k() >= 8);
  const SolverPath path = lsqr_path(f, b, 8, nullptr);
  const Vector x = path.iterates.back();
  CHECK((x - A.fullPivLu().solve(b)).norm() <= 1e-8 * x.norm());
}

TEST_CASE("lsqr projected residuals are non-increasing and match the full ones") {
  const NoisyInstance inst = add_noise(heat(128), 1e-3, 5);
  const Vector b = inst.b();
  const auto f = factorize(inst.problem.A, b, 24);
  const SolverPath path = lsqr_path(f, b, 24, &inst.problem.x_true);
  for (int k = 1; k < path.kmax(); ++k) {
    CHECK(path.residual_norms[k] <= path.residual_norms[k - 1] + 1e-12);
  }
  for (int k = 0; k < path.kmax(); ++k) {
    const double full = (b - inst.problem.A * path.iterates[k]).norm();
    CHECK(std::abs(full - path.residual_norms[k]) <= 1e-8 * (b.norm() + full));
  }
}

TEST_CASE("lsqr semi-convergence on deriv2(1024) at the pinned seed") {
  const NoisyInstance inst = add_noise(deriv2(1024), 1e-3, golden::kSeed);
  const Vector b = inst.b();
  const auto f = factorize(inst.problem.A, b, 30);
  const SolverPath path = lsqr_path(f, b, 30, &inst.problem.x_true);
  CHECK(oracle_best_k(path) == golden::kDeriv2LsqrBestK);
}

TEST_CASE("filter factors: exact hits, tail bound, reconstruction") {
  const NoisyInstance inst = add_noise(shaw(64), 1e-3, 7);
  const SvdTriplet d = svd(inst.problem.A);
  const Vector b = inst.b();
  const auto f = factorize(inst.problem.A, b, 8);

  // the identity is floating-point meaningful while theta_min stays well
  // above the singular-value noise floor; the gap grows like (sigma_1/theta)^2 eps
  for (int k : {2, 3, 5}) {
    Eigen::JacobiSVD<Matrix> dec(f.B(k));
    std::vector<double> ritz(dec.singularValues().data(),
                             dec.singularValues().data() + k);

    const std::vector<double> factors = filter_factors(d, ritz, k);

    // sigma_i == theta_j makes the product vanish exactly
    SvdTriplet hit = d;
    hit.sigma(10) = ritz[1];
    CHECK(filter_factors(hit, ritz, k)[10] == 1.0);

    // far tail: f_i small once sigma_i << min theta_j
    const double theta_min = ritz.back();
    for (Index i = 0; i < d.sigma.size(); ++i) {
      if (d.sigma(i) < 1e-3 * theta_min) {
        CHECK(factors[static_cast<std::size_t>(i)] < 1e-2);
      }
    }

    // reconstruction: sum_i f_i (u_i^T b / sigma_i) v_i = x^{(k)}
    const SolverPath path = lsqr_path(f, b, k, nullptr);
    Vector x = Vector::Zero(64);
    for (Index i = 0; i < d.sigma.size(); ++i) {
      if (d.sigma(i) > 0.0) {
        x += factors[static_cast<std::size_t>(i)] * (d.U.col(i).dot(b) / d.sigma(i)) *
             d.V.col(i);
      }
    }
    CHECK((x - path.iterates[static_cast<std::size_t>(k - 1)]).norm() <=
          1e-8 * x.norm());
  }
}

TEST_CASE("filter factors reject zero Ritz values") {
  const SvdTriplet d = svd(Matrix::Identity(4, 4));
  CHECK_THROWS_AS(filter_factors(d, {1.0, 0.0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(filter_factors(d, {1.0}, 2), std::invalid_argument);
}

TEST_CASE("hybrid with no truncation is bitwise identical to lsqr") {
  const NoisyInstance inst = add_noise(phillips(64), 1e-3, 9);
  const Vector b = inst.b();
  const auto f = factorize(inst.problem.A, b, 12);
  const SolverPath pure = lsqr_path(f, b, 12, &inst.problem.x_true);
  const SolverPath hyb =
      hybrid_lsqr_path(f, b, 12, TruncationRule::fixed(12), &inst.problem.x_true);
  for (int k = 0; k < 12; ++k) {
    CHECK(pure.iterates[k] == hyb.iterates[k]);
    CHECK(pure.solution_norms[k] == hyb.solution_norms[k]);
    CHECK(hyb.inner_truncation[k] == k + 1);
  }
  CHECK(*pure.relative_errors == *hyb.relative_errors);
}

TEST_CASE("fixed-rank truncation can only increase the projected residual") {
  const NoisyInstance inst = add_noise(shaw(64), 1e-3, 7);
  const Vector b = inst.b();
  const double beta1 = b.norm();
  const auto f = factorize(inst.problem.A, b, 10);
  const SolverPath pure = lsqr_path(f, b, 10, nullptr);
  const SolverPath hyb = hybrid_lsqr_path(f, b, 10, TruncationRule::fixed(3), nullptr);
  for (int k = 4; k <= 10; ++k) {
    const Matrix B = f.B(k);
    Vector e1 = Vector::Zero(k + 1);
    e1(0) = beta1;
    const Vector y_pure = f.Q(k).transpose() * pure.iterates[k - 1];
    const Vector y_hyb = f.Q(k).transpose() * hyb.iterates[k - 1];
    const double r_pure = (e1 - B * y_pure).norm();
    const double r_hyb = (e1 - B * y_hyb).norm();
    CHECK(r_hyb >= r_pure - 1e-12 * beta1);
  }
}

TEST_CASE("hybrid lsqr on deriv2(1024): inner rule beats the pure minimum") {
  const NoisyInstance inst = add_noise(deriv2(1024), 1e-3, golden::kSeed);
  const Vector b = inst.b();
  const auto f = factorize(inst.problem.A, b, 40);
  const SolverPath pure = lsqr_path(f, b, 40, &inst.problem.x_true);
  const SolverPath hyb =
      hybrid_lsqr_path(f, b, 40, TruncationRule::lcurve(), &inst.problem.x_true);
  const int bp = oracle_best_k(pure);
  const int bh = oracle_best_k(hyb);
  // the hybrid stabilizes at (or slightly below) the pure minimum and needs
  // a larger subspace to get there
  CHECK((*hyb.relative_errors)[bh - 1] <= (*pure.relative_errors)[bp - 1]);
  CHECK(bh >= 6);
}

TEST_CASE("hybrid lsqr on shaw(1024) reaches the pure minimum level") {
  const NoisyInstance inst = add_noise(shaw(1024), 1e-3, golden::kSeed);
  const Vector b = inst.b();
  const auto f = factorize(inst.problem.A, b, 40);
  const SolverPath pure = lsqr_path(f, b, 40, &inst.problem.x_true);
  const SolverPath hyb =
      hybrid_lsqr_path(f, b, 40, TruncationRule::lcurve(), &inst.problem.x_true);
  const double ep = (*pure.relative_errors)[oracle_best_k(pure) - 1];
  const double eh = (*hyb.relative_errors)[oracle_best_k(hyb) - 1];
  CHECK(ep / eh >= 0.9);
  CHECK(ep / eh <= 1.1);
}

TEST_CASE("hybrid-vs-pure minimum levels across the other generators") {
  auto gain_at = [](const DiscreteProblem& p, double eps, int kmax) {
    const NoisyInstance inst = add_noise(p, eps, golden::kSeed);
    const Vector b = inst.b();
    const auto f = factorize(p.A, b, kmax);
    const int keff = std::min(kmax, f.max_projected_k());
    const SolverPath pure = lsqr_path(f, b, keff, &p.x_true);
    const SolverPath hyb =
        hybrid_lsqr_path(f, b, keff, TruncationRule::lcurve(), &p.x_true);
    return (*pure.relative_errors)[oracle_best_k(pure) - 1] /
           (*hyb.relative_errors)[oracle_best_k(hyb) - 1];
  };
  // heat reaches the same minimum level as pure LSQR
  const double heat_gain = gain_at(heat(1024), 1e-3, 40);
  CHECK(heat_gain >= 0.9);
  CHECK(heat_gain <= 1.1);
  // wing: the inner corner sits one rank short of the oracle on a projected
  // problem with only a few usable components; pinned at the default seed
  CHECK(gain_at(wing(1024), 1e-3, 12) == doctest::Approx(0.748).epsilon(0.05));
  // phillips: parity-skipped coefficients make this draw-sensitive; pinned
  CHECK(gain_at(phillips(1024), 1e-3, 40) == doctest::Approx(0.658).epsilon(0.05));
}

TEST_CASE("solver paths record consistent lengths") {
  const NoisyInstance inst = add_noise(wing(32), 1e-2, 2);
  const Vector b = inst.b();
  const auto f = factorize(inst.problem.A, b, 6);
  const int kmax = std::min(6, f.max_projected_k());
  const SolverPath p = lsqr_path(f, b, kmax, &inst.problem.x_true);
  CHECK(p.kmax() == kmax);
  CHECK(p.residual_norms.size() == static_cast<std::size_t>(kmax));
  CHECK(p.solution_norms.size() == static_cast<std::size_t>(kmax));
  CHECK(p.relative_errors->size() == static_cast<std::size_t>(kmax));
  CHECK_THROWS_AS(lsqr_path(f, b, f.max_projected_k() + 1, nullptr), std::invalid_argument);
}
