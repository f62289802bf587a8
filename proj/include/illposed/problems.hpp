#pragma once

#include "illposed/linalg.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace illposed {

/// One discretized first-kind Fredholm equation: square matrix, exact
/// solution and the noise-free right-hand side b_hat = A * x_true.
struct DiscreteProblem {
  std::string name;
  Matrix A;       // n x n
  Vector x_true;  // n
  Vector b_hat;   // n, always A * x_true
};

/// A DiscreteProblem plus one seeded Gaussian noise realization rescaled so
/// that ||e|| / ||b_hat|| equals epsilon.
struct NoisyInstance {
  DiscreteProblem problem;
  Vector e;
  double epsilon = 0.0;
  std::uint64_t seed = 0;

  Vector b() const { return problem.b_hat + e; }
};

// The five generators. All use n x n grids; preconditions follow the
// underlying discretizations (shaw/wing/heat/deriv2 need even n >= 2,
// phillips needs n divisible by 4).
DiscreteProblem shaw(Index n);
DiscreteProblem wing(Index n);
DiscreteProblem heat(Index n);
DiscreteProblem phillips(Index n);
DiscreteProblem deriv2(Index n);

/// Lookup by name ("shaw", "wing", "heat", "phillips", "deriv2").
DiscreteProblem make_problem(const std::string& name, Index n);

/// Analytic right-hand side sampled on the problem's collocation grid, for
/// the generators whose defining equation states one (wing, phillips,
/// deriv2). Used for quadrature-error cross-checks only; b_hat is always
/// A * x_true.
Vector analytic_rhs(const std::string& name, Index n);

/// Standard normal deviates from mt19937_64 via Box-Muller; deterministic
/// per seed and platform-independent at the integer level.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : gen_(seed) {}

  double next();

 private:
  double uniform01();  // in (0, 1]

  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Draw n i.i.d. standard normals from the seeded generator and rescale so
/// ||e|| / ||b_hat|| = epsilon. Requires 0 < epsilon < 1.
NoisyInstance add_noise(const DiscreteProblem& p, double epsilon, std::uint64_t seed);

}  // namespace illposed
