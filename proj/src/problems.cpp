#include "illposed/problems.hpp"

#include <cmath>
#include <numbers>

namespace illposed {

namespace {

constexpr double kPi = std::numbers::pi;

void require_even(Index n, const char* who) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument(std::string(who) + ": n must be even and >= 2");
  }
}

DiscreteProblem finish(std::string name, Matrix A, Vector x) {
  Vector b = A * x;
  return DiscreteProblem{std::move(name), std::move(A), std::move(x), std::move(b)};
}

}  // namespace

DiscreteProblem shaw(Index n) {
  require_even(n, "shaw");
  const double h = kPi / static_cast<double>(n);
  Vector t(n);
  for (Index i = 0; i < n; ++i) {
    t(i) = -kPi / 2.0 + (static_cast<double>(i) + 0.5) * h;
  }
  // Midpoint collocation of K(s,t) = (cos s + cos t)^2 (sin(u)/u)^2,
  // u = pi (sin s + sin t), on [-pi/2, pi/2]^2.
  Matrix A(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double c = std::cos(t(i)) + std::cos(t(j));
      const double u = kPi * (std::sin(t(i)) + std::sin(t(j)));
      const double sinc = (u == 0.0) ? 1.0 : std::sin(u) / u;
      A(i, j) = h * c * c * sinc * sinc;
    }
  }
  Vector x(n);
  for (Index j = 0; j < n; ++j) {
    const double tj = t(j);
    x(j) = 2.0 * std::exp(-6.0 * (tj - 0.8) * (tj - 0.8)) +
           std::exp(-2.0 * (tj + 0.5) * (tj + 0.5));
  }
  return finish("shaw", std::move(A), std::move(x));
}

DiscreteProblem wing(Index n) {
  require_even(n, "wing");
  const double h = 1.0 / static_cast<double>(n);
  Vector t(n);
  for (Index i = 0; i < n; ++i) {
    t(i) = (static_cast<double>(i) + 0.5) * h;
  }
  // Midpoint collocation of K(s,t) = t exp(-s t^2) on [0,1]^2.
  Matrix A(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      A(i, j) = h * t(j) * std::exp(-t(i) * t(j) * t(j));
    }
  }
  Vector x(n);
  for (Index j = 0; j < n; ++j) {
    x(j) = (t(j) > 1.0 / 3.0 && t(j) < 2.0 / 3.0) ? 1.0 : 0.0;
  }
  return finish("wing", std::move(A), std::move(x));
}

DiscreteProblem heat(Index n) {
  require_even(n, "heat");
  const double h = 1.0 / static_cast<double>(n);
  // Volterra kernel k(tau) = tau^{-3/2} / (2 sqrt(pi)) exp(-1/(4 tau));
  // lower-triangular Toeplitz from midpoint quadrature, collocated at the
  // right endpoints s_i = i h.
  Vector col(n);
  for (Index i = 0; i < n; ++i) {
    const double tau = (static_cast<double>(i) + 0.5) * h;
    col(i) = h / (2.0 * std::sqrt(kPi)) * std::pow(tau, -1.5) * std::exp(-1.0 / (4.0 * tau));
  }
  Matrix A = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      A(i, j) = col(i - j);
    }
  }
  Vector x = Vector::Zero(n);
  for (Index i = 0; i < n / 2; ++i) {
    const double ti = static_cast<double>(i + 1) * 20.0 / static_cast<double>(n);
    if (ti < 2.0) {
      x(i) = 0.75 * ti * ti / 4.0;
    } else if (ti < 3.0) {
      x(i) = 0.75 + (ti - 2.0) * (3.0 - ti);
    } else {
      x(i) = 0.75 * std::exp(-(ti - 3.0) * 2.0);
    }
  }
  return finish("heat", std::move(A), std::move(x));
}

DiscreteProblem phillips(Index n) {
  if (n < 4 || n % 4 != 0) {
    throw std::invalid_argument("phillips: n must be a multiple of 4");
  }
  const double h = 12.0 / static_cast<double>(n);
  const Index n4 = n / 4;
  // Galerkin matrix with orthonormal box functions; the double integrals of
  // K(s,t) = 1 + cos(pi (s-t)/3) over box pairs have this closed form and
  // produce a symmetric Toeplitz matrix.
  Vector r1 = Vector::Zero(n);
  Vector c(n4 + 2);
  for (Index i = 0; i <= n4 + 1; ++i) {
    c(i) = std::cos((static_cast<double>(i) - 1.0) * 4.0 * kPi / static_cast<double>(n));
  }
  for (Index i = 0; i < n4; ++i) {
    r1(i) = h + 9.0 / (h * kPi * kPi) * (2.0 * c(i + 1) - c(i) - c(i + 2));
  }
  r1(n4) = h / 2.0 + 9.0 / (h * kPi * kPi) * (std::cos(4.0 * kPi / static_cast<double>(n)) - 1.0);
  Matrix A(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      A(i, j) = r1(std::abs(i - j));
    }
  }
  // Box-function coefficients of x(t) = 1 + cos(pi t / 3) on |t| < 3.
  const double cc = kPi / 3.0;
  Vector x = Vector::Zero(n);
  for (Index j = 0; j < n4; ++j) {
    const double s1 = std::sin(static_cast<double>(j + 1) * 4.0 * kPi / static_cast<double>(n));
    const double s0 = std::sin(static_cast<double>(j) * 4.0 * kPi / static_cast<double>(n));
    x(2 * n4 + j) = (h + (s1 - s0) / cc) / std::sqrt(h);
  }
  for (Index j = 0; j < n4; ++j) {
    x(n4 + j) = x(3 * n4 - 1 - j);
  }
  return finish("phillips", std::move(A), std::move(x));
}

DiscreteProblem deriv2(Index n) {
  require_even(n, "deriv2");
  const double h = 1.0 / static_cast<double>(n);
  const double h2 = h * h;
  const double h32 = h * std::sqrt(h);
  // Galerkin matrix for the Green's function of the second derivative,
  // K(s,t) = s(t-1) for s < t and t(s-1) otherwise; exact box integrals.
  Matrix A = Matrix::Zero(n, n);
  for (Index i = 1; i <= n; ++i) {
    const double di = static_cast<double>(i);
    A(i - 1, i - 1) = h2 * ((di * di - di + 0.25) * h - (di - 2.0 / 3.0));
    for (Index j = 1; j < i; ++j) {
      const double dj = static_cast<double>(j);
      A(i - 1, j - 1) = h2 * (dj - 0.5) * ((di - 0.5) * h - 1.0);
      A(j - 1, i - 1) = A(i - 1, j - 1);
    }
  }
  // Hat solution x(t) = t for t < 1/2, 1 - t otherwise.
  Vector x(n);
  for (Index j = 1; j <= n / 2; ++j) {
    x(j - 1) = h32 * (static_cast<double>(j) - 0.5);
  }
  for (Index j = n / 2 + 1; j <= n; ++j) {
    x(j - 1) = h32 * (static_cast<double>(n - j) + 0.5);
  }
  return finish("deriv2", std::move(A), std::move(x));
}

DiscreteProblem make_problem(const std::string& name, Index n) {
  if (name == "shaw") return shaw(n);
  if (name == "wing") return wing(n);
  if (name == "heat") return heat(n);
  if (name == "phillips") return phillips(n);
  if (name == "deriv2") return deriv2(n);
  throw std::invalid_argument("make_problem: unknown problem '" + name + "'");
}

Vector analytic_rhs(const std::string& name, Index n) {
  if (name == "wing") {
    require_even(n, "wing");
    const double h = 1.0 / static_cast<double>(n);
    Vector b(n);
    for (Index i = 0; i < n; ++i) {
      const double s = (static_cast<double>(i) + 0.5) * h;
      b(i) = (std::exp(-s / 9.0) - std::exp(-4.0 * s / 9.0)) / (2.0 * s);
    }
    return b;
  }
  if (name == "phillips") {
    if (n < 4 || n % 4 != 0) {
      throw std::invalid_argument("phillips: n must be a multiple of 4");
    }
    const double h = 12.0 / static_cast<double>(n);
    const double c = kPi / 3.0;
    // Box coefficients of b(s): exact integral of
    // (6-|s|)(1 + cos(c s)/2) + 9/(2 pi) sin(c |s|) over each box, using the
    // closed-form antiderivative valid for s >= 0 and mirroring.
    auto anti = [c](double s) {
      return s * (6.0 - std::abs(s) / 2.0) +
             ((3.0 - std::abs(s) / 2.0) * std::sin(c * s) - 2.0 / c * (std::cos(c * s) - 1.0)) / c;
    };
    Vector b = Vector::Zero(n);
    for (Index i = n / 2 + 1; i <= n; ++i) {
      const double t1 = -6.0 + static_cast<double>(i) * h;
      const double t2 = t1 - h;
      b(i - 1) = anti(t1) - anti(t2);
      b(n - i) = b(i - 1);
    }
    return b / std::sqrt(h);
  }
  if (name == "deriv2") {
    require_even(n, "deriv2");
    const double h = 1.0 / static_cast<double>(n);
    const double sqhi = 1.0 / std::sqrt(h);
    Vector b(n);
    for (Index i = 1; i <= n / 2; ++i) {
      const double s12 = std::pow(static_cast<double>(i) * h, 2);
      const double s22 = std::pow(static_cast<double>(i - 1) * h, 2);
      b(i - 1) = sqhi * (s12 + s22 - 1.5) * (s12 - s22) / 24.0;
    }
    for (Index i = n / 2 + 1; i <= n; ++i) {
      const double s1 = static_cast<double>(i) * h;
      const double s2 = static_cast<double>(i - 1) * h;
      const double s12 = s1 * s1;
      const double s22 = s2 * s2;
      b(i - 1) = sqhi *
                 (-(s12 + s22) * (s12 - s22) + 4.0 * (s1 * s1 * s1 - s2 * s2 * s2) -
                  4.5 * (s12 - s22) + h) /
                 24.0;
    }
    return b;
  }
  throw std::invalid_argument("analytic_rhs: no closed-form right-hand side for '" + name + "'");
}

double GaussianSampler::uniform01() {
  return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianSampler::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * kPi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

NoisyInstance add_noise(const DiscreteProblem& p, double epsilon, std::uint64_t seed) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("add_noise: epsilon must lie in (0, 1)");
  }
  const Index n = p.b_hat.size();
  GaussianSampler g(seed);
  Vector e(n);
  for (Index i = 0; i < n; ++i) {
    e(i) = g.next();
  }
  const double raw = e.norm();
  if (raw == 0.0) {
    throw std::runtime_error("add_noise: degenerate zero noise draw");
  }
  e *= epsilon * p.b_hat.norm() / raw;
  return NoisyInstance{p, std::move(e), epsilon, seed};
}

}  // namespace illposed
