#ifndef SOBOLEV_BALL_TESTS_ORACLES_HPP
#define SOBOLEV_BALL_TESTS_ORACLES_HPP

// Reference implementations that share no code with the library.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "sobolev_ball/polynomial.hpp"

namespace oracle {

using sobolev_ball::Monomial;
using sobolev_ball::MultiPoly;

/// Gauss-Legendre nodes and weights by Newton iteration on the Legendre recurrence.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int m) {
  std::vector<double> x(m), w(m);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

using Fn = std::function<double(const std::vector<double>&)>;

/// Integral over S^{d-1} for d in {2, 3} in polar coordinates.
inline double sphere_integral(const Fn& f, int d, int m = 40) {
  const int nt = 2 * m + 1;
  double s = 0.0;
  if (d == 2) {
    for (int k = 0; k < nt; ++k) {
      const double th = 2.0 * std::numbers::pi * k / nt;
      s += f({std::cos(th), std::sin(th)});
    }
    return s * 2.0 * std::numbers::pi / nt;
  }
  const auto [z, wz] = gauss_legendre(m);
  for (int a = 0; a < m; ++a) {
    const double rho = std::sqrt(1.0 - z[a] * z[a]);
    for (int k = 0; k < nt; ++k) {
      const double th = 2.0 * std::numbers::pi * k / nt;
      s += wz[a] * f({rho * std::cos(th), rho * std::sin(th), z[a]}) * 2.0 * std::numbers::pi / nt;
    }
  }
  return s;
}

/// Integral over B^d for d in {2, 3}: Gauss-Legendre in r on [0, 1] times the sphere rule.
inline double ball_integral(const Fn& f, int d, int m = 40) {
  const auto [x, w] = gauss_legendre(m);
  double s = 0.0;
  for (int a = 0; a < m; ++a) {
    const double r = 0.5 * (x[a] + 1.0);
    const double rw = 0.5 * w[a] * std::pow(r, d - 1);
    s += rw * sphere_integral(
                  [&](const std::vector<double>& u) {
                    std::vector<double> p(u);
                    for (double& v : p) v *= r;
                    return f(p);
                  },
                  d, m);
  }
  return s;
}

inline double eval(const MultiPoly& p, const std::vector<double>& x) { return p.eval(x); }

/// Generalised binomial a over k.
inline double gbinom(double a, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (a - i) / (i + 1.0);
  return r;
}

/// P_n^{(a,b)}(x) = sum_k C(n+a, n-k) C(n+b, k) ((x-1)/2)^k ((x+1)/2)^(n-k).
inline double jacobi(int n, double a, double b, double x) {
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    s += gbinom(n + a, n - k) * gbinom(n + b, k) * std::pow(0.5 * (x - 1.0), k) * std::pow(0.5 * (x + 1.0), n - k);
  }
  return s;
}

/// Random polynomial with integer-free coefficients in [-1, 1], all monomials of degree <= deg.
inline MultiPoly random_poly(std::mt19937_64& rng, int d, int deg, double density = 1.0) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0), keep(0.0, 1.0);
  MultiPoly p(d);
  std::vector<int> e(d, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == d) {
      if (keep(rng) <= density) p.add_term(Monomial(e), coef(rng));
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[i] = k;
      rec(i + 1, left - k);
    }
    e[i] = 0;
  };
  rec(0, deg);
  return p;
}

inline std::vector<double> random_point_in_ball(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(d);
  double n = 0.0;
  for (double& v : x) n += (v = g(rng)) * v;
  const double r = std::pow(u(rng), 1.0 / d) / std::sqrt(n);
  for (double& v : x) v *= r;
  return x;
}

inline std::vector<double> random_point_on_sphere(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  std::vector<double> x(d);
  double n = 0.0;
  for (double& v : x) n += (v = g(rng)) * v;
  for (double& v : x) v /= std::sqrt(n);
  return x;
}

/// Central-difference partial derivative.
inline double fd_partial(const MultiPoly& p, std::vector<double> x, int i, double h = 1e-5) {
  x[i] += h;
  const double fp = p.eval(x);
  x[i] -= 2.0 * h;
  const double fm = p.eval(x);
  return (fp - fm) / (2.0 * h);
}

inline double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace oracle

#endif  // SOBOLEV_BALL_TESTS_ORACLES_HPP
