#ifndef SOBOLEV_BALL_ONEVAR_HPP
#define SOBOLEV_BALL_ONEVAR_HPP

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sobolev_ball {

/// Dense one-variable polynomial, ascending coefficients.
using UniPoly = std::vector<double>;

inline double uni_eval(std::span<const double> q, double s) {
  double v = 0.0;
  for (std::size_t k = q.size(); k-- > 0;) v = v * s + q[k];
  return v;
}

inline UniPoly uni_derivative(std::span<const double> q) {
  if (q.size() <= 1) return {0.0};
  UniPoly out(q.size() - 1);
  for (std::size_t k = 1; k < q.size(); ++k) out[k - 1] = q[k] * static_cast<double>(k);
  return out;
}

/// Antiderivative vanishing at s = a.
inline UniPoly uni_antiderivative(std::span<const double> q, double a) {
  UniPoly out(q.size() + 1, 0.0);
  for (std::size_t k = 0; k < q.size(); ++k) out[k + 1] = q[k] / static_cast<double>(k + 1);
  out[0] = -uni_eval(out, a);
  return out;
}

inline UniPoly uni_add(std::span<const double> p, std::span<const double> q, double scale_q = 1.0) {
  UniPoly out(std::max(p.size(), q.size()), 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) out[k] += p[k];
  for (std::size_t k = 0; k < q.size(); ++k) out[k] += scale_q * q[k];
  return out;
}

inline UniPoly uni_mul(std::span<const double> p, std::span<const double> q) {
  if (p.empty() || q.empty()) return {};
  UniPoly out(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
  return out;
}

inline UniPoly uni_scale(UniPoly p, double s) {
  for (double& c : p) c *= s;
  return p;
}

/// Pochhammer symbol (a)_k = a (a+1) ... (a+k-1).
inline double pochhammer(double a, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= a + i;
  return r;
}

inline double factorial(int k) { return pochhammer(1.0, k); }

/// Parameters (alpha, beta) of the Jacobi weight (1-s)^alpha (1+s)^beta.
struct JacobiParams {
  double alpha = 0.0;
  double beta = 0.0;

  /// alpha = -1 is admitted for degree >= 1 only.
  void validate(int degree) const {
    if (degree < 0) throw std::invalid_argument("Jacobi: negative degree");
    if (!(beta > -1.0)) throw std::invalid_argument("Jacobi: beta must exceed -1");
    if (alpha == -1.0) {
      if (degree < 1) throw std::invalid_argument("Jacobi: alpha = -1 requires degree >= 1");
    } else if (!(alpha > -1.0)) {
      throw std::invalid_argument("Jacobi: alpha must exceed -1 (or equal -1 with degree >= 1)");
    }
  }
};

namespace detail {

struct JacobiStep {
  double a, b, c, d;  // d P_{k+1} = (a s + b) P_k - c P_{k-1}
};

inline JacobiStep jacobi_step(int k, double al, double be) {
  const double s = 2.0 * k + al + be;
  return {(s + 1.0) * (s + 2.0) * s, (s + 1.0) * (al * al - be * be), 2.0 * (k + al) * (k + be) * (s + 2.0),
          2.0 * (k + 1.0) * (k + al + be + 1.0) * s};
}

inline UniPoly jacobi_coeffs_recurrence(int j, double al, double be) {
  UniPoly prev{1.0};
  if (j == 0) return prev;
  UniPoly cur{0.5 * (al - be), 0.5 * (al + be + 2.0)};
  for (int k = 1; k < j; ++k) {
    const auto st = jacobi_step(k, al, be);
    UniPoly next(cur.size() + 1, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      next[i + 1] += st.a * cur[i];
      next[i] += st.b * cur[i];
    }
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= st.c * prev[i];
    for (double& v : next) v /= st.d;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

}  // namespace detail

/// Coefficients of P_j^{(alpha,beta)} in powers of s.
///
/// For alpha = -1 the polynomial is built from its value at s = -1 plus the
/// integrated derivative relation d/ds P_j^{(-1,b)} = (j+b)/2 P_{j-1}^{(0,b+1)}.
inline UniPoly jacobi_coeffs(int j, JacobiParams p) {
  p.validate(j);
  if (p.alpha == -1.0) {
    const double at_minus_one = ((j % 2) ? -1.0 : 1.0) * pochhammer(p.beta + 1.0, j) / factorial(j);
    UniPoly out = uni_scale(uni_antiderivative(detail::jacobi_coeffs_recurrence(j - 1, 0.0, p.beta + 1.0), -1.0),
                            0.5 * (j + p.beta));
    out[0] += at_minus_one;
    return out;
  }
  return detail::jacobi_coeffs_recurrence(j, p.alpha, p.beta);
}

/// P_j^{(alpha,beta)}(s) by the three-term recurrence (coefficient form for alpha = -1).
inline double jacobi_eval(int j, JacobiParams p, double s) {
  p.validate(j);
  if (p.alpha == -1.0) return uni_eval(jacobi_coeffs(j, p), s);
  if (j == 0) return 1.0;
  const double al = p.alpha, be = p.beta;
  double prev = 1.0;
  double cur = 0.5 * (al - be) + 0.5 * (al + be + 2.0) * s;
  for (int k = 1; k < j; ++k) {
    const auto st = detail::jacobi_step(k, al, be);
    const double next = ((st.a * s + st.b) * cur - st.c * prev) / st.d;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// d/ds P_j^{(alpha,beta)}(s) = (j+alpha+beta+1)/2 P_{j-1}^{(alpha+1,beta+1)}(s).
inline double jacobi_deriv(int j, JacobiParams p, double s) {
  p.validate(j);
  if (j == 0) return 0.0;
  return 0.5 * (j + p.alpha + p.beta + 1.0) * jacobi_eval(j - 1, {p.alpha + 1.0, p.beta + 1.0}, s);
}

/// Gegenbauer C_n^lambda(t).
inline double gegenbauer_eval(int n, double lambda, double t) {
  if (n < 0) throw std::invalid_argument("gegenbauer: negative degree");
  if (n == 0) return 1.0;
  double prev = 1.0, cur = 2.0 * lambda * t;
  for (int k = 1; k < n; ++k) {
    const double next = (2.0 * (k + lambda) * t * cur - (k + 2.0 * lambda - 1.0) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Chebyshev T_n(t), the d = 2 limit of the zonal kernel.
inline double chebyshev_t(int n, double t) {
  if (n == 0) return 1.0;
  double prev = 1.0, cur = t;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * t * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// One-variable Sobolev polynomial q_k for the pairing
/// 2^{2-d/2} lambda int f' g' (1+s)^{d/2} ds + f(-1) g(-1).
inline UniPoly qk_coeffs(int k, int d) {
  if (k < 0) throw std::invalid_argument("qk: negative degree");
  if (k == 0) return {1.0};
  const double beta = 0.5 * (d - 2);
  UniPoly out = jacobi_coeffs(k, {-1.0, beta});
  out[0] -= ((k % 2) ? -1.0 : 1.0) * pochhammer(0.5 * d, k) / factorial(k);
  return uni_scale(std::move(out), 2.0 / (k + beta));
}

inline double qk_eval(int k, int d, double x) { return uni_eval(qk_coeffs(k, d), x); }

/// (J_beta q)(s) = (1-s^2) q'' + (beta - 1 - (beta+3) s) q' - (beta+1) q.
inline UniPoly apply_Jbeta(std::span<const double> q, double beta) {
  UniPoly out(std::max<std::size_t>(q.size(), 1), 0.0);
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double c = q[k];
    const double kk = static_cast<double>(k);
    out[k] -= (beta + 1.0) * c;
    if (k >= 1) {
      out[k - 1] += (beta - 1.0) * kk * c;
      out[k] -= (beta + 3.0) * kk * c;
    }
    if (k >= 2) {
      out[k - 2] += kk * (kk - 1.0) * c;
      out[k] -= kk * (kk - 1.0) * c;
    }
  }
  return out;
}

/// Gauss rule for the weight (1-t)^alpha (1+t)^beta on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int exactness_degree = 0;
  double alpha = 0.0;
  double beta = 0.0;

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// m-point Gauss-Jacobi rule: Golub-Welsch eigenvalues, Newton-polished on the
/// orthonormal recurrence, weights as inverse Christoffel sums.
inline GaussRule gauss_jacobi_rule(int m, double alpha, double beta) {
  if (m < 1) throw std::invalid_argument("gauss_jacobi_rule: m must be >= 1");
  if (!(alpha > -1.0) || !(beta > -1.0)) throw std::invalid_argument("gauss_jacobi_rule: alpha, beta must exceed -1");
  const double ab = alpha + beta;
  std::vector<double> a(m), b(m + 1, 0.0);  // monic recurrence: a_k, b_k (b_0 = mu_0)
  b[0] = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                  std::lgamma(ab + 2.0));
  for (int k = 0; k < m; ++k) {
    const double s = 2.0 * k + ab;
    a[k] = k == 0 ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
  }
  for (int k = 1; k <= m; ++k) {
    const double s = 2.0 * k + ab;
    b[k] = k == 1 ? 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))
                  : 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
  }

  Eigen::VectorXd diag(m), sub(std::max(m - 1, 0));
  for (int k = 0; k < m; ++k) diag[k] = a[k];
  for (int k = 0; k + 1 < m; ++k) sub[k] = std::sqrt(b[k + 1]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  if (m == 1) {
    Eigen::MatrixXd one(1, 1);
    one(0, 0) = a[0];
    solver.compute(one, Eigen::EigenvaluesOnly);
  } else {
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  }
  if (solver.info() != Eigen::Success) throw QuadratureError("gauss_jacobi_rule: eigensolve did not converge");

  GaussRule rule;
  rule.alpha = alpha;
  rule.beta = beta;
  rule.exactness_degree = 2 * m - 1;
  rule.nodes.resize(m);
  rule.weights.resize(m);

  // Orthonormal p_0..p_m at x; returns (p_m, p_m', sum_{k<m} p_k^2).
  auto orthonormal = [&](double x, double& pm, double& dpm, double& christoffel) {
    double p_prev = 0.0, p = 1.0 / std::sqrt(b[0]);
    double d_prev = 0.0, dp = 0.0;
    christoffel = p * p;
    for (int k = 0; k < m; ++k) {
      const double sb_next = std::sqrt(b[k + 1]);
      const double sb = k == 0 ? 0.0 : std::sqrt(b[k]);
      const double p_next = ((x - a[k]) * p - sb * p_prev) / sb_next;
      const double d_next = (p + (x - a[k]) * dp - sb * d_prev) / sb_next;
      p_prev = p;
      p = p_next;
      d_prev = dp;
      dp = d_next;
      if (k + 1 < m) christoffel += p * p;
    }
    pm = p;
    dpm = dp;
  };

  for (int i = 0; i < m; ++i) {
    double x = solver.eigenvalues()[i];
    double pm = 0.0, dpm = 0.0, ch = 0.0;
    for (int it = 0; it < 3; ++it) {
      orthonormal(x, pm, dpm, ch);
      if (dpm == 0.0) break;
      const double step = pm / dpm;
      x -= step;
      if (std::abs(step) < 1e-17) break;
    }
    orthonormal(x, pm, dpm, ch);
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / ch;
  }
  return rule;
}

}  // namespace sobolev_ball

#endif  // SOBOLEV_BALL_ONEVAR_HPP
