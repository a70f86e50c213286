#ifndef SOBOLEV_BALL_BALL_BASIS_HPP
#define SOBOLEV_BALL_BALL_BASIS_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "sobolev_ball/harmonics.hpp"
#include "sobolev_ball/inner_product.hpp"
#include "sobolev_ball/onevar.hpp"
#include "sobolev_ball/polynomial.hpp"

namespace sobolev_ball {

enum class OuterFactor { none, one_minus_r2 };

/// [outer] * q(2||x||^2 - 1) * Y(x) with Y homogeneous harmonic of degree n - 2j.
struct SeparableForm {
  int d = 2;
  int n = 0;
  int j = 0;
  int nu = 1;
  UniPoly radial{1.0};
  MultiPoly harmonic;
  OuterFactor outer = OuterFactor::none;

  MultiPoly expand() const {
    MultiPoly p = compose_radial(radial, d) * harmonic;
    if (outer == OuterFactor::one_minus_r2) p = MultiPoly::one_minus_norm_squared(d) * p;
    return p;
  }

  double eval(std::span<const double> x) const {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    double v = uni_eval(radial, 2.0 * r2 - 1.0) * harmonic.eval(x);
    if (outer == OuterFactor::one_minus_r2) v *= 1.0 - r2;
    return v;
  }
};

/// Squared norm a * lambda + b.
struct AffineNorm {
  double lambda_coef = 0.0;
  double constant = 0.0;
  double at(double lambda) const { return lambda_coef * lambda + constant; }
};

/// A labelled basis polynomial with its closed-form squared norm.
///
/// For the Delta family `closed_norm` holds the nominal printed constants;
/// they are not the squared norm under the default 1/pi normalisation.
struct BasisElement {
  Family family = Family::I;
  double mu = 0.0;
  int n = 0;
  int j = 0;
  int nu = 1;
  SeparableForm form;
  MultiPoly poly;
  AffineNorm closed_norm;
};

inline double half_dim_shift(int d) { return 0.5 * (d - 2); }

/// Closed-form c_mu int [P_{j,nu}^n(W_mu)]^2 W_mu over B^d.
inline double wmu_norm(int n, int j, int d, double mu) {
  const double b = n - 2 * j + half_dim_shift(d);
  const double log_ratio = std::lgamma(j + mu + 1.0) + std::lgamma(j + b + 1.0) - std::lgamma(j + mu + b + 1.0) -
                           std::lgamma(j + 1.0);
  return weight_normalization(d, mu) * sphere_area(d) / (2.0 * (2.0 * j + mu + b + 1.0)) * std::exp(log_ratio);
}

namespace detail {

inline BasisElement make_element(Family family, int n, int j, int nu, int d, UniPoly radial, const MultiPoly& y,
                                 OuterFactor outer, AffineNorm norm, double mu = 0.0) {
  BasisElement e;
  e.family = family;
  e.mu = mu;
  e.n = n;
  e.j = j;
  e.nu = nu;
  e.form = SeparableForm{d, n, j, nu, std::move(radial), y, outer};
  e.poly = e.form.expand();
  e.closed_norm = norm;
  return e;
}

inline void check_degree(int n, int d) {
  if (n < 0) throw std::invalid_argument("basis: degree must be >= 0");
  if (d < 2 || d > Monomial::kMaxDim) throw std::invalid_argument("basis: d must lie in [2, 10]");
}

}  // namespace detail

/// P_{j,nu}^n(W_mu; x) = P_j^{(mu, n-2j+(d-2)/2)}(2||x||^2-1) Y_nu^{n-2j}(x).
inline BasisElement wmu_element(int n, int j, int nu, int d, double mu) {
  detail::check_degree(n, d);
  if (!(mu > -1.0)) throw std::invalid_argument("wmu_basis: mu must exceed -1");
  if (j < 0 || 2 * j > n) throw std::out_of_range("wmu_element: need 0 <= 2j <= n");
  const auto& h = harmonic_basis(n - 2 * j, d);
  if (nu < 1 || nu > h.size()) throw std::out_of_range("wmu_element: nu out of range");
  const double b = n - 2 * j + half_dim_shift(d);
  return detail::make_element(Family::Wmu, n, j, nu, d, jacobi_coeffs(j, {mu, b}), h[nu - 1], OuterFactor::none,
                              {0.0, wmu_norm(n, j, d, mu)}, mu);
}

inline std::vector<BasisElement> wmu_basis(int n, int d, double mu) {
  detail::check_degree(n, d);
  std::vector<BasisElement> out;
  for (int j = 0; 2 * j <= n; ++j) {
    const int sigma = dim_harmonic(n - 2 * j, d);
    for (int nu = 1; nu <= sigma; ++nu) out.push_back(wmu_element(n, j, nu, d, mu));
  }
  return out;
}

/// U_{j,nu}^n for <.,.>_I; closed norms n lambda + 1 (j = 0) and 2 j^2 lambda / (n + (d-2)/2).
inline std::vector<BasisElement> basis_I(int n, int d) {
  detail::check_degree(n, d);
  std::vector<BasisElement> out;
  const double shift = half_dim_shift(d);
  for (int j = 0; 2 * j <= n; ++j) {
    const auto& h = harmonic_basis(n - 2 * j, d);
    for (int nu = 1; nu <= h.size(); ++nu) {
      if (j == 0) {
        out.push_back(detail::make_element(Family::I, n, 0, nu, d, {1.0}, h[nu - 1], OuterFactor::none,
                                           {static_cast<double>(n), 1.0}));
      } else {
        out.push_back(detail::make_element(Family::I, n, j, nu, d, jacobi_coeffs(j - 1, {1.0, n - 2 * j + shift}),
                                           h[nu - 1], OuterFactor::one_minus_r2, {2.0 * j * j / (n + shift), 0.0}));
      }
    }
  }
  return out;
}

/// V_{j,nu}^n for <.,.>_II. Identical polynomials to U except the single
/// radial element q_{n/2}(2||x||^2 - 1) for even n >= 2 (and 1 for n = 0).
inline std::vector<BasisElement> basis_II(int n, int d) {
  detail::check_degree(n, d);
  std::vector<BasisElement> out;
  const double shift = half_dim_shift(d);
  if (n == 0) {
    out.push_back(detail::make_element(Family::II, 0, 0, 1, d, {1.0}, MultiPoly::constant(d, 1.0),
                                       OuterFactor::none, {0.0, 1.0}));
    return out;
  }
  for (auto& u : basis_I(n, d)) {
    if (2 * u.j == n) continue;
    u.family = Family::II;
    // Y(0) = 0 for n >= 1, so the point term drops and only lambda n remains.
    if (u.j == 0) u.closed_norm = {static_cast<double>(n), 0.0};
    out.push_back(std::move(u));
  }
  if (n % 2 == 0) {
    out.push_back(detail::make_element(Family::II, n, n / 2, 1, d, qk_coeffs(n / 2, d), MultiPoly::constant(d, 1.0),
                                       OuterFactor::none, {8.0 / (n + shift), 0.0}));
  }
  return out;
}

/// Q_{j,nu}^n for <.,.>_Delta, carrying the nominal printed norms
/// (2n+d)/d and 8 j^2 (j+1)^2 / (d (n + d/2)).
inline std::vector<BasisElement> basis_Delta(int n, int d) {
  detail::check_degree(n, d);
  std::vector<BasisElement> out;
  const double shift = half_dim_shift(d);
  for (int j = 0; 2 * j <= n; ++j) {
    const auto& h = harmonic_basis(n - 2 * j, d);
    for (int nu = 1; nu <= h.size(); ++nu) {
      if (j == 0) {
        out.push_back(detail::make_element(Family::Delta, n, 0, nu, d, {1.0}, h[nu - 1], OuterFactor::none,
                                           {0.0, (2.0 * n + d) / d}));
      } else {
        const double nominal = 8.0 * j * j * (j + 1.0) * (j + 1.0) / (d * (n + 0.5 * d));
        out.push_back(detail::make_element(Family::Delta, n, j, nu, d,
                                           jacobi_coeffs(j - 1, {2.0, n - 2 * j + shift}), h[nu - 1],
                                           OuterFactor::one_minus_r2, {0.0, nominal}));
      }
    }
  }
  return out;
}

/// Raw harmonics Y_nu^n for the sphere product; squared norm lambda n^2 + 1.
inline std::vector<BasisElement> basis_S(int n, int d) {
  detail::check_degree(n, d);
  std::vector<BasisElement> out;
  const auto& h = harmonic_basis(n, d);
  for (int nu = 1; nu <= h.size(); ++nu) {
    out.push_back(detail::make_element(Family::S, n, 0, nu, d, {1.0}, h[nu - 1], OuterFactor::none,
                                       {static_cast<double>(n) * n, 1.0}));
  }
  return out;
}

/// Degree-n basis of the given family; mu is used by Wmu only.
inline std::vector<BasisElement> basis(Family family, int n, int d, double mu = 1.0) {
  switch (family) {
    case Family::I: return basis_I(n, d);
    case Family::II: return basis_II(n, d);
    case Family::Delta: return basis_Delta(n, d);
    case Family::Wmu: return wmu_basis(n, d, mu);
    case Family::S: return basis_S(n, d);
  }
  throw std::invalid_argument("basis: unknown family");
}

/// Closed form of Delta U_{j,nu}^n = -4 j (n - j + (d-2)/2) P_{j-1,nu}^{n-2}(W_1).
inline MultiPoly laplacian_U(int n, int j, int nu, int d) {
  if (j < 1 || 2 * j > n) throw std::out_of_range("laplacian_U: need 1 <= j <= n/2");
  return wmu_element(n - 2, j - 1, nu, d, 1.0).poly * (-4.0 * j * (n - j + half_dim_shift(d)));
}

/// D p = Delta p - <x,grad>^2 p - (d+1) <x,grad> p, with the (d+1) coefficient as printed.
inline MultiPoly apply_D(const MultiPoly& p, int d) {
  p.check_dim(MultiPoly(d));
  const MultiPoly e = p.euler();
  return p.laplacian() - e.euler() - e * (d + 1.0);
}

/// Delta - <x,grad>^2 - (2 mu + d) <x,grad>: the ball operator whose
/// eigenspaces are V_m(W_mu) with eigenvalue -m (m + 2 mu + d).
inline MultiPoly apply_ball_operator(const MultiPoly& p, int d, double mu) {
  p.check_dim(MultiPoly(d));
  const MultiPoly e = p.euler();
  return p.laplacian() - e.euler() - e * (2.0 * mu + d);
}

/// Numerical rank of the coefficient matrix of `polys` (rows = polynomials).
inline int coefficient_rank(std::span<const MultiPoly> polys, double rel_tol = 1e-10) {
  if (polys.empty()) return 0;
  std::unordered_map<Monomial, Eigen::Index, MonomialHash> column;
  for (const auto& p : polys)
    for (const auto& [m, c] : p.terms()) column.try_emplace(m, static_cast<Eigen::Index>(column.size()));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(polys.size()),
                                            std::max<Eigen::Index>(1, static_cast<Eigen::Index>(column.size())));
  for (std::size_t r = 0; r < polys.size(); ++r)
    for (const auto& [m, c] : polys[r].terms()) a(static_cast<Eigen::Index>(r), column.at(m)) = c;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s[i] > rel_tol * s[0] ? 1 : 0;
  return rank;
}

struct DirectSumReport {
  int n = 0;
  int d = 2;
  int expected_dim = 0;   // C(n+d-1, d-1)
  int harmonic_dim = 0;   // sigma_n
  int shifted_dim = 0;    // dim V_{n-2}(W_1)
  int rank_basis = 0;     // rank of basis_I(n)
  int rank_sum = 0;       // rank of H_n together with (1-|x|^2) V_{n-2}(W_1)
  int rank_union = 0;     // rank of both sets stacked
  bool ok = false;
};

/// Checks span basis_I(n) = H_n (+) (1 - ||x||^2) V_{n-2}(W_1) by ranks.
inline DirectSumReport direct_sum_check(int n, int d) {
  if (n < 2) throw std::invalid_argument("direct_sum_check: need n >= 2");
  DirectSumReport r;
  r.n = n;
  r.d = d;
  r.expected_dim = dim_orthogonal_space(n, d);
  std::vector<MultiPoly> basis_polys, sum_polys;
  for (const auto& e : basis_I(n, d)) basis_polys.push_back(e.poly);
  const auto& h = harmonic_basis(n, d);
  r.harmonic_dim = h.size();
  for (const auto& y : h.elements) sum_polys.push_back(y);
  const MultiPoly w = MultiPoly::one_minus_norm_squared(d);
  for (const auto& p : wmu_basis(n - 2, d, 1.0)) {
    sum_polys.push_back(w * p.poly);
    ++r.shifted_dim;
  }
  r.rank_basis = coefficient_rank(basis_polys);
  r.rank_sum = coefficient_rank(sum_polys);
  std::vector<MultiPoly> all = basis_polys;
  all.insert(all.end(), sum_polys.begin(), sum_polys.end());
  r.rank_union = coefficient_rank(all);
  r.ok = r.rank_basis == r.expected_dim && r.rank_sum == r.expected_dim && r.rank_union == r.expected_dim &&
         r.harmonic_dim + r.shifted_dim == r.expected_dim;
  return r;
}

}  // namespace sobolev_ball

#endif  // SOBOLEV_BALL_BALL_BASIS_HPP
