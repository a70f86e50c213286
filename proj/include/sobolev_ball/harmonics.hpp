#ifndef SOBOLEV_BALL_HARMONICS_HPP
#define SOBOLEV_BALL_HARMONICS_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sobolev_ball/moments.hpp"
#include "sobolev_ball/onevar.hpp"
#include "sobolev_ball/polynomial.hpp"

namespace sobolev_ball {

/// Binomial coefficient with C(a, b) = 0 for a < b or b < 0.
inline long long binomial(long long a, long long b) {
  if (b < 0 || a < b) return 0;
  b = std::min(b, a - b);
  long long r = 1;
  for (long long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

/// sigma_n = dim of the homogeneous harmonics of degree n in d variables.
inline int dim_harmonic(int n, int d) {
  if (n < 0 || d < 2) throw std::invalid_argument("dim_harmonic: need n >= 0, d >= 2");
  return static_cast<int>(binomial(n + d - 1, d - 1) - binomial(n + d - 3, d - 1));
}

/// dim of the polynomials of exact degree n modulo lower degree: C(n+d-1, d-1).
inline int dim_orthogonal_space(int n, int d) { return static_cast<int>(binomial(n + d - 1, d - 1)); }

class NumericalRankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Orthonormal basis {Y_nu^n} of H_n^d under (1/omega_d) int_{S^{d-1}} . dω.
struct HarmonicBasis {
  int d = 2;
  int n = 0;
  std::vector<MultiPoly> elements;

  int size() const { return static_cast<int>(elements.size()); }
  const MultiPoly& operator[](int nu) const { return elements.at(nu); }
};

/// Builds the basis: null space of the Laplacian on homogeneous degree-n
/// coefficients (graded-lex seeded), then Cholesky orthonormalisation
/// against exact sphere moments.
inline HarmonicBasis build_harmonic_basis(int n, int d) {
  const int sigma = dim_harmonic(n, d);
  HarmonicBasis out{d, n, {}};
  if (n == 0) {
    out.elements.push_back(MultiPoly::constant(d, 1.0));
    return out;
  }
  const auto cols = homogeneous_monomials(d, n);
  const auto rows = n >= 2 ? homogeneous_monomials(d, n - 2) : std::vector<Monomial>{};
  std::unordered_map<Monomial, int, MonomialHash> row_index;
  for (std::size_t r = 0; r < rows.size(); ++r) row_index.emplace(rows[r], static_cast<int>(r));

  Eigen::MatrixXd kernel;
  if (rows.empty()) {
    kernel = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(cols.size()), static_cast<Eigen::Index>(cols.size()));
  } else {
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                                static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      for (int i = 0; i < d; ++i) {
        const int e = cols[c][i];
        if (e >= 2) lap(row_index.at(cols[c].with(i, e - 2)), static_cast<Eigen::Index>(c)) += e * (e - 1.0);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lap);
    lu.setThreshold(1e-10);
    kernel = lu.kernel();
  }
  if (kernel.cols() != sigma) {
    throw NumericalRankError("harmonic_basis: Laplacian null space has dimension " + std::to_string(kernel.cols()) +
                             ", expected " + std::to_string(sigma));
  }

  std::vector<MultiPoly> raw;
  raw.reserve(sigma);
  for (int k = 0; k < sigma; ++k) {
    MultiPoly p(d);
    for (std::size_t c = 0; c < cols.size(); ++c) p.add_term(cols[c], kernel(static_cast<Eigen::Index>(c), k));
    raw.push_back(p.pruned(1e-14));
  }

  const double inv_area = 1.0 / sphere_area(d);
  MomentCache sphere(d, Domain::sphere);
  Eigen::MatrixXd gram(sigma, sigma);
  for (int a = 0; a < sigma; ++a)
    for (int b = 0; b <= a; ++b) gram(a, b) = gram(b, a) = inv_area * sphere.bilinear(raw[a], raw[b]);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericalRankError("harmonic_basis: Gram matrix not positive definite");
  const Eigen::MatrixXd inv_l =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(sigma, sigma));  // Y = L^{-1} raw

  for (int a = 0; a < sigma; ++a) {
    MultiPoly y(d);
    for (int b = 0; b <= a; ++b) y += raw[b] * inv_l(a, b);
    out.elements.push_back(y.pruned(1e-15));
  }
  return out;
}

/// Process-wide write-once cache of harmonic bases keyed by (n, d).
class HarmonicCache {
 public:
  static HarmonicCache& instance() {
    static HarmonicCache cache;
    return cache;
  }

  const HarmonicBasis& get(int n, int d) {
    {
      std::lock_guard lock(mutex_);
      auto it = entries_.find({n, d});
      if (it != entries_.end()) return *it->second;
    }
    auto built = std::make_unique<HarmonicBasis>(build_harmonic_basis(n, d));
    std::lock_guard lock(mutex_);
    auto [it, inserted] = entries_.try_emplace({n, d}, std::move(built));
    return *it->second;
  }

  /// Seeds an entry (e.g. from an on-disk cache); an existing entry wins.
  const HarmonicBasis& insert(HarmonicBasis basis) {
    std::lock_guard lock(mutex_);
    auto key = std::pair{basis.n, basis.d};
    auto [it, inserted] = entries_.try_emplace(key, std::make_unique<HarmonicBasis>(std::move(basis)));
    return *it->second;
  }

  bool contains(int n, int d) const {
    std::lock_guard lock(mutex_);
    return entries_.contains({n, d});
  }

 private:
  HarmonicCache() = default;
  mutable std::mutex mutex_;
  std::map<std::pair<int, int>, std::unique_ptr<const HarmonicBasis>> entries_;
};

inline const HarmonicBasis& harmonic_basis(int n, int d) {
  if (n < 0 || d < 2) throw std::invalid_argument("harmonic_basis: need n >= 0, d >= 2");
  return HarmonicCache::instance().get(n, d);
}

/// sum_nu Y_nu^n(x) Y_nu^n(y) for y on the sphere, via the Gegenbauer
/// (d >= 3) or Chebyshev (d = 2) addition formula.
inline double zonal_kernel(int n, int d, std::span<const double> x, std::span<const double> y) {
  if (x.size() != static_cast<std::size_t>(d) || y.size() != static_cast<std::size_t>(d)) {
    throw DimensionMismatch(d, static_cast<int>(x.size()));
  }
  const double ny = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
  if (std::abs(ny - 1.0) > 1e-12) throw std::invalid_argument("zonal_kernel: y must lie on the unit sphere");
  if (n == 0) return 1.0;
  const double r = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
  if (r == 0.0) return 0.0;
  const double t = std::clamp(std::inner_product(x.begin(), x.end(), y.begin(), 0.0) / r, -1.0, 1.0);
  if (d == 2) return 2.0 * std::pow(r, n) * chebyshev_t(n, t);
  const double lam = 0.5 * (d - 2);
  return std::pow(r, n) * (n + lam) / lam * gegenbauer_eval(n, lam, t);
}

/// <f, Y_nu^n>_{L^2(S^{d-1})} for every nu.
inline std::vector<double> sphere_coefficients(const MultiPoly& f, int n, int d) {
  const auto& basis = harmonic_basis(n, d);
  MomentCache sphere(d, Domain::sphere);
  const double inv_area = 1.0 / sphere_area(d);
  std::vector<double> a;
  a.reserve(basis.elements.size());
  for (const auto& y : basis.elements) a.push_back(inv_area * sphere.bilinear(f, y));
  return a;
}

/// Y_n f: orthogonal projection of f|_{S^{d-1}} onto H_n^d, extended homogeneously.
inline MultiPoly project_Yn(const MultiPoly& f, int n, int d) {
  f.check_dim(MultiPoly(d));
  const auto& basis = harmonic_basis(n, d);
  const auto a = sphere_coefficients(f, n, d);
  MultiPoly out(d);
  for (std::size_t nu = 0; nu < a.size(); ++nu) out += basis.elements[nu] * a[nu];
  return out;
}

}  // namespace sobolev_ball

#endif  // SOBOLEV_BALL_HARMONICS_HPP
