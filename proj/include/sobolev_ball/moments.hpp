#ifndef SOBOLEV_BALL_MOMENTS_HPP
#define SOBOLEV_BALL_MOMENTS_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "sobolev_ball/polynomial.hpp"

namespace sobolev_ball {

/// Surface area of S^{d-1}: 2 pi^{d/2} / Gamma(d/2).
inline double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// Integral of x^alpha over S^{d-1} with respect to surface measure.
///
/// For all-even alpha this is omega_d * prod_i (alpha_i - 1)!! / prod_{k<|alpha|/2} (d + 2k),
/// evaluated as an interleaved product so no intermediate overflows.
inline double sphere_moment(Monomial alpha, int d) {
  if (d < 2) throw std::invalid_argument("sphere_moment: d must be >= 2");
  if (!alpha.all_even()) return 0.0;
  double r = sphere_area(d);
  double den = d;
  for (int i = 0; i < d; ++i) {
    for (int odd = 1; odd < alpha[i]; odd += 2) {
      r *= odd / den;
      den += 2.0;
    }
  }
  return r;
}

/// Integral of x^alpha over B^d, by radial factorisation.
inline double ball_moment(Monomial alpha, int d) {
  return sphere_moment(alpha, d) / (alpha.degree() + d);
}

/// Integral over r in [0,1] of r^{k+d-1} (1 - r^2)^mu = B((k+d)/2, mu+1) / 2.
inline double radial_weight_moment(int k, int d, double mu) {
  const double a = 0.5 * (k + d);
  return 0.5 * std::exp(std::lgamma(a) + std::lgamma(mu + 1.0) - std::lgamma(a + mu + 1.0));
}

/// Integral of x^alpha (1 - ||x||^2)^mu over B^d.
inline double weighted_ball_moment(Monomial alpha, int d, double mu) {
  if (!alpha.all_even()) return 0.0;
  if (mu == 0.0) return ball_moment(alpha, d);
  return sphere_moment(alpha, d) * radial_weight_moment(alpha.degree(), d, mu);
}

inline double integrate_sphere(const MultiPoly& p) {
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) s += c * sphere_moment(m, p.dim());
  return s;
}

inline double integrate_ball(const MultiPoly& p) {
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) s += c * ball_moment(m, p.dim());
  return s;
}

enum class Domain { sphere, ball };

/// Memoised moment lookup for repeated bilinear integrals in one dimension.
class MomentCache {
 public:
  MomentCache(int d, Domain domain, double mu = 0.0) : d_(d), domain_(domain), mu_(mu) {}

  double operator()(Monomial m) {
    if (!m.all_even()) return 0.0;
    auto it = cache_.find(m);
    if (it != cache_.end()) return it->second;
    const double v = domain_ == Domain::sphere ? sphere_moment(m, d_) : weighted_ball_moment(m, d_, mu_);
    cache_.emplace(m, v);
    return v;
  }

  /// Integral of p*q over the domain, without materialising the product.
  double bilinear(const MultiPoly& p, const MultiPoly& q) {
    p.check_dim(q);
    if (p.max_exponent() + q.max_exponent() > Monomial::kMaxExponent) {
      throw std::overflow_error("bilinear: product exponent exceeds 63");
    }
    double s = 0.0;
    for (const auto& [ma, ca] : p.terms()) {
      for (const auto& [mb, cb] : q.terms()) {
        const Monomial m = ma * mb;
        if (m.all_even()) s += ca * cb * (*this)(m);
      }
    }
    return s;
  }

  double integrate(const MultiPoly& p) {
    double s = 0.0;
    for (const auto& [m, c] : p.terms()) s += c * (*this)(m);
    return s;
  }

 private:
  int d_;
  Domain domain_;
  double mu_;
  std::unordered_map<Monomial, double, MonomialHash> cache_;
};

inline double sphere_bilinear(const MultiPoly& p, const MultiPoly& q) {
  return MomentCache(p.dim(), Domain::sphere).bilinear(p, q);
}

inline double ball_bilinear(const MultiPoly& p, const MultiPoly& q, double mu = 0.0) {
  return MomentCache(p.dim(), Domain::ball, mu).bilinear(p, q);
}

/// Integral of grad p . grad q over B^d.
inline double ball_gradient_bilinear(const MultiPoly& p, const MultiPoly& q) {
  MomentCache cache(p.dim(), Domain::ball);
  double s = 0.0;
  for (int i = 0; i < p.dim(); ++i) s += cache.bilinear(p.partial(i), q.partial(i));
  return s;
}

}  // namespace sobolev_ball

#endif  // SOBOLEV_BALL_MOMENTS_HPP
