#ifndef SOBOLEV_BALL_QUADRATURE_HPP
#define SOBOLEV_BALL_QUADRATURE_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "sobolev_ball/onevar.hpp"
#include "sobolev_ball/polynomial.hpp"

namespace sobolev_ball {

/// Flattened term list of a MultiPoly for repeated point evaluation.
class CompiledPoly {
 public:
  explicit CompiledPoly(const MultiPoly& p) : dim_(p.dim()), max_exp_(p.max_exponent()) {
    for (const auto& [m, c] : p.sorted_terms()) {
      for (int i = 0; i < dim_; ++i) exps_.push_back(static_cast<std::uint8_t>(m[i]));
      coefs_.push_back(c);
    }
  }

  double operator()(std::span<const double> x) const {
    thread_local std::vector<double> powers;
    const std::size_t stride = static_cast<std::size_t>(max_exp_) + 1;
    powers.resize(stride * dim_);
    for (int i = 0; i < dim_; ++i) {
      double* row = powers.data() + i * stride;
      row[0] = 1.0;
      for (std::size_t k = 1; k < stride; ++k) row[k] = row[k - 1] * x[i];
    }
    double s = 0.0;
    const std::uint8_t* e = exps_.data();
    for (double c : coefs_) {
      double t = c;
      for (int i = 0; i < dim_; ++i) t *= powers[i * stride + *e++];
      s += t;
    }
    return s;
  }

 private:
  int dim_;
  int max_exp_;
  std::vector<std::uint8_t> exps_;
  std::vector<double> coefs_;
};

/// Point set with weights; points are stored row-major (size() x d).
struct PointRule {
  int d = 2;
  int exactness_degree = 0;
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const { return {points.data() + i * d, static_cast<std::size_t>(d)}; }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += weights[i] * f(point(i));
    return s;
  }
};

using SphereRule = PointRule;

/// Rule on S^{d-1} exact for polynomials of degree <= degree: trapezoid in the
/// circle angle, Gauss-Gegenbauer in each further polar coordinate.
inline SphereRule build_sphere_rule(int d, int degree) {
  if (d < 2) throw std::invalid_argument("build_sphere_rule: d must be >= 2");
  degree = std::max(degree, 0);
  SphereRule rule;
  rule.d = d;
  rule.exactness_degree = degree;
  if (d == 2) {
    const int m = degree + 1;
    for (int k = 0; k < m; ++k) {
      const double th = 2.0 * std::numbers::pi * k / m;
      rule.points.push_back(std::cos(th));
      rule.points.push_back(std::sin(th));
      rule.weights.push_back(2.0 * std::numbers::pi / m);
    }
    return rule;
  }
  const SphereRule inner = build_sphere_rule(d - 1, degree);
  const double g = 0.5 * (d - 3);
  const GaussRule polar = gauss_jacobi_rule(degree / 2 + 1, g, g);
  for (std::size_t a = 0; a < polar.nodes.size(); ++a) {
    const double t = polar.nodes[a];
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (std::size_t b = 0; b < inner.size(); ++b) {
      for (double z : inner.point(b)) rule.points.push_back(s * z);
      rule.points.push_back(t);
      rule.weights.push_back(polar.weights[a] * inner.weights[b]);
    }
  }
  return rule;
}

/// Product rule on B^d for the weight (1 - ||x||^2)^mu, exact for every
/// monomial of degree <= exactness_degree.
struct BallQuadrature : PointRule {
  double mu = 0.0;
};

/// The radial part uses t = 2r^2 - 1 with a Gauss-Jacobi rule for
/// (1-t)^mu (1+t)^{(d-2)/2}; odd radial powers pair with odd angular parts,
/// which the symmetric sphere rule integrates to zero.
inline BallQuadrature build_quadrature(int d, int target_degree, double mu = 0.0) {
  if (d < 2) throw std::invalid_argument("build_quadrature: d must be >= 2");
  if (!(mu > -1.0)) throw std::invalid_argument("build_quadrature: mu must exceed -1");
  target_degree = std::max(target_degree, 0);
  const SphereRule sphere = build_sphere_rule(d, target_degree);
  const GaussRule radial = gauss_jacobi_rule(target_degree / 4 + 1, mu, 0.5 * (d - 2));
  const double scale = std::pow(2.0, -mu - 0.5 * d - 1.0);
  BallQuadrature q;
  q.d = d;
  q.mu = mu;
  q.exactness_degree = target_degree;
  q.points.reserve(radial.nodes.size() * sphere.points.size());
  for (std::size_t a = 0; a < radial.nodes.size(); ++a) {
    const double r = std::sqrt(0.5 * (1.0 + radial.nodes[a]));
    for (std::size_t b = 0; b < sphere.size(); ++b) {
      for (double z : sphere.point(b)) q.points.push_back(r * z);
      q.weights.push_back(scale * radial.weights[a] * sphere.weights[b]);
    }
  }
  return q;
}

}  // namespace sobolev_ball

#endif  // SOBOLEV_BALL_QUADRATURE_HPP
