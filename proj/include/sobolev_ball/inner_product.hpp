#ifndef SOBOLEV_BALL_INNER_PRODUCT_HPP
#define SOBOLEV_BALL_INNER_PRODUCT_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sobolev_ball/moments.hpp"
#include "sobolev_ball/parallel.hpp"
#include "sobolev_ball/polynomial.hpp"
#include "sobolev_ball/quadrature.hpp"

namespace sobolev_ball {

enum class Family { I, II, S, Delta, Wmu };

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::I: return "I";
    case Family::II: return "II";
    case Family::S: return "S";
    case Family::Delta: return "Delta";
    case Family::Wmu: return "Wmu";
  }
  return "?";
}

inline Family parse_family(std::string_view s) {
  if (s == "I") return Family::I;
  if (s == "II") return Family::II;
  if (s == "S") return Family::S;
  if (s == "Delta") return Family::Delta;
  if (s == "Wmu") return Family::Wmu;
  throw std::invalid_argument("unknown family '" + std::string(s) + "'");
}

/// Normalising constant c_mu of (1 - ||x||^2)^mu on B^d.
inline double weight_normalization(int d, double mu) {
  return 1.0 / (sphere_area(d) * radial_weight_moment(0, d, mu));
}

/// Which inner product, with its parameters.
///
///   I:     lambda/omega int_B grad f.grad g + 1/omega int_S f g
///   II:    lambda/omega int_B grad f.grad g + f(0) g(0)
///   S:     lambda/omega int_S f_r g_r + 1/omega int_S f g
///   Delta: c int_B Delta[(1-|x|^2) f] Delta[(1-|x|^2) g]
///   Wmu:   c_mu int_B f g (1-|x|^2)^mu
struct InnerProductSpec {
  Family family = Family::I;
  int d = 2;
  double lambda = 1.0;
  double mu = 1.0;
  double delta_const = 1.0 / std::numbers::pi;

  static InnerProductSpec I(int d, double lambda) { return {Family::I, d, lambda}; }
  static InnerProductSpec II(int d, double lambda) { return {Family::II, d, lambda}; }
  static InnerProductSpec S(int d, double lambda) { return {Family::S, d, lambda}; }
  static InnerProductSpec Delta(int d, double c = 1.0 / std::numbers::pi) { return {Family::Delta, d, 1.0, 0.0, c}; }
  static InnerProductSpec Wmu(int d, double mu) { return {Family::Wmu, d, 1.0, mu}; }

  void validate() const {
    if (d < 2 || d > Monomial::kMaxDim) throw std::invalid_argument("inner product: d must lie in [2, 10]");
    switch (family) {
      case Family::I:
      case Family::II:
        if (!(lambda > 0.0)) throw std::invalid_argument("inner product: lambda must be > 0");
        break;
      case Family::S:
        if (!(lambda >= 0.0)) throw std::invalid_argument("inner product: lambda must be >= 0");
        break;
      case Family::Delta:
        if (!(delta_const > 0.0)) throw std::invalid_argument("inner product: Delta constant must be > 0");
        break;
      case Family::Wmu:
        if (!(mu > -1.0)) throw std::invalid_argument("inner product: mu must exceed -1");
        break;
    }
  }

  /// lambda-independent families report their whole value in `constant`.
  bool is_lambda_affine() const { return family == Family::I || family == Family::II || family == Family::S; }
};

enum class Path { exact, quadrature };

/// value = lambda * lambda_part + constant for families I, II, S.
struct IpParts {
  double lambda_part = 0.0;
  double constant = 0.0;
  double at(double lambda) const { return lambda * lambda_part + constant; }
};

namespace detail {

inline void check_args(const InnerProductSpec& spec, const MultiPoly& f, const MultiPoly& g) {
  spec.validate();
  if (f.dim() != spec.d) throw DimensionMismatch(spec.d, f.dim());
  if (g.dim() != spec.d) throw DimensionMismatch(spec.d, g.dim());
}

inline MultiPoly delta_image(const MultiPoly& f) {
  return (MultiPoly::one_minus_norm_squared(f.dim()) * f).laplacian();
}

inline IpParts exact_parts(const InnerProductSpec& spec, const MultiPoly& f, const MultiPoly& g) {
  const int d = spec.d;
  const double inv_area = 1.0 / sphere_area(d);
  switch (spec.family) {
    case Family::I:
      return {inv_area * ball_gradient_bilinear(f, g), inv_area * sphere_bilinear(f, g)};
    case Family::II:
      return {inv_area * ball_gradient_bilinear(f, g), f.coeff(Monomial{}) * g.coeff(Monomial{})};
    case Family::S:
      return {inv_area * sphere_bilinear(f.euler(), g.euler()), inv_area * sphere_bilinear(f, g)};
    case Family::Delta:
      return {0.0, spec.delta_const * ball_bilinear(delta_image(f), delta_image(g))};
    case Family::Wmu:
      return {0.0, weight_normalization(d, spec.mu) * ball_bilinear(f, g, spec.mu)};
  }
  return {};
}

inline double rule_bilinear(const PointRule& rule, const MultiPoly& f, const MultiPoly& g) {
  const CompiledPoly cf(f), cg(g);
  return rule.integrate([&](std::span<const double> x) { return cf(x) * cg(x); });
}

inline double rule_gradient_bilinear(const PointRule& rule, const MultiPoly& f, const MultiPoly& g) {
  std::vector<CompiledPoly> df, dg;
  for (int i = 0; i < f.dim(); ++i) {
    df.emplace_back(f.partial(i));
    dg.emplace_back(g.partial(i));
  }
  return rule.integrate([&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < df.size(); ++i) s += df[i](x) * dg[i](x);
    return s;
  });
}

}  // namespace detail

/// Degree that the quadrature path needs to be exact for the pair (f, g).
inline int required_quadrature_degree(const InnerProductSpec& spec, const MultiPoly& f, const MultiPoly& g) {
  (void)spec;  // every family integrates a product of degree deg f + deg g
  return f.degree() + g.degree();
}

/// Default exactness 2 * max degree + 6.
inline int default_quadrature_degree(const MultiPoly& f, const MultiPoly& g) {
  return 2 * std::max(f.degree(), g.degree()) + 6;
}

struct QuadratureIpResult {
  IpParts parts;
  int degree_used = 0;
  bool upgraded = false;
};

/// Product-quadrature evaluation; a degree below the requirement is raised
/// to it and flagged in the result.
inline QuadratureIpResult ip_parts_quadrature(const InnerProductSpec& spec, const MultiPoly& f, const MultiPoly& g,
                                              int quad_degree = -1) {
  detail::check_args(spec, f, g);
  QuadratureIpResult res;
  const int need = required_quadrature_degree(spec, f, g);
  res.degree_used = quad_degree < 0 ? std::max(need, default_quadrature_degree(f, g)) : quad_degree;
  if (res.degree_used < need) {
    res.degree_used = need;
    res.upgraded = true;
  }
  const int d = spec.d;
  const double inv_area = 1.0 / sphere_area(d);
  switch (spec.family) {
    case Family::I:
    case Family::II: {
      const auto ball = build_quadrature(d, res.degree_used);
      res.parts.lambda_part = inv_area * detail::rule_gradient_bilinear(ball, f, g);
      if (spec.family == Family::I) {
        res.parts.constant = inv_area * detail::rule_bilinear(build_sphere_rule(d, res.degree_used), f, g);
      } else {
        const std::vector<double> origin(d, 0.0);
        res.parts.constant = f.eval(origin) * g.eval(origin);
      }
      break;
    }
    case Family::S: {
      const auto sphere = build_sphere_rule(d, res.degree_used);
      const CompiledPoly cf(f), cg(g);
      std::vector<CompiledPoly> df, dg;
      for (int i = 0; i < d; ++i) {
        df.emplace_back(f.partial(i));
        dg.emplace_back(g.partial(i));
      }
      // Radial derivative on the sphere: x . grad f(x).
      auto radial = [d](const std::vector<CompiledPoly>& grad, std::span<const double> x) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += x[i] * grad[i](x);
        return s;
      };
      res.parts.lambda_part =
          inv_area * sphere.integrate([&](std::span<const double> x) { return radial(df, x) * radial(dg, x); });
      res.parts.constant = inv_area * sphere.integrate([&](std::span<const double> x) { return cf(x) * cg(x); });
      break;
    }
    case Family::Delta: {
      const auto ball = build_quadrature(d, res.degree_used);
      res.parts.constant =
          spec.delta_const * detail::rule_bilinear(ball, detail::delta_image(f), detail::delta_image(g));
      break;
    }
    case Family::Wmu: {
      const auto ball = build_quadrature(d, res.degree_used, spec.mu);
      res.parts.constant = weight_normalization(d, spec.mu) * detail::rule_bilinear(ball, f, g);
      break;
    }
  }
  return res;
}

inline IpParts ip_parts(const InnerProductSpec& spec, const MultiPoly& f, const MultiPoly& g,
                        Path path = Path::exact) {
  if (path == Path::quadrature) return ip_parts_quadrature(spec, f, g).parts;
  detail::check_args(spec, f, g);
  return detail::exact_parts(spec, f, g);
}

inline double ip(const InnerProductSpec& spec, const MultiPoly& f, const MultiPoly& g, Path path = Path::exact) {
  const IpParts p = ip_parts(spec, f, g, path);
  return spec.is_lambda_affine() ? p.at(spec.lambda) : p.constant;
}

/// <f, g>_I via Green's identity: no derivative of f is taken.
inline double ip_I_green(const MultiPoly& f, const MultiPoly& g, double lambda, int d) {
  detail::check_args(InnerProductSpec::I(d, lambda), f, g);
  const double inv_area = 1.0 / sphere_area(d);
  MultiPoly boundary = g.euler() * lambda + g;
  return inv_area * sphere_bilinear(f, boundary) - lambda * inv_area * ball_bilinear(f, g.laplacian());
}

/// Gram matrix split into lambda and constant parts; entry (a, b) is
/// computed independently, so the result does not depend on `threads`.
struct GramParts {
  Eigen::MatrixXd lambda_part;
  Eigen::MatrixXd constant;

  Eigen::MatrixXd at(double lambda) const { return lambda * lambda_part + constant; }
};

inline GramParts gram_parts(const InnerProductSpec& spec, std::span<const MultiPoly> polys, Path path = Path::exact,
                            int threads = 1) {
  const auto n = static_cast<Eigen::Index>(polys.size());
  GramParts g{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b <= a; ++b) cells.emplace_back(a, b);
  parallel_for(cells.size(), threads, [&](std::size_t k) {
    const auto [a, b] = cells[k];
    const IpParts p = ip_parts(spec, polys[a], polys[b], path);
    g.lambda_part(a, b) = g.lambda_part(b, a) = p.lambda_part;
    g.constant(a, b) = g.constant(b, a) = p.constant;
  });
  return g;
}

inline Eigen::MatrixXd gram_matrix(const InnerProductSpec& spec, std::span<const MultiPoly> polys,
                                   Path path = Path::exact, int threads = 1) {
  const GramParts g = gram_parts(spec, polys, path, threads);
  return spec.is_lambda_affine() ? g.at(spec.lambda) : g.constant;
}

}  // namespace sobolev_ball

#endif  // SOBOLEV_BALL_INNER_PRODUCT_HPP
