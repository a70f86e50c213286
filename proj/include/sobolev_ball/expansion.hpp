#ifndef SOBOLEV_BALL_EXPANSION_HPP
#define SOBOLEV_BALL_EXPANSION_HPP

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sobolev_ball/ball_basis.hpp"
#include "sobolev_ball/harmonics.hpp"
#include "sobolev_ball/inner_product.hpp"
#include "sobolev_ball/moments.hpp"
#include "sobolev_ball/parallel.hpp"
#include "sobolev_ball/polynomial.hpp"
#include "sobolev_ball/quadrature.hpp"

namespace sobolev_ball {

using PointFunction = std::function<double(std::span<const double>)>;

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The function being expanded: a polynomial (integrated by exact moments) or
/// a point evaluator (integrated by product quadrature of a declared degree).
///
/// Every pairing below is normalised by 1/omega_d.
class FunctionSource {
 public:
  explicit FunctionSource(MultiPoly p) : d_(p.dim()), poly_(std::move(p)) {}

  /// `declared_degree` is the polynomial degree the caller vouches for (0 if unknown).
  FunctionSource(int d, PointFunction fn, int quad_degree, int declared_degree = 0)
      : d_(d), fn_(std::move(fn)), quad_degree_(quad_degree), declared_degree_(declared_degree) {
    if (quad_degree < 0) throw BudgetError("quadrature budget must be >= 0");
  }

  int dim() const { return d_; }
  bool is_polynomial() const { return poly_.has_value(); }
  const MultiPoly& polynomial() const { return *poly_; }

  /// Throws BudgetError when a basis of degree <= max_degree cannot be paired exactly.
  void require_budget(int max_degree) const {
    if (is_polynomial()) return;
    const int need = max_degree + declared_degree_;
    if (quad_degree_ < need) {
      throw BudgetError("quadrature budget " + std::to_string(quad_degree_) + " below required " +
                        std::to_string(need) + " (max degree + declared degree)");
    }
  }

  /// (1/omega) int_S f p
  double sphere_pair(const MultiPoly& p) const {
    if (poly_) return sphere_bilinear(*poly_, p) / sphere_area(d_);
    const auto& s = sampled(Domain::sphere, 0.0);
    return s.dot(p) / sphere_area(d_);
  }

  /// (1/omega) int_B f p (1 - |x|^2)^mu
  double ball_pair(const MultiPoly& p, double mu = 0.0) const {
    if (poly_) return ball_bilinear(*poly_, p, mu) / sphere_area(d_);
    const auto& s = sampled(Domain::ball, mu);
    return s.dot(p) / sphere_area(d_);
  }

  double at_origin() const {
    const std::vector<double> origin(d_, 0.0);
    return poly_ ? poly_->eval(origin) : fn_(origin);
  }

 private:
  struct Samples {
    PointRule rule;
    std::vector<double> values;
    double dot(const MultiPoly& p) const {
      const CompiledPoly cp(p);
      double s = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) s += rule.weights[i] * values[i] * cp(rule.point(i));
      return s;
    }
  };

  const Samples& sampled(Domain domain, double mu) const {
    std::lock_guard lock(*mutex_);
    const auto key = std::pair{domain == Domain::sphere ? 0 : 1, mu};
    auto it = samples_.find(key);
    if (it != samples_.end()) return *it->second;
    auto s = std::make_unique<Samples>();
    if (domain == Domain::sphere) {
      s->rule = build_sphere_rule(d_, quad_degree_);
    } else {
      s->rule = build_quadrature(d_, quad_degree_, mu);
    }
    s->values.reserve(s->rule.size());
    for (std::size_t i = 0; i < s->rule.size(); ++i) s->values.push_back(fn_(s->rule.point(i)));
    return *samples_.emplace(key, std::move(s)).first->second;
  }

  int d_;
  std::optional<MultiPoly> poly_;
  PointFunction fn_;
  int quad_degree_ = 0;
  int declared_degree_ = 0;
  mutable std::shared_ptr<std::mutex> mutex_ = std::make_shared<std::mutex>();
  mutable std::map<std::pair<int, double>, std::unique_ptr<Samples>> samples_;
};

/// <f, Y_nu^n>_{L^2(S^{d-1})}, nu 1-based.
inline double sphere_coefficient(const FunctionSource& f, int n, int nu) {
  return f.sphere_pair(harmonic_basis(n, f.dim())[nu - 1]);
}

/// (1/omega) int_B f P_{j-1,nu}^{n-2}(W_1), the ball pairing in the coefficient formulas.
inline double w1_pairing(const FunctionSource& f, int n, int j, int nu) {
  return f.ball_pair(wmu_element(n - 2, j - 1, nu, f.dim(), 1.0).poly);
}

namespace detail {
inline void check_indices(int n, int j, int nu, int d) {
  if (n < 0 || j < 0 || 2 * j > n) throw std::out_of_range("coefficient index: need 0 <= 2j <= n");
  if (nu < 1 || nu > dim_harmonic(n - 2 * j, d)) throw std::out_of_range("coefficient index: nu out of range");
}
}  // namespace detail

/// <f, U_{j,nu}^n>_I without differentiating f:
///   j = 0:  (lambda n + 1) <f, Y_nu^n>_S
///   j >= 1: -2 j lambda <f, Y_nu^{n-2j}>_S + 4 j (n - j + (d-2)/2) lambda/omega int_B f P_{j-1,nu}^{n-2}(W_1)
inline double fourier_coeff_I(const FunctionSource& f, int n, int j, int nu, double lambda) {
  const int d = f.dim();
  detail::check_indices(n, j, nu, d);
  if (j == 0) return (lambda * n + 1.0) * sphere_coefficient(f, n, nu);
  const double a = sphere_coefficient(f, n - 2 * j, nu);
  return -2.0 * j * lambda * a + 4.0 * j * (n - j + half_dim_shift(d)) * lambda * w1_pairing(f, n, j, nu);
}

inline double fourier_coeff_I(const MultiPoly& f, int n, int j, int nu, double lambda, int d) {
  f.check_dim(MultiPoly(d));
  return fourier_coeff_I(FunctionSource(f), n, j, nu, lambda);
}

/// <f, V_{n/2}^n>_II for even n >= 2 by Green's formula, using V(0) = 0 and
/// dV/dr = 4 on the sphere: 4 lambda/omega int_S f - lambda/omega int_B f Delta V.
inline double fourier_coeff_II_radial(const FunctionSource& f, int n, double lambda) {
  if (n < 2 || n % 2 != 0) throw std::out_of_range("radial coefficient: n must be even and >= 2");
  const int d = f.dim();
  const MultiPoly v = compose_radial(qk_coeffs(n / 2, d), d);
  return 4.0 * lambda * f.sphere_pair(MultiPoly::constant(d, 1.0)) - lambda * f.ball_pair(v.laplacian());
}

/// Derivative-free coefficient <f, b> for any ball-basis element under `spec`.
inline double fourier_coeff(const FunctionSource& f, const InnerProductSpec& spec, const BasisElement& b) {
  const int d = f.dim();
  switch (spec.family) {
    case Family::I: return fourier_coeff_I(f, b.n, b.j, b.nu, spec.lambda);
    case Family::II:
      if (b.n == 0) return f.at_origin();
      if (b.j == 0) return spec.lambda * b.n * sphere_coefficient(f, b.n, b.nu);
      if (2 * b.j == b.n) return fourier_coeff_II_radial(f, b.n, spec.lambda);
      return fourier_coeff_I(f, b.n, b.j, b.nu, spec.lambda);
    case Family::Delta: {
      // Green's second identity moves both Laplacians onto the basis element.
      const MultiPoly w = (MultiPoly::one_minus_norm_squared(d) * b.poly).laplacian();
      const MultiPoly inner = MultiPoly::one_minus_norm_squared(d) * w.laplacian();
      return spec.delta_const * sphere_area(d) * (f.ball_pair(inner) - 2.0 * f.sphere_pair(w));
    }
    case Family::Wmu: return weight_normalization(d, spec.mu) * sphere_area(d) * f.ball_pair(b.poly, spec.mu);
    case Family::S: break;
  }
  throw std::invalid_argument("fourier_coeff: family S has no ball expansion");
}

/// Squared norm of a basis element under `spec`: closed forms for I, II, S, Wmu;
/// exact moments for Delta, whose printed constants are nominal only.
inline double basis_norm(const InnerProductSpec& spec, const BasisElement& b) {
  switch (spec.family) {
    case Family::I:
    case Family::II:
    case Family::S: return b.closed_norm.at(spec.lambda);
    case Family::Wmu: return b.closed_norm.constant;
    case Family::Delta: return ip(spec, b.poly, b.poly);
  }
  throw std::invalid_argument("basis_norm: unknown family");
}

struct CoefficientEntry {
  int n = 0;
  int j = 0;
  int nu = 1;
  double value = 0.0;
};

/// Dense table of <f, b> over every basis element of degree <= max_degree.
struct CoefficientTable {
  InnerProductSpec spec;
  int max_degree = 0;
  std::vector<CoefficientEntry> entries;

  double at(int n, int j, int nu) const {
    for (const auto& e : entries)
      if (e.n == n && e.j == j && e.nu == nu) return e.value;
    throw std::out_of_range("CoefficientTable: no entry for index");
  }
};

/// All basis elements of degree <= max_degree in table order.
inline std::vector<BasisElement> basis_up_to(const InnerProductSpec& spec, int max_degree) {
  std::vector<BasisElement> out;
  for (int n = 0; n <= max_degree; ++n) {
    auto b = basis(spec.family, n, spec.d, spec.mu);
    out.insert(out.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
  }
  return out;
}

inline CoefficientTable expand(const FunctionSource& f, const InnerProductSpec& spec, int max_degree,
                               int threads = 1) {
  spec.validate();
  if (f.dim() != spec.d) throw DimensionMismatch(spec.d, f.dim());
  if (max_degree < 0) throw std::invalid_argument("expand: max_degree must be >= 0");
  f.require_budget(max_degree);
  const auto elements = basis_up_to(spec, max_degree);
  CoefficientTable table{spec, max_degree, std::vector<CoefficientEntry>(elements.size())};
  // Warm the evaluator caches before fanning out.
  if (!f.is_polynomial()) {
    f.sphere_pair(MultiPoly::constant(spec.d, 1.0));
    f.ball_pair(MultiPoly::constant(spec.d, 1.0), spec.family == Family::Wmu ? spec.mu : 0.0);
  }
  parallel_for(elements.size(), threads, [&](std::size_t k) {
    const auto& b = elements[k];
    table.entries[k] = {b.n, b.j, b.nu, fourier_coeff(f, spec, b)};
  });
  return table;
}

inline CoefficientTable expand(const MultiPoly& f, const InnerProductSpec& spec, int max_degree, int threads = 1) {
  return expand(FunctionSource(f), spec, max_degree, threads);
}

/// sum_b H_b^{-1} <f, b> b
inline MultiPoly reconstruct(const CoefficientTable& table) {
  const auto elements = basis_up_to(table.spec, table.max_degree);
  MultiPoly out(table.spec.d);
  for (std::size_t k = 0; k < elements.size(); ++k) {
    out += elements[k].poly * (table.entries[k].value / basis_norm(table.spec, elements[k]));
  }
  return out;
}

/// Degree-n projection for <.,.>_I in kernel form:
///   Y_n f + (1-|x|^2) [ c_1 int_B f(y) P_{n-2}(W_1; x, y) dy
///                       - (n + (d-2)/2) sum_j j^{-1} P_{j-1}^{(1, n-2j+(d-2)/2)}(2|x|^2-1) Y_{n-2j} f ].
/// The result does not depend on lambda.
inline MultiPoly project_I(const FunctionSource& f, int n) {
  if (n < 0) throw std::invalid_argument("project_I: n must be >= 0");
  const int d = f.dim();
  const double shift = half_dim_shift(d);
  MultiPoly out(d);
  const auto& h = harmonic_basis(n, d);
  for (int nu = 1; nu <= h.size(); ++nu) out += h[nu - 1] * f.sphere_pair(h[nu - 1]);
  if (n < 2) return out;

  MultiPoly bracket(d);
  const double c1 = weight_normalization(d, 1.0);
  const double area = sphere_area(d);
  for (const auto& p : wmu_basis(n - 2, d, 1.0)) {
    const double integral = area * f.ball_pair(p.poly);
    bracket += p.poly * (c1 * integral / p.closed_norm.constant);
  }
  for (int j = 1; 2 * j <= n; ++j) {
    const auto& hj = harmonic_basis(n - 2 * j, d);
    MultiPoly yf(d);
    for (int nu = 1; nu <= hj.size(); ++nu) yf += hj[nu - 1] * f.sphere_pair(hj[nu - 1]);
    const MultiPoly radial = compose_radial(jacobi_coeffs(j - 1, {1.0, n - 2 * j + shift}), d);
    bracket -= radial * yf * ((n + shift) / j);
  }
  out += MultiPoly::one_minus_norm_squared(d) * bracket;
  return out;
}

inline MultiPoly project_I(const MultiPoly& f, int n) { return project_I(FunctionSource(f), n); }

/// Degree-n projection as the basis sum sum_{j,nu} H_j^{-1} f_{j,nu} U_{j,nu}^n.
inline MultiPoly project_basis(const FunctionSource& f, const InnerProductSpec& spec, int n) {
  MultiPoly out(f.dim());
  for (const auto& b : basis(spec.family, n, spec.d, spec.mu)) {
    out += b.poly * (fourier_coeff(f, spec, b) / basis_norm(spec, b));
  }
  return out;
}

/// L^2(W_mu) orthogonal projection onto V_n(W_mu).
inline MultiPoly proj_Wmu(const MultiPoly& g, int n, int d, double mu) {
  g.check_dim(MultiPoly(d));
  return project_basis(FunctionSource(g), InnerProductSpec::Wmu(d, mu), n);
}

/// P_n(x, .) as a polynomial in the second argument.
inline MultiPoly kernel_polynomial(const InnerProductSpec& spec, int n, std::span<const double> x) {
  spec.validate();
  MultiPoly out(spec.d);
  for (const auto& b : basis(spec.family, n, spec.d, spec.mu)) {
    out += b.poly * (b.form.eval(x) / basis_norm(spec, b));
  }
  return out;
}

/// P_n(x, y) = sum_b H_b^{-1} b(x) b(y).
inline double reproducing_kernel(const InnerProductSpec& spec, int n, std::span<const double> x,
                                 std::span<const double> y) {
  spec.validate();
  double s = 0.0;
  for (const auto& b : basis(spec.family, n, spec.d, spec.mu)) s += b.form.eval(x) * b.form.eval(y) / basis_norm(spec, b);
  return s;
}

/// Parseval bookkeeping: lhs energy, per-index contributions, their total.
struct ParsevalReport {
  double lhs = 0.0;
  std::vector<CoefficientEntry> terms;
  double rhs_total = 0.0;
  double relative_gap = 0.0;
  bool truncated = false;  // max_n below the degree needed for a complete sum
};

namespace detail {
inline void finish(ParsevalReport& r) {
  r.rhs_total = 0.0;
  for (const auto& t : r.terms) r.rhs_total += t.value;
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs_total));
  r.relative_gap = scale == 0.0 ? 0.0 : std::abs(r.lhs - r.rhs_total) / scale;
}

inline double gradient_energy(const MultiPoly& f) {
  return ball_gradient_bilinear(f, f) / sphere_area(f.dim());
}
}  // namespace detail

/// (1/omega) int_B |grad f|^2 = sum_n n sum_nu a_{n,nu}^2
///   + 2 sum_n (n + (d-2)/2) sum_{j>=1,nu} (a_{n-2j,nu} - (n-j+(d-2)/2) <f, P_{j-1,nu}^{n-2}(W_1)>)^2
/// with a = <f, Y>_S and <f, P> = (2/omega) int_B f P.
inline ParsevalReport parseval_gradient(const MultiPoly& f, int d, int max_n) {
  f.check_dim(MultiPoly(d));
  const FunctionSource src(f);
  const double shift = half_dim_shift(d);
  ParsevalReport r;
  r.lhs = detail::gradient_energy(f);
  r.truncated = max_n < f.degree();
  for (int n = 0; n <= max_n; ++n) {
    for (int nu = 1; nu <= dim_harmonic(n, d); ++nu) {
      const double a = sphere_coefficient(src, n, nu);
      r.terms.push_back({n, 0, nu, n * a * a});
    }
    for (int j = 1; 2 * j <= n; ++j) {
      for (int nu = 1; nu <= dim_harmonic(n - 2 * j, d); ++nu) {
        const double a = sphere_coefficient(src, n - 2 * j, nu);
        const double b = 2.0 * w1_pairing(src, n, j, nu);
        const double diff = a - (n - j + shift) * b;
        r.terms.push_back({n, j, nu, 2.0 * (n + shift) * diff * diff});
      }
    }
  }
  detail::finish(r);
  return r;
}

/// For f = (1 - |x|^2) g: (1/omega) int_B |grad f|^2
///   = 2 sum_n (n + (d-2)/2) sum_{j>=1,nu} (n-j+(d-2)/2)^2 ghat^2,
/// where ghat = (2/omega) int_B g P_{j-1,nu}^{n-2}(W_1) (1 - |y|^2) is the W_1
/// coefficient of g at index (n-2, j-1, nu).
inline ParsevalReport parseval_annihilated(const MultiPoly& g, int d, int max_n) {
  g.check_dim(MultiPoly(d));
  const FunctionSource src(g);
  const double shift = half_dim_shift(d);
  const MultiPoly f = MultiPoly::one_minus_norm_squared(d) * g;
  ParsevalReport r;
  r.lhs = detail::gradient_energy(f);
  r.truncated = max_n < f.degree();
  for (int n = 2; n <= max_n; ++n) {
    for (int j = 1; 2 * j <= n; ++j) {
      for (int nu = 1; nu <= dim_harmonic(n - 2 * j, d); ++nu) {
        const double ghat = 2.0 * src.ball_pair(wmu_element(n - 2, j - 1, nu, d, 1.0).poly, 1.0);
        const double c = n - j + shift;
        r.terms.push_back({n, j, nu, 2.0 * (n + shift) * c * c * ghat * ghat});
      }
    }
  }
  detail::finish(r);
  return r;
}

/// (1/omega) int_S f^2 = sum_n sum_nu <f, Y_nu^n>_S^2.
inline ParsevalReport parseval_sphere(const MultiPoly& f, int d, int max_n) {
  f.check_dim(MultiPoly(d));
  const FunctionSource src(f);
  ParsevalReport r;
  r.lhs = src.sphere_pair(f);
  r.truncated = max_n < f.degree();
  for (int n = 0; n <= max_n; ++n) {
    for (int nu = 1; nu <= dim_harmonic(n, d); ++nu) {
      const double a = sphere_coefficient(src, n, nu);
      r.terms.push_back({n, 0, nu, a * a});
    }
  }
  detail::finish(r);
  return r;
}

/// sum_b |<f, U_b>_I|^2 / H_b(lambda), the full family-I Parseval sum for <f, f>_I.
inline double parseval_sum_I(const MultiPoly& f, double lambda, int d, int max_n) {
  const FunctionSource src(f);
  double s = 0.0;
  for (int n = 0; n <= max_n; ++n) {
    for (const auto& b : basis_I(n, d)) {
      const double c = fourier_coeff_I(src, b.n, b.j, b.nu, lambda);
      s += c * c / b.closed_norm.at(lambda);
    }
  }
  return s;
}

}  // namespace sobolev_ball

#endif  // SOBOLEV_BALL_EXPANSION_HPP
