#ifndef SOBOLEV_BALL_POLYNOMIAL_HPP
#define SOBOLEV_BALL_POLYNOMIAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sobolev_ball {

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(int a, int b)
      : std::invalid_argument("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

/// Exponent vector of a monomial in at most kMaxDim variables.
///
/// Exponents are packed six bits per variable into one 64-bit word, so the
/// product of two monomials is a single integer addition as long as no
/// exponent exceeds kMaxExponent.
class Monomial {
 public:
  static constexpr int kMaxDim = 10;
  static constexpr int kMaxExponent = 63;
  static constexpr int kBits = 6;

  constexpr Monomial() = default;

  explicit Monomial(std::span<const int> exponents) {
    if (exponents.size() > static_cast<std::size_t>(kMaxDim)) {
      throw std::invalid_argument("Monomial: at most 10 variables are supported");
    }
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      const int e = exponents[i];
      if (e < 0 || e > kMaxExponent) {
        throw std::out_of_range("Monomial: exponent out of range [0, 63]");
      }
      key_ |= static_cast<std::uint64_t>(e) << (kBits * i);
    }
  }

  Monomial(std::initializer_list<int> exponents)
      : Monomial(std::span<const int>(exponents.begin(), exponents.size())) {}

  static constexpr Monomial from_key(std::uint64_t key) {
    Monomial m;
    m.key_ = key;
    return m;
  }

  constexpr int operator[](int i) const {
    return static_cast<int>((key_ >> (kBits * i)) & kFieldMask);
  }

  constexpr int degree() const {
    int s = 0;
    for (std::uint64_t k = key_; k != 0; k >>= kBits) s += static_cast<int>(k & kFieldMask);
    return s;
  }

  constexpr int max_exponent() const {
    int m = 0;
    for (std::uint64_t k = key_; k != 0; k >>= kBits) m = std::max(m, static_cast<int>(k & kFieldMask));
    return m;
  }

  /// True when every exponent is even.
  constexpr bool all_even() const { return (key_ & kLowBits) == 0; }

  constexpr std::uint64_t key() const { return key_; }

  /// Copy with exponent i replaced; caller guarantees 0 <= e <= 63.
  constexpr Monomial with(int i, int e) const {
    Monomial m;
    m.key_ = (key_ & ~(kFieldMask << (kBits * i))) | (static_cast<std::uint64_t>(e) << (kBits * i));
    return m;
  }

  /// Product; caller guarantees no exponent overflows (see MultiPoly::operator*).
  friend constexpr Monomial operator*(Monomial a, Monomial b) { return from_key(a.key_ + b.key_); }
  friend constexpr bool operator==(Monomial a, Monomial b) = default;

  std::vector<int> exponents(int dim) const {
    std::vector<int> e(dim);
    for (int i = 0; i < dim; ++i) e[i] = (*this)[i];
    return e;
  }

 private:
  static constexpr std::uint64_t kFieldMask = (std::uint64_t{1} << kBits) - 1;
  static constexpr std::uint64_t kLowBits = 0x041041041041041ULL;  // bit 0 of each field
  std::uint64_t key_ = 0;
};

/// Graded lexicographic order: lower degree first, then x1 dominant.
inline bool graded_lex_less(Monomial a, Monomial b, int dim) {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  for (int i = 0; i < dim; ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

struct MonomialHash {
  std::size_t operator()(Monomial m) const noexcept {
    std::uint64_t x = m.key() + 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(x ^ (x >> 31));
  }
};

/// All monomials of exact total degree `degree` in `dim` variables, graded-lex ordered.
inline std::vector<Monomial> homogeneous_monomials(int dim, int degree) {
  std::vector<Monomial> out;
  std::vector<int> e(dim, 0);
  // Recursive fill: e[0] from degree down to 0, remaining mass distributed over the rest.
  auto rec = [&](auto&& self, int i, int remaining) -> void {
    if (i == dim - 1) {
      e[i] = remaining;
      out.emplace_back(std::span<const int>(e));
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      e[i] = k;
      self(self, i + 1, remaining - k);
    }
  };
  if (dim > 0) rec(rec, 0, degree);
  return out;
}

/// Sparse real polynomial in `dim` variables.
class MultiPoly {
 public:
  using TermMap = std::unordered_map<Monomial, double, MonomialHash>;

  MultiPoly() = default;
  explicit MultiPoly(int dim) : dim_(dim) {
    if (dim < 1 || dim > Monomial::kMaxDim) {
      throw std::invalid_argument("MultiPoly: dimension must lie in [1, 10]");
    }
  }

  static MultiPoly constant(int dim, double c) {
    MultiPoly p(dim);
    p.add_term(Monomial{}, c);
    return p;
  }
  /// The coordinate function x_i (0-based).
  static MultiPoly variable(int dim, int i) {
    MultiPoly p(dim);
    p.add_term(Monomial{}.with(i, 1), 1.0);
    return p;
  }
  static MultiPoly norm_squared(int dim) {
    MultiPoly p(dim);
    for (int i = 0; i < dim; ++i) p.add_term(Monomial{}.with(i, 2), 1.0);
    return p;
  }
  /// 1 - ||x||^2
  static MultiPoly one_minus_norm_squared(int dim) {
    MultiPoly p = norm_squared(dim) * -1.0;
    p.add_term(Monomial{}, 1.0);
    return p;
  }

  int dim() const { return dim_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  int max_exponent() const {
    int e = 0;
    for (const auto& [m, c] : terms_) e = std::max(e, m.max_exponent());
    return e;
  }

  double coeff(Monomial m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
  }

  /// Adds c to the coefficient of m; an exact zero result removes the term.
  void add_term(Monomial m, double c) {
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  /// Terms in canonical graded-lex order.
  std::vector<std::pair<Monomial, double>> sorted_terms() const {
    std::vector<std::pair<Monomial, double>> v(terms_.begin(), terms_.end());
    std::sort(v.begin(), v.end(),
              [d = dim_](const auto& a, const auto& b) { return graded_lex_less(a.first, b.first, d); });
    return v;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  /// Drops terms with |c| <= tol * max|c|.
  MultiPoly pruned(double rel_tol) const {
    const double cut = rel_tol * max_abs_coeff();
    MultiPoly out(dim_);
    for (const auto& [m, c] : terms_) {
      if (std::abs(c) > cut) out.terms_.emplace(m, c);
    }
    return out;
  }

  MultiPoly homogeneous_part(int k) const {
    MultiPoly out(dim_);
    for (const auto& [m, c] : terms_) {
      if (m.degree() == k) out.terms_.emplace(m, c);
    }
    return out;
  }

  MultiPoly& operator+=(const MultiPoly& q) {
    check_dim(q);
    for (const auto& [m, c] : q.terms_) add_term(m, c);
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& q) {
    check_dim(q);
    for (const auto& [m, c] : q.terms_) add_term(m, -c);
    return *this;
  }
  MultiPoly& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
    } else {
      for (auto& [m, c] : terms_) c *= s;
    }
    return *this;
  }

  friend MultiPoly operator+(MultiPoly p, const MultiPoly& q) { return p += q; }
  friend MultiPoly operator-(MultiPoly p, const MultiPoly& q) { return p -= q; }
  friend MultiPoly operator*(MultiPoly p, double s) { return p *= s; }
  friend MultiPoly operator*(double s, MultiPoly p) { return p *= s; }
  friend MultiPoly operator-(MultiPoly p) { return p *= -1.0; }

  friend MultiPoly operator*(const MultiPoly& p, const MultiPoly& q) {
    p.check_dim(q);
    if (p.max_exponent() + q.max_exponent() > Monomial::kMaxExponent) {
      throw std::overflow_error("MultiPoly: product exponent exceeds 63");
    }
    MultiPoly out(p.dim_);
    out.terms_.reserve(p.size() * q.size());
    for (const auto& [ma, ca] : p.terms_) {
      for (const auto& [mb, cb] : q.terms_) out.add_term(ma * mb, ca * cb);
    }
    return out;
  }

  double operator()(std::span<const double> x) const { return eval(x); }

  double eval(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(dim_)) throw DimensionMismatch(dim_, static_cast<int>(x.size()));
    const int maxe = max_exponent();
    std::vector<double> powers(static_cast<std::size_t>(dim_) * (maxe + 1));
    for (int i = 0; i < dim_; ++i) {
      double* row = powers.data() + static_cast<std::size_t>(i) * (maxe + 1);
      row[0] = 1.0;
      for (int k = 1; k <= maxe; ++k) row[k] = row[k - 1] * x[i];
    }
    double s = 0.0;
    for (const auto& [m, c] : terms_) {
      double t = c;
      for (int i = 0; i < dim_; ++i) t *= powers[static_cast<std::size_t>(i) * (maxe + 1) + m[i]];
      s += t;
    }
    return s;
  }

  /// d p / d x_i
  MultiPoly partial(int i) const {
    MultiPoly out(dim_);
    for (const auto& [m, c] : terms_) {
      const int e = m[i];
      if (e > 0) out.add_term(m.with(i, e - 1), c * e);
    }
    return out;
  }

  std::vector<MultiPoly> gradient() const {
    std::vector<MultiPoly> g;
    g.reserve(dim_);
    for (int i = 0; i < dim_; ++i) g.push_back(partial(i));
    return g;
  }

  MultiPoly laplacian() const {
    MultiPoly out(dim_);
    for (const auto& [m, c] : terms_) {
      for (int i = 0; i < dim_; ++i) {
        const int e = m[i];
        if (e > 1) out.add_term(m.with(i, e - 2), c * e * (e - 1));
      }
    }
    return out;
  }

  /// Euler operator <x, grad p>, which scales the degree-k part by k.
  /// Restricted to the unit sphere this is the radial derivative.
  MultiPoly euler() const {
    MultiPoly out(dim_);
    for (const auto& [m, c] : terms_) {
      const int k = m.degree();
      if (k > 0) out.terms_.emplace(m, c * k);
    }
    return out;
  }

  /// max |coef(p) - coef(q)| over the union of supports.
  friend double coeff_distance(const MultiPoly& p, const MultiPoly& q) {
    p.check_dim(q);
    double m = 0.0;
    for (const auto& [mono, c] : p.terms_) m = std::max(m, std::abs(c - q.coeff(mono)));
    for (const auto& [mono, c] : q.terms_) {
      if (!p.terms_.contains(mono)) m = std::max(m, std::abs(c));
    }
    return m;
  }

  void check_dim(const MultiPoly& q) const {
    if (dim_ != q.dim_) throw DimensionMismatch(dim_, q.dim_);
  }

 private:
  int dim_ = 1;
  TermMap terms_;
};

/// Coefficient-norm relative distance max|p - q| / max(1e-300, max|q|).
inline double relative_coeff_distance(const MultiPoly& p, const MultiPoly& q) {
  const double scale = std::max(p.max_abs_coeff(), q.max_abs_coeff());
  const double diff = coeff_distance(p, q);
  return scale == 0.0 ? diff : diff / scale;
}

/// Substitutes s = 2||x||^2 - 1 into the ascending coefficient vector q.
inline MultiPoly compose_radial(std::span<const double> q, int dim) {
  MultiPoly s = MultiPoly::norm_squared(dim) * 2.0 - MultiPoly::constant(dim, 1.0);
  MultiPoly out(dim);
  // Horner in s keeps the expansion short.
  for (std::size_t k = q.size(); k-- > 0;) {
    out = out * s;
    out += MultiPoly::constant(dim, q[k]);
  }
  return out;
}

}  // namespace sobolev_ball

#endif  // SOBOLEV_BALL_POLYNOMIAL_HPP
