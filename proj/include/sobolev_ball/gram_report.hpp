#ifndef SOBOLEV_BALL_GRAM_REPORT_HPP
#define SOBOLEV_BALL_GRAM_REPORT_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sobolev_ball/ball_basis.hpp"
#include "sobolev_ball/inner_product.hpp"

namespace sobolev_ball {

struct DiagonalEntry {
  int n = 0;
  int j = 0;
  int nu = 1;
  double measured = 0.0;
  double closed_form = 0.0;
};

/// Cross-Gram of every basis element with degree in [min_degree, max_degree].
///
/// For Delta the closed forms are nominal, so `max_diag_err` is left at zero
/// and the spread of measured/closed ratios is reported instead.
struct GramReport {
  InnerProductSpec spec;
  int min_degree = 0;
  int max_degree = 0;
  Eigen::MatrixXd matrix;
  std::vector<DiagonalEntry> diagonal;
  double max_offdiag = 0.0;
  double max_diag_err = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;

  bool closed_form_is_nominal() const { return spec.family == Family::Delta; }
  double ratio_spread() const { return ratio_min == 0.0 ? 0.0 : ratio_max / ratio_min - 1.0; }
};

inline GramReport gram_report(const InnerProductSpec& spec, int min_degree, int max_degree, Path path = Path::exact,
                              int threads = 1) {
  spec.validate();
  if (min_degree < 0 || max_degree < min_degree) throw std::invalid_argument("gram_report: bad degree range");
  std::vector<BasisElement> elements;
  for (int n = min_degree; n <= max_degree; ++n) {
    auto b = basis(spec.family, n, spec.d, spec.mu);
    elements.insert(elements.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
  }
  std::vector<MultiPoly> polys;
  polys.reserve(elements.size());
  for (const auto& e : elements) polys.push_back(e.poly);

  GramReport r{spec, min_degree, max_degree, gram_matrix(spec, polys, path, threads)};
  const auto size = r.matrix.rows();
  for (Eigen::Index a = 0; a < size; ++a)
    for (Eigen::Index b = 0; b < size; ++b)
      if (a != b) r.max_offdiag = std::max(r.max_offdiag, std::abs(r.matrix(a, b)));

  for (Eigen::Index a = 0; a < size; ++a) {
    const auto& e = elements[a];
    const double closed = e.family == Family::Wmu || e.family == Family::Delta ? e.closed_norm.constant
                                                                               : e.closed_norm.at(spec.lambda);
    const double measured = r.matrix(a, a);
    r.diagonal.push_back({e.n, e.j, e.nu, measured, closed});
    if (r.closed_form_is_nominal()) {
      const double ratio = measured / closed;
      r.ratio_min = a == 0 ? ratio : std::min(r.ratio_min, ratio);
      r.ratio_max = a == 0 ? ratio : std::max(r.ratio_max, ratio);
    } else {
      r.max_diag_err = std::max(r.max_diag_err, std::abs(measured - closed) / std::abs(closed));
    }
  }
  return r;
}

}  // namespace sobolev_ball

#endif  // SOBOLEV_BALL_GRAM_REPORT_HPP
