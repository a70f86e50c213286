#ifndef SOBOLEV_BALL_SERIALIZE_HPP
#define SOBOLEV_BALL_SERIALIZE_HPP

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sobolev_ball/ball_basis.hpp"
#include "sobolev_ball/expansion.hpp"
#include "sobolev_ball/gram_report.hpp"
#include "sobolev_ball/harmonics.hpp"
#include "sobolev_ball/polynomial.hpp"

namespace sobolev_ball {

using Json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest string that parses back to exactly x.
inline std::string format_shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// One term per line: `coef e1 ... ed`, graded-lex order.
inline std::string to_text(const MultiPoly& p) {
  std::string out;
  for (const auto& [m, c] : p.sorted_terms()) {
    out += format_shortest(c);
    for (int i = 0; i < p.dim(); ++i) out += ' ' + std::to_string(m[i]);
    out += '\n';
  }
  return out;
}

/// Blank lines and lines starting with '#' are skipped. `dim` < 0 infers the
/// dimension from the first term; an empty input then needs an explicit dim.
inline MultiPoly parse_text(std::string_view text, int dim = -1) {
  std::vector<std::pair<Monomial, double>> terms;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    const int cols = static_cast<int>(tokens.size()) - 1;
    if (dim < 0) dim = cols;
    if (cols != dim) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) + " exponents, got " +
                       std::to_string(cols));
    }
    double c = 0.0;
    const auto& ct = tokens[0];
    const auto cr = std::from_chars(ct.data(), ct.data() + ct.size(), c);
    if (cr.ec != std::errc{} || cr.ptr != ct.data() + ct.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": bad coefficient '" + ct + "'");
    }
    std::vector<int> exps(dim);
    for (int i = 0; i < dim; ++i) {
      const auto& et = tokens[i + 1];
      const auto er = std::from_chars(et.data(), et.data() + et.size(), exps[i]);
      if (er.ec != std::errc{} || er.ptr != et.data() + et.size() || exps[i] < 0) {
        throw ParseError("line " + std::to_string(line_no) + ": bad exponent '" + et + "'");
      }
    }
    try {
      terms.emplace_back(Monomial(exps), c);
    } catch (const std::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (dim < 1) throw ParseError("empty polynomial needs an explicit dimension");
  MultiPoly p(dim);
  for (const auto& [m, c] : terms) p.add_term(m, c);
  return p;
}

/// {"dim": d, "terms": [[[e1,...,ed], coef], ...]}
inline Json to_json(const MultiPoly& p) {
  Json terms = Json::array();
  for (const auto& [m, c] : p.sorted_terms()) terms.push_back(Json::array({m.exponents(p.dim()), c}));
  return Json{{"dim", p.dim()}, {"terms", std::move(terms)}};
}

inline MultiPoly poly_from_json(const Json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    MultiPoly p(dim);
    for (const auto& t : j.at("terms")) {
      const auto exps = t.at(0).get<std::vector<int>>();
      if (static_cast<int>(exps.size()) != dim) throw ParseError("term exponent count differs from dim");
      p.add_term(Monomial(exps), t.at(1).get<double>());
    }
    return p;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("polynomial JSON: ") + e.what());
  }
}

/// JSON if the first non-blank character is '{', text format otherwise.
inline MultiPoly parse_polynomial(std::string_view text, int dim = -1) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ParseError(std::string("polynomial JSON: ") + e.what());
    }
    MultiPoly p = poly_from_json(j);
    if (dim >= 0 && p.dim() != dim) throw ParseError("polynomial dimension differs from --d");
    return p;
  }
  return parse_text(text, dim);
}

namespace detail {
inline void write_canonical(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {  // std::map storage: keys sorted
        if (!first) out += ',';
        first = false;
        out += Json(k).dump();
        out += ':';
        write_canonical(v, out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        write_canonical(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        break;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out += buf;
      break;
    }
    default: out += j.dump();
  }
}
}  // namespace detail

/// Sorted keys, no whitespace, floats as %.17g; ends with a newline.
inline std::string canonical_dump(const Json& j) {
  std::string out;
  detail::write_canonical(j, out);
  out += '\n';
  return out;
}

inline Json spec_json(const InnerProductSpec& s) {
  Json j{{"family", std::string(family_name(s.family))}, {"d", s.d}};
  switch (s.family) {
    case Family::I:
    case Family::II:
    case Family::S: j["lambda"] = s.lambda; break;
    case Family::Delta: j["c"] = s.delta_const; break;
    case Family::Wmu: j["mu"] = s.mu; break;
  }
  return j;
}

inline Json basis_dump_json(const std::vector<BasisElement>& elements) {
  Json arr = Json::array();
  for (const auto& e : elements) {
    arr.push_back({{"family", std::string(family_name(e.family))},
                   {"n", e.n},
                   {"j", e.j},
                   {"nu", e.nu},
                   {"closed_norm", Json::array({e.closed_norm.lambda_coef, e.closed_norm.constant})},
                   {"poly", to_json(e.poly)}});
  }
  return arr;
}

inline Json gram_report_json(const GramReport& r) {
  Json matrix = Json::array();
  for (Eigen::Index a = 0; a < r.matrix.rows(); ++a)
    for (Eigen::Index b = 0; b < r.matrix.cols(); ++b) matrix.push_back(r.matrix(a, b));
  Json diag = Json::array();
  for (const auto& e : r.diagonal) {
    diag.push_back({{"n", e.n}, {"j", e.j}, {"nu", e.nu}, {"measured", e.measured}, {"closed_form", e.closed_form},
                    {"ratio", e.measured / e.closed_form}});
  }
  Json j{{"spec", spec_json(r.spec)},
         {"degree_range", Json::array({r.min_degree, r.max_degree})},
         {"size", r.matrix.rows()},
         {"matrix", std::move(matrix)},
         {"max_offdiag", r.max_offdiag},
         {"diag_vs_closed_form", std::move(diag)},
         {"closed_form_nominal", r.closed_form_is_nominal()}};
  if (r.closed_form_is_nominal()) {
    j["ratio_min"] = r.ratio_min;
    j["ratio_max"] = r.ratio_max;
  } else {
    j["max_diag_err"] = r.max_diag_err;
  }
  return j;
}

inline Json entries_json(const std::vector<CoefficientEntry>& entries) {
  Json arr = Json::array();
  for (const auto& e : entries) arr.push_back(Json::array({e.n, e.j, e.nu, e.value}));
  return arr;
}

inline Json coefficient_table_json(const CoefficientTable& t) {
  Json params = spec_json(t.spec);
  params.erase("family");
  params.erase("d");
  return Json{{"family", std::string(family_name(t.spec.family))},
              {"d", t.spec.d},
              {"params", std::move(params)},
              {"max_degree", t.max_degree},
              {"entries", entries_json(t.entries)}};
}

inline Json parseval_json(const ParsevalReport& r) {
  return Json{{"lhs", r.lhs},
              {"rhs_total", r.rhs_total},
              {"relative_gap", r.relative_gap},
              {"truncated", r.truncated},
              {"terms", entries_json(r.terms)}};
}

/// Rows `n,j,nu,value` with a header line.
inline std::string entries_csv(const std::vector<CoefficientEntry>& entries) {
  std::string out = "n,j,nu,value\n";
  char buf[40];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out += std::to_string(e.n) + ',' + std::to_string(e.j) + ',' + std::to_string(e.nu) + ',' + buf + '\n';
  }
  return out;
}

inline Json harmonic_basis_json(const HarmonicBasis& b) {
  Json elements = Json::array();
  for (int k = 0; k < b.size(); ++k) {
    elements.push_back({{"d", b.d}, {"n", b.n}, {"nu", k + 1}, {"poly", to_json(b[k])}});
  }
  return Json{{"d", b.d}, {"n", b.n}, {"elements", std::move(elements)}};
}

inline HarmonicBasis harmonic_basis_from_json(const Json& j) {
  try {
    HarmonicBasis b;
    b.d = j.at("d").get<int>();
    b.n = j.at("n").get<int>();
    for (const auto& e : j.at("elements")) b.elements.push_back(poly_from_json(e.at("poly")));
    if (b.size() != dim_harmonic(b.n, b.d)) throw ParseError("harmonic cache entry has wrong size");
    return b;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("harmonic cache JSON: ") + e.what());
  }
}

/// Loads harmonic bases of degree <= max_n from `dir`, building and writing
/// any that are missing. Unreadable or corrupt files are rebuilt.
inline void sync_harmonic_cache(const std::filesystem::path& dir, int max_n, int d) {
  std::filesystem::create_directories(dir);
  auto& cache = HarmonicCache::instance();
  for (int n = 0; n <= max_n; ++n) {
    const auto file = dir / ("harmonic_d" + std::to_string(d) + "_n" + std::to_string(n) + ".json");
    if (!cache.contains(n, d) && std::filesystem::exists(file)) {
      try {
        std::ifstream in(file);
        cache.insert(harmonic_basis_from_json(Json::parse(in)));
        continue;
      } catch (const std::exception&) {
        // fall through and rebuild
      }
    }
    const HarmonicBasis& b = harmonic_basis(n, d);
    if (!std::filesystem::exists(file)) {
      std::ofstream out(file);
      out << canonical_dump(harmonic_basis_json(b));
    }
  }
}

}  // namespace sobolev_ball

#endif  // SOBOLEV_BALL_SERIALIZE_HPP
