#ifndef SOBOLEV_BALL_CLI_HPP
#define SOBOLEV_BALL_CLI_HPP

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sobolev_ball/ball_basis.hpp"
#include "sobolev_ball/expansion.hpp"
#include "sobolev_ball/gram_report.hpp"
#include "sobolev_ball/inner_product.hpp"
#include "sobolev_ball/parallel.hpp"
#include "sobolev_ball/serialize.hpp"

namespace sobolev_ball::cli {

enum class Format { json, csv };

struct RunConfig {
  std::string command;
  std::string family = "I";
  int d = 2;
  int max_degree = -1;  // -1: command-specific default
  int min_degree = 0;
  double lambda = 1.0;
  double mu = 1.0;
  double delta_const = 1.0 / std::numbers::pi;
  int quad_degree = -1;
  std::string input;
  std::string poly;  // inline text polynomial, ';' separates terms
  std::string output;
  Format format = Format::json;
  double tolerance = 1e-9;
  int threads = default_thread_count();
  std::string path = "exact";
  std::string route = "gradient";
  bool sample = false;

  InnerProductSpec spec() const {
    InnerProductSpec s{parse_family(family), d, lambda, mu, delta_const};
    s.validate();
    return s;
  }
};

/// Exit codes: 0 ok, 1 numerical failure or tolerance exceeded, 2 config or parse error.
enum Exit { ok = 0, numerical = 1, config = 2 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Turns config-file keys into flags placed before the user's own flags, so
/// with a take-last policy the command line wins.
inline std::vector<std::string> config_flags(const Json& cfg) {
  std::vector<std::string> out;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") continue;
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_string()) {
      out.push_back(flag);
      out.push_back(value.get<std::string>());
    } else if (value.is_number_integer()) {
      out.push_back(flag);
      out.push_back(std::to_string(value.get<long long>()));
    } else if (value.is_number()) {
      out.push_back(flag);
      out.push_back(format_shortest(value.get<double>()));
    } else {
      throw ConfigError("config key '" + key + "' must be a scalar");
    }
  }
  return out;
}

inline MultiPoly load_polynomial(const RunConfig& c) {
  if (c.input.empty() == c.poly.empty()) throw ConfigError("give exactly one of --input or --poly");
  std::string text = c.input.empty() ? c.poly : read_file(c.input);
  if (!c.poly.empty()) std::replace(text.begin(), text.end(), ';', '\n');
  return parse_polynomial(text, c.d);
}

inline void emit(const RunConfig& c, const std::string& payload, std::ostream& out) {
  if (c.output.empty()) {
    out << payload;
    return;
  }
  std::ofstream file(c.output, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + c.output + "'");
  file << payload;
}

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace detail

inline int cmd_basis(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.max_degree < 0) throw ConfigError("basis needs --n");
  const auto s = c.spec();
  const auto elements = basis(s.family, c.max_degree, s.d, s.mu);
  if (c.format == Format::csv) {
    std::string csv = "n,j,nu,closed_lambda,closed_const\n";
    for (const auto& e : elements) {
      csv += std::to_string(e.n) + ',' + std::to_string(e.j) + ',' + std::to_string(e.nu) + ',' +
             format_shortest(e.closed_norm.lambda_coef) + ',' + format_shortest(e.closed_norm.constant) + '\n';
    }
    detail::emit(c, csv, out);
  } else {
    detail::emit(c, canonical_dump(basis_dump_json(elements)), out);
  }
  err << "elements=" << elements.size() << '\n';
  return Exit::ok;
}

inline int cmd_gram(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.max_degree < 0) throw ConfigError("gram needs --max-degree");
  if (c.path != "exact" && c.path != "quadrature") throw ConfigError("--path must be exact or quadrature");
  const auto r = gram_report(c.spec(), c.min_degree, c.max_degree,
                             c.path == "exact" ? Path::exact : Path::quadrature, c.threads);
  if (c.format == Format::csv) {
    std::string csv = "n,j,nu,measured,closed_form\n";
    char buf[80];
    for (const auto& e : r.diagonal) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", e.measured, e.closed_form);
      csv += std::to_string(e.n) + ',' + std::to_string(e.j) + ',' + std::to_string(e.nu) + ',' + buf + '\n';
    }
    detail::emit(c, csv, out);
  } else {
    detail::emit(c, canonical_dump(gram_report_json(r)), out);
  }
  err << "max_offdiag=" << detail::sci(r.max_offdiag);
  if (r.closed_form_is_nominal()) {
    err << " ratio_min=" << detail::sci(r.ratio_min) << " ratio_max=" << detail::sci(r.ratio_max) << '\n';
  } else {
    err << " max_diag_err=" << detail::sci(r.max_diag_err) << '\n';
  }
  if (r.max_offdiag > c.tolerance || r.max_diag_err > c.tolerance) {
    err << "error: Gram check exceeds tolerance " << detail::sci(c.tolerance) << '\n';
    return Exit::numerical;
  }
  return Exit::ok;
}

inline int cmd_expand(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto s = c.spec();
  if (s.family == Family::S) throw ConfigError("expand: family S has no ball expansion");
  const MultiPoly f = detail::load_polynomial(c);
  const int max_degree = c.max_degree < 0 ? f.degree() : c.max_degree;
  CoefficientTable table;
  if (c.sample) {
    // Evaluator mode: f is only sampled at quadrature nodes.
    const int budget = c.quad_degree < 0 ? f.degree() + max_degree : c.quad_degree;
    const CompiledPoly cf(f);
    const FunctionSource src(f.dim(), [&cf](std::span<const double> x) { return cf(x); }, budget, f.degree());
    table = expand(src, s, max_degree, c.threads);
  } else {
    table = expand(f, s, max_degree, c.threads);
  }
  const double residual = relative_coeff_distance(reconstruct(table), f);
  if (c.format == Format::csv) {
    detail::emit(c, entries_csv(table.entries), out);
  } else {
    detail::emit(c, canonical_dump(coefficient_table_json(table)), out);
  }
  err << "entries=" << table.entries.size() << " reconstruction_residual=" << detail::sci(residual) << '\n';
  return Exit::ok;
}

inline int cmd_parseval(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const MultiPoly f = detail::load_polynomial(c);
  ParsevalReport r;
  if (c.route == "gradient") {
    r = parseval_gradient(f, c.d, c.max_degree < 0 ? f.degree() : c.max_degree);
  } else if (c.route == "annihilated") {
    r = parseval_annihilated(f, c.d, c.max_degree < 0 ? f.degree() + 2 : c.max_degree);
  } else if (c.route == "sphere") {
    r = parseval_sphere(f, c.d, c.max_degree < 0 ? f.degree() : c.max_degree);
  } else {
    throw ConfigError("--route must be gradient, annihilated or sphere");
  }
  if (c.format == Format::csv) {
    detail::emit(c, entries_csv(r.terms), out);
  } else {
    detail::emit(c, canonical_dump(parseval_json(r)), out);
  }
  err << "lhs=" << format_shortest(r.lhs) << " rhs=" << format_shortest(r.rhs_total)
      << " relative_gap=" << detail::sci(r.relative_gap) << (r.truncated ? " (truncated)" : "") << '\n';
  if (r.relative_gap > c.tolerance) {
    err << "error: relative gap exceeds tolerance " << detail::sci(c.tolerance) << '\n';
    return Exit::numerical;
  }
  return Exit::ok;
}

/// In-process entry point; args exclude the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sobolev orthogonal polynomials on the unit ball"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  RunConfig c;
  std::string family, format = "json", config_path;
  const std::map<std::string, Format> formats{{"json", Format::json}, {"csv", Format::csv}};

  auto add_common = [&](CLI::App* sub) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--family", c.family, "I, II, S, Delta or Wmu");
    sub->add_option("--d", c.d, "dimension");
    sub->add_option("--n,--max-degree", c.max_degree, "degree (basis) or maximum degree");
    sub->add_option("--min-degree", c.min_degree, "lowest degree in the Gram matrix");
    sub->add_option("--lambda", c.lambda, "gradient weight");
    sub->add_option("--mu", c.mu, "weight exponent for Wmu");
    sub->add_option("--delta-const", c.delta_const, "normalisation of the Delta product");
    sub->add_option("--quad-degree", c.quad_degree, "quadrature exactness budget");
    sub->add_option("--input", c.input, "polynomial file (text or JSON)");
    sub->add_option("--poly", c.poly, "inline text polynomial, terms separated by ';'");
    sub->add_option("--output", c.output, "output file (default stdout)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--tolerance", c.tolerance, "pass/fail threshold");
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--path", c.path, "exact or quadrature (gram)");
    sub->add_option("--route", c.route, "gradient, annihilated or sphere (parseval)");
    sub->add_flag("--sample", c.sample, "treat the input as a black-box evaluator (expand)");
    sub->add_option("--config", config_path, "JSON config file; flags override it");
  };
  const std::pair<const char*, const char*> commands[] = {
      {"basis", "Dump the orthogonal basis of degree n"},
      {"gram", "Gram matrix of the basis up to max degree, with closed-form norms"},
      {"expand", "Fourier coefficient table of a polynomial or sampled function"},
      {"parseval", "Parseval identity check for a polynomial"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));

  // Config file keys are injected ahead of the command-line flags.
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      try {
        const Json cfg = Json::parse(detail::read_file(args[i + 1]));
        if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
        const bool has_command = !args.empty() && app.get_subcommand_no_throw(args[0]) != nullptr;
        auto extra = detail::config_flags(cfg);
        std::size_t at = 0;
        if (has_command) {
          at = 1;
        } else if (cfg.contains("command")) {
          args.insert(args.begin(), cfg["command"].get<std::string>());
          at = 1;
        }
        args.insert(args.begin() + at, extra.begin(), extra.end());
      } catch (const std::exception& e) {
        err << "error: config: " << e.what() << '\n';
        return Exit::config;
      }
      break;
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return Exit::ok;
    }
    err << "error: " << e.what() << '\n';
    return Exit::config;
  }
  c.command = app.get_subcommands().front()->get_name();
  c.format = formats.at(format);

  try {
    if (c.d < 2 || c.d > Monomial::kMaxDim) throw ConfigError("--d must lie in [2, 10]");
    if (const char* dir = std::getenv("SOBOLEV_BALL_CACHE"); dir && *dir) {
      const int top = c.max_degree < 0 ? 8 : c.max_degree + 2;
      sync_harmonic_cache(dir, top, c.d);
    }
    if (c.command == "basis") return cmd_basis(c, out, err);
    if (c.command == "gram") return cmd_gram(c, out, err);
    if (c.command == "expand") return cmd_expand(c, out, err);
    return cmd_parseval(c, out, err);
  } catch (const ParseError& e) {
    err << "error: parse: " << e.what() << '\n';
    return Exit::config;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return Exit::config;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return Exit::config;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return Exit::numerical;
  }
}

}  // namespace sobolev_ball::cli

#endif  // SOBOLEV_BALL_CLI_HPP
