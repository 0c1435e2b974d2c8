#pragma once

// Experiment description read from an INI file:
//
//   [potential]  beta, alpha, q = none|polynomial|step|table,
//                pieces = "lo hi : c0 c1 ... | lo hi : ..." (polynomial),
//                pieces = "lo hi : height | ..." (step),
//                knots = "x0 x1 ...", values = "v0 v1 ..." (table),
//                support = "lo hi" (optional)
//   [solver]     rtol, atol, matching_point, det0 (optional)
//   [oracle]     N, L (optional), tol
//   [sweep]      parameter = alpha|b, from, to, steps (section optional)
//   [output]     format = csv|json, path (optional; stdout when empty)
//
// Sweeping b moves the upper end of the last perturbation piece (and of a
// declared support) to b.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "specdet/error.hpp"
#include "specdet/ode.hpp"
#include "specdet/potential.hpp"

namespace specdet::config {

struct SweepConfig {
  std::string parameter = "alpha";
  double from = 0.0;
  double to = 0.0;
  int steps = 2;
  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;

  double value(int i) const {
    if (i == steps - 1) return to;
    return from + (to - from) * double(i) / double(steps - 1);
  }
};

struct RunConfig {
  double beta = 2.0;
  double alpha = 0.0;
  Perturbation q;
  std::optional<Interval> support;
  ode::Tolerance solver{1e-10, 1e-12};
  double matching_point = 0.0;
  std::optional<double> det0;
  std::size_t N = 100;
  std::optional<double> L;
  double oracle_tol = 1e-8;
  std::optional<SweepConfig> sweep;
  std::string format = "csv";
  std::string path;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  PotentialSpec spec() const { return PotentialSpec(beta, alpha, q, support); }

  /// The potential with the sweep parameter set to `value`.
  PotentialSpec spec_at(double value) const {
    if (!sweep || sweep->parameter == "alpha") return PotentialSpec(beta, value, q, support);
    return PotentialSpec(beta, alpha, with_upper_end(q, value), moved_support(value));
  }

 private:
  std::optional<Interval> moved_support(double b) const {
    if (!support) return std::nullopt;
    return Interval{support->lo, b};
  }

  static Perturbation with_upper_end(const Perturbation& q, double b) {
    const auto& v = q.variant();
    if (auto* poly = std::get_if<Perturbation::Polynomial>(&v)) {
      if (poly->empty()) throw ConfigError("sweep over b needs at least one piece");
      auto pieces = *poly;
      pieces.back().interval.hi = b;
      return Perturbation::polynomial(std::move(pieces));
    }
    if (auto* steps = std::get_if<Perturbation::Steps>(&v)) {
      if (steps->empty()) throw ConfigError("sweep over b needs at least one piece");
      auto pieces = *steps;
      pieces.back().interval.hi = b;
      return Perturbation::steps(std::move(pieces));
    }
    throw ConfigError("sweep over b needs a polynomial or step perturbation");
  }
};

namespace detail {

using boost::property_tree::ptree;

inline double parse_number(const std::string& text, const std::string& key) {
  const char* first = text.data();
  const char* last = first + text.size();
  while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(last[-1]))) --last;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ConfigError("'" + key + "': not a number: '" + text + "'");
  }
  if (!std::isfinite(v)) throw ConfigError("'" + key + "': must be finite");
  return v;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(parse_number(tok, key));
  return out;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

/// Shortest text that reads back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_number(v[i]);
  }
  return s;
}

struct Section {
  const ptree* tree = nullptr;
  std::string name;
  std::set<std::string> allowed;

  void check_keys() const {
    if (!tree) return;
    for (const auto& [key, child] : *tree) {
      if (!child.empty()) throw ConfigError("[" + name + "] '" + key + "': nested keys are not supported");
      if (!allowed.count(key)) throw ConfigError("[" + name + "] unknown key '" + key + "'");
    }
  }
  std::optional<std::string> raw(const std::string& key) const {
    if (!tree) return std::nullopt;
    auto it = tree->find(key);
    if (it == tree->not_found()) return std::nullopt;
    return it->second.data();
  }
  std::optional<double> number(const std::string& key) const {
    auto r = raw(key);
    if (!r) return std::nullopt;
    return parse_number(*r, name + "." + key);
  }
};

inline std::vector<std::pair<Interval, std::vector<double>>> parse_pieces(const std::string& text) {
  std::vector<std::pair<Interval, std::vector<double>>> out;
  for (const std::string& part : split(text, '|')) {
    const auto halves = split(part, ':');
    if (halves.size() != 2) throw ConfigError("potential.pieces: expected 'lo hi : values' in '" + part + "'");
    const auto ends = parse_list(halves[0], "potential.pieces");
    if (ends.size() != 2) throw ConfigError("potential.pieces: interval needs two numbers in '" + part + "'");
    out.push_back({Interval{ends[0], ends[1]}, parse_list(halves[1], "potential.pieces")});
  }
  return out;
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
  using detail::ptree;
  ptree root;
  try {
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  const std::set<std::string> sections{"potential", "solver", "oracle", "sweep", "output"};
  for (const auto& [name, child] : root) {
    if (!sections.count(name)) throw ConfigError("config: unknown section or top-level key '" + name + "'");
  }
  auto section = [&root](const std::string& name, std::set<std::string> allowed) {
    auto it = root.find(name);
    detail::Section s{it == root.not_found() ? nullptr : &it->second, name, std::move(allowed)};
    s.check_keys();
    return s;
  };

  RunConfig c;
  const auto pot = section("potential", {"beta", "alpha", "q", "pieces", "knots", "values", "support"});
  if (!pot.tree) throw ConfigError("config: [potential] section is required");
  c.beta = pot.number("beta").value_or(c.beta);
  c.alpha = pot.number("alpha").value_or(c.alpha);
  if (!(c.beta > 0.0)) throw ConfigError("potential.beta must be > 0");

  const std::string kind = pot.raw("q").value_or("none");
  try {
    if (kind == "none") {
      if (pot.raw("pieces") || pot.raw("knots") || pot.raw("values")) {
        throw ConfigError("potential: q = none takes no pieces/knots/values");
      }
    } else if (kind == "polynomial" || kind == "step") {
      const auto text = pot.raw("pieces");
      if (!text) throw ConfigError("potential.pieces is required for q = " + kind);
      const auto pieces = detail::parse_pieces(*text);
      if (kind == "polynomial") {
        Perturbation::Polynomial poly;
        for (const auto& [iv, cs] : pieces) {
          if (cs.empty()) throw ConfigError("potential.pieces: polynomial piece needs coefficients");
          poly.push_back({iv, cs});
        }
        c.q = Perturbation::polynomial(std::move(poly));
      } else {
        Perturbation::Steps steps;
        for (const auto& [iv, hs] : pieces) {
          if (hs.size() != 1) throw ConfigError("potential.pieces: step piece needs exactly one height");
          steps.push_back({iv, hs[0]});
        }
        c.q = Perturbation::steps(std::move(steps));
      }
    } else if (kind == "table") {
      const auto k = pot.raw("knots");
      const auto v = pot.raw("values");
      if (!k || !v) throw ConfigError("potential: q = table needs knots and values");
      c.q = Perturbation::table({detail::parse_list(*k, "potential.knots"), detail::parse_list(*v, "potential.values")});
    } else {
      throw ConfigError("potential.q must be none, polynomial, step or table (got '" + kind + "')");
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }
  if (auto s = pot.raw("support")) {
    const auto ends = detail::parse_list(*s, "potential.support");
    if (ends.size() != 2 || !(ends[0] <= ends[1])) throw ConfigError("potential.support must be 'lo hi' with lo <= hi");
    c.support = Interval{ends[0], ends[1]};
  }

  const auto sol = section("solver", {"rtol", "atol", "matching_point", "det0"});
  c.solver.rtol = sol.number("rtol").value_or(c.solver.rtol);
  c.solver.atol = sol.number("atol").value_or(c.solver.atol);
  c.matching_point = sol.number("matching_point").value_or(c.matching_point);
  c.det0 = sol.number("det0");
  if (!(c.solver.rtol > 0.0)) throw ConfigError("solver.rtol must be > 0");
  if (!(c.solver.atol >= 0.0)) throw ConfigError("solver.atol must be >= 0");

  const auto orc = section("oracle", {"N", "L", "tol"});
  if (auto n = orc.number("N")) {
    if (!(*n >= 1.0) || *n != std::floor(*n) || *n > 1e6) throw ConfigError("oracle.N must be a positive integer");
    c.N = static_cast<std::size_t>(*n);
  }
  c.L = orc.number("L");
  if (c.L && !(*c.L > 0.0)) throw ConfigError("oracle.L must be > 0");
  c.oracle_tol = orc.number("tol").value_or(c.oracle_tol);
  if (!(c.oracle_tol > 0.0)) throw ConfigError("oracle.tol must be > 0");

  const auto sw = section("sweep", {"parameter", "from", "to", "steps"});
  if (sw.tree) {
    SweepConfig s;
    s.parameter = sw.raw("parameter").value_or("alpha");
    if (s.parameter != "alpha" && s.parameter != "b") throw ConfigError("sweep.parameter must be alpha or b");
    const auto from = sw.number("from");
    const auto to = sw.number("to");
    const auto steps = sw.number("steps");
    if (!from || !to || !steps) throw ConfigError("sweep needs from, to and steps");
    if (!(*steps >= 2.0) || *steps != std::floor(*steps) || *steps > 1e6) {
      throw ConfigError("sweep.steps must be an integer >= 2");
    }
    s.from = *from;
    s.to = *to;
    s.steps = static_cast<int>(*steps);
    c.sweep = s;
  }

  const auto out = section("output", {"format", "path"});
  c.format = out.raw("format").value_or(c.format);
  if (c.format != "csv" && c.format != "json") throw ConfigError("output.format must be csv or json");
  c.path = out.raw("path").value_or("");

  // Validate the potential as a whole once.
  try {
    if (!c.spec().support().contains(c.matching_point)) {
      throw ConfigError("solver.matching_point must lie in the support");
    }
    if (c.sweep) {
      (void)c.spec_at(c.sweep->from);
      (void)c.spec_at(c.sweep->to);
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }
  return c;
}

inline RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

/// INI text that parses back to an identical RunConfig.
inline std::string serialize(const RunConfig& c) {
  using detail::format_list;
  using detail::format_number;
  std::ostringstream o;
  o << "[potential]\n";
  o << "beta = " << format_number(c.beta) << "\n";
  o << "alpha = " << format_number(c.alpha) << "\n";
  const auto& v = c.q.variant();
  if (auto* poly = std::get_if<Perturbation::Polynomial>(&v)) {
    o << "q = polynomial\npieces = ";
    for (std::size_t i = 0; i < poly->size(); ++i) {
      const auto& p = (*poly)[i];
      o << (i ? " | " : "") << format_number(p.interval.lo) << " " << format_number(p.interval.hi) << " : "
        << format_list(p.coefficients);
    }
    o << "\n";
  } else if (auto* steps = std::get_if<Perturbation::Steps>(&v)) {
    o << "q = step\npieces = ";
    for (std::size_t i = 0; i < steps->size(); ++i) {
      const auto& p = (*steps)[i];
      o << (i ? " | " : "") << format_number(p.interval.lo) << " " << format_number(p.interval.hi) << " : "
        << format_number(p.height);
    }
    o << "\n";
  } else if (auto* t = std::get_if<TableProfile>(&v)) {
    o << "q = table\nknots = " << format_list(t->knots) << "\nvalues = " << format_list(t->values) << "\n";
  } else {
    o << "q = none\n";
  }
  if (c.support) o << "support = " << format_number(c.support->lo) << " " << format_number(c.support->hi) << "\n";

  o << "\n[solver]\n";
  o << "rtol = " << format_number(c.solver.rtol) << "\n";
  o << "atol = " << format_number(c.solver.atol) << "\n";
  o << "matching_point = " << format_number(c.matching_point) << "\n";
  if (c.det0) o << "det0 = " << format_number(*c.det0) << "\n";

  o << "\n[oracle]\n";
  o << "N = " << c.N << "\n";
  if (c.L) o << "L = " << format_number(*c.L) << "\n";
  o << "tol = " << format_number(c.oracle_tol) << "\n";

  if (c.sweep) {
    o << "\n[sweep]\n";
    o << "parameter = " << c.sweep->parameter << "\n";
    o << "from = " << format_number(c.sweep->from) << "\n";
    o << "to = " << format_number(c.sweep->to) << "\n";
    o << "steps = " << c.sweep->steps << "\n";
  }

  o << "\n[output]\n";
  o << "format = " << c.format << "\n";
  if (!c.path.empty()) o << "path = " << c.path << "\n";
  return o.str();
}

}  // namespace specdet::config
