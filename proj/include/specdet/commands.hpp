#pragma once

// The det / sweep / spectrum subcommands, writing to streams. Exit codes:
// 0 success, 1 computation failure, 2 invalid input.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <nlohmann/json.hpp>

#include "specdet/config.hpp"
#include "specdet/determinant.hpp"
#include "specdet/error.hpp"
#include "specdet/oracle.hpp"

namespace specdet::cli {

using Json = nlohmann::ordered_json;
using config::RunConfig;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{"parameter", "ratio", "det", "W_alpha", "W_zero",
                                             "constancy_residual", "method", "error"};
  return cols;
}

/// %.17g, or empty for a missing value.
inline std::string csv_number(std::optional<double> v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

/// RFC 4180 quoting: fields with a comma, quote or line break are quoted,
/// inner quotes doubled.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  return line + "\n";
}

inline Json json_number(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

/// The config as {section: {key: text}}, in file order.
inline Json config_echo(const RunConfig& c) {
  boost::property_tree::ptree tree;
  std::istringstream in(config::serialize(c));
  boost::property_tree::ini_parser::read_ini(in, tree);
  Json meta = Json::object();
  for (const auto& [section, keys] : tree) {
    Json obj = Json::object();
    for (const auto& [key, value] : keys) obj[key] = value.data();
    meta[section] = obj;
  }
  return meta;
}

struct SweepRow {
  double parameter = 0.0;
  std::optional<DeterminantResult> result;
  std::string error;
};

inline DeterminantOptions determinant_options(const RunConfig& c) {
  DeterminantOptions o;
  o.tol = c.solver;
  o.matching_point = c.matching_point;
  o.det0 = c.det0;
  return o;
}

inline SweepRow compute_row(const RunConfig& c, double parameter) {
  SweepRow row;
  row.parameter = parameter;
  try {
    row.result = det_real_line(c.spec_at(parameter), determinant_options(c));
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

inline std::vector<std::string> csv_fields(const SweepRow& r) {
  if (!r.result) return {csv_number(r.parameter), "", "", "", "", "", "", r.error};
  const DeterminantResult& d = *r.result;
  return {csv_number(r.parameter), csv_number(d.ratio),       csv_number(d.det),
          csv_number(d.w_alpha.W), csv_number(d.w_zero.W),    csv_number(d.constancy_residual()),
          to_string(d.method),     r.error};
}

inline Json json_row(const SweepRow& r) {
  Json j = Json::object();
  j["parameter"] = r.parameter;
  const bool ok = r.result.has_value();
  j["ratio"] = ok ? json_number(r.result->ratio) : Json(nullptr);
  j["det"] = ok ? json_number(r.result->det) : Json(nullptr);
  j["W_alpha"] = ok ? json_number(r.result->w_alpha.W) : Json(nullptr);
  j["W_zero"] = ok ? json_number(r.result->w_zero.W) : Json(nullptr);
  j["constancy_residual"] = ok ? json_number(r.result->constancy_residual()) : Json(nullptr);
  j["method"] = ok ? Json(to_string(r.result->method)) : Json(nullptr);
  j["error"] = r.error.empty() ? Json(nullptr) : Json(r.error);
  return j;
}

inline void write_table(std::ostream& out, const RunConfig& c, const std::vector<SweepRow>& rows) {
  if (c.format == "json") {
    Json doc = Json::object();
    doc["meta"] = config_echo(c);
    Json arr = Json::array();
    for (const auto& r : rows) arr.push_back(json_row(r));
    doc["rows"] = arr;
    out << doc.dump(2) << "\n";
  } else {
    out << csv_line(sweep_columns());
    for (const auto& r : rows) out << csv_line(csv_fields(r));
  }
}

/// Rows are computed on `jobs` threads and written in input order.
inline std::vector<SweepRow> sweep_rows(const RunConfig& c, int jobs) {
  const int n = c.sweep->steps;
  std::vector<SweepRow> rows(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < n; i = next++) rows[static_cast<std::size_t>(i)] = compute_row(c, c.sweep->value(i));
  };
  jobs = std::clamp(jobs, 1, n);
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return rows;
}

/// Machine output goes to c.path when set, else to `out`.
template <class Writer>
int emit(const RunConfig& c, std::ostream& out, std::ostream& err, Writer&& write) {
  if (c.path.empty()) {
    write(out);
    return kExitOk;
  }
  std::ofstream file(c.path, std::ios::binary);
  if (!file) {
    err << "error: cannot open output file '" << c.path << "'\n";
    return kExitFailure;
  }
  write(file);
  return file ? kExitOk : kExitFailure;
}

inline int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err, int jobs = 1) {
  if (!c.sweep) {
    err << "error: sweep needs a [sweep] section\n";
    return kExitUsage;
  }
  const std::vector<SweepRow> rows = sweep_rows(c, jobs);
  return emit(c, out, err, [&](std::ostream& o) { write_table(o, c, rows); });
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline int cmd_det(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.sweep) {
    err << "error: det takes a config without [sweep]; use the sweep command\n";
    return kExitUsage;
  }
  SweepRow row;
  try {
    row.parameter = c.alpha;
    row.result = det_real_line(c.spec(), determinant_options(c));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  const DeterminantResult& d = *row.result;
  const Interval s = c.spec().support();
  out << "spectral determinant of -d^2/dx^2 + |x|^beta + alpha q\n";
  out << "  beta                " << fmt(c.beta) << "\n";
  out << "  alpha               " << fmt(c.alpha) << "\n";
  out << "  support [a, b]      [" << fmt(s.lo) << ", " << fmt(s.hi) << "]\n";
  out << "  method              " << to_string(d.method) << "\n";
  out << "  ratio W(a)/W(0)     " << fmt(d.ratio) << "\n";
  out << "  det(T_0)            " << (d.det0 ? fmt(*d.det0) : "unknown") << "\n";
  out << "  det(T_alpha)        " << (d.det ? fmt(*d.det) : "unknown (supply solver.det0)") << "\n";
  out << "  W(alpha)            " << fmt(d.w_alpha.W) << "\n";
  out << "  W(0)                " << fmt(d.w_zero.W) << "\n";
  out << "  constancy residual  " << fmt_short(d.w_alpha.constancy_residual) << " (alpha), "
      << fmt_short(d.w_zero.constancy_residual) << " (0)\n";
  if (d.route_discrepancy) out << "  route discrepancy   " << fmt_short(*d.route_discrepancy) << "\n";
  if (d.near_zero) out << "  warning             W(alpha) is numerically zero: 0 is an eigenvalue of T_alpha\n";
  out << "\n";
  RunConfig single = c;
  single.sweep.reset();
  return emit(c, out, err, [&](std::ostream& o) { write_table(o, single, {row}); });
}

inline int cmd_spectrum(const RunConfig& c, std::ostream& out, std::ostream& err, int jobs = 1) {
  oracle::OracleOptions opt;
  opt.tol = c.oracle_tol;
  opt.L = c.L;
  opt.jobs = jobs;
  oracle::SpectrumEstimate est;
  std::optional<oracle::SpectrumEstimate> reference;
  double product = 1.0;
  try {
    const PotentialSpec spec = c.spec();
    if (spec.alpha() != 0.0 && !spec.q().is_none()) {
      auto pr = oracle::partial_product_with_spectra(spec, c.N, opt);
      est = std::move(pr.perturbed);
      reference = std::move(pr.reference);
      product = pr.value;
    } else {
      est = oracle::eigenvalues(spec, c.N, opt);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }

  out << "Dirichlet spectrum on [-L, L]\n";
  out << "  L          " << fmt(est.L) << "\n";
  out << "  N          " << est.N << "\n";
  out << "  tol        " << fmt_short(est.tol) << "\n";
  out << "  fit c      " << fmt(est.asym_fit.c) << "\n";
  out << "  fit tau    " << fmt(est.asym_fit.tau) << " (2 beta/(beta+2) = " << fmt(2.0 * c.beta / (c.beta + 2.0))
      << ")\n";
  if (est.asym_fit.eps_proxy) out << "  eps proxy  " << fmt(*est.asym_fit.eps_proxy) << "\n";
  out << "  f_N        " << fmt(product) << "\n";
  const std::size_t shown = std::min<std::size_t>(est.N, 10);
  for (std::size_t j = 0; j < shown; ++j) out << "  lambda_" << (j + 1) << "   " << fmt(est.eigenvalues[j]) << "\n";
  if (shown < est.N) out << "  ...\n";
  out << "\n";

  return emit(c, out, err, [&](std::ostream& o) {
    if (c.format == "json") {
      Json doc = Json::object();
      doc["meta"] = config_echo(c);
      doc["L"] = est.L;
      doc["N"] = est.N;
      doc["tol"] = est.tol;
      doc["fit"] = {{"c", json_number(est.asym_fit.c)},
                    {"tau", json_number(est.asym_fit.tau)},
                    {"eps_proxy", json_number(est.asym_fit.eps_proxy)}};
      doc["product"] = product;
      doc["eigenvalues"] = est.eigenvalues;
      doc["eigenvalues_zero"] = reference ? Json(reference->eigenvalues) : Json(est.eigenvalues);
      o << doc.dump(2) << "\n";
    } else {
      o << csv_line({"index", "lambda", "lambda_zero"});
      for (std::size_t j = 0; j < est.N; ++j) {
        const double z = reference ? reference->eigenvalues[j] : est.eigenvalues[j];
        o << csv_line({std::to_string(j + 1), csv_number(est.eigenvalues[j]), csv_number(z)});
      }
    }
  });
}

}  // namespace specdet::cli
