#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "catch.hpp"
#include "specdet/commands.hpp"
#include "specdet/config.hpp"
#include "specdet/error.hpp"
#include "specdet/validate.hpp"

using namespace specdet;
using config::parse_config_string;
using config::RunConfig;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string config_path(const std::string& name) { return std::string(SPECDET_CONFIG_DIR) + "/" + name; }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(fields);
  }
  return rows;
}

/// Machine block after the blank line that ends the human report.
std::string machine_block(const std::string& out) { return out.substr(out.find("\n\n") + 2); }

}  // namespace

TEST_CASE("defaults follow the documented values", "[config]") {
  const RunConfig c = parse_config_string("[potential]\nbeta = 3\n");
  CHECK(c.beta == 3.0);
  CHECK(c.alpha == 0.0);
  CHECK(c.q.is_none());
  CHECK(c.solver.rtol == 1e-10);
  CHECK(c.solver.atol == 1e-12);
  CHECK(c.N == 100);
  CHECK(c.oracle_tol == 1e-8);
  CHECK(c.matching_point == 0.0);
  CHECK_FALSE(c.sweep);
  CHECK(c.format == "csv");
}

TEST_CASE("invalid configs are rejected", "[config]") {
  const char* bad[] = {
      "[potential]\nbeta = 0\n",
      "[potential]\nbeta = -2\n",
      "[potential]\nbeta = two\n",
      "[potential]\nbeta = 2\ncolour = red\n",
      "[potential]\nbeta = 2\n[extra]\nx = 1\n",
      "[solver]\nrtol = 1e-8\n",
      "[potential]\nbeta = 2\n[solver]\nrtol = 0\n",
      "[potential]\nbeta = 2\n[solver]\nrtol = -1e-8\n",
      "[potential]\nbeta = 2\nq = polynomial\n",
      "[potential]\nbeta = 2\nq = step\npieces = 0 1 : 1 2\n",
      "[potential]\nbeta = 2\nq = step\npieces = 1 0 : 1\n",
      "[potential]\nbeta = 2\nq = wiggle\n",
      "[potential]\nbeta = 2\nq = table\nknots = 0 1\n",
      "[potential]\nbeta = 2\n[sweep]\nparameter = alpha\nfrom = 0\nto = 1\nsteps = 1\n",
      "[potential]\nbeta = 2\n[sweep]\nparameter = alpha\nfrom = 0\nto = 1\nsteps = 2.5\n",
      "[potential]\nbeta = 2\n[sweep]\nparameter = gamma\nfrom = 0\nto = 1\nsteps = 3\n",
      "[potential]\nbeta = 2\n[sweep]\nparameter = b\nfrom = 0\nto = 1\nsteps = 3\n",
      "[potential]\nbeta = 2\n[output]\nformat = xml\n",
      "[potential]\nbeta = 2\n[oracle]\nN = 0\n",
      "[potential]\nbeta = 2\n[oracle]\nL = -1\n",
      "[potential]\nbeta = 2\nq = step\npieces = 0 1 : 1\n[solver]\nmatching_point = 3\n",
      "[potential]\nbeta = 2\nbeta = 3\n",
  };
  for (const char* text : bad) {
    INFO(text);
    CHECK_THROWS_AS(parse_config_string(text), ConfigError);
  }
}

TEST_CASE("serialized configs parse back identically", "[config][property]") {
  for (const char* text : validate::detail::kSampleConfigs) {
    const RunConfig c = parse_config_string(text);
    CHECK(parse_config_string(config::serialize(c)) == c);
  }
  for (const auto& entry : std::filesystem::directory_iterator(SPECDET_CONFIG_DIR)) {
    INFO(entry.path().string());
    const RunConfig c = config::parse_config_file(entry.path().string());
    CHECK(parse_config_string(config::serialize(c)) == c);
  }
  RunConfig c = parse_config_string("[potential]\nbeta = 2.5\n");
  c.alpha = 0.1 + 0.2;
  c.solver.rtol = std::nextafter(1e-9, 1.0);
  CHECK(parse_config_string(config::serialize(c)) == c);
}

TEST_CASE("sweep values end exactly at both limits", "[config]") {
  const RunConfig c = config::parse_config_file(config_path("example1_sweep.ini"));
  REQUIRE(c.sweep);
  CHECK(c.sweep->value(0) == 0.0);
  CHECK(c.sweep->value(c.sweep->steps - 1) == 4.0);
  const PotentialSpec s = c.spec_at(2.5);
  CHECK(s.support() == Interval{0.0, 2.5});
  CHECK(s.alpha() == 1.0);
}

TEST_CASE("csv fields are quoted when needed", "[cli]") {
  CHECK(cli::csv_field("plain") == "plain");
  CHECK(cli::csv_field("a,b") == "\"a,b\"");
  CHECK(cli::csv_field("say \"x\"") == "\"say \"\"x\"\"\"");
  CHECK(cli::csv_number(std::nullopt).empty());
  CHECK(cli::csv_number(0.1) == "0.10000000000000001");
  CHECK(cli::csv_line({"a", "b"}) == "a,b\n");
}

TEST_CASE("det reports the harmonic determinant", "[cli]") {
  std::ostringstream out, err;
  REQUIRE(cli::cmd_det(config::parse_config_file(config_path("harmonic.ini")), out, err) == cli::kExitOk);
  const auto rows = csv_rows(machine_block(out.str()));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == cli::sweep_columns());
  CHECK_THAT(std::stod(rows[1][2]), WithinAbs(std::numbers::sqrt2, 1e-8));
  CHECK(rows[1][6] == "BetaTwoNormalized");
}

TEST_CASE("det reports 2 for the unperturbed quartic", "[cli]") {
  std::ostringstream out, err;
  REQUIRE(cli::cmd_det(config::parse_config_file(config_path("example3.ini")), out, err) == cli::kExitOk);
  const auto rows = csv_rows(machine_block(out.str()));
  CHECK_THAT(std::stod(rows[1][2]), WithinAbs(2.0, 1e-8));
  CHECK(out.str().find("constancy residual") != std::string::npos);
}

TEST_CASE("det for non-integer beta reports the ratio only", "[cli]") {
  std::ostringstream out, err;
  REQUIRE(cli::cmd_det(config::parse_config_file(config_path("beta2_5.ini")), out, err) == cli::kExitOk);
  const auto rows = csv_rows(machine_block(out.str()));
  CHECK(rows[1][1] == "1");
  CHECK(rows[1][2].empty());
  CHECK(rows[1][6] == "RatioOnly");
}

TEST_CASE("det refuses a sweep config", "[cli]") {
  std::ostringstream out, err;
  CHECK(cli::cmd_det(config::parse_config_file(config_path("example1_sweep.ini")), out, err) == cli::kExitUsage);
  CHECK_FALSE(err.str().empty());
}

TEST_CASE("sweep over b starts at sqrt 2", "[cli]") {
  std::ostringstream out, err;
  const RunConfig c = config::parse_config_file(config_path("example1_sweep.ini"));
  REQUIRE(cli::cmd_sweep(c, out, err, 2) == cli::kExitOk);
  const auto rows = csv_rows(out.str());
  REQUIRE(rows.size() == 82);
  CHECK(rows[0] == cli::sweep_columns());
  CHECK_THAT(std::stod(rows[1][2]), WithinAbs(std::numbers::sqrt2, 1e-6));
  for (std::size_t n = 1; n < rows.size(); ++n) CHECK(rows[n][7].empty());
}

TEST_CASE("alpha sweeps pass through the unperturbed values", "[cli]") {
  for (auto [file, expected] : {std::pair{"example2_sweep.ini", std::numbers::sqrt2}, std::pair{"example3_sweep.ini", 2.0}}) {
    std::ostringstream out, err;
    REQUIRE(cli::cmd_sweep(config::parse_config_file(config_path(file)), out, err) == cli::kExitOk);
    bool found = false;
    for (const auto& row : csv_rows(out.str())) {
      if (row[0] == "0") {
        found = true;
        CHECK_THAT(std::stod(row[2]), WithinAbs(expected, 1e-8));
      }
    }
    CHECK(found);
  }
}

TEST_CASE("failed rows are recorded and the sweep continues", "[cli]") {
  RunConfig c = parse_config_string(
      "[potential]\nbeta = 2\nq = step\npieces = -1 1 : 1\n[solver]\nrtol = 1e-10\n"
      "[sweep]\nparameter = alpha\nfrom = -1e300\nto = 1\nsteps = 3\n");
  std::ostringstream out, err;
  REQUIRE(cli::cmd_sweep(c, out, err) == cli::kExitOk);
  const auto rows = csv_rows(out.str());
  REQUIRE(rows.size() == 4);
  CHECK_FALSE(rows[1][7].empty());
  CHECK(rows[1][1].empty());
  CHECK(rows[3][7].empty());
}

TEST_CASE("json output has meta and rows", "[cli]") {
  RunConfig c = config::parse_config_file(config_path("example3_sweep.ini"));
  c.format = "json";
  c.sweep->steps = 3;
  std::ostringstream out, err;
  REQUIRE(cli::cmd_sweep(c, out, err) == cli::kExitOk);
  const auto doc = nlohmann::json::parse(out.str());
  CHECK(doc["meta"]["potential"]["beta"] == "4");
  CHECK(doc["meta"]["sweep"]["steps"] == "3");
  REQUIRE(doc["rows"].size() == 3);
  const auto& row = doc["rows"][1];
  for (const auto& col : cli::sweep_columns()) CHECK(row.contains(col));
  CHECK(row["parameter"] == -1450.0);
  CHECK(row["error"].is_null());
  CHECK(row["method"] == "IntegerBeta");
}

TEST_CASE("output goes to the configured path, bit-identical across runs", "[cli]") {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "specdet_run_a.csv").string(), b = (dir / "specdet_run_b.csv").string();
  RunConfig c = config::parse_config_file(config_path("example1_sweep.ini"));
  std::ostringstream out, err;
  c.path = a;
  REQUIRE(cli::cmd_sweep(c, out, err, 1) == cli::kExitOk);
  c.path = b;
  REQUIRE(cli::cmd_sweep(c, out, err, 3) == cli::kExitOk);
  CHECK(out.str().empty());
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("parameter,ratio,", 0) == 0);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  c.path = (dir / "no_such_dir" / "x.csv").string();
  CHECK(cli::cmd_sweep(c, out, err) == cli::kExitFailure);
}

TEST_CASE("spectrum reports the harmonic levels", "[cli]") {
  std::ostringstream out, err;
  REQUIRE(cli::cmd_spectrum(config::parse_config_file(config_path("harmonic.ini")), out, err) == cli::kExitOk);
  const auto rows = csv_rows(machine_block(out.str()));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"index", "lambda", "lambda_zero"});
  for (int k = 1; k <= 5; ++k) CHECK_THAT(std::stod(rows[k][1]), WithinAbs(2.0 * k - 1.0, 1e-6));
}

TEST_CASE("spectrum fits tau = 1 for the harmonic oscillator", "[cli]") {
  RunConfig c = config::parse_config_file(config_path("harmonic.ini"));
  c.N = 60;
  c.format = "json";
  std::ostringstream out, err;
  REQUIRE(cli::cmd_spectrum(c, out, err) == cli::kExitOk);
  const auto doc = nlohmann::json::parse(machine_block(out.str()));
  CHECK_THAT(doc["fit"]["tau"].get<double>(), WithinAbs(1.0, 0.05));
  CHECK(doc["eigenvalues"].size() == 60);
}

TEST_CASE("spectrum surfaces truncation errors", "[cli]") {
  RunConfig c = config::parse_config_file(config_path("harmonic.ini"));
  c.N = 50;
  c.L = 3.0;
  std::ostringstream out, err;
  CHECK(cli::cmd_spectrum(c, out, err) == cli::kExitFailure);
  CHECK(err.str().find("enlarge L") != std::string::npos);
}

TEST_CASE("validate lists at least twelve named checks", "[cli]") {
  CHECK(validate::checks().size() >= 12);
  std::ostringstream out;
  CHECK(cli::cmd_validate({}, out, "specfun/") == cli::kExitOk);
  CHECK(out.str().find("PASS  specfun/k_symmetry") != std::string::npos);
}

TEST_CASE("validate fails the constancy check at a loose tolerance", "[cli]") {
  validate::ValidateOptions opt;
  opt.tol.rtol = 1e-2;
  std::ostringstream out;
  CHECK(cli::cmd_validate(opt, out, "determinant/wronskian_constancy") != cli::kExitOk);
  CHECK(out.str().find("FAIL  determinant/wronskian_constancy") != std::string::npos);
}
