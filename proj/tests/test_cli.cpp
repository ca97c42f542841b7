#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "btoep/cli.hpp"
#include "test_support.hpp"

using namespace btoep;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "btoep-cli-tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_symbol_file(const std::string& name, const LaurentSymbol& a) {
  auto path = temp_dir() / name;
  std::ofstream out(path);
  out << symbol_to_json(a).dump();
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("symbol JSON round trip and validation") {
  LaurentSymbol a = testing::cubic_symbol();
  LaurentSymbol b = symbol_from_json(symbol_to_json(a));
  CHECK(b.p() == a.p());
  CHECK(b.q() == a.q());
  for (int k = -a.q(); k <= a.p(); ++k) CHECK(b.coeff(k) == a.coeff(k));

  CHECK_THROWS_AS(symbol_from_json(nlohmann::json{{"wrong", 1}}), UsageError);
  CHECK_THROWS_AS(symbol_from_json(nlohmann::json::parse(R"({"coeffs": {"x": [1, 0]}})")),
                  UsageError);
  CHECK_THROWS_AS(symbol_from_json(nlohmann::json::parse(R"({"coeffs": {"1": [1]}})")),
                  UsageError);
  // gcd violation surfaces through the parser
  CHECK_THROWS_AS(symbol_from_json(nlohmann::json::parse(R"({"coeffs": {"2": [1,0], "-2": [1,0]}})")),
                  GcdViolation);
}

TEST_CASE("csv writers have the specified columns") {
  LaurentSymbol a = testing::arcsine_symbol();
  CurveFamily fam = trace_curve(a, 0, 10.0);
  std::string curves = curves_csv(fam);
  CHECK(curves.rfind("k,arc_id,re_lambda,im_lambda,re_tangent,im_tangent\n", 0) == 0);

  DiscreteMeasure m = discretize_measure(a, 0, fam, 64);
  std::string meas = measure_csv(0, m);
  CHECK(meas.rfind("k,arc_id,re_lambda,im_lambda,real_density,weight\n", 0) == 0);
  CHECK(std::count(meas.begin(), meas.end(), '\n') == static_cast<long>(m.size()) + 1);

  SpectralSet s = generalized_spectrum(a, 0, 6);
  std::string spec = spectrum_csv(s);
  CHECK(spec.rfind("k,n,re_lambda,im_lambda,multiplicity\n", 0) == 0);
}

TEST_CASE("cli runs curves and reruns byte-identically") {
  std::string sym = write_symbol_file("arcsine.json", testing::arcsine_symbol());
  std::string out1 = (temp_dir() / "g0_a.csv").string();
  std::string out2 = (temp_dir() / "g0_b.csv").string();
  CHECK(run_cli({"curves", "--symbol", sym, "--k", "0", "--rmax", "10", "--out", out1}) == 0);
  CHECK(run_cli({"curves", "--symbol", sym, "--k", "0", "--rmax", "10", "--out", out2}) == 0);
  std::string a = slurp(out1), b = slurp(out2);
  CHECK(a == b);
  CHECK(a.size() > 100);
}

TEST_CASE("cli masses emits the JSON summary") {
  std::string sym = write_symbol_file("cubic.json", testing::cubic_symbol());
  std::string out = (temp_dir() / "masses.json").string();
  CHECK(run_cli({"masses", "--symbol", sym, "--rmax", "60", "--nodes", "128", "--out", out}) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(j["masses"].contains("0"));
  CHECK(j["masses"].contains("1"));
  CHECK(std::abs(j["masses"]["0"].get<double>() - 1.0) < 5e-3);
  CHECK(std::abs(j["masses"]["1"].get<double>() - 0.5) < 5e-3);
  CHECK(std::abs(j["alpha"]["0"].get<double>() - std::log(4.0 / 27.0)) < 1e-12);
}

TEST_CASE("cli spectrum svg contains dots") {
  std::string sym = write_symbol_file("cubic2.json", testing::cubic_symbol());
  std::string out = (temp_dir() / "spec.svg").string();
  CHECK(run_cli({"spectrum", "--symbol", sym, "--k", "0", "--n", "10", "--format", "svg",
                 "--out", out}) == 0);
  std::string svg = slurp(out);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(std::count(svg.begin(), svg.end(), 'c') >= 10);  // circle elements
}

TEST_CASE("cli energy reports the three agreeing forms") {
  std::string sym = write_symbol_file("cubic3.json", testing::cubic_symbol());
  std::string out = (temp_dir() / "energy.json").string();
  CHECK(run_cli({"energy", "--symbol", sym, "--rmax", "40", "--nodes", "128", "--out", out}) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(out));
  double jd = j["J_direct"].get<double>();
  CHECK(std::abs(jd - j["J_alt"].get<double>()) < 1e-8 * (1.0 + std::abs(jd)));
  CHECK(std::abs(jd - j["J_matrix"].get<double>()) < 1e-8 * (1.0 + std::abs(jd)));
  CHECK(j["l"].contains("0"));
  CHECK(j["residuals"].size() >= 10);
  for (const auto& r : j["residuals"]) CHECK(std::abs(r["value"].get<double>()) < 0.05);
}

TEST_CASE("cli exit codes: usage and validation failures return 1") {
  std::string sym = write_symbol_file("arcsine2.json", testing::arcsine_symbol());
  CHECK(run_cli({"curves", "--symbol", sym, "--k", "3", "--rmax", "10"}) == 1);
  CHECK(run_cli({"curves", "--symbol", "/nonexistent.json", "--k", "0"}) == 1);
  CHECK(run_cli({"nonsense"}) == 1);
  CHECK(run_cli({"curves", "--symbol", sym, "--k", "0", "--rmax", "-1"}) == 1);
  CHECK(run_cli({"masses", "--symbol", sym, "--format", "svg"}) == 1);

  auto bad = temp_dir() / "bad.json";
  std::ofstream(bad) << R"({"coeffs": {"2": [1,0], "-2": [1,0]}})";
  CHECK(run_cli({"symbol-info", "--symbol", bad.string()}) == 1);
}

TEST_CASE("cli converge emits the schedule csv") {
  std::string sym = write_symbol_file("arcsine3.json", testing::arcsine_symbol());
  std::string out = (temp_dir() / "conv.csv").string();
  CHECK(run_cli({"converge", "--symbol", sym, "--k", "0", "--ns", "10,20", "--rmax", "10",
                 "--out", out}) == 0);
  std::string csv = slurp(out);
  CHECK(csv.rfind("k,n,mass,cauchy_error,curve_distance\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
