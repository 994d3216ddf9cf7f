#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fastreact/commands.hpp"
#include "fastreact/config.hpp"
#include "fastreact/emit.hpp"
#include "fastreact/errors.hpp"

using namespace fastreact;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fastreact_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

int run_text(const std::string& yaml, const fs::path& dir, std::string* err_out = nullptr) {
  std::ostringstream log, err;
  int code = kExitValidation;
  try {
    code = run_guarded(parse_config_text(yaml), RunOptions{dir.string(), std::nullopt, true}, log, err);
  } catch (const std::exception& e) {
    err << e.what();
  }
  if (err_out) *err_out = err.str();
  return code;
}

}  // namespace

TEST_CASE("csv emission") {
  std::ostringstream empty;
  emit_csv({{"a", {}}, {"b", {}}}, empty);
  CHECK(empty.str() == "a,b\n");
  std::ostringstream two;
  emit_csv({{"x", {1, 2, 3}}, {"y", {0.1, 0.2, 0.30000000000000004}}}, two);
  const auto ls = lines(two.str());
  CHECK(ls.size() == 4);
  CHECK(ls[3] == "3,0.30000000000000004");
  std::ostringstream bad;
  CHECK_THROWS_AS(emit_csv({{"x", {1, 2}}, {"y", {1}}}, bad), ShapeError);
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, std::nextafter(1.0, 2.0)}) {
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("svg emission is a single well-formed document") {
  std::ostringstream out;
  emit_svg({{"eps", {0.1, 0.01}}, {"E<1>", {1e-2, 1e-3}}}, {"t & e", true, true}, out);
  const std::string s = out.str();
  CHECK(s.rfind("<?xml", 0) == 0);
  CHECK(s.find("<svg") != std::string::npos);
  CHECK(s.find("</svg>") == s.size() - 7);
  CHECK(s.find("E&lt;1&gt;") != std::string::npos);
  CHECK(s.find("t &amp; e") != std::string::npos);
  std::ostringstream bad;
  CHECK_THROWS_AS(emit_svg({{"x", {1}}, {"y", {}}}, {}, bad), ShapeError);
}

TEST_CASE("config parsing reports field paths") {
  auto message = [](const std::string& yaml) {
    try {
      parse_config_text(yaml);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("spec_version: 1\ncommand: foo\nmodel: {}\n").find("command") == 0);
  CHECK(message("spec_version: 2\ncommand: simulate\n").find("spec_version") == 0);
  CHECK(message("spec_version: 1\ncommand: simulate\nmodel: {eps: -1}\ninitial: {preset: cosine}\n").find("model.eps") == 0);
  CHECK(message("spec_version: 1\ncommand: simulate\nmodel: {}\nextra: 1\n").find("extra") == 0);
  CHECK(message("spec_version: 1\ncommand: simulate\nmodel: {}\n").find("initial") == 0);
  CHECK(message("spec_version: 1\ncommand: initial-layer\nmodel: {}\ninitial: {preset: cosine}\n").find("seed") == 0);
  CHECK(message("spec_version: 1\ncommand: simulate\nmodel: {}\ngrid: {N: 12}\ninitial: {preset: cosine}\n").find("grid.N") == 0);
  const ExperimentConfig c =
      parse_config_text("spec_version: 1\ncommand: initial-layer\nmodel: {}\ninitial: {preset: cosine}\n", 9);
  CHECK(c.seed == 9u);
  CHECK(c.csv == "initial-layer.csv");
}

TEST_CASE("initial presets") {
  for (const char* name : {"cosine", "constant", "two_mode"}) CHECK_NOTHROW(initial_preset(name));
  CHECK_THROWS_AS(initial_preset("spiky"), ConfigError);
  const InitialSpec s = initial_preset("cosine");
  CHECK(s.v.as_function(3.141592653589793)(0.0) == doctest::Approx(1.2));
}

TEST_CASE("gap-check command writes the worked example") {
  const fs::path dir = scratch("gap");
  const std::string yaml =
      "spec_version: 1\ncommand: gap-check\nmodel: {eps: 0.001, delta: 0}\n"
      "study: {zeta_inv: 26, lipschitz: {f: 0.5, phi: 0, psi: 0}}\noutput: {csv: gap.csv}\n";
  CHECK(run_text(yaml, dir) == kExitOk);
  const auto ls = lines(slurp(dir / "gap.csv"));
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "eps,zeta_inv,k0,N_S,N_F,gap,eta,term1,term2,param_ineq,passes");
  CHECK(ls[1].find(",true") != std::string::npos);
  CHECK(ls[1].find("0.5373455") != std::string::npos);
  CHECK(fs::exists(dir / "gap.csv.meta.yaml"));

  const std::string failing =
      "spec_version: 1\ncommand: gap-check\nmodel: {eps: 0.01, delta: 0}\n"
      "study: {zeta_inv: 26, lipschitz: {f: 0.5, phi: 0, psi: 0}}\noutput: {csv: gap.csv}\n";
  CHECK(run_text(failing, dir) == kExitOk);
  CHECK(lines(slurp(dir / "gap.csv"))[1].find(",false") != std::string::npos);
}

TEST_CASE("converge command has data rows and a footer") {
  const fs::path dir = scratch("converge");
  const std::string yaml =
      "spec_version: 1\ncommand: converge\nmodel: {kind: linear, eps: 0.1}\ngrid: {N: 16}\n"
      "time: {T: 0.5, samples: 50}\nstudy: {eps: [0.1, 0.03, 0.01, 0.003], delta: 0.1}\n"
      "initial: {v: {mean: 0.5, amplitude: 0.4, mode: 1}}\noutput: {csv: c.csv, svg: c.svg}\n";
  CHECK(run_text(yaml, dir) == kExitOk);
  const auto ls = lines(slurp(dir / "c.csv"));
  REQUIRE(ls.size() == 1 + 4 + 4);
  CHECK(ls[0] == "eps,delta,eps_in,E_LinfL2,E_L2H1,E_LinfH2,E_LinfL2_postlayer,wall_s");
  CHECK(ls[5].rfind("order_LinfL2,", 0) == 0);
  CHECK(ls[8].rfind("fit_residual,", 0) == 0);
  CHECK(fs::exists(dir / "c.svg"));
  // Determinism: a second run is byte-identical.
  const std::string first = slurp(dir / "c.csv");
  CHECK(run_text(yaml, dir) == kExitOk);
  CHECK(slurp(dir / "c.csv") == first);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  std::string err;
  CHECK(run_text("spec_version: 1\ncommand: foo\n", dir, &err) == kExitValidation);
  CHECK(err.find("command") != std::string::npos);
  const std::string lp =
      "spec_version: 1\ncommand: manifold-galerkin\nmodel: {eps: 0.01, delta: 0.001}\ngrid: {N: 32}\n"
      "study: {zeta_inv: 10, slow_samples: [[0.05, 0.01, 0.0]], lipschitz: {f: 0.9, phi: 1, psi: 1}}\n";
  CHECK(run_text(lp, dir) == kExitAssumption);
  const std::string blow =
      "spec_version: 1\ncommand: simulate\nmodel: {a: 200, b: 0, c: 0, eps: 0.1}\ngrid: {N: 16}\n"
      "time: {T: 1, samples: 10}\ninitial: {preset: constant}\n";
  CHECK(run_text(blow, dir) == kExitDivergence);
}

TEST_CASE("cli_main parses flags") {
  const fs::path dir = scratch("main");
  const fs::path cfg = dir / "run.yaml";
  std::ofstream(cfg) << "spec_version: 1\ncommand: limit\nmodel: {}\ngrid: {N: 16}\ntime: {T: 0.1, samples: 10}\n"
                        "initial: {preset: cosine}\noutput: {csv: lim.csv}\n";
  const std::string cfg_s = cfg.string(), out_s = (dir / "out").string();
  std::vector<std::string> args{"fastreact", "--config", cfg_s, "--out", out_s, "--quiet", "--threads", "2"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  CHECK(cli_main(static_cast<int>(argv.size()), argv.data()) == kExitOk);
  CHECK(lines(slurp(dir / "out" / "lim.csv")).size() == 12);
  std::vector<std::string> missing{"fastreact"};
  std::vector<char*> argv2{missing[0].data()};
  CHECK(cli_main(1, argv2.data()) == kExitValidation);
}
