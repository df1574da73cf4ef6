#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ansatzlab/ansatz.hpp"
#include "ansatzlab/io.hpp"
#include "test_helpers.hpp"

using namespace ansatzlab;
using test_helpers::vec;

namespace {

const std::string kTmp = ANSATZLAB_TEST_TMP;
const std::string kCli = ANSATZLAB_CLI_PATH;

int run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("json writer formats doubles with 17 significant digits") {
  io::JValue o = io::JValue::object();
  o.set("x", io::JValue::num(0.1));
  o.set("y", io::JValue::integer(42));
  const std::string s = o.dump();
  CHECK(s.find("0.1") != std::string::npos);
  CHECK(s.find("42") != std::string::npos);
  CHECK(numerics::fmt17(1.0 / 3.0) == "0.33333333333333331");
  // 17 significant digits round-trip bit-exactly
  const double v = 0.12345678912345678;
  CHECK(std::stod(numerics::fmt17(v)) == v);
}

TEST_CASE("solution files round-trip bit-exactly") {
  SUBCASE("closed form") {
    auto u = ansatz::solve_closed_form_d1(3, 2.7);
    u.diagnostics().pde_residual_sup = 1.25e-14;
    const std::string path = kTmp + "/sol_cf.json";
    io::save_solution(path, u);
    auto back = io::load_solution(path);
    CHECK(back.problem().n == 3);
    CHECK(back.closed_form_rep().a1 == u.closed_form_rep().a1);
    const std::string path2 = kTmp + "/sol_cf2.json";
    io::save_solution(path2, back);
    CHECK(slurp(path) == slurp(path2));
  }
  SUBCASE("simplex grid") {
    ansatz::AnsatzProblem prob;
    prob.n = 3;
    prob.d = 2;
    prob.c = 1.0;
    ansatz::SolverConfig cfg;
    cfg.grid = 12;
    auto sol = ansatz::solve_bvp(prob, cfg);
    const std::string path = kTmp + "/sol_grid.json";
    io::save_solution(path, sol);
    auto back = io::load_solution(path);
    for (double w : {0.2, 0.5, 0.8}) {
      CHECK(back.value(vec({w, 1.0 - w})) == sol.value(vec({w, 1.0 - w})));
    }
    const std::string path2 = kTmp + "/sol_grid2.json";
    io::save_solution(path2, back);
    CHECK(slurp(path) == slurp(path2));
  }
}

TEST_CASE("csv uses dot decimals and LF endings") {
  io::CsvWriter csv({"a", "b"});
  csv.row({io::CsvWriter::cell(1.5), io::CsvWriter::cell(2LL)});
  CHECK(csv.str() == "a,b\n1.5,2\n");
}

TEST_CASE("cli: solve") {
  SUBCASE("closed form d=1 writes a1 = 1") {
    const std::string out = kTmp + "/u_cli.json";
    CHECK(run_cli("solve --n 2 --d 1 --c 9 --out " + out) == 0);
    auto sol = io::load_solution(out);
    CHECK(sol.closed_form_rep().a1 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(slurp(out + ".manifest.json").find("\"command\": \"solve\"") != std::string::npos);
  }
  SUBCASE("d >= n is a usage error") {
    CHECK(run_cli("solve --n 2 --d 3 --c 1 --out " + kTmp + "/x.json") == 1);
  }
  SUBCASE("dry run validates without writing") {
    CHECK(run_cli("solve --n 3 --d 2 --c 1 --dry-run --out " + kTmp + "/none.json") == 0);
  }
}

TEST_CASE("cli: verify-step4 and the corrupted-constant control") {
  const std::string sol_path = kTmp + "/u_step4.json";
  REQUIRE(run_cli("solve --n 2 --d 1 --c 0.333333333333333315 --out " + sol_path) == 0);
  // c = 1/3 exactly, written through the closed form
  {
    auto sol = ansatz::solve_closed_form_d1(2, 1.0 / 3.0);
    io::save_solution(sol_path, sol);
  }
  SUBCASE("reference run passes") {
    CHECK(run_cli("verify-step4 --solution " + sol_path + " --m 2 --box 0.5,1.5 --out " + kTmp +
                  "/step4.json") == 0);
    const std::string payload = slurp(kTmp + "/step4.json");
    CHECK(payload.find("\"pass\": true") != std::string::npos);
    CHECK(slurp(kTmp + "/step4.json.csv").find("J,multiplicity") != std::string::npos);
  }
  SUBCASE("c-override breaks the identity") {
    CHECK(run_cli("verify-step4 --solution " + sol_path + " --m 2 --box 0.5,1.5 --c-override 1.0 " +
                  "--out " + kTmp + "/step4bad.json") == 2);
  }
  SUBCASE("malformed box is a usage error") {
    CHECK(run_cli("verify-step4 --solution " + sol_path + " --m 2 --box 0.5,oops --out " + kTmp +
                  "/x.json") == 1);
  }
  SUBCASE("reruns with the same seed are byte-identical across thread counts") {
    const std::string o1 = kTmp + "/det1.json", o2 = kTmp + "/det2.json";
    REQUIRE(run_cli("verify-step4 --solution " + sol_path + " --m 2 --box 0.6,1.4 --seed 7 " +
                    "--threads 1 --out " + o1) == 0);
    REQUIRE(run_cli("verify-step4 --solution " + sol_path + " --m 2 --box 0.6,1.4 --seed 7 " +
                    "--threads 4 --out " + o2) == 0);
    CHECK(slurp(o1) == slurp(o2));
    CHECK(slurp(o1 + ".csv") == slurp(o2 + ".csv"));
  }
}

TEST_CASE("cli: misc commands") {
  CHECK(run_cli("odaka --n 3 --d 2 --out " + kTmp + "/odaka.json") == 0);
  CHECK(slurp(kTmp + "/odaka.json").find("\"vd\": \"12/5\"") != std::string::npos);

  CHECK(run_cli("hull-volume --n 3 --t 1,2,4 --out " + kTmp + "/hull.json") == 0);
  CHECK(slurp(kTmp + "/hull.json").find("\"linearity_exact\": true") != std::string::npos);

  CHECK(run_cli("softmax-demo --k-list 4,16,64 --out " + kTmp + "/sm.json") == 0);

  const std::string sol_path = kTmp + "/u_misc.json";
  {
    auto sol = ansatz::solve_closed_form_d1(2, 1.0 / 3.0);
    io::save_solution(sol_path, sol);
  }
  CHECK(run_cli("extend --solution " + sol_path + " --out " + kTmp + "/ext.json") == 0);
  CHECK(run_cli("mollify-leak --solution " + sol_path + " --m 2 --k-list 4,16 --out " + kTmp +
                "/leak.json") == 0);
  CHECK(run_cli("hybrid-limit --n 2 --d 1 --c 9 --l 1 --out " + kTmp + "/hyb.json") == 0);
  CHECK(run_cli("check-decomposition --m 2 --n 2 --d 1 --out " + kTmp + "/dec.json") == 0);
  CHECK(run_cli("check-decomposition --m 2 --n 2 --d 1 --corrupt anchor --out " + kTmp +
                "/decbad.json") == 2);
  CHECK(run_cli("ma-measure --demo maxxy0 --box -1,1,-1,1 --out " + kTmp + "/mam.json") == 0);
  CHECK(run_cli("ma-measure --quadratic 1.5,0.2,0.9 --box -1,1,-1,1 --out " + kTmp + "/mamq.json") ==
        0);
  CHECK(run_cli("nonsense-subcommand") == 1);
}
