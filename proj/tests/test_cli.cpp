#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "epsinv/json_io.hpp"

// Path of the command-line binary, injected by the build so the suite always
// exercises the freshly built tool.
#ifndef EPSINV_CLI_PATH
#error "EPSINV_CLI_PATH must point at the built CLI binary"
#endif

namespace {

using epsinv::json;

const std::string kDir = "/tmp/epsinv_cli_suite";

struct RunResult {
  int code = -1;
  std::string out;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

RunResult run_cli(const std::string& args, const std::string& env = "") {
  std::string out_path = kDir + "/stdout.txt";
  std::string cmd = env + (env.empty() ? "" : " ") + EPSINV_CLI_PATH + " " +
                    args + " > " + out_path + " 2> " + kDir + "/stderr.txt";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  return r;
}

// Writes the shared fixture files once per process.
void ensure_fixtures() {
  static bool done = false;
  if (done) return;
  std::filesystem::create_directories(kDir);
  auto put = [](const std::string& name, const std::string& text) {
    std::ofstream(kDir + "/" + name) << text;
  };
  put("dyadic.json",
      R"({"branches": [{"alpha": "1/2", "beta": "0"}, {"alpha": "1/2", "beta": "1/2"}]})");
  put("cantor.json",
      R"({"branches": [{"alpha": "1/3", "beta": "0"}, {"alpha": "1/3", "beta": "2/3"}]})");
  put("overlap.json",
      R"({"branches": [{"alpha": "3/4", "beta": "0"}, {"alpha": "1/2", "beta": "1/2"}]})");
  put("g.json", R"({"breakpoints": ["0", "1/2"], "values": ["1/4", "-1/4"]})");
  put("g_shift.json",
      R"({"breakpoints": ["0", "1/2"], "values": ["5/4", "3/4"]})");
  put("g0.json", R"({"breakpoints": ["0"], "values": ["1/4"]})");
  put("cyl.json", R"({"alphas": ["1/2", "1/2"], "epsilon": "1/4", "p": 1, "q": 2})");
  done = true;
}

std::string fx(const std::string& name) { return kDir + "/" + name; }

}  // namespace

TEST_CASE("solve emits the fixed point with residual zero") {
  ensure_fixtures();
  auto r = run_cli("solve --system " + fx("dyadic.json") + " --g " + fx("g.json") +
                   " --out " + fx("phi.json"));
  CHECK(r.code == 0);
  auto j = epsinv::read_json_file(fx("phi.json"));
  CHECK(j["status"] == "converged");
  CHECK(j["residual"] == "0");
  CHECK(j["family"] == true);
  // P g = 0 here, so the series terminates at phi = g.
  CHECK(j["phi"] == epsinv::read_json_file(fx("g.json")));
}

TEST_CASE("attractor traces the contraction in json and csv") {
  ensure_fixtures();
  auto r = run_cli("attractor --system " + fx("cantor.json") +
                   " --depth 10 --csv " + fx("trace.csv"));
  CHECK(r.code == 0);
  auto j = epsinv::parse_json_text(r.out);
  CHECK(j["levels"].size() == 11);
  CHECK(j["levels"][10]["measure"] == "1024/59049");  // (2/3)^10
  CHECK(j["verdict"] == "yes");
  auto csv = slurp(fx("trace.csv"));
  CHECK(csv.find("m,measure\n") == 0);
  CHECK(csv.find("10,1024/59049\n") != std::string::npos);
}

TEST_CASE("validate reports flags instead of failing") {
  ensure_fixtures();
  auto bad = run_cli("validate --system " + fx("overlap.json"));
  CHECK(bad.code == 0);
  auto jb = epsinv::parse_json_text(bad.out);
  CHECK(jb["c2_ok"] == false);
  auto good = run_cli("validate --system " + fx("dyadic.json"));
  CHECK(good.code == 0);
  auto jg = epsinv::parse_json_text(good.out);
  CHECK(jg["c1_ok"] == true);
  CHECK(jg["c2_ok"] == true);
  CHECK(jg["fprime_ok"] == true);
}

TEST_CASE("exit codes follow the error contract") {
  ensure_fixtures();
  // 1: unreadable input
  CHECK(run_cli("solve --system " + kDir + "/absent.json --g " + fx("g.json"))
            .code == 1);
  // 2: operator hypothesis violated
  CHECK(run_cli("apply --system " + fx("overlap.json") + " --f " + fx("g.json"))
            .code == 2);
  CHECK(run_cli("solve --system " + fx("cantor.json") + " --g " + fx("g.json"))
            .code == 2);
  // 3: non-convergence, with the status still in the artifact
  auto nc = run_cli("solve --system " + fx("dyadic.json") + " --g " +
                    fx("g_shift.json") +
                    " --solve-mode unique --max-iters 60 --out " +
                    fx("nc.json"));
  CHECK(nc.code == 3);
  CHECK(epsinv::read_json_file(fx("nc.json"))["status"] == "max_iters");
  // 4: part cap exceeded, via the environment override
  CHECK(run_cli("attractor --system " + fx("cantor.json") + " --depth 10",
                "EPSINV_PART_CAP=100")
            .code == 4);
  CHECK(run_cli("attractor --system " + fx("cantor.json") + " --depth 10",
                "EPSINV_PART_CAP=junk")
            .code == 1);
  CHECK(run_cli("--help").code == 0);
}

TEST_CASE("cylinder tables tile the interval") {
  ensure_fixtures();
  auto one = run_cli("cylinder --measure " + fx("cyl.json") + " --word 2,1");
  CHECK(one.code == 0);
  auto j1 = epsinv::parse_json_text(one.out);
  CHECK(j1["lo"] == "1/2");
  CHECK(j1["hi"] == "3/4");
  CHECK(j1["nu0"] == "3/16");  // (1/2 - 1/8) * 1/2

  auto table = run_cli("cylinder --measure " + fx("cyl.json") + " --depth 3");
  CHECK(table.code == 0);
  auto jt = epsinv::parse_json_text(table.out);
  CHECK(jt["cells"].size() == 8);
  CHECK(jt["total"] == "1");
  CHECK(jt["cells"][0]["lo"] == "0");
  CHECK(run_cli("cylinder --measure " + fx("cyl.json") + " --depth 8",
                "EPSINV_PART_CAP=100")
            .code == 4);
}

TEST_CASE("measure-verify passes its own construction") {
  ensure_fixtures();
  auto r = run_cli("measure-verify --measure " + fx("cyl.json") +
                   " --seed 17 --count 20 --depth 5");
  CHECK(r.code == 0);
  auto j = epsinv::parse_json_text(r.out);
  CHECK(j["density_criterion_ok"] == true);
  CHECK(j["set_criterion"]["all_ok"] == true);
  CHECK(j["set_criterion"]["entries"].size() == 20);
  CHECK(j["refinement"]["all_consistent"] == true);
}

TEST_CASE("build-g feeds straight back into solve") {
  ensure_fixtures();
  auto orth = run_cli("build-g --system " + fx("dyadic.json") + " --g0 " +
                      fx("g0.json") + " --epsilon 1/4 --out " + fx("built.json"));
  CHECK(orth.code == 0);
  CHECK(epsinv::read_json_file(fx("built.json")) ==
        epsinv::read_json_file(fx("g.json")));
  auto solved = run_cli("solve --system " + fx("dyadic.json") + " --g " +
                        fx("built.json"));
  CHECK(solved.code == 0);
  CHECK(epsinv::parse_json_text(solved.out)["residual"] == "0");

  auto piece = run_cli("build-g --system " + fx("dyadic.json") +
                       " --gamma 1/4,-1/4 --density-out " + fx("dens.json"));
  CHECK(piece.code == 0);
  auto dens = epsinv::read_json_file(fx("dens.json"));
  CHECK(dens["values"][0] == "5/4");
  CHECK(dens["values"][1] == "3/4");
  // either construction flag alone is required
  CHECK(run_cli("build-g --system " + fx("dyadic.json")).code == 1);
}

TEST_CASE("artifacts are byte-identical across reruns") {
  ensure_fixtures();
  for (std::string mode : {"rational", "float"}) {
    auto a = run_cli("solve --mode " + mode + " --system " + fx("dyadic.json") +
                     " --g " + fx("g.json") + " --out " + fx("a.json"));
    auto b = run_cli("solve --mode " + mode + " --system " + fx("dyadic.json") +
                     " --g " + fx("g.json") + " --out " + fx("b.json"));
    CHECK(a.code == 0);
    CHECK(b.code == 0);
    CHECK(slurp(fx("a.json")) == slurp(fx("b.json")));
    CHECK(!slurp(fx("a.json")).empty());
  }
  auto m1 = run_cli("measure-verify --measure " + fx("cyl.json") +
                    " --seed 9 --count 30");
  auto m2 = run_cli("measure-verify --measure " + fx("cyl.json") +
                    " --seed 9 --count 30");
  CHECK(m1.out == m2.out);
}
