#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vortlab/config.hpp"
#include "vortlab/error.hpp"
#include "vortlab/experiment.hpp"
#include "vortlab/ns_solver.hpp"

using namespace vortlab;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::StageFailure;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vortlab_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

const char* kSmallConfig = R"(# small run
seed = 3
[solver]
n = 16
dt = 0.01
t_end = 0.2
snapshot_stride = 2
amplitude = 1.5

[maximal]
eps_max = 0.1
levels = 2
n_s = 3
n_r = 3
n_mu = 3
n_phi = 6
trajectory_steps = 8

[select]
time = 0.2
probes = 0.3, 0.2, 0.1
random_probes = 1
levels = 3

[degiorgi]
kmax = 2

[lorentz]
cn_sweep = 0.1, 10
)";

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig c = experiment_config(ConfigFile::parse(kSmallConfig));
  c.output_dir = out.string();
  return c;
}

struct Cli {
  int status;
  std::string out, err;
};

Cli run_cli(const std::string& args) {
  const char* exe = std::getenv("VORTLAB_CLI");
  REQUIRE_MESSAGE(exe != nullptr, "VORTLAB_CLI is not set");
  const fs::path dir = scratch("cli");
  const std::string cmd = std::string(exe) + " " + args + " > " + (dir / "out").string() + " 2> " + (dir / "err").string();
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(dir / "out"), slurp(dir / "err")};
}

}  // namespace

TEST_CASE("config file syntax") {
  const ConfigFile f = ConfigFile::parse("a = 1\n[s]\nb = 2.5  # comment\nflag = true\nlist = 1, 2,3\npts = 1,2,3; 4,5,6\n");
  CHECK(f.get_int("a", 0) == 1);
  CHECK(f.get_double("s.b", 0) == 2.5);
  CHECK(f.get_bool("s.flag", false));
  CHECK(f.get_list("s.list", {}) == std::vector<double>{1, 2, 3});
  const auto pts = f.get_points("s.pts", {});
  REQUIRE(pts.size() == 2);
  CHECK(pts[1][2] == 6.0);
  CHECK(f.get_double("missing", 7.0) == 7.0);
  CHECK(ConfigFile::parse("x = inf\n").get_double("x", 0) == INFINITY);

  CHECK(code_of([] { ConfigFile::parse("a = 1\na = 2\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { ConfigFile::parse("[open\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { ConfigFile::parse("no equals sign\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { ConfigFile::parse("a = x\n").get_double("a", 0); }) == ErrorCode::Parse);
  CHECK(code_of([] { ConfigFile::parse("a = 1.5\n").get_int("a", 0); }) == ErrorCode::Parse);
  CHECK(code_of([] { ConfigFile::parse("a = 1,2\n").get_points("a", {}); }) == ErrorCode::Parse);
  CHECK(code_of([] { ConfigFile::load("/nonexistent/vortlab.cfg"); }) == ErrorCode::Io);
}

TEST_CASE("experiment config mapping and validation") {
  const ExperimentConfig c = small_config("unused");
  CHECK(c.solver.grid.n == 16);
  CHECK(c.solver.grid.origin[0] == doctest::Approx(-c.solver.grid.L / 2));
  CHECK(c.amplitude == 1.5);
  CHECK(c.resolution.n_phi == 6);
  CHECK(c.cn_sweep == std::vector<double>{0.1, 10});
  CHECK(c.seed == 3);
  CHECK_NOTHROW(c.validate());

  CHECK(code_of([] { experiment_config(ConfigFile::parse("[solver]\nnn = 3\n")); }) == ErrorCode::Parse);
  CHECK(code_of([] { experiment_config(ConfigFile::parse("[localization]\nradii = 1, 2\n")); }) == ErrorCode::Parse);
  ExperimentConfig bad = c;
  bad.cutoff_radii = {1.0, 2.0, 2.5, 3.5};
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::InvalidArgument);
  bad = c;
  bad.initial_field = "/nonexistent.vlf1";
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::Io);
}

TEST_CASE("hashing") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(parse_stage("degiorgi") == Stage::degiorgi);
  CHECK(std::string(stage_name(Stage::report)) == "report");
  CHECK(code_of([] { parse_stage("bogus"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("pipeline artifacts and deterministic manifest") {
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  const ExperimentResult ra = run_experiment(small_config(a));
  const ExperimentResult rb = run_experiment(small_config(b));
  REQUIRE(ra.exit_status == 0);
  REQUIRE(rb.exit_status == 0);
  REQUIRE(ra.stages.size() == 6);
  for (const auto& s : ra.stages) CHECK_MESSAGE(s.ok, s.name << ": " << s.error);

  // The manifest does not echo the output directory, so the two runs match byte for byte.
  CHECK(slurp(ra.manifest_path) == slurp(rb.manifest_path));
  const auto ja = nlohmann::json::parse(slurp(ra.manifest_path));
  CHECK(ja["status"] == "ok");
  for (const auto& stage : ja["stages"]) CHECK(stage["status"] == "ok");

  int files = 0;
  for (const auto& stage : ja["stages"])
    for (const auto& o : stage["outputs"]) {
      const fs::path p = a / o["path"].get<std::string>();
      REQUIRE(fs::exists(p));
      CHECK(o["sha256"] == sha256_file(p.string()));
      CHECK(o["sha256"] == sha256_hex(slurp(p)));
      CHECK(o["bytes"] == fs::file_size(p));
      ++files;
    }
  CHECK(files >= 10);

  const GridField u0 = read_vlf1((a / "fields" / "u_initial.vlf1").string());
  GridSpec s;
  s.n = 16;
  CHECK(max_norm(u0 - taylor_green_init(s, 1.5)) < 1e-13);
  CHECK(slurp(a / "energy.csv").rfind("t,", 0) == 0);

  // Stopping early writes only the prerequisites.
  const fs::path c = scratch("run_c");
  const ExperimentResult rc = run_experiment(small_config(c), Stage::localize);
  CHECK(rc.exit_status == 0);
  CHECK(rc.stages.size() == 2);
  CHECK(fs::exists(c / "localization.csv"));
  CHECK_FALSE(fs::exists(c / "selection.csv"));
}

TEST_CASE("a failing run leaves a partial manifest") {
  const fs::path d = scratch("run_bad");
  ExperimentConfig c = small_config(d);
  c.solver.grid.n = 7;
  const ExperimentResult r = run_experiment(c);
  CHECK(r.exit_status == 1);
  const auto j = nlohmann::json::parse(slurp(r.manifest_path));
  CHECK(j["status"] == "failed");
  REQUIRE(j["stages"].size() == 1);
  CHECK(j["stages"][0]["name"] == "config");
  CHECK(j["stages"][0]["status"] == "failed");
  CHECK(j["stages"][0]["error"].get<std::string>().find("invalid_argument") != std::string::npos);
}

TEST_CASE("command line") {
  const fs::path dir = scratch("cli_cfg");
  std::ofstream(dir / "small.cfg") << kSmallConfig;

  const Cli sim = run_cli("simulate --config " + (dir / "small.cfg").string() + " --out " + (dir / "sim").string());
  CHECK(sim.status == 0);
  CHECK(sim.out.find("simulate: ok") != std::string::npos);
  CHECK(fs::exists(dir / "sim" / "manifest.json"));

  const Cli unknown = run_cli("verify nonsense");
  CHECK(unknown.status == 2);
  CHECK(unknown.err.find("nonsense") != std::string::npos);

  const Cli missing = run_cli("simulate --config /nonexistent.cfg");
  CHECK(missing.status != 0);
}

TEST_CASE("tolerance injection surfaces the failing criterion") {
  const Cli tampered = run_cli("verify identities --n 16 --tolerance AC1.vc1=1e-30");
  CHECK(tampered.status == 1);
  CHECK(tampered.err.find("FAIL AC1") != std::string::npos);
  CHECK(tampered.err.find("AC1.vc1") != std::string::npos);
  const auto j = nlohmann::json::parse(tampered.out);
  CHECK(j["suite"] == "identities");
  CHECK(j["pass"] == false);

  const Cli honest = run_cli("verify identities --n 16");
  CHECK(honest.status == 0);
  CHECK(nlohmann::json::parse(honest.out)["pass"] == true);
}
