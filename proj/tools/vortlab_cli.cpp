#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vortlab/config.hpp"
#include "vortlab/error.hpp"
#include "vortlab/experiment.hpp"
#include "vortlab/verify.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string out;
  long long seed = -1;
};

void add_common(CLI::App* app, CommonArgs& a) {
  app->add_option("--config", a.config, "experiment config (key = value with [sections])")->check(CLI::ExistingFile);
  app->add_option("--out", a.out, "output directory (overrides output.dir)");
  app->add_option("--seed", a.seed, "random seed (overrides seed)")->check(CLI::NonNegativeNumber);
}

vortlab::ExperimentConfig resolve(const CommonArgs& a) {
  vortlab::ExperimentConfig cfg = a.config.empty() ? vortlab::ExperimentConfig{} : vortlab::load_experiment_config(a.config);
  if (!a.out.empty()) cfg.output_dir = a.out;
  if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
  return cfg;
}

int run_stage(const CommonArgs& a, vortlab::Stage stage) {
  const vortlab::ExperimentResult r = vortlab::run_experiment(resolve(a), stage);
  for (const auto& s : r.stages) {
    std::cout << s.name << ": " << (s.ok ? "ok" : "failed");
    if (!s.ok) std::cout << " (" << s.error << ")";
    std::cout << '\n';
  }
  std::cout << "manifest: " << r.manifest_path << '\n';
  return r.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vortlab: vorticity regularity experiments on the periodic box"};
  app.require_subcommand(1);

  const std::vector<std::pair<const char*, vortlab::Stage>> stages{
      {"simulate", vortlab::Stage::simulate}, {"localize", vortlab::Stage::localize},
      {"maximal", vortlab::Stage::maximal},   {"select", vortlab::Stage::select},
      {"degiorgi", vortlab::Stage::degiorgi}, {"report", vortlab::Stage::report}};
  const std::vector<const char*> help{
      "run the Navier-Stokes solver",
      "simulate, then localize u into v, w, varpi",
      "... then maximal functions and admissible skewed cylinders",
      "... then the eps selection at the probe points",
      "... then De Giorgi truncation energies",
      "full pipeline including the Lorentz functional report"};

  std::vector<CommonArgs> args(stages.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    subs.push_back(app.add_subcommand(stages[i].first, help[i]));
    add_common(subs.back(), args[i]);
  }

  CommonArgs vargs;
  std::string suite = "all";
  int n = 0;
  std::vector<std::string> overrides;
  CLI::App* verify = app.add_subcommand("verify", "run acceptance suites and print JSON verdicts");
  add_common(verify, vargs);
  verify->add_option("suite", suite, "identities, lorentz, suitability, maximal, blowup, degiorgi or all");
  verify->add_option("--n", n, "base grid size (default solver.n or 32)");
  verify->add_option("--tolerance", overrides, "test mode: CHECK_ID=VALUE replaces a tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (std::size_t i = 0; i < stages.size(); ++i)
      if (subs[i]->parsed()) return run_stage(args[i], stages[i].second);

    vortlab::VerifyOptions opt;
    opt.progress = true;
    if (!vargs.config.empty()) {
      const vortlab::ExperimentConfig cfg = vortlab::load_experiment_config(vargs.config);
      opt.n = cfg.solver.grid.n;
      opt.seed = cfg.seed;
    }
    if (vargs.seed >= 0) opt.seed = static_cast<std::uint64_t>(vargs.seed);
    if (n > 0) opt.n = n;
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) vortlab::fail(vortlab::ErrorCode::Parse, "--tolerance expects ID=VALUE, got " + o);
      opt.tolerance_overrides[o.substr(0, eq)] = std::stod(o.substr(eq + 1));
    }
    const auto verdicts = vortlab::verify_suite(suite, opt);
    const std::string json = vortlab::verdicts_json(suite, verdicts);
    std::cout << json << '\n';
    if (!vargs.out.empty()) {
      std::filesystem::create_directories(vargs.out);
      std::ofstream(std::filesystem::path(vargs.out) / "verdicts.json") << json << '\n';
    }
    bool ok = true;
    for (const auto& v : verdicts) {
      ok = ok && v.pass;
      if (!v.pass) {
        std::cerr << "FAIL " << v.criterion;
        for (const auto& c : v.checks)
          if (!c.pass) std::cerr << ' ' << c.id;
        if (!v.error.empty()) std::cerr << " error: " << v.error;
        std::cerr << '\n';
      }
    }
    return ok ? 0 : 1;
  } catch (const vortlab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == vortlab::ErrorCode::UnknownSuite ? 2 : 1;
  }
}
