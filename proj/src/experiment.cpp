#include "vortlab/experiment.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "vortlab/blowup.hpp"
#include "vortlab/degiorgi.hpp"
#include "vortlab/error.hpp"
#include "vortlab/localization.hpp"
#include "vortlab/lorentz.hpp"
#include "vortlab/spectral.hpp"

namespace fs = std::filesystem;

namespace vortlab {

namespace {

constexpr const char* kStageNames[] = {"simulate", "localize", "maximal", "select", "degiorgi", "report"};

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
  }
  Csv& cell(double v) {
    sep() << format_real(v);
    return *this;
  }
  Csv& cell(int v) {
    sep() << v;
    return *this;
  }
  Csv& cell(const std::string& v) {
    sep() << v;
    return *this;
  }
  void end() {
    os_ << '\n';
    first_ = true;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostream& sep() {
    if (!first_) os_ << ',';
    first_ = false;
    return os_;
  }
  std::ostringstream os_;
  bool first_ = true;
};

struct Pipeline {
  const ExperimentConfig& cfg;
  fs::path dir;
  StageRecord* current = nullptr;

  RunResult run;
  FieldSeries velocity;
  CutoffPair cut;
  std::vector<GridField> v;
  MaximalContext ctx;
  std::vector<Vec3> probes;

  void record(const std::string& rel) {
    ArtifactRecord a;
    a.path = rel;
    a.sha256 = sha256_file((dir / rel).string());
    a.bytes = fs::file_size(dir / rel);
    current->outputs.push_back(a);
  }

  void write_text(const std::string& rel, const std::string& text) {
    const fs::path p = dir / rel;
    fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) fail(ErrorCode::Io, "cannot write " + p.string());
    f << text;
    f.close();
    record(rel);
  }

  void write_field(const std::string& rel, const GridField& g) {
    const fs::path p = dir / rel;
    fs::create_directories(p.parent_path());
    write_vlf1(p.string(), g);
    record(rel);
  }

  double select_time() const { return cfg.select_time >= 0 ? cfg.select_time : velocity.times.back(); }

  void simulate() {
    GridField u0;
    if (!cfg.initial_field.empty()) {
      u0 = read_vlf1(cfg.initial_field);
      if (!(u0.spec == cfg.solver.grid)) fail(ErrorCode::DimensionMismatch, "initial field grid differs from solver.n");
      require_components(u0, 3, "initial field");
    } else {
      u0 = taylor_green_init(cfg.solver.grid, cfg.amplitude);
    }
    run = vortlab::run(cfg.solver, u0);
    velocity = velocity_series(run.snapshots);
    Csv csv({"t", "kinetic_energy=1/2|u|_2^2", "enstrophy=|grad u|_2^2",
             "leray_defect=1/2|u|^2+nu*int|grad u|^2-1/2|u0|^2"});
    for (const auto& r : run.energy) {
      csv.cell(r.t).cell(r.kinetic_energy).cell(r.enstrophy).cell(r.leray_defect);
      csv.end();
    }
    write_text("energy.csv", csv.str());
    Csv snaps({"index", "t"});
    for (std::size_t i = 0; i < velocity.times.size(); ++i) {
      snaps.cell(static_cast<int>(i)).cell(velocity.times[i]);
      snaps.end();
    }
    write_text("snapshots.csv", snaps.str());
    write_field("fields/u_initial.vlf1", run.snapshots.front().velocity);
    write_field("fields/u_final.vlf1", run.snapshots.back().velocity);
  }

  void localize() {
    cut = make_cutoff_pair(cfg.solver.grid, cfg.cutoff_radii, cfg.cutoff_sharpness);
    Csv csv({"t", "|v|_L2", "|div v|_inf", "harmonicity(w)=|Lap w|_inf(B_0.9)/|omega|_L1(B_2)",
             "harmonicity(varpi)=|Lap varpi|_inf(B_0.9)/|omega|_L1(B_2)"});
    v.clear();
    for (const auto& s : run.snapshots) {
      const LocalizedTriple tr = localized_velocity(s.velocity, cut);
      const GridField om = curl(s.velocity);
      csv.cell(s.time).cell(l2_norm(tr.v)).cell(max_norm(divergence(tr.v)));
      csv.cell(harmonicity_residual(tr.w, 0.9, om)).cell(harmonicity_residual(tr.varpi, 0.9, om));
      csv.end();
      v.push_back(tr.v);
      v.back().time = s.time;
    }
    write_text("localization.csv", csv.str());
    Csv eq({"t_center", "v_equation_residual_L2(B_1)", "|dt v|_L2(B_1)", "relative"});
    if (run.snapshots.size() >= 5) {
      std::vector<Snapshot> last(run.snapshots.end() - 5, run.snapshots.end());
      const VEquationReport r = v_equation_residual(last, cut);
      eq.cell(last[2].time).cell(r.residual_l2).cell(r.dt_v_l2).cell(r.relative);
      eq.end();
    }
    write_text("v_equation.csv", eq.str());
    write_field("fields/v_final.vlf1", v.back());
  }

  void maximal() {
    ctx = make_maximal_context(velocity, cfg.thresholds, cfg.resolution);
    probes = cfg.probes;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    for (int i = 0; i < cfg.random_probes; ++i) {
      const double a = U(rng), b = U(rng), c = U(rng);
      probes.push_back({a, b, c});
    }
    const double t = select_time();
    const auto ladder = geometric_ladder(cfg.ladder_eps_max, cfg.ladder_levels);
    Csv csv({"probe", "t", "x", "y", "z", "eps", "eps^2*avg_Q M(|grad u|)", "admissible", "avg_Q M(|grad u|)", "status"});
    Csv mq({"probe", "t", "M_Q(M(|grad u|))", "admissible_count", "eps_argmax", "fallback", "status"});
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const Vec3& x = probes[p];
      for (double eps : ladder) {
        csv.cell(static_cast<int>(p)).cell(t).cell(x[0]).cell(x[1]).cell(x[2]).cell(eps);
        try {
          const SkewedCylinder cyl = ctx.cylinder(t, x, eps);
          const double stat = admissibility_statistic(cyl, ctx.M_grad_u);
          csv.cell(stat).cell(admissible(cyl, ctx.M_grad_u, cfg.thresholds.eta0) ? 1 : 0);
          csv.cell(cylinder_average(ctx.M_grad_u, cyl)).cell(std::string("ok"));
        } catch (const Error& e) {
          csv.cell(std::string("")).cell(std::string("")).cell(std::string("")).cell(std::string(to_string(e.code())));
        }
        csv.end();
      }
      mq.cell(static_cast<int>(p)).cell(t);
      try {
        const QMaximalResult r = q_maximal(ctx.M_grad_u, ctx, t, x, ladder);
        mq.cell(r.value).cell(r.admissible_count).cell(r.eps_argmax).cell(r.fallback ? 1 : 0).cell(std::string("ok"));
      } catch (const Error& e) {
        mq.cell(std::string("")).cell(std::string("")).cell(std::string("")).cell(std::string(""));
        mq.cell(std::string(to_string(e.code())));
      }
      mq.end();
    }
    write_text("maximal_cylinders.csv", csv.str());
    write_text("maximal_q.csv", mq.str());
    if (!ctx.M_grad_u.fields.empty()) write_field("fields/M_grad_u_final.vlf1", ctx.M_grad_u.fields.back());
  }

  void select() {
    const double t = select_time();
    Csv csv({"probe", "t", "eps_star", "case", "I_eps=eps^4[delta^-2nu(avg M^p)^(2/p)+delta avg M^2]",
             "M_Q(M^p)", "M_Q(M^2)", "eps_star^-4", "max{(...)/eta;81/t^2}", "admissible_at_eps_star",
             "bound_violated", "status"});
    for (std::size_t p = 0; p < probes.size(); ++p) {
      csv.cell(static_cast<int>(p)).cell(t);
      try {
        const SelectionResult s = epsilon_selection(ctx, t, probes[p], cfg.pivot, cfg.select_levels, cfg.select_ratio);
        csv.cell(s.eps_star).cell(s.case_tag).cell(s.I_value).cell(s.mq_p).cell(s.mq_2).cell(s.bound_lhs);
        csv.cell(s.bound_rhs).cell(s.admissible_at_star ? 1 : 0).cell(s.violated ? 1 : 0).cell(std::string("ok"));
      } catch (const Error& e) {
        for (int i = 0; i < 9; ++i) csv.cell(std::string(""));
        csv.cell(std::string(to_string(e.code())));
      }
      csv.end();
    }
    write_text("selection.csv", csv.str());
  }

  void degiorgi() {
    DeGiorgiInput in;
    in.v.fields = v;
    in.v.times = velocity.times;
    in.t_top = velocity.times.back();
    Csv csv({"k", "c_k", "r_k_flat", "U_k=sup|v_k|^2_L2+|d_k|^2_L2", "slices", "alpha_margin=c_k-max(alpha_k|v|)",
             "beta_margin=9U_{k-1}-|beta_k v|^2_E", "chain_margin_LinfL2", "chain_margin_L2L6", "realized_C"});
    for (int k = 0; k <= cfg.degiorgi_kmax; ++k) {
      const EnergyTerms e = energy(in, k);
      csv.cell(k).cell(level_c(k)).cell(shrinking_cylinders(k).r_flat).cell(e.U).cell(e.slices);
      if (k == 0) {
        for (int i = 0; i < 5; ++i) csv.cell(std::string(""));
      } else {
        const TruncationReport r = truncation_lemma_check(in, k);
        csv.cell(r.alpha_margin).cell(r.beta_margin).cell(r.chain_linf_margin).cell(r.chain_l6_margin);
        csv.cell(r.realized_C);
      }
      csv.end();
    }
    write_text("degiorgi.csv", csv.str());
  }

  void report() {
    std::vector<GridField> deriv;
    std::vector<double> times;
    for (const auto& s : run.snapshots) {
      if (!(s.time > 0)) continue;
      deriv.push_back(derivative_magnitude(curl(s.velocity), cfg.lorentz_n));
      times.push_back(s.time);
    }
    const double u0 = l2_norm(run.snapshots.front().velocity);
    Csv csv({"n", "q", "C_n", "|D^n omega|^(4/(n+2)) 1{>C_n t^-2} in L^(1,q)", "ratio_to_|u0|_L2^2"});
    for (double cn : cfg.cn_sweep) {
      const double val = theorem_functional(deriv, cfg.lorentz_n, cfg.lorentz_q, cn, times);
      csv.cell(cfg.lorentz_n).cell(cfg.lorentz_q).cell(cn).cell(val).cell(u0 > 0 ? val / (u0 * u0) : 0.0);
      csv.end();
    }
    write_text("lorentz.csv", csv.str());
  }
};

nlohmann::ordered_json config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  auto r = [](double v) { return format_real(v); };
  j["solver"] = {{"n", c.solver.grid.n},         {"length", r(c.solver.grid.L)},
                 {"viscosity", r(c.solver.viscosity)}, {"dt", r(c.solver.dt)},
                 {"t_end", r(c.solver.t_end)},   {"snapshot_stride", c.solver.snapshot_stride},
                 {"dealias", c.solver.dealias},  {"amplitude", r(c.amplitude)},
                 {"initial_field", c.initial_field}};
  j["localization"] = {{"radii", {r(c.cutoff_radii[0]), r(c.cutoff_radii[1]), r(c.cutoff_radii[2]), r(c.cutoff_radii[3])}},
                       {"sharpness", r(c.cutoff_sharpness)}};
  j["maximal"] = {{"eta0", r(c.thresholds.eta0)}, {"eps_max", r(c.ladder_eps_max)}, {"levels", c.ladder_levels}};
  j["pivot"] = {{"p", r(c.pivot.p)}, {"nu", r(c.pivot.nu_value())}, {"delta", r(c.pivot.delta)}, {"eta", r(c.pivot.eta)}};
  j["select"] = {{"time", r(c.select_time)}, {"random_probes", c.random_probes}, {"levels", c.select_levels},
                 {"ratio", r(c.select_ratio)}};
  j["degiorgi"] = {{"kmax", c.degiorgi_kmax}};
  nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
  for (double v : c.cn_sweep) sweep.push_back(r(v));
  j["lorentz"] = {{"n", c.lorentz_n}, {"q", r(c.lorentz_q)}, {"cn_sweep", sweep}};
  j["seed"] = c.seed;
  return j;
}

void write_manifest(const fs::path& dir, const ExperimentConfig& cfg, const ExperimentResult& res) {
  nlohmann::ordered_json m;
  m["format"] = "vortlab-manifest-1";
  m["status"] = res.exit_status == 0 ? "ok" : "failed";
  m["config"] = config_json(cfg);
  m["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : res.stages) {
    nlohmann::ordered_json st;
    st["name"] = s.name;
    st["status"] = s.ok ? "ok" : "failed";
    if (!s.ok) st["error"] = s.error;
    st["outputs"] = nlohmann::ordered_json::array();
    for (const auto& a : s.outputs) st["outputs"].push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    m["stages"].push_back(st);
  }
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot write manifest in " + dir.string());
  f << m.dump(2) << '\n';
}

}  // namespace

const char* stage_name(Stage s) { return kStageNames[static_cast<int>(s)]; }

Stage parse_stage(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(Stage::report); ++i)
    if (name == kStageNames[i]) return static_cast<Stage>(i);
  fail(ErrorCode::InvalidArgument, "unknown stage " + name);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::Io, "SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return sha256_hex(ss.str());
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, Stage last) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  ExperimentResult res;
  res.manifest_path = (dir / "manifest.json").string();
  Pipeline p{cfg, dir, nullptr, {}, {}, {}, {}, {}, {}};
  try {
    cfg.validate();
  } catch (const Error& e) {
    res.stages.push_back({"config", false, e.what(), {}});
    res.exit_status = 1;
    write_manifest(dir, cfg, res);
    return res;
  }
  for (int i = 0; i <= static_cast<int>(last); ++i) {
    const Stage s = static_cast<Stage>(i);
    res.stages.push_back({stage_name(s), false, "", {}});
    p.current = &res.stages.back();
    try {
      switch (s) {
        case Stage::simulate: p.simulate(); break;
        case Stage::localize: p.localize(); break;
        case Stage::maximal: p.maximal(); break;
        case Stage::select: p.select(); break;
        case Stage::degiorgi: p.degiorgi(); break;
        case Stage::report: p.report(); break;
      }
      res.stages.back().ok = true;
    } catch (const std::exception& e) {
      res.stages.back().error = e.what();
      res.exit_status = 1;
      break;
    }
  }
  write_manifest(dir, cfg, res);
  return res;
}

}  // namespace vortlab
