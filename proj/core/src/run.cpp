#include "kslab/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "kslab/error.hpp"
#include "kslab/experiments.hpp"
#include "kslab/initial_datum.hpp"
#include "kslab/kernels.hpp"
#include "kslab/nonlinearity.hpp"
#include "kslab/snapshot_io.hpp"

namespace kslab {

namespace fs = std::filesystem;

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {
      "plan",  "simulate", "pde",   "couple",    "fluctuation", "meanfield-rate",
      "chaos", "bench",    "dump-mass", "dump-pressure"};
  return names;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, const RunConfig& cfg, const std::string& header)
      : path_(path), out_(path, std::ios::trunc) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    std::istringstream echo(echo_config(cfg));
    for (std::string line; std::getline(echo, line);) out_ << "# " << line << '\n';
    out_ << header << '\n';
  }
  ~CsvFile() = default;

  template <class... Cols>
  void row(const Cols&... cols) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cols), first = false), ...);
    out_ << '\n';
  }

  void close() {
    out_.flush();
    if (!out_) throw IoError("write failed for " + path_.string());
  }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }

  fs::path path_;
  std::ofstream out_;
};

std::string padded(std::size_t v, int width) {
  std::ostringstream s;
  s << std::setw(width) << std::setfill('0') << v;
  return s.str();
}

void write_report_rows(CsvFile& csv, const ErrorReport& rep, const std::string& prefix) {
  const std::string metric = prefix + to_string(rep.metric);
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    csv.row(rep.times[k], metric, rep.estimate[k], rep.standard_error[k], rep.particles, rep.eps_k,
            rep.eps_p, rep.lambda, rep.sigma, rep.replications);
  }
  csv.row(std::string("sup"), metric, rep.sup_estimate, rep.sup_standard_error, rep.particles,
          rep.eps_k, rep.eps_p, rep.lambda, rep.sigma, rep.replications);
}

constexpr const char* kReportHeader = "t,metric,estimate,stderr,N,eps_k,eps_p,lambda,sigma,R";

void run_plan(const RunConfig& cfg, const fs::path& out) {
  const SimConfig& sim = cfg.coupling.sim;
  const ScalingPlan p =
      cfg.plan.beta ? plan_parameters(cfg.plan.particles, cfg.plan.alpha_k, cfg.plan.alpha_p,
                                      sim.dimension, sim.m, *cfg.plan.beta, *cfg.plan.delta)
                    : plan_parameters(cfg.plan.particles, cfg.plan.alpha_k, cfg.plan.alpha_p,
                                      sim.dimension, sim.m);
  CsvFile csv(out / "plan.csv", cfg,
              "N,alpha_k,alpha_p,d,m,eps_k,eps_p,lambda,band_warning,beta,delta,admissibility");
  if (p.has_admissibility) {
    csv.row(p.particles, p.alpha_k, p.alpha_p, p.dimension, p.m, p.eps_k, p.eps_p, p.lambda,
            p.band_warning, p.beta, p.delta, p.admissibility_margin);
  } else {
    csv.row(p.particles, p.alpha_k, p.alpha_p, p.dimension, p.m, p.eps_k, p.eps_p, p.lambda,
            p.band_warning, std::string(""), std::string(""), std::string(""));
  }
  csv.close();
}

void run_simulate(const RunConfig& cfg, const fs::path& out, int workers, std::ostream& log) {
  SimConfig sim = cfg.coupling.sim;
  sim.workers = workers;
  sim.validate(true);
  fs::create_directories(out / "snapshots");
  const int d = sim.dimension;
  std::string header = "t,replication,i";
  for (int a = 1; a <= d; ++a) header += ",x_" + std::to_string(a);
  CsvFile csv(out / "trajectories.csv", cfg, header);
  for (std::size_t r = 0; r < sim.replications; ++r) {
    const auto snaps = simulate(sim, r);
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      write_snapshot(out / "snapshots" / ("rep" + padded(r, 4) + "_" + padded(k, 4) + ".kspc"),
                     snaps[k]);
      for (std::size_t i = 0; i < snaps[k].size(); ++i) {
        std::string line = num(snaps[k].time()) + "," + std::to_string(r) + "," + std::to_string(i);
        for (double x : snaps[k].position(i)) line += "," + num(x);
        csv.row(line);
      }
    }
    log << "simulate: replication " << r << " done\n";
  }
  csv.close();
}

PdeParams pde_params(const RunConfig& cfg, PdeMode mode) {
  const SimConfig& sim = cfg.coupling.sim;
  PdeParams p;
  p.m = sim.m;
  p.sigma = sim.sigma;
  p.kernel = sim.kernel;
  p.drifts = sim.drifts;
  p.grid = cfg.coupling.grid;
  p.mode = mode;
  return p;
}

void run_pde(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  const PdeParams params = pde_params(cfg, cfg.pde_mode);
  const GridField u0 = discretize(cfg.coupling.sim.initial, params.grid);
  PdeSolveOptions opts;
  opts.horizon = cfg.coupling.sim.horizon;
  opts.output_times = cfg.coupling.sim.output_times;
  opts.dt = cfg.coupling.pde_dt;
  const PdeSolution sol = pde_solve(params, u0, opts);
  fs::create_directories(out / "fields");
  CsvFile summary(out / "pde_summary.csv", cfg, "t,mass,min");
  const GridSpec& g = params.grid;
  CsvFile cut(out / "linecut.csv", cfg, "t,axis,coordinate,value");
  for (std::size_t k = 0; k < sol.snapshots.size(); ++k) {
    const GridField& f = sol.snapshots[k];
    write_field(out / "fields" / ("u_" + padded(k, 4) + ".ksfd"), f);
    summary.row(f.time, f.mass(), f.min_value());
    // Line cut along axis 0 through the middle cell on the other axes.
    std::size_t base = 0;
    for (int a = 1; a < g.dimension; ++a) base += (g.resolution / 2) * g.stride(a);
    for (std::size_t j = 0; j < g.resolution; ++j) {
      cut.row(f.time, 0, g.center(j), f.values[base + j * g.stride(0)]);
    }
  }
  summary.close();
  cut.close();
  log << "pde: " << sol.steps << " steps, max mass drift " << sol.max_mass_drift << "\n";
}

void run_couple(const RunConfig& cfg, const fs::path& out, int workers, std::ostream& log) {
  const CouplingConfig& cc = cfg.coupling;
  cc.sim.validate(true);
  const DriftFieldSeries mid = solve_drift_fields(cc, PdeMode::kMollified);
  const DriftFieldSeries lim = solve_drift_fields(cc, PdeMode::kLimit);
  const std::size_t reps = cc.sim.replications;
  std::vector<CoupledRun> runs(reps);
  const long count = static_cast<long>(reps);
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(dynamic)
  for (long r = 0; r < count; ++r) {
    runs[static_cast<std::size_t>(r)] = coupled_run(cc, mid, lim, static_cast<std::uint64_t>(r));
  }
  std::vector<Trajectories> x;
  std::vector<Trajectories> xbar;
  std::vector<Trajectories> xhat;
  std::size_t aborted = 0;
  for (auto& run : runs) {
    if (run.aborted) {
      ++aborted;
      continue;
    }
    x.push_back(std::move(run.interacting));
    xbar.push_back(std::move(run.intermediate));
    xhat.push_back(std::move(run.limit));
  }
  if (x.empty()) throw OutOfDomainError("every replication left the grid");
  CsvFile csv(out / "error_report.csv", cfg, kReportHeader);
  const std::pair<const char*, std::pair<std::vector<Trajectories>*, std::vector<Trajectories>*>>
      pairs[] = {{"interacting_intermediate:", {&x, &xbar}},
                 {"intermediate_limit:", {&xbar, &xhat}},
                 {"interacting_limit:", {&x, &xhat}}};
  for (const auto& [name, ab] : pairs) {
    for (ErrorAggregation m : {ErrorAggregation::kMaxThenMean, ErrorAggregation::kMeanSquare}) {
      ErrorReport rep = trajectory_error(*ab.first, *ab.second, m);
      rep.eps_k = cc.sim.kernel.eps_k;
      rep.eps_p = cc.sim.kernel.eps_p;
      rep.lambda = cc.sim.kernel.lambda;
      rep.sigma = cc.sim.sigma;
      write_report_rows(csv, rep, name);
    }
  }
  csv.row(std::string("aborted"), std::string("replications"), aborted, 0.0, cc.sim.particles,
          cc.sim.kernel.eps_k, cc.sim.kernel.eps_p, cc.sim.kernel.lambda, cc.sim.sigma, reps);
  csv.close();
  log << "couple: " << x.size() << " replications, " << aborted << " aborted\n";
}

void write_study(const RunConfig& cfg, const fs::path& path, const StudyResult& res,
                 const std::string& xname) {
  CsvFile csv(path, cfg, kReportHeader);
  for (const auto& rep : res.reports) write_report_rows(csv, rep, "");
  csv.row(std::string("fit"), "slope_vs_" + xname, res.fit.slope, res.fit.slope_half_width,
          std::size_t{0}, 0.0, 0.0, 0.0, 0.0, res.points.size());
  csv.row(std::string("fit"), "intercept", res.fit.intercept, 0.0, std::size_t{0}, 0.0, 0.0, 0.0,
          0.0, res.points.size());
  csv.row(std::string("aborted"), std::string("replications"), res.aborted, 0.0, std::size_t{0},
          0.0, 0.0, 0.0, 0.0, std::size_t{0});
  csv.close();
}

void run_chaos(const RunConfig& cfg, const fs::path& out, int workers, std::ostream& log) {
  SimConfig sim = cfg.coupling.sim;
  sim.particles = cfg.chaos.particles;
  sim.replications = cfg.chaos.replications;
  sim.output_times = {sim.horizon};
  sim.workers = 1;
  sim.validate(true);
  std::vector<ParticleEnsemble> finals(sim.replications);
  const long count = static_cast<long>(sim.replications);
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(dynamic)
  for (long r = 0; r < count; ++r) {
    finals[static_cast<std::size_t>(r)] = simulate(sim, static_cast<std::uint64_t>(r)).back();
  }
  const PdeParams params = pde_params(cfg, PdeMode::kMollified);
  PdeSolveOptions opts;
  opts.horizon = sim.horizon;
  opts.output_times = {sim.horizon};
  opts.dt = cfg.coupling.pde_dt;
  const auto sol = pde_solve(params, discretize(sim.initial, params.grid), opts);
  const MarginalReport rep =
      marginal_metrics(finals, sol.snapshots.back(), sim.seed, cfg.chaos.directions);
  CsvFile csv(out / "chaos.csv", cfg, "metric,value");
  csv.row(std::string("w1_pooled"), rep.w1_pooled);
  csv.row(std::string("w1_baseline"), rep.baseline);
  csv.row(std::string("w1_particle1"), rep.w1_particle1);
  csv.row(std::string("w1_particle2"), rep.w1_particle2);
  csv.row(std::string("independence"), rep.independence);
  csv.row(std::string("independence_threshold"),
          4.0 / std::sqrt(static_cast<double>(rep.replications)));
  csv.close();
  log << "chaos: w1 " << rep.w1_pooled << " baseline " << rep.baseline << "\n";
}

void run_bench(const RunConfig& cfg, const fs::path& out, int workers, std::ostream& log) {
  const int d = cfg.coupling.sim.dimension;
  const std::size_t n = cfg.bench.particles;
  InitialDatum box;
  box.kind = InitialDatum::Kind::kUniformBox;
  box.center.assign(static_cast<std::size_t>(d), 0.5);
  box.scale = 0.5;
  ParticleEnsemble ens = sample_initial(box, d, n, cfg.coupling.sim.seed);
  KernelParams kp{cfg.bench.eps, cfg.bench.eps, std::pow(cfg.bench.eps, d) / 2.0};
  const InteractionModel model(d, cfg.coupling.sim.m, kp, {false, true});
  std::vector<double> rho(n);
  std::vector<double> grad(n * static_cast<std::size_t>(d));
  CsvFile csv(out / "bench.csv", cfg, "method,N,steps,seconds");
  auto time_it = [&](const std::string& name, auto fn) {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t s = 0; s < cfg.bench.steps; ++s) fn();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    csv.row(name, n, cfg.bench.steps, secs);
    log << "bench: " << name << " " << secs << " s\n";
  };
  time_it("repulsion_direct", [&] { repulsion_sums_direct(ens, model, rho, grad, workers); });
  time_it("repulsion_cell_list",
          [&] { repulsion_sums_celllist(ens, model, cfg.bench.eps, rho, grad, workers); });
  csv.close();
}

void run_dump_mass(const RunConfig& cfg, const fs::path& out) {
  const int d = cfg.coupling.sim.dimension;
  const double eps = cfg.coupling.sim.kernel.eps_k;
  const Mollifier& v = shared_mollifier(d);
  CsvFile csv(out / "enclosed_mass.csv", cfg, "r,M");
  constexpr int kRows = 1024;
  for (int k = 0; k <= kRows; ++k) {
    const double r = eps * k / kRows;
    csv.row(r, v.enclosed_mass(r, eps));
  }
  csv.close();
}

void run_dump_pressure(const RunConfig& cfg, const fs::path& out) {
  const auto& sim = cfg.coupling.sim;
  const CutoffPressure p(sim.m, sim.kernel.lambda);
  CsvFile csv(out / "pressure.csv", cfg, "r,p_lambda,p_lambda_1,p_lambda_2");
  const double hi = 3.0 / sim.kernel.lambda;
  constexpr int kRows = 4096;
  for (int k = 1; k <= kRows; ++k) {
    const double r = hi * k / kRows;
    csv.row(r, p.value(r), p.first(r), p.second(r));
  }
  csv.close();
}

}  // namespace

void run_subcommand(const std::string& name, const RunConfig& config, const fs::path& out_dir,
                    int workers, std::ostream& log) {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  fs::create_directories(out_dir);
  if (name == "plan") {
    run_plan(config, out_dir);
  } else if (name == "simulate") {
    run_simulate(config, out_dir, workers, log);
  } else if (name == "pde") {
    run_pde(config, out_dir, log);
  } else if (name == "couple") {
    run_couple(config, out_dir, workers, log);
  } else if (name == "fluctuation") {
    const StudyResult res = fluctuation_study(config.coupling, config.fluctuation_particles, workers);
    write_study(config, out_dir / "fluctuation.csv", res, "N");
    log << "fluctuation: slope " << res.fit.slope << "\n";
  } else if (name == "meanfield-rate") {
    const StudyResult res = meanfield_rate_study(config.coupling, config.meanfield_eps, workers);
    write_study(config, out_dir / "meanfield_rate.csv", res, "eps_sum");
    log << "meanfield-rate: slope " << res.fit.slope << "\n";
  } else if (name == "chaos") {
    run_chaos(config, out_dir, workers, log);
  } else if (name == "bench") {
    run_bench(config, out_dir, workers, log);
  } else if (name == "dump-mass") {
    run_dump_mass(config, out_dir);
  } else if (name == "dump-pressure") {
    run_dump_pressure(config, out_dir);
  } else {
    throw ConfigError("unknown subcommand: " + name);
  }
}

}  // namespace kslab
