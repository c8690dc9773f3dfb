#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bandit/bernoulli.hpp"
#include "bandit/checks.hpp"
#include "bandit/io.hpp"
#include "bandit/mcsim.hpp"
#include "bandit/threads.hpp"
#include "bandit/version.hpp"
#include "bandit/worstprior.hpp"

namespace {

using nlohmann::json;

constexpr double kFineDt = 1.0 / 5000.0;
constexpr double kFineDx = 0.0143;
constexpr double kSearchDt = 1.0 / 2000.0;
constexpr double kSearchDx = 0.025;
constexpr double kEvalDt = 1.0 / 3000.0;
constexpr double kEvalDx = 0.02;

bandit::PriorSpec canonical_prior() {
  return bandit::PriorSpec{{{1.65, 0.38}, {-2.52, 0.62}}};
}

void ensure_parent_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

std::string manifest_path_for(const std::string& primary_out) {
  auto dir = std::filesystem::path(primary_out).parent_path();
  return (dir / "manifest.json").string();
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

bool quiet_mode = false;

void say(const std::string& line) {
  if (!quiet_mode) std::printf("%s\n", line.c_str());
}

// ---------------------------------------------------------------------------

struct SolvePdeOpts {
  std::string config;
  std::string out_risk = "risk.csv";
  std::string out_threshold = "threshold.csv";
  double dt = 0.0;  // 0 = from config or default
  double dx = 0.0;
  double D = 0.0;
  int risk_stride = 0;  // 0 = auto
};

int run_solve_pde(const SolvePdeOpts& o) {
  Timer timer;
  bandit::ProblemConfig cfg = bandit::read_problem_config(o.config);
  bandit::GridSpec grid =
      cfg.has_grid ? cfg.grid : bandit::make_symmetric_grid(kFineDt, kFineDx);
  if (o.dt > 0.0 || o.dx > 0.0) {
    const double dt = o.dt > 0.0 ? o.dt : grid.dt;
    const double dx = o.dx > 0.0 ? o.dx : grid.dx;
    grid = bandit::make_symmetric_grid(dt, dx, grid.x_max);
  }
  if (o.D > 0.0) cfg.params.D = o.D;

  const bandit::RiskField field =
      bandit::solve_limit_risk(cfg.prior, cfg.params, grid);
  const bandit::ThresholdStrategy strategy = bandit::extract_thresholds(field);

  const int stride =
      o.risk_stride > 0 ? o.risk_stride : std::max(1, grid.steps() / 100);
  ensure_parent_dir(o.out_risk);
  ensure_parent_dir(o.out_threshold);
  bandit::write_risk_csv(o.out_risk, field, stride);
  bandit::write_threshold_csv(o.out_threshold, strategy);

  const json config = {{"atoms", bandit::prior_to_json(cfg.prior)},
                       {"D", cfg.params.D},
                       {"c", cfg.params.c},
                       {"grid", bandit::grid_to_json(grid)},
                       {"risk_stride", stride}};
  bandit::write_manifest(manifest_path_for(o.out_risk), "solve-pde", config,
                         timer.seconds(), {o.out_risk, o.out_threshold});
  say("risk(0,0) = " + bandit::format_g17(field.risk00()));
  return 0;
}

// ---------------------------------------------------------------------------

struct BatchDpOpts {
  std::string config;
  std::string schedule = "50";
  std::string out = "risk_eps.csv";
  double dx = 0.0;
};

int run_batch_dp(const BatchDpOpts& o) {
  Timer timer;
  bandit::ProblemConfig cfg = bandit::read_problem_config(o.config);
  bandit::XGrid xg = cfg.has_grid ? cfg.grid.xgrid()
                                  : bandit::make_symmetric_xgrid(kFineDx);
  if (o.dx > 0.0) xg = bandit::make_symmetric_xgrid(o.dx, xg.x_max);

  const bandit::BatchSchedule schedule = bandit::parse_schedule_fractions(o.schedule);
  const bandit::StepRiskField field =
      bandit::solve_batch_risk(cfg.prior, cfg.params, schedule, xg);
  field.thresholds();  // integrity gate: one decision flip per stage

  ensure_parent_dir(o.out);
  bandit::write_batch_risk_csv(o.out, field);

  const json config = {{"atoms", bandit::prior_to_json(cfg.prior)},
                       {"D", cfg.params.D},
                       {"c", cfg.params.c},
                       {"schedule", o.schedule},
                       {"stages", schedule.stages()},
                       {"x_min", xg.x_min},
                       {"x_max", xg.x_max},
                       {"dx", xg.dx}};
  bandit::write_manifest(manifest_path_for(o.out), "batch-dp", config,
                         timer.seconds(), {o.out});
  say("risk(0,0) = " + bandit::format_g17(field.risk00()));
  return 0;
}

// ---------------------------------------------------------------------------

struct WorstPriorOpts {
  std::string config;
  std::string out = "worst.json";
  bool trace = false;
  bandit::SearchBox box;
  double search_dt = kSearchDt;
  double search_dx = kSearchDx;
};

int run_worst_prior(const WorstPriorOpts& o) {
  Timer timer;
  bandit::ModelParams params;
  bandit::GridSpec fine = bandit::make_symmetric_grid(kFineDt, kFineDx);
  if (!o.config.empty()) {
    const bandit::ProblemConfig cfg = bandit::read_problem_config(o.config);
    params = cfg.params;
    if (cfg.has_grid) fine = cfg.grid;
  }
  const bandit::GridSpec search =
      bandit::make_symmetric_grid(o.search_dt, o.search_dx);

  const bandit::WorstPriorResult res =
      bandit::find_worst_prior(params, fine, search, o.box);

  json j = {{"d1", res.d1},
            {"d2", res.d2},
            {"rho", res.rho},
            {"risk", res.risk},
            {"risk_search", res.risk_search},
            {"boundary_warning", res.boundary_warning},
            {"atoms", bandit::prior_to_json(
                          bandit::two_point_prior(res.d1, res.d2, res.rho))}};
  if (o.trace) {
    json t = json::array();
    for (const auto& c : res.trace)
      t.push_back({{"d1", c.d1}, {"d2", c.d2}, {"rho", c.rho}, {"risk", c.risk}});
    j["trace"] = t;
  }
  ensure_parent_dir(o.out);
  {
    std::ofstream outf(o.out);
    if (!outf) throw bandit::config_error("cannot write " + o.out);
    outf << j.dump(2) << '\n';
  }

  const json config = {{"D", params.D},
                       {"c", params.c},
                       {"search_grid", bandit::grid_to_json(search)},
                       {"fine_grid", bandit::grid_to_json(fine)},
                       {"box",
                        {{"d1", {o.box.d1_lo, o.box.d1_hi}},
                         {"d2", {o.box.d2_lo, o.box.d2_hi}},
                         {"rho", {o.box.rho_lo, o.box.rho_hi}},
                         {"lattice", o.box.lattice},
                         {"refine_rounds", o.box.refine_rounds},
                         {"tol", o.box.tol}}},
                       {"trace", o.trace}};
  bandit::write_manifest(manifest_path_for(o.out), "worst-prior", config,
                         timer.seconds(), {o.out});
  say("worst prior: d1 = " + bandit::format_g17(res.d1) + ", d2 = " +
      bandit::format_g17(res.d2) + ", rho = " + bandit::format_g17(res.rho));
  say("minimax risk = " + bandit::format_g17(res.risk));
  if (res.boundary_warning) say("warning: optimum sits at the search box edge");
  return 0;
}

// ---------------------------------------------------------------------------

struct LossesOpts {
  std::string strategy;
  std::string out = "losses.csv";
  double d_min = -8.0, d_max = 8.0;
  int points = 81;
  double d_true = 1.0;
  double d_design = 1.0;
  double dt = kEvalDt;
  double dx = kEvalDx;
};

int run_losses(const LossesOpts& o) {
  Timer timer;
  const bandit::ThresholdStrategy strategy = bandit::read_threshold_csv(o.strategy);
  const bandit::GridSpec grid = bandit::make_symmetric_grid(o.dt, o.dx);
  if (o.points < 1) throw bandit::config_error("losses: points must be >= 1");
  const std::vector<double> d_grid =
      bandit::linspace(o.d_min, o.d_max, o.points);

  bandit::LossCurve curve =
      bandit::sweep_losses(strategy, d_grid, o.d_design, o.d_true, grid);
  curve.strategy_id = o.strategy;

  ensure_parent_dir(o.out);
  bandit::write_losses_csv(o.out, curve);

  double peak = 0.0, peak_d = 0.0;
  for (const auto& pt : curve.points)
    if (pt.loss > peak) {
      peak = pt.loss;
      peak_d = pt.d;
    }
  const json config = {{"strategy", o.strategy}, {"d_min", o.d_min},
                       {"d_max", o.d_max},       {"points", o.points},
                       {"d_true", o.d_true},     {"d_design", o.d_design},
                       {"grid", bandit::grid_to_json(grid)}};
  bandit::write_manifest(manifest_path_for(o.out), "losses", config,
                         timer.seconds(), {o.out});
  say("max loss = " + bandit::format_g17(peak) + " at d = " +
      bandit::format_g17(peak_d));
  return 0;
}

// ---------------------------------------------------------------------------

struct BernoulliOpts {
  std::string prior;
  std::string out = "bern.json";
  double p = 0.5;
  int N = 2000;
  int n0 = 0;  // 0 = ceil(sqrt(N))
};

int run_bernoulli(const BernoulliOpts& o) {
  Timer timer;
  bandit::BernoulliModel model;
  model.p = o.p;
  model.N = o.N;
  int auto_n0 = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(std::max(o.N, 1)))));
  if (o.N >= 50) auto_n0 = std::min(auto_n0, o.N / 10);
  model.n0 = o.n0 > 0 ? o.n0 : auto_n0;

  const json pj = bandit::read_json_file(o.prior);
  if (!pj.contains("atoms"))
    throw bandit::config_error(o.prior + ": missing 'atoms'");
  for (const auto& a : pj.at("atoms")) {
    bandit::BernoulliAtom atom;
    if (a.contains("p2")) {
      atom.p2 = a.at("p2").get<double>();
      atom.q = a.at("q").get<double>();
    } else if (a.contains("w")) {
      // invariant-units atom: p2 = p + w sqrt(p(1-p)/N)
      const double w = a.at("w").get<double>();
      atom.p2 = o.p + w * std::sqrt(o.p * (1.0 - o.p) / model.N);
      atom.q = a.at("p").get<double>();
    } else {
      throw bandit::config_error(o.prior + ": atom needs 'p2' or 'w'");
    }
    model.atoms.push_back(atom);
  }

  const bandit::BernoulliResult res = bandit::solve_bernoulli_dp(model);

  json atoms = json::array();
  for (const auto& a : model.atoms) atoms.push_back({{"p2", a.p2}, {"q", a.q}});
  const json j = {{"p", model.p},
                  {"N", model.N},
                  {"n0", model.n0},
                  {"risk", res.risk},
                  {"scaled_risk", res.scaled_risk},
                  {"forced_term", res.forced_term},
                  {"dp_term", res.dp_term},
                  {"atoms", atoms}};
  ensure_parent_dir(o.out);
  {
    std::ofstream outf(o.out);
    if (!outf) throw bandit::config_error("cannot write " + o.out);
    outf << j.dump(2) << '\n';
  }

  const json config = {{"p", model.p},       {"N", model.N}, {"n0", model.n0},
                       {"prior", o.prior},   {"atoms", atoms}};
  bandit::write_manifest(manifest_path_for(o.out), "bernoulli-dp", config,
                         timer.seconds(), {o.out});
  say("risk = " + bandit::format_g17(res.risk) + ", scaled risk = " +
      bandit::format_g17(res.scaled_risk));
  return 0;
}

// ---------------------------------------------------------------------------

struct SimulateOpts {
  std::string strategy;
  std::string out = "sim.csv";
  std::string schedule = "50x100";
  int T = 5000;
  double p = 0.5;
  double d_min = -12.0, d_max = 4.0;
  int points = 33;
  int reps = 10000;
  std::uint64_t seed = 42;
};

int run_simulate(const SimulateOpts& o) {
  Timer timer;
  const bandit::ThresholdStrategy strategy = bandit::read_threshold_csv(o.strategy);
  if (o.points < 1) throw bandit::config_error("simulate: points must be >= 1");
  bandit::SimConfig cfg;
  cfg.T = o.T;
  cfg.schedule = bandit::parse_schedule_items(o.schedule, o.T);
  cfg.p = o.p;
  cfg.d_grid = bandit::linspace(o.d_min, o.d_max, o.points);
  cfg.reps = o.reps;
  cfg.seed = o.seed;

  const bandit::SimResult res = bandit::simulate(strategy, cfg);
  ensure_parent_dir(o.out);
  bandit::write_sim_csv(o.out, res);

  const json config = {{"strategy", o.strategy}, {"T", o.T},
                       {"schedule", o.schedule}, {"p", o.p},
                       {"d_min", o.d_min},       {"d_max", o.d_max},
                       {"points", o.points},     {"reps", o.reps},
                       {"seed", o.seed}};
  bandit::write_manifest(manifest_path_for(o.out), "simulate", config,
                         timer.seconds(), {o.out});
  say("simulated " + std::to_string(o.points) + " d-points, " +
      std::to_string(o.reps) + " replications each");
  return 0;
}

// ---------------------------------------------------------------------------

struct ReproduceOpts {
  int figure = 0;
  std::string out_dir;
  int points = 0;  // 0 = figure default
  int reps = 10000;
  std::uint64_t seed = 42;
};

int run_reproduce(const ReproduceOpts& o) {
  Timer timer;
  if (o.figure < 1 || o.figure > 6)
    throw bandit::config_error("reproduce: --figure must be in 1..6");
  const std::string dir =
      o.out_dir.empty() ? "figure" + std::to_string(o.figure) : o.out_dir;
  std::filesystem::create_directories(dir);
  const auto path = [&](const std::string& name) { return dir + "/" + name; };

  const bandit::PriorSpec prior = canonical_prior();
  const bandit::ModelParams params;
  json config = {{"figure", o.figure}, {"atoms", bandit::prior_to_json(prior)},
                 {"D", params.D}};
  std::vector<std::string> outputs;

  const auto fine_thresholds = [&]() {
    const bandit::GridSpec fine = bandit::make_symmetric_grid(kFineDt, kFineDx);
    return bandit::extract_thresholds(
        bandit::solve_limit_risk(prior, params, fine));
  };
  const bandit::GridSpec eval = bandit::make_symmetric_grid(kEvalDt, kEvalDx);

  switch (o.figure) {
    case 1: {
      // Decision threshold of the limiting game.
      const bandit::GridSpec fine = bandit::make_symmetric_grid(kFineDt, kFineDx);
      const bandit::RiskField field = bandit::solve_limit_risk(prior, params, fine);
      const bandit::ThresholdStrategy strategy = bandit::extract_thresholds(field);
      bandit::write_threshold_csv(path("threshold.csv"), strategy);
      bandit::write_risk_csv(path("risk.csv"), field,
                             std::max(1, fine.steps() / 100));
      config["grid"] = bandit::grid_to_json(fine);
      outputs = {path("threshold.csv"), path("risk.csv")};
      say("risk(0,0) = " + bandit::format_g17(field.risk00()));
      break;
    }
    case 2: {
      // Expected losses with and without a forced initial stage.
      const int pts = o.points > 0 ? o.points : 81;
      const bandit::ThresholdStrategy strategy = fine_thresholds();
      const std::vector<double> ds = bandit::linspace(-8.0, 8.0, pts);
      const bandit::LossCurve curve =
          bandit::sweep_losses(strategy, ds, params.D, params.D, eval);
      bandit::write_losses_csv(path("losses.csv"), curve);
      const double eps0 = 0.02;
      std::ofstream init(path("initial_stage.csv"));
      if (!init) throw bandit::config_error("cannot write initial_stage.csv");
      init << "d,loss_with,loss_without\n";
      for (double d : ds) {
        const auto [with_stage, without_stage] =
            bandit::eval_with_initial_stage(strategy, d, params.D, eval, eps0, 1);
        init << bandit::format_g17(d) << ',' << bandit::format_g17(with_stage)
             << ',' << bandit::format_g17(without_stage) << '\n';
      }
      init.close();
      config["points"] = pts;
      config["eps0"] = eps0;
      config["grid"] = bandit::grid_to_json(eval);
      outputs = {path("losses.csv"), path("initial_stage.csv")};
      break;
    }
    case 3: {
      // Limiting losses vs batch losses at their own optimal thresholds.
      const int pts = o.points > 0 ? o.points : 81;
      const std::vector<double> ds = bandit::linspace(-8.0, 8.0, pts);
      const bandit::LossCurve limit =
          bandit::sweep_losses(fine_thresholds(), ds, params.D, params.D, eval);
      bandit::write_losses_csv(path("losses_limit.csv"), limit);
      outputs = {path("losses_limit.csv")};
      const bandit::XGrid xg = bandit::make_symmetric_xgrid(kFineDx);
      for (int K : {30, 50}) {
        const bandit::BatchSchedule sched = bandit::BatchSchedule::uniform(K);
        const bandit::ThresholdStrategy bs =
            bandit::solve_batch_risk(prior, params, sched, xg).thresholds();
        bandit::LossCurve bc;
        bc.D_design = bc.D_true = params.D;
        for (double d : ds) {
          bandit::PriorSpec one{{{d, 1.0}}};
          const double loss =
              d == 0.0 ? 0.0
                       : bandit::solve_batch_losses(bs, one, params, sched, xg)
                             .risk00();
          bc.points.push_back({d, loss});
        }
        const std::string name = "losses_batch" + std::to_string(K) + ".csv";
        bandit::write_losses_csv(path(name), bc);
        outputs.push_back(path(name));
      }
      config["points"] = pts;
      break;
    }
    case 4:
    case 5: {
      // Robustness of the D=1 strategy when the true variance differs.
      const int pts = o.points > 0 ? o.points : 81;
      const std::vector<double> ds = bandit::linspace(-8.0, 8.0, pts);
      const bandit::ThresholdStrategy strategy = fine_thresholds();
      const std::vector<double> variants =
          o.figure == 4 ? std::vector<double>{0.95, 1.0, 1.05}
                        : std::vector<double>{1.0, 0.75, 0.5, 0.25};
      for (double d_true : variants) {
        const bandit::LossCurve curve =
            bandit::sweep_losses(strategy, ds, params.D, d_true, eval);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "losses_D%g.csv", d_true);
        bandit::write_losses_csv(path(buf), curve);
        outputs.push_back(path(buf));
      }
      config["points"] = pts;
      config["D_true"] = variants;
      break;
    }
    case 6: {
      // Monte-Carlo check of the batch strategy against the computed losses.
      const int pts = o.points > 0 ? o.points : 33;
      std::vector<double> ds = bandit::linspace(-12.0, 4.0, pts);
      if (std::find(ds.begin(), ds.end(), 1.65) == ds.end()) {
        ds.push_back(1.65);  // consistency anchor between sim and losses
        std::sort(ds.begin(), ds.end());
      }
      const bandit::XGrid xg = bandit::make_symmetric_xgrid(kFineDx);
      const bandit::BatchSchedule sched = bandit::BatchSchedule::uniform(50);
      const bandit::ThresholdStrategy bs =
          bandit::solve_batch_risk(prior, params, sched, xg).thresholds();

      bandit::SimConfig cfg;
      cfg.T = 5000;
      cfg.p = 0.5;
      cfg.d_grid = ds;
      cfg.reps = o.reps;
      cfg.seed = o.seed;
      cfg.schedule.assign(50, 100);
      bandit::write_sim_csv(path("sim_uniform.csv"), bandit::simulate(bs, cfg));
      cfg.schedule = bandit::parse_schedule_items("8x25,48x100", cfg.T);
      bandit::write_sim_csv(path("sim_variable.csv"), bandit::simulate(bs, cfg));

      const bandit::LossCurve curve =
          bandit::sweep_losses(bs, ds, params.D, params.D, eval);
      bandit::write_losses_csv(path("losses.csv"), curve);

      config["points"] = pts;
      config["reps"] = o.reps;
      config["seed"] = o.seed;
      config["T"] = cfg.T;
      config["schedules"] = {"50x100", "8x25,48x100"};
      outputs = {path("sim_uniform.csv"), path("sim_variable.csv"),
                 path("losses.csv")};
      break;
    }
  }

  bandit::write_manifest(path("manifest.json"), "reproduce", config,
                         timer.seconds(), outputs);
  say("figure " + std::to_string(o.figure) + " data written to " + dir + "/");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimax strategies and risk for the Gaussian one-armed bandit "
               "under batch processing"};
  app.set_version_flag("--version", std::string(bandit::kToolVersion));
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores)")
      ->envname("BANDIT_MINIMAX_THREADS");
  app.add_flag("--quiet", quiet_mode, "suppress summary lines");

  SolvePdeOpts pde;
  auto* sp = app.add_subcommand("solve-pde",
                                "limiting free-boundary solve: risk field and "
                                "decision threshold");
  sp->fallthrough();
  sp->add_option("--config", pde.config, "problem JSON (atoms, D, grid)")
      ->required();
  sp->add_option("--out-risk", pde.out_risk, "risk field CSV");
  sp->add_option("--out-threshold", pde.out_threshold, "threshold CSV");
  sp->add_option("--dt", pde.dt, "time step override");
  sp->add_option("--dx", pde.dx, "space step override");
  sp->add_option("--D", pde.D, "variance override");
  sp->add_option("--risk-stride", pde.risk_stride,
                 "time rows per risk CSV row (0 = about 100 rows)");

  BatchDpOpts bdp;
  auto* sb = app.add_subcommand("batch-dp",
                                "exact batch recursion for a given schedule");
  sb->fallthrough();
  sb->add_option("--config", bdp.config, "problem JSON")->required();
  sb->add_option("--schedule", bdp.schedule,
                 "\"50\" for uniform or \"2x1/400,48x0.02,...\"");
  sb->add_option("--out", bdp.out, "per-stage value CSV");
  sb->add_option("--dx", bdp.dx, "space step override");

  WorstPriorOpts wp;
  auto* sw = app.add_subcommand("worst-prior",
                                "two-point worst-case prior and minimax risk");
  sw->fallthrough();
  sw->add_option("--config", wp.config, "problem JSON (D, c, fine grid)");
  sw->add_option("--out", wp.out, "result JSON");
  sw->add_flag("--trace", wp.trace, "include every scored candidate");
  sw->add_option("--d1-lo", wp.box.d1_lo);
  sw->add_option("--d1-hi", wp.box.d1_hi);
  sw->add_option("--d2-lo", wp.box.d2_lo);
  sw->add_option("--d2-hi", wp.box.d2_hi);
  sw->add_option("--rho-lo", wp.box.rho_lo);
  sw->add_option("--rho-hi", wp.box.rho_hi);
  sw->add_option("--lattice", wp.box.lattice, "coarse nodes per coordinate");
  sw->add_option("--refine-rounds", wp.box.refine_rounds);
  sw->add_option("--tol", wp.box.tol, "line-search width tolerance");
  sw->add_option("--search-dt", wp.search_dt);
  sw->add_option("--search-dx", wp.search_dx);

  LossesOpts lo;
  auto* sl = app.add_subcommand("losses",
                                "expected losses of a threshold strategy "
                                "against each true mean");
  sl->fallthrough();
  sl->add_option("--strategy", lo.strategy, "threshold CSV")->required();
  sl->add_option("--out", lo.out, "loss curve CSV");
  sl->add_option("--d-min", lo.d_min);
  sl->add_option("--d-max", lo.d_max);
  sl->add_option("--points", lo.points);
  sl->add_option("--d-true", lo.d_true, "true variance D");
  sl->add_option("--d-design", lo.d_design, "variance the strategy was built for");
  sl->add_option("--dt", lo.dt);
  sl->add_option("--dx", lo.dx);

  BernoulliOpts be;
  auto* sn = app.add_subcommand("bernoulli-dp",
                                "exact Bayesian risk for the Bernoulli bandit");
  sn->fallthrough();
  sn->add_option("--prior", be.prior, "prior JSON: atoms of p2/q or w/p")
      ->required();
  sn->add_option("--p", be.p, "known success probability");
  sn->add_option("--N", be.N, "horizon");
  sn->add_option("--n0", be.n0, "forced plays of the unknown arm (0 = sqrt(N))");
  sn->add_option("--out", be.out, "result JSON");

  SimulateOpts sim;
  auto* ss = app.add_subcommand("simulate",
                                "Monte-Carlo batch plays of a threshold strategy");
  ss->fallthrough();
  ss->add_option("--strategy", sim.strategy, "threshold CSV")->required();
  ss->add_option("--T", sim.T, "total items");
  ss->add_option("--schedule", sim.schedule, "items per batch, e.g. \"50x100\"");
  ss->add_option("--p", sim.p, "known success probability");
  ss->add_option("--d-min", sim.d_min);
  ss->add_option("--d-max", sim.d_max);
  ss->add_option("--points", sim.points);
  ss->add_option("--reps", sim.reps);
  ss->add_option("--seed", sim.seed);
  ss->add_option("--out", sim.out, "simulation CSV");

  ReproduceOpts rp;
  auto* sr = app.add_subcommand("reproduce",
                                "regenerate the data behind a figure");
  sr->fallthrough();
  sr->add_option("--figure", rp.figure, "figure number 1..6")->required();
  sr->add_option("--out-dir", rp.out_dir, "output directory (default figureN)");
  sr->add_option("--points", rp.points, "loss/sim grid points override");
  sr->add_option("--reps", rp.reps, "simulation replications (figure 6)");
  sr->add_option("--seed", rp.seed, "simulation seed (figure 6)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    bandit::set_thread_count(threads);
    if (sp->parsed()) return run_solve_pde(pde);
    if (sb->parsed()) return run_batch_dp(bdp);
    if (sw->parsed()) return run_worst_prior(wp);
    if (sl->parsed()) return run_losses(lo);
    if (sn->parsed()) return run_bernoulli(be);
    if (ss->parsed()) return run_simulate(sim);
    if (sr->parsed()) return run_reproduce(rp);
  } catch (const bandit::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const bandit::integrity_error& e) {
    std::fprintf(stderr, "integrity error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
