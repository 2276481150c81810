// gslq command-line tool: parse a problem file, dispatch a solver, verify the
// resulting gain and emit report/trace artifacts.
//
// Exit codes: 0 success, 2 parse error, 3 non-convergence, 4 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "gslq/gslq.hpp"

namespace fs = std::filesystem;
using namespace gslq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitNoConv = 3;
constexpr int kExitNumerical = 4;

struct CommonArgs {
  std::string problem, config, out = "gslq-out";
  bool strictParams = false;
  bool rhoContinuation = false;
};

io::SolveConfig load_cfg(const CommonArgs& args, const std::string& kind) {
  if (args.config.empty()) return io::SolveConfig{};
  return io::load_config(args.config, kind);
}

Vector init_vector(const Vector& given, const std::optional<double>& fill,
                   double fallback, long size, const char* name) {
  if (given.size() == 0) return Vector::Constant(size, fill.value_or(fallback));
  if (given.size() != size)
    throw ParseError(std::string("config: '") + name + "' has wrong length");
  return given;
}

json params_echo(const PalmParams& pp, bool waiver) {
  json j;
  j["sigma"] = pp.sigma;
  j["beta"] = pp.beta;
  j["mu"] = pp.mu;
  j["tau"] = pp.tau;
  j["rho"] = pp.rho;
  j["gamma"] = pp.gamma;
  j["budget"] = pp.budget;
  j["maxIter"] = pp.maxIter;
  j["tolFeas"] = pp.tolFeas;
  j["tolStep"] = pp.tolStep;
  j["paramWaiver"] = waiver;
  return j;
}

void write_report(const fs::path& dir, const SolveReport& rep, const json& echo) {
  json j = io::report_to_json(rep);
  j["parameterEcho"] = echo;
  std::ofstream out(dir / "report.json");
  out << j.dump(2) << '\n';
}

int cmd_validate(const CommonArgs& args) {
  io::Problem pb = io::load_problem(args.problem);
  ValidationReport rep = validate_assumption1(pb.sys);
  json checks = json::array();
  for (const auto& c : rep.checks) {
    const char* sev = c.severity == CheckSeverity::Hard      ? "hard"
                      : c.severity == CheckSeverity::Warning ? "warning"
                                                             : "diagnostic";
    std::cout << (c.passed ? "PASS " : (c.severity == CheckSeverity::Hard ? "FAIL " : "WARN "))
              << c.name << " (margin " << c.margin << ", " << sev << ")\n";
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"margin", c.margin},
                      {"severity", sev}});
  }
  fs::create_directories(args.out);
  std::ofstream out(fs::path(args.out) / "validate.json");
  out << json{{"checks", checks}, {"hardOk", rep.hard_ok()}}.dump(2) << '\n';
  return rep.hard_ok() ? kExitOk : kExitNumerical;
}

int cmd_solve_palm(const CommonArgs& args) {
  io::Problem pb = io::load_problem(args.problem);
  io::SolveConfig cfg = load_cfg(args, "palm");
  AssembleOptions ao{cfg.deltaFloor, cfg.delta};
  StandardForm sf =
      assemble_standard_form(pb.sys, pb.vertices, pb.blocks, pb.forbidden, ao);

  PalmState init = make_palm_state(
      sf, init_vector(cfg.initW, cfg.fillW, 1.0, sf.p * sf.p, "initW"),
      init_vector(cfg.initP, cfg.fillP, 1.0, sf.m * sf.n, "initP"),
      init_vector(cfg.initZ, cfg.fillZ, 1.0, sf.p * sf.p, "initZ"),
      init_vector(cfg.initU, cfg.fillU, 1.0, sf.p * sf.p, "initU"));

  PalmSolveConfig scfg;
  scfg.inner = cfg.inner;
  scfg.strictParams = args.strictParams;
  scfg.rhoContinuation = args.rhoContinuation;

  const auto t0 = std::chrono::steady_clock::now();
  PalmResult res = palm_solve(sf, cfg.palm, init, scfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(args.out);
  io::write_palm_trace_csv((fs::path(args.out) / "trace.csv").string(), res.trace);
  std::vector<double> feasSeries, psiSeries;
  for (const auto& r : res.trace) {
    feasSeries.push_back(r.feas);
    psiSeries.push_back(r.psi);
  }
  io::write_series_dat((fs::path(args.out) / "feas.dat").string(), feasSeries);
  io::write_series_dat((fs::path(args.out) / "psi.dat").string(), psiSeries);

  if (res.status == "invalid_params") {
    std::cerr << "parameter validation failed (strict mode)\n";
    return kExitNumerical;
  }
  if (res.status == "not_started") {
    SolveReport rep;
    rep.status = "not_started";
    rep.K = Matrix::Zero(sf.m, sf.n);
    rep.sparsityPattern = Eigen::MatrixXi::Zero(sf.s, sf.t);
    write_report(args.out, rep, params_echo(res.paramsUsed, res.paramWaiver));
    return kExitNoConv;
  }

  const Matrix W = project_structure(sym_from_vec(res.state.z, sf.p), sf, res.state.Pt);
  SolveReport rep = make_report(pb.sys, pb.blocks, sf, W, res.status);
  rep.paramWaiver = res.paramWaiver;
  rep.iterations = res.iterations;
  rep.wallTimeSec = wall;
  rep.finalFeas = res.finalFeas;
  rep.finalKkt = res.finalKkt;
  write_report(args.out, rep, params_echo(res.paramsUsed, res.paramWaiver));
  if (cfg.writeResponse && rep.spectralAbscissa < 0)
    io::write_response_csv((fs::path(args.out) / "response.csv").string(), pb.sys, rep.K);

  std::cout << "status " << rep.status << ", iters " << res.iterations << ", feas "
            << res.finalFeas << ", <R,W> " << rep.costUpperBound << ", h2 "
            << rep.h2Cost << ", W11 " << rep.W11 << '\n';
  return res.status == "converged" ? kExitOk : kExitNoConv;
}

int cmd_solve_admm(const CommonArgs& args, GroupProxKind prox) {
  io::Problem pb = io::load_problem(args.problem);
  io::SolveConfig cfg = load_cfg(args, prox == GroupProxKind::L0 ? "admm" : "l1");
  cfg.admm.prox = prox;
  AssembleOptions ao{cfg.deltaFloor, cfg.delta};
  StandardForm sf =
      assemble_standard_form(pb.sys, pb.vertices, pb.blocks, pb.forbidden, ao);

  const long rows = sf.Acoup.rows();
  AdmmState init = make_admm_state(
      sf, init_vector(cfg.initW, cfg.fillW, 1.0, sf.p * sf.p, "initW"),
      init_vector(cfg.initP, cfg.fillP, 0.0, sf.m * sf.n, "initP"),
      init_vector(cfg.initLambda, cfg.fillLambda, 0.0, rows, "initLambda"),
      init_vector(cfg.initU, cfg.fillU, 0.0, rows, "initU"));

  AdmmSolveConfig scfg;
  scfg.inner = cfg.inner;

  const auto t0 = std::chrono::steady_clock::now();
  AdmmResult res = admm_solve(sf, cfg.admm, init, scfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(args.out);
  io::write_admm_trace_csv((fs::path(args.out) / "trace.csv").string(), res.trace);
  io::write_series_dat((fs::path(args.out) / "feas.dat").string(), res.feasHist);
  io::write_series_dat((fs::path(args.out) / "coupling.dat").string(),
                       res.couplingNormHist);

  json echo;
  echo["beta"] = cfg.admm.beta;
  echo["xi"] = cfg.admm.xi;
  echo["gamma"] = cfg.admm.gamma;
  echo["budget"] = cfg.admm.budget;
  echo["maxIter"] = cfg.admm.maxIter;
  echo["tolFeas"] = cfg.admm.tolFeas;
  echo["prox"] = prox == GroupProxKind::L0 ? "group_l0" : "group_l1";
  echo["note"] = "direct ADMM baseline; no convergence guarantee, see README";

  if (res.status == "not_started") {
    SolveReport rep;
    rep.status = "not_started";
    rep.K = Matrix::Zero(sf.m, sf.n);
    rep.sparsityPattern = Eigen::MatrixXi::Zero(sf.s, sf.t);
    write_report(args.out, rep, echo);
    return kExitNoConv;
  }

  const Matrix W = project_structure(sym_from_vec(res.state.Wt, sf.p), sf, res.state.Pt);
  SolveReport rep = make_report(pb.sys, pb.blocks, sf, W, res.status);
  rep.iterations = res.iterations;
  rep.wallTimeSec = wall;
  rep.finalFeas = res.finalFeas;
  write_report(args.out, rep, echo);
  if (cfg.writeResponse && rep.spectralAbscissa < 0)
    io::write_response_csv((fs::path(args.out) / "response.csv").string(), pb.sys, rep.K);

  std::cout << "status " << rep.status << ", iters " << res.iterations << ", feas "
            << res.finalFeas << ", running-min feas " << res.runningMinFeas
            << ", window amplitude " << res.windowAmplitude << '\n';
  return res.status == "converged" ? kExitOk : kExitNoConv;
}

int cmd_eval_gain(const CommonArgs& args) {
  io::Problem pb = io::load_problem(args.problem);
  io::SolveConfig cfg = load_cfg(args, "eval");
  if (cfg.K.size() == 0) throw ParseError("eval-gain: config must provide \"K\"");
  if (cfg.K.rows() != pb.sys.m() || cfg.K.cols() != pb.sys.n())
    throw ParseError("eval-gain: K has wrong dimensions");

  const H2Result h2 = h2_cost(pb.sys.A, pb.sys.B2, pb.sys.B1, pb.sys.C, pb.sys.D, cfg.K);
  SolveReport rep;
  rep.status = h2.stable() ? "stabilizing" : "unstable";
  rep.K = cfg.K;
  rep.sparsityPattern = sparsity_pattern(cfg.K, pb.blocks);
  rep.spectralAbscissa = h2.abscissa;
  rep.h2Cost = h2.cost;
  rep.costUpperBound = std::numeric_limits<double>::quiet_NaN();
  rep.W11 = std::numeric_limits<double>::quiet_NaN();

  fs::create_directories(args.out);
  write_report(args.out, rep, json{{"command", "eval-gain"}});
  if (cfg.writeResponse && h2.stable())
    io::write_response_csv((fs::path(args.out) / "response.csv").string(), pb.sys, cfg.K);
  std::cout << "abscissa " << h2.abscissa << ", h2 " << h2.cost << '\n';
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args) {
  io::Problem pb = io::load_problem(args.problem);
  io::SolveConfig cfg = load_cfg(args, "sweep");
  if (cfg.gammaSweep.empty()) cfg.gammaSweep = {0.1, 1.0, 10.0, 50.0};
  if (cfg.rhoSweep.empty()) cfg.rhoSweep = {10.0, 50.0, 100.0};
  AssembleOptions ao{cfg.deltaFloor, cfg.delta};
  StandardForm sf =
      assemble_standard_form(pb.sys, pb.vertices, pb.blocks, pb.forbidden, ao);

  struct Run {
    double rho, gamma;
    std::string dir;
    std::string status;
    json pattern;
    double costUpperBound = 0, h2 = 0, feas = 0;
  };
  std::vector<Run> runs;
  for (double r : cfg.rhoSweep)
    for (double g : cfg.gammaSweep)
      runs.push_back({r, g,
                      (fs::path(args.out) /
                       ("run_rho" + std::to_string(r) + "_gamma" + std::to_string(g)))
                          .string(),
                      "", {}, 0, 0, 0});

  std::mutex mu;
  std::atomic<size_t> next{0};
  bool anyConverged = false;

  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      Run& run = runs[i];
      PalmParams pp = cfg.palm;  // unset (beta, mu, tau) are suggested per rho
      pp.rho = run.rho;
      pp.gamma = run.gamma;
      PalmState init = make_palm_state(
          sf, init_vector(cfg.initW, cfg.fillW, 1.0, sf.p * sf.p, "initW"),
          init_vector(cfg.initP, cfg.fillP, 1.0, sf.m * sf.n, "initP"),
          init_vector(cfg.initZ, cfg.fillZ, 1.0, sf.p * sf.p, "initZ"),
          init_vector(cfg.initU, cfg.fillU, 1.0, sf.p * sf.p, "initU"));
      PalmSolveConfig scfg;
      scfg.inner = cfg.inner;
      scfg.strictParams = args.strictParams;
      scfg.rhoContinuation = args.rhoContinuation;
      PalmResult res = palm_solve(sf, pp, init, scfg);

      fs::create_directories(run.dir);
      io::write_palm_trace_csv((fs::path(run.dir) / "trace.csv").string(), res.trace);
      run.status = res.status;
      run.feas = res.finalFeas;
      if (res.status == "converged" || res.status == "max_iters") {
        const Matrix W =
            project_structure(sym_from_vec(res.state.z, sf.p), sf, res.state.Pt);
        SolveReport rep = make_report(pb.sys, pb.blocks, sf, W, res.status);
        rep.paramWaiver = res.paramWaiver;
        rep.iterations = res.iterations;
        rep.finalFeas = res.finalFeas;
        rep.finalKkt = res.finalKkt;
        write_report(run.dir, rep, params_echo(res.paramsUsed, res.paramWaiver));
        run.costUpperBound = rep.costUpperBound;
        run.h2 = rep.h2Cost;
        json pat = json::array();
        for (int a = 0; a < rep.sparsityPattern.rows(); ++a) {
          json row = json::array();
          for (int b = 0; b < rep.sparsityPattern.cols(); ++b)
            row.push_back(rep.sparsityPattern(a, b));
          pat.push_back(std::move(row));
        }
        run.pattern = std::move(pat);
      }
      std::lock_guard<std::mutex> lk(mu);
      if (res.status == "converged") anyConverged = true;
      std::cout << "rho " << run.rho << " gamma " << run.gamma << " -> "
                << run.status << ", feas " << run.feas << '\n';
    }
  };

  const int nThreads = std::max(1, std::min<int>(cfg.threads, runs.size()));
  std::vector<std::thread> pool;
  for (int i = 0; i < nThreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  json summary = json::array();
  for (const auto& run : runs)
    summary.push_back({{"rho", run.rho},
                       {"gamma", run.gamma},
                       {"dir", run.dir},
                       {"status", run.status},
                       {"sparsityPattern", run.pattern},
                       {"costUpperBound", run.costUpperBound},
                       {"h2Cost", run.h2},
                       {"finalFeas", run.feas}});
  fs::create_directories(args.out);
  std::ofstream out(fs::path(args.out) / "sweep.json");
  out << summary.dump(2) << '\n';
  return anyConverged ? kExitOk : kExitNoConv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-sparse LQ state-feedback synthesis"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub, bool needConfig) {
    sub->add_option("--problem", args.problem, "problem JSON file")->required();
    if (needConfig) sub->add_option("--config", args.config, "config JSON file");
    sub->add_option("--out", args.out, "output directory");
    sub->add_flag("--strict-params", args.strictParams,
                  "abort when the selection rule fails");
    sub->add_flag("--rho-continuation", args.rhoContinuation,
                  "double rho when feasibility stalls");
  };

  auto* vsub = app.add_subcommand("validate", "check standing assumptions");
  add_common(vsub, false);
  auto* psub = app.add_subcommand("solve-palm", "penalty-PALM solve");
  add_common(psub, true);
  auto* asub = app.add_subcommand("solve-admm", "direct ADMM baseline (group-l0)");
  add_common(asub, true);
  auto* lsub = app.add_subcommand("solve-l1", "direct ADMM with group-l1 prox");
  add_common(lsub, true);
  auto* esub = app.add_subcommand("eval-gain", "stability and costs of a given K");
  add_common(esub, true);
  auto* ssub = app.add_subcommand("sweep", "grid of (rho, gamma) PALM solves");
  add_common(ssub, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (vsub->parsed()) return cmd_validate(args);
    if (psub->parsed()) return cmd_solve_palm(args);
    if (asub->parsed()) return cmd_solve_admm(args, GroupProxKind::L0);
    if (lsub->parsed()) return cmd_solve_admm(args, GroupProxKind::L1);
    if (esub->parsed()) return cmd_eval_gain(args);
    if (ssub->parsed()) return cmd_sweep(args);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
