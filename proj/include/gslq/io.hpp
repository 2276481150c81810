// Problem/config file parsing and artifact writers.
//
// Problem file (JSON): keys "A","B1","B2","C","D" as row-major arrays of
// arrays; optional "vertices": [{"A":...,"B2":...},...]; "blocks":
// {"rowDims":[...],"colDims":[...]}; optional "forbidden": [[i,j],...]
// (1-based). Ragged arrays are rejected. Config files are flat JSON whose keys
// mirror the solver parameter structs; unknown keys are errors.
#ifndef GSLQ_IO_HPP_
#define GSLQ_IO_HPP_

#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gslq/admm.hpp"
#include "gslq/model.hpp"
#include "gslq/palm.hpp"
#include "gslq/report.hpp"

namespace gslq {

using json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace io {

inline Matrix parse_matrix(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ParseError("field '" + name + "': expected an array of arrays");
  const size_t cols = j.front().size();
  if (cols == 0) throw ParseError("field '" + name + "': empty rows");
  Matrix M(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ParseError("field '" + name + "': ragged array at row " +
                       std::to_string(r + 1));
    for (size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw ParseError("field '" + name + "': non-numeric entry at (" +
                         std::to_string(r + 1) + "," + std::to_string(c + 1) + ")");
      M(r, c) = j[r][c].get<double>();
    }
  }
  return M;
}

inline json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (long r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Problem {
  LtiSystem sys;
  VertexSet vertices;
  BlockStructure blocks;
  ForbiddenSet forbidden;
};

inline Problem parse_problem(const json& j) {
  static const std::set<std::string> allowed = {"A",      "B1",       "B2",
                                                "C",      "D",        "vertices",
                                                "blocks", "forbidden"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ParseError("problem file: unknown key '" + it.key() + "'");
  for (const char* k : {"A", "B1", "B2", "C", "D", "blocks"})
    if (!j.contains(k)) throw ParseError(std::string("problem file: missing key '") + k + "'");

  Problem pb;
  try {
    pb.sys = LtiSystem(parse_matrix(j["A"], "A"), parse_matrix(j["B1"], "B1"),
                       parse_matrix(j["B2"], "B2"), parse_matrix(j["C"], "C"),
                       parse_matrix(j["D"], "D"));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }

  if (j.contains("vertices")) {
    if (!j["vertices"].is_array() || j["vertices"].empty())
      throw ParseError("field 'vertices': expected a nonempty array");
    for (const auto& v : j["vertices"]) {
      if (!v.contains("A") || !v.contains("B2"))
        throw ParseError("field 'vertices': each vertex needs keys 'A' and 'B2'");
      pb.vertices.vertices.emplace_back(parse_matrix(v["A"], "vertices.A"),
                                        parse_matrix(v["B2"], "vertices.B2"));
    }
  } else {
    pb.vertices = VertexSet::certain(pb.sys);
  }

  const json& b = j["blocks"];
  if (!b.contains("rowDims") || !b.contains("colDims"))
    throw ParseError("field 'blocks': needs 'rowDims' and 'colDims'");
  pb.blocks.rowDims = b["rowDims"].get<std::vector<int>>();
  pb.blocks.colDims = b["colDims"].get<std::vector<int>>();
  try {
    pb.blocks.check_dims(pb.sys.n(), pb.sys.m());
    pb.vertices.check_dims(pb.sys.n(), pb.sys.m());
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }

  if (j.contains("forbidden")) {
    for (const auto& e : j["forbidden"]) {
      if (!e.is_array() || e.size() != 2)
        throw ParseError("field 'forbidden': entries must be [i,j] pairs");
      pb.forbidden.entries.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  }
  return pb;
}

inline Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("problem file '" + path + "': " + e.what());
  }
  return parse_problem(j);
}

inline json problem_to_json(const Problem& pb) {
  json j;
  j["A"] = matrix_to_json(pb.sys.A);
  j["B1"] = matrix_to_json(pb.sys.B1);
  j["B2"] = matrix_to_json(pb.sys.B2);
  j["C"] = matrix_to_json(pb.sys.C);
  j["D"] = matrix_to_json(pb.sys.D);
  json verts = json::array();
  for (const auto& [Ai, B2i] : pb.vertices.vertices)
    verts.push_back({{"A", matrix_to_json(Ai)}, {"B2", matrix_to_json(B2i)}});
  j["vertices"] = std::move(verts);
  j["blocks"] = {{"rowDims", pb.blocks.rowDims}, {"colDims", pb.blocks.colDims}};
  if (!pb.forbidden.empty()) {
    json f = json::array();
    for (const auto& [a, b] : pb.forbidden.entries) f.push_back({a, b});
    j["forbidden"] = std::move(f);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Solver configuration

struct SolveConfig {
  PalmParams palm;
  AdmmParams admm;
  PbcdConfig inner;
  bool deltaFloor = false;
  double delta = 1e-6;
  // initial values: scalar fill or full vector; unset fills use per-command
  // defaults (all-ones for PALM, zero multipliers for ADMM)
  Vector initW, initP, initZ, initU, initLambda;
  std::optional<double> fillW, fillP, fillZ, fillU, fillLambda;
  Matrix K;  // for eval-gain
  std::vector<double> gammaSweep, rhoSweep;
  int threads = 2;
  bool writeResponse = true;
};

inline double num(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

/// Flat config with strict key checking. `kind` selects the allowed key set.
inline SolveConfig parse_config(const json& j, const std::string& kind) {
  std::set<std::string> allowed = {"gamma", "budget", "maxIter", "tolFeas",
                                   "eps",   "innerMaxIter", "warmStart"};
  if (kind == "palm") {
    allowed.insert({"sigma", "beta", "mu", "tau", "rho", "tolStep", "deltaFloor",
                    "delta", "initW", "initP", "initZ", "initU", "writeResponse"});
  } else if (kind == "admm" || kind == "l1") {
    allowed.insert({"beta", "xi", "deltaFloor", "delta", "initW", "initP",
                    "initLambda", "initU", "writeResponse"});
  } else if (kind == "eval") {
    allowed = {"K", "writeResponse"};
  } else if (kind == "sweep") {
    allowed.insert({"sigma", "beta", "mu", "tau", "rho", "tolStep", "deltaFloor",
                    "delta", "initW", "initP", "initZ", "initU", "gammaSweep",
                    "rhoSweep", "threads", "writeResponse"});
  } else if (kind == "validate") {
    allowed = {};
  }
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ParseError("config: unknown key '" + it.key() + "' for command " + kind);

  SolveConfig c;
  auto fill_or_vec = [&](const char* key, Vector& v, std::optional<double>& fill) {
    if (!j.contains(key)) return;
    if (j.at(key).is_number()) {
      fill = j.at(key).get<double>();
    } else {
      const auto vv = j.at(key).get<std::vector<double>>();
      v = Eigen::Map<const Vector>(vv.data(), vv.size());
    }
  };

  c.palm.sigma = num(j, "sigma", c.palm.sigma);
  c.palm.beta = num(j, "beta", 0.0);
  c.palm.mu = num(j, "mu", 0.0);
  c.palm.tau = num(j, "tau", 0.0);
  c.palm.rho = num(j, "rho", c.palm.rho);
  c.palm.gamma = num(j, "gamma", c.palm.gamma);
  c.palm.budget = static_cast<int>(num(j, "budget", -1));
  c.palm.maxIter = static_cast<int>(num(j, "maxIter", c.palm.maxIter));
  c.palm.tolFeas = num(j, "tolFeas", c.palm.tolFeas);
  c.palm.tolStep = num(j, "tolStep", c.palm.tolStep);

  c.admm.beta = num(j, "beta", c.admm.beta);
  c.admm.xi = num(j, "xi", c.admm.xi);
  c.admm.gamma = c.palm.gamma;
  c.admm.budget = c.palm.budget;
  c.admm.maxIter = c.palm.maxIter;
  c.admm.tolFeas = c.palm.tolFeas;
  if (kind == "l1") c.admm.prox = GroupProxKind::L1;

  c.inner.eps = num(j, "eps", c.inner.eps);
  c.inner.maxIter = static_cast<int>(num(j, "innerMaxIter", c.inner.maxIter));
  if (j.contains("warmStart")) c.inner.warmStart = j.at("warmStart").get<bool>();

  if (j.contains("deltaFloor")) c.deltaFloor = j.at("deltaFloor").get<bool>();
  c.delta = num(j, "delta", c.delta);

  fill_or_vec("initW", c.initW, c.fillW);
  fill_or_vec("initP", c.initP, c.fillP);
  fill_or_vec("initZ", c.initZ, c.fillZ);
  fill_or_vec("initU", c.initU, c.fillU);
  fill_or_vec("initLambda", c.initLambda, c.fillLambda);

  if (j.contains("K")) c.K = parse_matrix(j.at("K"), "K");
  if (j.contains("gammaSweep")) c.gammaSweep = j.at("gammaSweep").get<std::vector<double>>();
  if (j.contains("rhoSweep")) c.rhoSweep = j.at("rhoSweep").get<std::vector<double>>();
  c.threads = static_cast<int>(num(j, "threads", c.threads));
  if (j.contains("writeResponse")) c.writeResponse = j.at("writeResponse").get<bool>();
  return c;
}

inline SolveConfig load_config(const std::string& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("config file '" + path + "': " + e.what());
  }
  try {
    return parse_config(j, kind);
  } catch (const json::exception& e) {
    throw ParseError("config file '" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Artifact writers (CSV with header row, floats at 17 significant digits)

inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_palm_trace_csv(const std::string& path, const IterTrace& trace) {
  std::ofstream out(path);
  out << "iter,psi,feas,step_w,step_p,step_z,step_u,kkt,inner_iters,nnz_groups\n";
  for (const auto& r : trace)
    out << r.iter << ',' << fmt17(r.psi) << ',' << fmt17(r.feas) << ','
        << fmt17(r.stepW) << ',' << fmt17(r.stepP) << ',' << fmt17(r.stepZ) << ','
        << fmt17(r.stepU) << ',' << fmt17(r.kkt) << ',' << r.innerIters << ','
        << r.nnzGroups << '\n';
}

inline void write_admm_trace_csv(const std::string& path, const AdmmTrace& trace) {
  std::ofstream out(path);
  out << "iter,psi,feas,step_w,step_p,step_z,step_u,kkt,inner_iters,nnz_groups,"
         "running_min_feas,window_amplitude\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : trace)
    out << r.iter << ',' << fmt17(nan) << ',' << fmt17(r.feas) << ','
        << fmt17(r.stepW) << ',' << fmt17(r.stepP) << ',' << fmt17(r.stepLambda)
        << ',' << fmt17(r.stepU) << ',' << fmt17(r.innerErr) << ','
        << r.innerIters << ',' << r.nnzGroups << ',' << fmt17(r.runningMinFeas)
        << ',' << fmt17(r.windowAmplitude) << '\n';
}

/// Two-column gnuplot-ready series (iter value).
inline void write_series_dat(const std::string& path,
                             const std::vector<double>& values) {
  std::ofstream out(path);
  for (size_t i = 0; i < values.size(); ++i)
    out << (i + 1) << ' ' << fmt17(values[i]) << '\n';
}

inline json report_to_json(const SolveReport& rep) {
  json j;
  j["status"] = rep.status;
  j["K"] = matrix_to_json(rep.K);
  json pat = json::array();
  for (int i = 0; i < rep.sparsityPattern.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < rep.sparsityPattern.cols(); ++k)
      row.push_back(rep.sparsityPattern(i, k));
    pat.push_back(std::move(row));
  }
  j["sparsityPattern"] = std::move(pat);
  j["spectralAbscissa"] = rep.spectralAbscissa;
  j["costUpperBound"] = rep.costUpperBound;
  j["h2Cost"] = std::isfinite(rep.h2Cost) ? json(rep.h2Cost) : json("inf");
  j["W11"] = rep.W11;
  j["minEigW1"] = rep.minEigW1;
  j["usedPseudoInverse"] = rep.usedPseudoInverse;
  j["paramWaiver"] = rep.paramWaiver;
  j["iterations"] = rep.iterations;
  j["wallTimeSec"] = rep.wallTimeSec;
  j["finalFeas"] = rep.finalFeas;
  j["finalKkt"] = std::isfinite(rep.finalKkt) ? json(rep.finalKkt) : json(nullptr);
  return j;
}

/// Closed-loop impulse-style response from x(0) = normalized B1*1, sampled at
/// 1e-2 over [0, 10]; columns t, x_1..x_n.
inline void write_response_csv(const std::string& path, const LtiSystem& sys,
                               const Matrix& K) {
  const Matrix Acl = sys.A - sys.B2 * K;
  const int n = sys.n();
  Vector x = sys.B1 * Vector::Ones(sys.l());
  const double nx = x.norm();
  if (nx > 0) x /= nx;
  const double dt = 1e-2;
  const int steps = 1000;

  // one-step matrix via scaling-and-squaring on the Taylor series
  Matrix E = Matrix::Identity(n, n);
  {
    int squarings = 0;
    double scale = Acl.norm() * dt;
    while (scale > 0.5) {
      scale /= 2.0;
      ++squarings;
    }
    const Matrix As = Acl * (dt / std::pow(2.0, squarings));
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k <= 16; ++k) {
      term = (term * As) / k;
      E += term;
    }
    for (int s = 0; s < squarings; ++s) E = E * E;
  }

  std::ofstream out(path);
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  out << '\n';
  for (int k = 0; k <= steps; ++k) {
    out << fmt17(k * dt);
    for (int i = 0; i < n; ++i) out << ',' << fmt17(x(i));
    out << '\n';
    x = E * x;
  }
}

}  // namespace io
}  // namespace gslq

#endif  // GSLQ_IO_HPP_
