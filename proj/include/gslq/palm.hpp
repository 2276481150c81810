// Penalty-PALM outer loop for
//
//   min f(W~) + g(P~) + (rho/2) ||Acoup W~ + Bcoup P~||^2
//
// with the parameter selection rule that certifies the monotone descent of
// the regularized augmented Lagrangian Psi, KKT residuals, stopping logic and
// per-iteration trace records. The P~ subproblem is the exact group-l0 prox;
// the z subproblem is prox_{f/beta} via the dual pBCD solver.
#ifndef GSLQ_PALM_HPP_
#define GSLQ_PALM_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "gslq/fprox.hpp"
#include "gslq/gprox.hpp"

namespace gslq {

struct PalmParams {
  double sigma = 0.02;  // in (0, 1/24) for the descent certificate
  double beta = 0.0;    // augmented weight; <= 0 requests suggest_params
  double mu = 0.0;      // P~ prox weight
  double tau = 0.0;     // W~ step weight
  double rho = 50.0;    // penalty
  double gamma = 1.0;   // group sparsity weight
  int budget = -1;      // S, capped group count; negative = st
  int maxIter = 20000;
  double tolFeas = 1e-6;
  double tolStep = 1e-8;
};

/// kappa_1 = rho*||A^T A||, kappa_2 = rho*||B^T B||, kappa_3 = rho*||A^T B||,
/// always computed from the assembled coupling matrices.
struct LipschitzConstants {
  double normAtA = 0.0;
  double normBtB = 0.0;
  double normAtB = 0.0;
  double rho = 1.0;

  double kappa1() const { return rho * normAtA; }
  double kappa2() const { return rho * normBtB; }
  double kappa3() const { return rho * normAtB; }

  LipschitzConstants with_rho(double r) const {
    LipschitzConstants out = *this;
    out.rho = r;
    return out;
  }

  static LipschitzConstants from(const StandardForm& sf, double rho) {
    LipschitzConstants lc;
    lc.normAtA = spectral_norm(sf.Acoup.transpose() * sf.Acoup);
    lc.normBtB = spectral_norm(sf.Bcoup.transpose() * sf.Bcoup);
    lc.normAtB = spectral_norm(sf.Acoup.transpose() * sf.Bcoup);
    lc.rho = rho;
    return lc;
  }
};

struct ParamValidation {
  bool valid = false;
  double betaLower = 0.0;
  double muLower = 0.0;
  double varsigma = 0.0;
  double tauLower = 0.0;
  double tauUpper = 0.0;
  double C2 = 0.0, C3 = 0.0, C4 = 0.0;

  struct Margin {
    std::string name;
    double value = 0.0;  // positive slack means satisfied
    bool ok = false;
  };
  std::vector<Margin> margins;
};

/// Check the selection rule
///   0 < sigma < 1/24,
///   beta > 4*k1/(1-24s) * (4 + 3s + sqrt(24 - 168s + 9s^2)),
///   mu   > k2 + 16*k3^2/(s*beta),
///   max{beta/2, beta/(24s)(1 - 16k1/beta - sqrt(vs))} < tau
///        < beta/(24s)(1 - 16k1/beta + sqrt(vs)),
/// with vs = 1 - 32k1/beta - 128k1^2/beta^2 - 24k1*s/beta - 24s > 0, and
/// confirm C2, C3, C4 > 0.
inline ParamValidation validate_params(const PalmParams& p,
                                       const LipschitzConstants& lips) {
  ParamValidation v;
  const double s = p.sigma, beta = p.beta, mu = p.mu, tau = p.tau;
  const double k1 = lips.kappa1(), k2 = lips.kappa2(), k3 = lips.kappa3();

  auto add = [&](const std::string& name, double slack) {
    v.margins.push_back({name, slack, slack > 0.0});
  };

  add("sigma_positive", s);
  add("sigma_below_1_24", 1.0 / 24.0 - s);

  const double inner = 24.0 - 168.0 * s + 9.0 * s * s;
  if (s > 0.0 && s < 1.0 / 24.0 && inner >= 0.0)
    v.betaLower = 4.0 * k1 / (1.0 - 24.0 * s) * (4.0 + 3.0 * s + std::sqrt(inner));
  else
    v.betaLower = std::numeric_limits<double>::infinity();
  add("beta_above_lower", beta - v.betaLower);

  v.muLower = (beta > 0.0) ? k2 + 16.0 * k3 * k3 / (s * beta)
                           : std::numeric_limits<double>::infinity();
  add("mu_above_lower", mu - v.muLower);

  if (beta > 0.0)
    v.varsigma = 1.0 - 32.0 * k1 / beta - 128.0 * k1 * k1 / (beta * beta) -
                 24.0 * k1 * s / beta - 24.0 * s;
  else
    v.varsigma = -std::numeric_limits<double>::infinity();
  add("varsigma_positive", v.varsigma);

  if (v.varsigma > 0.0 && s > 0.0) {
    const double root = std::sqrt(v.varsigma);
    const double base = beta / (24.0 * s);
    v.tauLower = std::max(beta / 2.0, base * (1.0 - 16.0 * k1 / beta - root));
    v.tauUpper = base * (1.0 - 16.0 * k1 / beta + root);
  } else {
    v.tauLower = std::numeric_limits<double>::infinity();
    v.tauUpper = -std::numeric_limits<double>::infinity();
  }
  add("tau_above_lower", tau - v.tauLower);
  add("tau_below_upper", v.tauUpper - tau);

  v.C2 = tau - (k1 + beta) / 2.0 - 4.0 * s * tau * tau / beta -
         8.0 * (s * tau + k1) * (s * tau + k1) / (s * beta);
  v.C3 = (mu - k2) / 2.0 - 8.0 * k3 * k3 / (s * beta);
  v.C4 = 1.0 / (s * beta);
  add("C2_positive", v.C2);
  add("C3_positive", v.C3);
  add("C4_positive", v.C4);

  v.valid = true;
  for (const auto& m : v.margins) v.valid = v.valid && m.ok;
  return v;
}

/// Constructive use of the selection rule: beta and mu at 1.05x their lower
/// bounds (floored at 1 for the zero-Lipschitz edge), tau at the midpoint of
/// its interval; retries with beta doubled until the candidate validates.
inline PalmParams suggest_params(double rho, double sigma,
                                 const LipschitzConstants& lipsBase) {
  if (sigma <= 0.0 || sigma >= 1.0 / 24.0)
    throw std::invalid_argument("suggest_params: sigma must lie in (0, 1/24)");
  const LipschitzConstants lips = lipsBase.with_rho(rho);
  const double k1 = lips.kappa1(), k2 = lips.kappa2(), k3 = lips.kappa3();

  const double inner = 24.0 - 168.0 * sigma + 9.0 * sigma * sigma;
  const double betaLower =
      4.0 * k1 / (1.0 - 24.0 * sigma) * (4.0 + 3.0 * sigma + std::sqrt(inner));
  double beta = std::max(1.05 * betaLower, 1.0);

  for (int attempt = 0; attempt <= 40; ++attempt) {
    PalmParams cand;
    cand.sigma = sigma;
    cand.rho = rho;
    cand.beta = beta;
    cand.mu = std::max(1.05 * (k2 + 16.0 * k3 * k3 / (sigma * beta)), 1.0);
    const double vs = 1.0 - 32.0 * k1 / beta - 128.0 * k1 * k1 / (beta * beta) -
                      24.0 * k1 * sigma / beta - 24.0 * sigma;
    if (vs > 0.0) {
      const double root = std::sqrt(vs);
      const double base = beta / (24.0 * sigma);
      const double lo = std::max(beta / 2.0, base * (1.0 - 16.0 * k1 / beta - root));
      const double hi = base * (1.0 - 16.0 * k1 / beta + root);
      if (hi > lo) {
        cand.tau = 0.5 * (lo + hi);
        if (validate_params(cand, lips).valid) return cand;
      }
    }
    beta *= 2.0;
  }
  throw NumericalError("suggest_params: no feasible tau interval found", beta);
}

// ---------------------------------------------------------------------------
// Iteration state and trace

struct PalmState {
  Vector Wt, Pt, z, u;
  Vector prevWt, prevU;
  DualState dual;
  bool hasHistory = false;
  bool hasDual = false;
};

inline PalmState make_palm_state(const StandardForm& sf, const Vector& W0,
                                 const Vector& P0, const Vector& z0,
                                 const Vector& u0) {
  if (W0.size() != sf.p * sf.p || z0.size() != sf.p * sf.p ||
      u0.size() != sf.p * sf.p || P0.size() != sf.m * sf.n)
    throw std::invalid_argument("make_palm_state: init dimension mismatch");
  PalmState st;
  st.Wt = W0;
  st.Pt = P0;
  st.z = z0;
  st.u = u0;
  st.prevWt = W0;
  st.prevU = u0;
  return st;
}

inline PalmState all_ones_init(const StandardForm& sf) {
  return make_palm_state(sf, Vector::Ones(sf.p * sf.p), Vector::Ones(sf.m * sf.n),
                         Vector::Ones(sf.p * sf.p), Vector::Ones(sf.p * sf.p));
}

struct IterRecord {
  int iter = 0;
  double psi = std::numeric_limits<double>::quiet_NaN();
  double feas = 0.0;
  double stepW = 0.0, stepP = 0.0, stepZ = 0.0, stepU = 0.0;
  double kkt = std::numeric_limits<double>::quiet_NaN();
  int innerIters = 0;
  int nnzGroups = 0;
  bool innerConverged = true;
  double descentSlack = std::numeric_limits<double>::quiet_NaN();
  double rho = 0.0;
};

using IterTrace = std::vector<IterRecord>;

inline int nnz_groups(const Vector& Pt, const StandardForm& sf) {
  const Vector w = group_norms(Pt, sf);
  int k = 0;
  for (int ell = 0; ell < sf.num_groups(); ++ell)
    if (w(ell) > 0.0) ++k;
  return k;
}

inline double feasibility(const Vector& Wt, const Vector& Pt,
                          const StandardForm& sf) {
  return (sf.Acoup * Wt + sf.Bcoup * Pt).norm();
}

// ---------------------------------------------------------------------------
// Psi and KKT residual

/// Regularized augmented Lagrangian at the current tuple (needs one-step
/// history). Cone indicators use feasibility tolerance 1e-6: any violation
/// beyond it returns the +inf sentinel.
inline double psi_eval(const PalmState& st, const StandardForm& sf,
                       const PalmParams& pp, const LipschitzConstants& lips) {
  constexpr double kIndicatorTol = 1e-6;
  const double inf = std::numeric_limits<double>::infinity();

  const Matrix Z = sym_from_vec(st.z, sf.p);
  if (detail::min_eig(Z) < -kIndicatorTol) return inf;
  for (const auto& Fi : sf.F) {
    const Matrix Psi_i =
        -sf.V2 * (Fi * Z + Z * Fi.transpose() + sf.Qmat) * sf.V2.transpose();
    if (detail::min_eig(Psi_i) < -kIndicatorTol) return inf;
  }
  if (sf.deltaFloor) {
    const Matrix W1 = sf.V2 * Z * sf.V2.transpose();
    if (detail::min_eig(W1) - sf.delta < -kIndicatorTol) return inf;
  }

  const int S = pp.budget < 0 ? sf.num_groups() : pp.budget;
  const int nnz = nnz_groups(st.Pt, sf);
  if (nnz > S) return inf;

  const double k1 = lips.kappa1();
  const double C0 = 4.0 * (1.0 - pp.sigma) / (pp.sigma * pp.sigma * pp.beta);
  const double C1 =
      8.0 * (pp.sigma * pp.tau + k1) * (pp.sigma * pp.tau + k1) / (pp.sigma * pp.beta);

  const Vector resid = sf.Acoup * st.Wt + sf.Bcoup * st.Pt;
  const Vector wz = st.Wt - st.z;
  const Vector reg = (st.u - st.prevU) + pp.sigma * (pp.tau - pp.beta) * (st.Wt - st.prevWt);

  double val = vec(sf.R).dot(st.z) + pp.gamma * nnz +
               0.5 * pp.rho * resid.squaredNorm() + st.u.dot(wz) +
               0.5 * pp.beta * wz.squaredNorm() + C0 * reg.squaredNorm() +
               C1 * (st.Wt - st.prevWt).squaredNorm();
  return val;
}

/// Stationarity measure for the penalized problem (its KKT system):
/// max of the u-identity, the g prox-residual, the f prox-residual and
/// ||z - W~||.
inline double kkt_residual(const PalmState& st, const StandardForm& sf,
                           const PalmParams& pp, const PbcdDerived& derived,
                           const PbcdConfig& icfg) {
  const Vector resid = sf.Acoup * st.Wt + sf.Bcoup * st.Pt;
  const double r1 = (st.u + pp.rho * (sf.Acoup.transpose() * resid)).norm();

  GroupProxParams gp{pp.gamma, pp.mu, pp.budget};
  const Vector varpi = st.Pt - (pp.rho / pp.mu) * (sf.Bcoup.transpose() * resid);
  const double r2 = (st.Pt - group_l0_prox(varpi, sf, gp)).norm();

  ProxResult pr = prox_f_with(derived, st.z + st.u / pp.beta, icfg,
                              st.hasDual ? &st.dual : nullptr);
  const double r3 = (st.z - pr.zvec).norm();

  const double r4 = (st.z - st.Wt).norm();
  return std::max(std::max(r1, r2), std::max(r3, r4));
}

// ---------------------------------------------------------------------------
// One outer iteration

inline IterRecord palm_step(PalmState& st, const StandardForm& sf,
                            const PalmParams& pp, const PbcdDerived& derived,
                            const PbcdConfig& icfg) {
  IterRecord rec;
  rec.rho = pp.rho;

  const Vector resid0 = sf.Acoup * st.Wt + sf.Bcoup * st.Pt;

  GroupProxParams gp{pp.gamma, pp.mu, pp.budget};
  const Vector varpi = st.Pt - (pp.rho / pp.mu) * (sf.Bcoup.transpose() * resid0);
  const Vector Pnew = group_l0_prox(varpi, sf, gp);

  ProxResult pr = prox_f_with(derived, st.Wt + st.u / pp.beta, icfg,
                              st.hasDual ? &st.dual : nullptr);
  const Vector& znew = pr.zvec;
  rec.innerIters = pr.iters;
  rec.innerConverged = pr.converged;

  const Vector residP = sf.Acoup * st.Wt + sf.Bcoup * Pnew;
  const Vector gradW = pp.rho * (sf.Acoup.transpose() * residP);
  const Vector Wnew =
      st.Wt - (gradW + st.u + pp.beta * (st.Wt - znew)) / pp.tau;
  const Vector unew = st.u + pp.sigma * pp.beta * (Wnew - znew);

  rec.stepW = (Wnew - st.Wt).norm();
  rec.stepP = (Pnew - st.Pt).norm();
  rec.stepZ = (znew - st.z).norm();
  rec.stepU = (unew - st.u).norm();
  rec.nnzGroups = nnz_groups(Pnew, sf);

  st.prevWt = st.Wt;
  st.prevU = st.u;
  st.Wt = Wnew;
  st.Pt = Pnew;
  st.z = znew;
  st.u = unew;
  st.dual = std::move(pr.dual);
  st.hasDual = true;
  st.hasHistory = true;

  rec.feas = feasibility(st.Wt, st.Pt, sf);
  return rec;
}

// ---------------------------------------------------------------------------
// Full solve

struct PalmSolveConfig {
  PbcdConfig inner;
  bool strictParams = false;
  bool rhoContinuation = false;
  bool computeKkt = true;
  bool computePsi = true;
};

struct PalmResult {
  std::string status;  // "converged", "max_iters", "not_started", "invalid_params"
  PalmState state;
  IterTrace trace;
  int iterations = 0;
  bool paramsValid = false;
  bool paramWaiver = false;
  double finalFeas = std::numeric_limits<double>::infinity();
  double finalKkt = std::numeric_limits<double>::infinity();
  PalmParams paramsUsed;
};

inline PalmResult palm_solve(const StandardForm& sf, PalmParams pp,
                             const PalmState& init, const PalmSolveConfig& cfg) {
  PalmResult out;
  LipschitzConstants lips = LipschitzConstants::from(sf, pp.rho);
  if (pp.beta <= 0.0 || pp.mu <= 0.0 || pp.tau <= 0.0) {
    PalmParams sug = suggest_params(pp.rho, pp.sigma, lips);
    pp.beta = sug.beta;
    pp.mu = sug.mu;
    pp.tau = sug.tau;
  }
  ParamValidation pv = validate_params(pp, lips);
  out.paramsValid = pv.valid;
  out.paramWaiver = !pv.valid;
  out.paramsUsed = pp;
  if (!pv.valid && cfg.strictParams) {
    out.status = "invalid_params";
    out.state = init;
    return out;
  }

  out.state = init;
  if (pp.maxIter == 0) {
    out.status = "not_started";
    return out;
  }

  PbcdDerived derived = precompute(sf, pp.beta);

  double prevPsi = std::numeric_limits<double>::quiet_NaN();
  double bestFeas = std::numeric_limits<double>::infinity();
  int stallStart = 0;

  for (int n = 0; n < pp.maxIter; ++n) {
    IterRecord rec = palm_step(out.state, sf, pp, derived, cfg.inner);
    rec.iter = n + 1;
    if (cfg.computePsi) {
      rec.psi = psi_eval(out.state, sf, pp, lips);
      if (std::isfinite(prevPsi) && std::isfinite(rec.psi))
        rec.descentSlack = prevPsi - rec.psi -
                           (pv.C2 * rec.stepW * rec.stepW +
                            pv.C3 * rec.stepP * rec.stepP +
                            pv.C4 * rec.stepU * rec.stepU);
      prevPsi = rec.psi;
    }
    if (cfg.computeKkt)
      rec.kkt = kkt_residual(out.state, sf, pp, derived, cfg.inner);
    out.trace.push_back(rec);
    out.iterations = n + 1;
    out.finalFeas = rec.feas;
    out.finalKkt = rec.kkt;

    const double maxStep =
        std::max(std::max(rec.stepW, rec.stepP), std::max(rec.stepZ, rec.stepU));
    const bool kktOk = !cfg.computeKkt || rec.kkt <= pp.tolFeas;
    if (rec.feas <= pp.tolFeas && maxStep <= pp.tolStep && kktOk) {
      out.status = "converged";
      return out;
    }

    // penalty continuation: double rho when feasibility stalls above tolFeas
    if (cfg.rhoContinuation && rec.feas > pp.tolFeas) {
      if (rec.feas < 0.99 * bestFeas) {
        bestFeas = rec.feas;
        stallStart = n;
      } else if (n - stallStart >= 200) {
        pp.rho *= 2.0;
        lips = lips.with_rho(pp.rho);
        PalmParams sug = suggest_params(pp.rho, pp.sigma, lips);
        pp.beta = sug.beta;
        pp.mu = sug.mu;
        pp.tau = sug.tau;
        pv = validate_params(pp, lips);
        derived = precompute(sf, pp.beta);
        out.state.hasDual = false;  // operators changed, cold-start the dual
        out.paramsUsed = pp;
        bestFeas = rec.feas;
        stallStart = n;
        prevPsi = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  out.status = "max_iters";
  return out;
}

}  // namespace gslq

#endif  // GSLQ_PALM_HPP_
