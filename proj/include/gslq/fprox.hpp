// Evaluation of prox_{f/beta}: the cone-constrained quadratic subproblem
//
//   min  <vec(R), z> + (beta/2) (z - xi)^T Gv (z - xi)
//   s.t. smat(z) PSD,  Psi_i(z) = -V2 (F_i Z + Z F_i^T + Q) V2^T PSD,
//
// solved through its dual with a single-timescale proximal block coordinate
// descent: every block update is one closed-form PSD projection. Gv is the
// identity for the PALM subproblem; the direct-ADMM W-subproblem passes the
// diagonal metric A^T A + (I - proj range(A^T)) through the same machinery.
//
// All operators live in orthonormal svec coordinates, where D1^T D1 = I and
// the cone projection is svec . psd_project . smat.
#ifndef GSLQ_FPROX_HPP_
#define GSLQ_FPROX_HPP_

#include <optional>
#include <vector>

#include "gslq/model.hpp"

namespace gslq {

struct PbcdConfig {
  double eps = 1e-8;     // stopping tolerance on the relative residual err
  int maxIter = 50000;   // sweep cap
  bool warmStart = true; // reuse the previous dual point across outer iterations
};

/// Dual blocks in svec coordinates: X0 for the PSD constraint on W, one block
/// per vertex constraint (plus one more when the delta-floor cone is active).
struct DualState {
  Vector X0;
  std::vector<Vector> X;
};

/// Operators cached for a fixed (StandardForm, beta, metric) triple.
struct PbcdDerived {
  int p = 0, n = 0, M = 0;
  double beta = 1.0;
  SymVecMap svp, svn;

  // cone blocks j = 1..B: svec(Psi_j) = sign_j * G-ish map; stored so that
  // lstar(X) = svec(R) - X0 + sum_j Gmap[j]^T X[j]
  std::vector<Matrix> Gmap;   // d_j x r_p
  std::vector<Vector> cvec;   // constant <X_j, c_j> term of the Lagrangian
  std::vector<Matrix> GGinv;  // Gmap[j] * diag(ghatinv)
  std::vector<Matrix> L;      // (1/beta) Gmap[j] Ghat^{-1} Gmap[j]^T
  std::vector<double> rho;    // max eig(L_j), floored at 1e-12
  std::vector<int> matDim;    // side length of smat for block j

  Vector L0diag;  // (1/beta) Ghat^{-1}
  double rho0 = 0.0;

  Vector ghat, ghatinv;  // diagonal metric in svec coordinates
  Vector gvec;           // diagonal metric in vec coordinates (p^2)
  bool identityMetric = true;

  Vector rsvec;  // svec(R)

  int numBlocks() const { return static_cast<int>(Gmap.size()); }

  DualState zero_state() const {
    DualState ds;
    ds.X0 = Vector::Zero(svp.svec_dim());
    for (int d : matDim) ds.X.push_back(Vector::Zero(d * (d + 1) / 2));
    return ds;
  }

  /// gxi = D1^T Gv xi, the metric-weighted center in svec coordinates.
  Vector gxi(const Vector& xi) const {
    if (identityMetric) return svp.T * xi;
    return svp.T * gvec.cwiseProduct(xi);
  }

  Vector lstar(const DualState& ds) const {
    Vector v = rsvec - ds.X0;
    for (int j = 0; j < numBlocks(); ++j) v += Gmap[j].transpose() * ds.X[j];
    return v;
  }
};

namespace detail {

inline Vector project_cone(const Vector& v) { return svec(psd_project(smat(v))); }

inline double rho_floor(double r) { return std::max(r, 1e-12); }

}  // namespace detail

/// Assemble the cached operators for prox_{f/beta} with an optional diagonal
/// metric (vec coordinates, length p^2); identity when absent.
inline PbcdDerived precompute(const StandardForm& sf, double beta,
                              const std::optional<Vector>& metric = std::nullopt) {
  if (beta <= 0.0) throw std::invalid_argument("precompute: beta must be > 0");
  PbcdDerived d;
  d.p = sf.p;
  d.n = sf.n;
  d.M = sf.M;
  d.beta = beta;
  d.svp = build_symvec(sf.p);
  d.svn = build_symvec(sf.n);
  d.rsvec = svec(sf.R);

  const int rp = d.svp.svec_dim();
  if (metric.has_value()) {
    if (metric->size() != static_cast<long>(sf.p) * sf.p)
      throw std::invalid_argument("precompute: metric length must be p^2");
    d.gvec = *metric;
    d.identityMetric = (d.gvec.array() == 1.0).all();
  } else {
    d.gvec = Vector::Ones(sf.p * sf.p);
    d.identityMetric = true;
  }
  d.ghat = (d.svp.T * d.gvec.asDiagonal() * d.svp.D).diagonal();
  d.ghatinv = d.ghat.cwiseInverse();
  d.L0diag = d.ghatinv / beta;
  d.rho0 = detail::rho_floor(d.L0diag.maxCoeff());

  const Vector qvec = svec(sf.V2 * sf.Qmat * sf.V2.transpose());
  for (int i = 0; i < sf.M; ++i) {
    const Matrix V2F = sf.V2 * sf.F[i];
    const Matrix Xi = kron(sf.V2, V2F) + kron(V2F, sf.V2);
    d.Gmap.push_back(d.svn.T * Xi * d.svp.D);
    d.cvec.push_back(qvec);
    d.matDim.push_back(sf.n);
  }
  if (sf.deltaFloor) {
    d.Gmap.push_back(-d.svn.T * kron(sf.V2, sf.V2) * d.svp.D);
    d.cvec.push_back(sf.delta * svec(Matrix::Identity(sf.n, sf.n)));
    d.matDim.push_back(sf.n);
  }
  for (int j = 0; j < d.numBlocks(); ++j) {
    d.GGinv.push_back(d.Gmap[j] * d.ghatinv.asDiagonal());
    Matrix Lj = (d.GGinv[j] * d.Gmap[j].transpose()) / beta;
    Lj = symmetrized(Lj);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Lj);
    if (es.info() != Eigen::Success)
      throw NumericalError("precompute: eigensolver failed on L_j", 0.0);
    d.L.push_back(std::move(Lj));
    d.rho.push_back(detail::rho_floor(es.eigenvalues().maxCoeff()));
  }
  (void)rp;
  return d;
}

/// Smooth part of the dual objective Omega (cone indicators excluded).
inline double dual_smooth_value(const DualState& ds, const Vector& xi,
                                const PbcdDerived& d) {
  const Vector ls = d.lstar(ds);
  const Vector gx = d.gxi(xi);
  double val = -ls.dot(d.ghatinv.cwiseProduct(gx)) +
               ls.dot(d.ghatinv.cwiseProduct(ls)) / (2.0 * d.beta);
  for (int j = 0; j < d.numBlocks(); ++j) val -= ds.X[j].dot(d.cvec[j]);
  return val;
}

/// Analytic gradient of the smooth part of Omega, block layout as DualState.
inline DualState smooth_gradient(const DualState& ds, const Vector& xi,
                                 const PbcdDerived& d) {
  const Vector ls = d.lstar(ds);
  const Vector gx = d.gxi(xi);
  DualState g;
  g.X0 = d.ghatinv.cwiseProduct(gx) - d.ghatinv.cwiseProduct(ls) / d.beta;
  for (int j = 0; j < d.numBlocks(); ++j)
    g.X.push_back(-d.cvec[j] - d.GGinv[j] * gx + (d.GGinv[j] * ls) / d.beta);
  return g;
}

/// One Gauss-Seidel sweep in descending block order X_B, ..., X_1, X_0; each
/// new block is the PSD projection of Delta_j.
inline void pbcd_step(DualState& ds, const Vector& xi, const PbcdDerived& d) {
  Vector ls = d.lstar(ds);
  const Vector gx = d.gxi(xi);
  for (int j = d.numBlocks() - 1; j >= 0; --j) {
    const Vector lsMinus = ls - d.Gmap[j].transpose() * ds.X[j];
    const Vector Hj = d.cvec[j] + d.GGinv[j] * gx - (d.GGinv[j] * lsMinus) / d.beta;
    const Vector delta = (Hj + d.rho[j] * ds.X[j] - d.L[j] * ds.X[j]) / d.rho[j];
    const Vector Xnew = detail::project_cone(delta);
    ls += d.Gmap[j].transpose() * (Xnew - ds.X[j]);
    ds.X[j] = Xnew;
  }
  {
    const Vector lsMinus = ls + ds.X0;
    const Vector H0 = -d.ghatinv.cwiseProduct(gx) +
                      d.ghatinv.cwiseProduct(lsMinus) / d.beta;
    const Vector delta =
        (H0 + d.rho0 * ds.X0 - d.L0diag.cwiseProduct(ds.X0)) / d.rho0;
    const Vector Xnew = detail::project_cone(delta);
    ls -= (Xnew - ds.X0);
    ds.X0 = Xnew;
  }
}

/// Relative residual err of the current dual point (max over blocks).
inline double residual(const DualState& ds, const Vector& xi, const PbcdDerived& d) {
  const Vector ls = d.lstar(ds);
  const Vector gx = d.gxi(xi);
  double err = 0.0;
  for (int j = 0; j < d.numBlocks(); ++j) {
    const Vector lsMinus = ls - d.Gmap[j].transpose() * ds.X[j];
    const Vector Hj = d.cvec[j] + d.GGinv[j] * gx - (d.GGinv[j] * lsMinus) / d.beta;
    const Vector LX = d.L[j] * ds.X[j];
    const double num = (ds.X[j] - detail::project_cone(ds.X[j] - LX + Hj)).norm();
    err = std::max(err, num / (1.0 + ds.X[j].norm() + (LX - Hj).norm()));
  }
  {
    const Vector lsMinus = ls + ds.X0;
    const Vector H0 = -d.ghatinv.cwiseProduct(gx) +
                      d.ghatinv.cwiseProduct(lsMinus) / d.beta;
    const Vector LX = d.L0diag.cwiseProduct(ds.X0);
    const double num = (ds.X0 - detail::project_cone(ds.X0 - LX + H0)).norm();
    err = std::max(err, num / (1.0 + ds.X0.norm() + (LX - H0).norm()));
  }
  return err;
}

/// Primal recovery z = D1 * Ghat^{-1} (gxi - lstar/beta); smat(z) symmetric by
/// construction.
inline Vector recover_primal(const DualState& ds, const Vector& xi,
                             const PbcdDerived& d) {
  const Vector s =
      d.ghatinv.cwiseProduct(d.gxi(xi) - d.lstar(ds) / d.beta);
  return d.svp.D * s;
}

/// Primal objective of the subproblem at z.
inline double primal_value(const Vector& z, const Vector& xi, const PbcdDerived& d,
                           const StandardForm& sf) {
  const Vector diff = z - xi;
  return vec(sf.R).dot(z) +
         0.5 * d.beta * diff.dot(d.gvec.cwiseProduct(diff));
}

/// Lagrange dual value Theta(X) = min_s L(s; X); gap = primal_value -
/// dual_value vanishes at optimality under Slater's condition.
inline double dual_value(const DualState& ds, const Vector& xi,
                         const PbcdDerived& d) {
  const Vector ls = d.lstar(ds);
  const Vector s = d.ghatinv.cwiseProduct(d.gxi(xi) - ls / d.beta);
  const Vector diff = d.svp.D * s - xi;
  double val = ls.dot(s) + 0.5 * d.beta * diff.dot(d.gvec.cwiseProduct(diff));
  for (int j = 0; j < d.numBlocks(); ++j) val += ds.X[j].dot(d.cvec[j]);
  return val;
}

struct ProxResult {
  Vector zvec;
  DualState dual;
  int iters = 0;
  std::vector<double> errHistory;
  bool converged = false;
};

inline ProxResult prox_f_with(const PbcdDerived& d, const Vector& xi,
                              const PbcdConfig& cfg,
                              const DualState* warm = nullptr) {
  ProxResult out;
  DualState ds = (warm && cfg.warmStart) ? *warm : d.zero_state();
  double err = residual(ds, xi, d);
  out.errHistory.push_back(err);
  int k = 0;
  while (err >= cfg.eps && k < cfg.maxIter) {
    pbcd_step(ds, xi, d);
    ++k;
    err = residual(ds, xi, d);
    out.errHistory.push_back(err);
  }
  out.iters = k;
  out.converged = err < cfg.eps;
  out.dual = std::move(ds);
  out.zvec = recover_primal(out.dual, xi, d);
  return out;
}

inline ProxResult prox_f(const Vector& xi, const StandardForm& sf, double beta,
                         const PbcdConfig& cfg, const DualState* warm = nullptr) {
  return prox_f_with(precompute(sf, beta), xi, cfg, warm);
}

}  // namespace gslq

#endif  // GSLQ_FPROX_HPP_
