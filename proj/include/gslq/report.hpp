// Gain extraction K = W2^T W1^{-1}, block sparsity patterns, closed-loop
// verification (spectral abscissa, Lyapunov H2 cost) and the solve report
// consumed by the CLI. Three cost figures are always reported side by side:
// W11, <R,W> and the Lyapunov H2 cost of the extracted gain.
#ifndef GSLQ_REPORT_HPP_
#define GSLQ_REPORT_HPP_

#include <string>

#include "gslq/model.hpp"
#include "gslq/palm.hpp"

namespace gslq {

struct GainExtraction {
  Matrix K;
  double minEigW1 = 0.0;
  double conditionEstimate = 0.0;
  bool usedPseudoInverse = false;
};

/// K = W2^T W1^{-1} via a linear solve against (symmetrized) W1; falls back to
/// the pseudo-inverse when min eig(W1) drops below deltaFloor.
inline GainExtraction extract_gain(const Matrix& W, int n, int m,
                                   double deltaFloor = 1e-10) {
  if (W.rows() != n + m || W.cols() != n + m)
    throw std::invalid_argument("extract_gain: W must be (n+m) x (n+m)");
  const Matrix Ws = symmetrized(W);
  const Matrix W1 = Ws.topLeftCorner(n, n);
  const Matrix W2 = Ws.topRightCorner(n, m);

  GainExtraction out;
  Eigen::SelfAdjointEigenSolver<Matrix> es(W1);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmaxAbs = es.eigenvalues().cwiseAbs().maxCoeff();
  out.minEigW1 = lmin;
  if (lmaxAbs < 1e-300)
    throw NumericalError("extract_gain: W1 is numerically zero", lmin);
  out.conditionEstimate =
      lmaxAbs / std::max(es.eigenvalues().cwiseAbs().minCoeff(), 1e-300);

  if (lmin > deltaFloor) {
    out.K = W1.ldlt().solve(W2).transpose();
  } else {
    out.usedPseudoInverse = true;
    out.K = W1.completeOrthogonalDecomposition().pseudoInverse() * W2;
    out.K.transposeInPlace();
  }
  return out;
}

/// s x t binary map of nonzero blocks of K (block zero when every entry is
/// below tol in magnitude).
inline Eigen::MatrixXi sparsity_pattern(const Matrix& K, const BlockStructure& bs,
                                        double tol = 1e-8) {
  Eigen::MatrixXi g(bs.s(), bs.t());
  int r0 = 0;
  for (int i = 0; i < bs.s(); ++i) {
    int c0 = 0;
    for (int j = 0; j < bs.t(); ++j) {
      const double mx =
          K.block(r0, c0, bs.rowDims[i], bs.colDims[j]).cwiseAbs().maxCoeff();
      g(i, j) = mx < tol ? 0 : 1;
      c0 += bs.colDims[j];
    }
    r0 += bs.rowDims[i];
  }
  return g;
}

/// Enforce the structural zeros that exact feasibility mandates: W1 off-block
/// entries and the W2 columns of groups that the sparsity step zeroed. Applied
/// to converged iterates before gain extraction so that zero blocks of K are
/// exact.
inline Matrix project_structure(const Matrix& W, const StandardForm& sf,
                                const Vector& Pt) {
  Matrix Ws = symmetrized(W);
  // W1 off-diagonal blocks from the coupling selectors; Vj1 is n_xi x p
  // selecting rows, Vj2 is p x n_kappa selecting cols
  for (const auto& [Vj1, Vj2] : sf.blockSelectors) {
    for (int a = 0; a < Vj1.rows(); ++a)
      for (int b = 0; b < Vj2.cols(); ++b) {
        int ra = -1, cb = -1;
        for (int k = 0; k < sf.p; ++k) {
          if (Vj1(a, k) == 1.0) ra = k;
          if (Vj2(k, b) == 1.0) cb = k;
        }
        Ws(ra, cb) = 0.0;
        Ws(cb, ra) = 0.0;
      }
  }
  // W2 entries of zeroed groups; vec(P) index k = c*m + r maps to W(c, n+r)
  const Vector w = group_norms(Pt, sf);
  for (int ell = 0; ell < sf.num_groups(); ++ell) {
    if (w(ell) > 0.0) continue;
    for (int k : sf.groupIndexSets[ell]) {
      const int r = k % sf.m;
      const int c = k / sf.m;
      Ws(c, sf.n + r) = 0.0;
      Ws(sf.n + r, c) = 0.0;
    }
  }
  return Ws;
}

struct SolveReport {
  std::string status;  // "stabilizing", "converged_unstable", "not_converged", ...
  Matrix K;
  Eigen::MatrixXi sparsityPattern;
  double spectralAbscissa = 0.0;
  double costUpperBound = 0.0;  // <R, W>
  double h2Cost = std::numeric_limits<double>::infinity();
  double W11 = 0.0;
  double minEigW1 = 0.0;
  bool usedPseudoInverse = false;
  bool paramWaiver = false;
  int iterations = 0;
  double wallTimeSec = 0.0;
  double finalFeas = std::numeric_limits<double>::infinity();
  double finalKkt = std::numeric_limits<double>::quiet_NaN();
};

/// Assemble the verification report for a solution matrix W (already
/// structure-projected when it comes from a sparse solve).
inline SolveReport make_report(const LtiSystem& sys, const BlockStructure& bs,
                               const StandardForm& sf, const Matrix& W,
                               const std::string& solverStatus) {
  SolveReport rep;
  GainExtraction ge = extract_gain(W, sf.n, sf.m);
  rep.K = ge.K;
  rep.minEigW1 = ge.minEigW1;
  rep.usedPseudoInverse = ge.usedPseudoInverse;
  rep.sparsityPattern = sparsity_pattern(ge.K, bs);
  rep.costUpperBound = (sf.R * symmetrized(W)).trace();
  rep.W11 = W(0, 0);
  const H2Result h2 = h2_cost(sys.A, sys.B2, sys.B1, sys.C, sys.D, ge.K);
  rep.spectralAbscissa = h2.abscissa;
  rep.h2Cost = h2.cost;
  if (solverStatus == "converged")
    rep.status = h2.stable() ? "stabilizing" : "converged_unstable";
  else if (solverStatus == "max_iters")
    rep.status = h2.stable() ? "not_converged_stabilizing" : "not_converged";
  else
    rep.status = solverStatus;
  return rep;
}

}  // namespace gslq

#endif  // GSLQ_REPORT_HPP_
