// Plant/uncertainty data, standing-assumption validation and assembly of the
// finite-dimensional conic standard form
//
//   min  <vec(R), W~> + gamma*||P||_{s,t;0}
//   s.t. W PSD,  -V2 (F_i W + W F_i^T + Q) V2^T PSD  (i = 1..M),
//        Acoup * W~ + Bcoup * P~ = 0
//
// consumed by every solver in this library. Acoup stacks the off-diagonal
// W1-block selectors, the coupling block V2 (x) V1 (so that P = W2^T) and one
// selector row per forbidden gain entry; Bcoup is -I on the coupling rows.
#ifndef GSLQ_MODEL_HPP_
#define GSLQ_MODEL_HPP_

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "gslq/symvec.hpp"

namespace gslq {

struct LtiSystem {
  Matrix A;   // n x n
  Matrix B1;  // n x l
  Matrix B2;  // n x m
  Matrix C;   // q x n
  Matrix D;   // q x m

  LtiSystem() = default;
  LtiSystem(Matrix A_, Matrix B1_, Matrix B2_, Matrix C_, Matrix D_)
      : A(std::move(A_)), B1(std::move(B1_)), B2(std::move(B2_)),
        C(std::move(C_)), D(std::move(D_)) {
    check_dims();
  }

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B2.cols()); }
  int l() const { return static_cast<int>(B1.cols()); }
  int q() const { return static_cast<int>(C.rows()); }

  void check_dims() const {
    auto fail = [](const std::string& which) {
      throw std::invalid_argument("LtiSystem: inconsistent dimensions in " + which);
    };
    if (A.rows() < 1 || A.rows() != A.cols()) fail("A");
    if (B1.rows() != A.rows()) fail("B1");
    if (B2.rows() != A.rows() || B2.cols() < 1) fail("B2");
    if (C.cols() != A.rows()) fail("C");
    if (D.rows() != C.rows() || D.cols() != B2.cols()) fail("D");
  }
};

/// Convex-bounded uncertainty: vertices (A_i, B2_i) of the polytope containing
/// F. A certain plant has a single vertex (A, B2).
struct VertexSet {
  std::vector<std::pair<Matrix, Matrix>> vertices;

  static VertexSet certain(const LtiSystem& sys) {
    VertexSet vs;
    vs.vertices.emplace_back(sys.A, sys.B2);
    return vs;
  }
  int size() const { return static_cast<int>(vertices.size()); }

  void check_dims(int n, int m) const {
    if (vertices.empty()) throw std::invalid_argument("VertexSet: M >= 1 required");
    for (const auto& [Ai, B2i] : vertices)
      if (Ai.rows() != n || Ai.cols() != n || B2i.rows() != n || B2i.cols() != m)
        throw std::invalid_argument("VertexSet: vertex dimension mismatch");
  }
};

/// s x t block partition of the gain: rowDims sums to m, colDims to n.
struct BlockStructure {
  std::vector<int> rowDims;
  std::vector<int> colDims;

  int s() const { return static_cast<int>(rowDims.size()); }
  int t() const { return static_cast<int>(colDims.size()); }

  void check_dims(int n, int m) const {
    auto ok = [](const std::vector<int>& d, int total) {
      return !d.empty() && std::all_of(d.begin(), d.end(), [](int x) { return x >= 1; }) &&
             std::accumulate(d.begin(), d.end(), 0) == total;
    };
    if (!ok(rowDims, m)) throw std::invalid_argument("BlockStructure: rowDims must sum to m");
    if (!ok(colDims, n)) throw std::invalid_argument("BlockStructure: colDims must sum to n");
  }
};

/// Hard zero constraints on individual gain entries, 1-based (i,j) in [m]x[n].
struct ForbiddenSet {
  std::vector<std::pair<int, int>> entries;
  bool empty() const { return entries.empty(); }
};

// ---------------------------------------------------------------------------
// Assumption 1 validation

enum class CheckSeverity { Hard, Warning, Diagnostic };

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  double margin = 0.0;
  CheckSeverity severity = CheckSeverity::Hard;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;

  bool hard_ok() const {
    for (const auto& c : checks)
      if (c.severity == CheckSeverity::Hard && !c.passed) return false;
    return true;
  }
  bool all_ok() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

namespace detail {

inline double min_eig(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(S));
  return es.eigenvalues().minCoeff();
}

// smallest singular value of a complex stacked PBH pencil
inline double min_sigma(const Eigen::MatrixXcd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  return svd.singularValues().minCoeff();
}

}  // namespace detail

/// Named pass/fail checks with margins for Assumption 1. C^T C > 0 is reported
/// as a warning only (rank-deficient C appears in legitimate weight choices);
/// PBH stabilizability/observability checks are diagnostic, evaluated at the
/// eigenvalues of A.
inline ValidationReport validate_assumption1(const LtiSystem& sys) {
  sys.check_dims();
  ValidationReport rep;
  const int n = sys.n();

  const double ctd = (sys.C.transpose() * sys.D).cwiseAbs().maxCoeff();
  rep.checks.push_back({"CtD_zero", ctd <= 1e-12, ctd, CheckSeverity::Hard});

  const double dtd = detail::min_eig(sys.D.transpose() * sys.D);
  rep.checks.push_back({"DtD_pd", dtd > 0.0, dtd, CheckSeverity::Hard});

  const double ctc = detail::min_eig(sys.C.transpose() * sys.C);
  rep.checks.push_back({"CtC_pd", ctc > 0.0, ctc, CheckSeverity::Warning});

  const double b1 = detail::min_eig(sys.B1 * sys.B1.transpose());
  rep.checks.push_back({"B1B1t_pd", b1 > 0.0, b1, CheckSeverity::Hard});

  Eigen::EigenSolver<Matrix> es(sys.A);
  const auto lam = es.eigenvalues();
  const Eigen::MatrixXcd Ac = sys.A.cast<std::complex<double>>();
  const double pbh_tol = 1e-8;

  // stabilizability: rank [A - lambda I, B2] = n at Re(lambda) >= 0
  double stab_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i).real() < -pbh_tol) continue;
    Eigen::MatrixXcd M(n, n + sys.m());
    M << Ac - lam(i) * Eigen::MatrixXcd::Identity(n, n),
        sys.B2.cast<std::complex<double>>();
    stab_margin = std::min(stab_margin, detail::min_sigma(M));
  }
  rep.checks.push_back({"stabilizability_pbh", stab_margin > pbh_tol, stab_margin,
                        CheckSeverity::Diagnostic});

  // no unobservable modes on the imaginary axis: rank [A - lambda I; C] = n
  double obs_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < lam.size(); ++i) {
    if (std::abs(lam(i).real()) > pbh_tol) continue;
    Eigen::MatrixXcd M(n + sys.q(), n);
    M << Ac - lam(i) * Eigen::MatrixXcd::Identity(n, n),
        sys.C.cast<std::complex<double>>();
    obs_margin = std::min(obs_margin, detail::min_sigma(M));
  }
  rep.checks.push_back({"imagaxis_observability_pbh", obs_margin > pbh_tol,
                        obs_margin, CheckSeverity::Diagnostic});

  return rep;
}

// ---------------------------------------------------------------------------
// Augmented-space data

// The vertex matrices carry -B2 in the top-right block: with u = -Kx and
// K = W2^T W1^{-1}, the top-left block of F_i W + W F_i^T + Q is then exactly
// (A_i - B2_i K) W1 + W1 (A_i - B2_i K)^T + B1 B1^T, the closed-loop Lyapunov
// certificate. (Both reference solution matrices satisfy this sign and
// violate the opposite one.)
struct AugmentedData {
  Matrix R;               // blockdiag(C^T C, D^T D), p x p
  Matrix Q;               // blockdiag(B1 B1^T, 0), p x p
  std::vector<Matrix> F;  // [[A_i, -B2_i],[0,0]], p x p each
};

inline AugmentedData build_augmented(const LtiSystem& sys, const VertexSet& vs) {
  sys.check_dims();
  vs.check_dims(sys.n(), sys.m());
  const int n = sys.n(), m = sys.m(), p = n + m;
  AugmentedData out;
  out.R = Matrix::Zero(p, p);
  out.R.topLeftCorner(n, n) = sys.C.transpose() * sys.C;
  out.R.bottomRightCorner(m, m) = sys.D.transpose() * sys.D;
  out.Q = Matrix::Zero(p, p);
  out.Q.topLeftCorner(n, n) = sys.B1 * sys.B1.transpose();
  for (const auto& [Ai, B2i] : vs.vertices) {
    Matrix Fi = Matrix::Zero(p, p);
    Fi.topLeftCorner(n, n) = Ai;
    Fi.block(0, n, n, m) = -B2i;
    out.F.push_back(std::move(Fi));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Selectors

struct Selectors {
  Matrix V1;  // m x p = [0 I_m]
  Matrix V2;  // n x p = [I_n 0]
  // per pair j: (V_{j1}, V_{j2}) with V_{j1} of size n_{xi(j)} x p and
  // V_{j2}^T of size n_{kappa(j)} x p
  std::vector<std::pair<Matrix, Matrix>> blocks;
  std::vector<std::pair<int, int>> xiKappa;  // 1-based (xi(j), kappa(j))
};

inline Selectors build_selectors(const BlockStructure& bs, int n, int m) {
  bs.check_dims(n, m);
  const int p = n + m;
  Selectors sel;
  sel.V1 = Matrix::Zero(m, p);
  sel.V1.rightCols(m) = Matrix::Identity(m, m);
  sel.V2 = Matrix::Zero(n, p);
  sel.V2.leftCols(n) = Matrix::Identity(n, n);

  std::vector<int> offset(bs.t() + 1, 0);
  for (int g = 0; g < bs.t(); ++g) offset[g + 1] = offset[g] + bs.colDims[g];

  auto row_group_selector = [&](int g) {  // g 0-based column group
    Matrix V = Matrix::Zero(bs.colDims[g], p);
    V.block(0, offset[g], bs.colDims[g], bs.colDims[g]) =
        Matrix::Identity(bs.colDims[g], bs.colDims[g]);
    return V;
  };

  for (int a = 0; a < bs.t(); ++a)
    for (int b = a + 1; b < bs.t(); ++b) {
      sel.blocks.emplace_back(row_group_selector(a), row_group_selector(b).transpose());
      sel.xiKappa.emplace_back(a + 1, b + 1);
    }
  return sel;
}

// ---------------------------------------------------------------------------
// Standard form

struct AssembleOptions {
  // Optional extra cone W1 - delta*I >= 0 (off by default).
  bool deltaFloor = false;
  double delta = 1e-6;
};

struct StandardForm {
  int p = 0, n = 0, m = 0, M = 0, s = 0, t = 0;
  int Nstar = 0;  // rows of the off-diagonal W1-block selectors
  Matrix R;       // p x p symmetric
  Matrix Qmat;    // p x p symmetric
  std::vector<Matrix> F;
  Matrix V1, V2;
  std::vector<std::pair<Matrix, Matrix>> blockSelectors;
  Matrix Acoup;  // (Nstar + mn + |forbidden|) x p^2
  Matrix Bcoup;  // same rows x mn
  std::vector<std::vector<int>> groupIndexSets;  // 0-based indices into vec(P)
  std::vector<int> groupSizes;
  bool deltaFloor = false;
  double delta = 0.0;

  int coupling_row_offset() const { return Nstar; }
  int num_groups() const { return s * t; }

  /// Coupling slice of a constraint-space vector (the rows carrying
  /// vec(W2^T) - P).
  Vector coupling_slice(const Vector& y) const { return y.segment(Nstar, m * n); }
};

inline StandardForm assemble_standard_form(const LtiSystem& sys, const VertexSet& vs,
                                           const BlockStructure& bs,
                                           const ForbiddenSet& forbidden = {},
                                           const AssembleOptions& opts = {}) {
  const int n = sys.n(), m = sys.m(), p = n + m;
  StandardForm sf;
  sf.n = n;
  sf.m = m;
  sf.p = p;
  sf.M = vs.size();
  sf.s = bs.s();
  sf.t = bs.t();
  sf.deltaFloor = opts.deltaFloor;
  sf.delta = opts.deltaFloor ? opts.delta : 0.0;

  AugmentedData aug = build_augmented(sys, vs);
  sf.R = std::move(aug.R);
  sf.Qmat = std::move(aug.Q);
  sf.F = std::move(aug.F);

  Selectors sel = build_selectors(bs, n, m);
  sf.V1 = std::move(sel.V1);
  sf.V2 = std::move(sel.V2);
  sf.blockSelectors = std::move(sel.blocks);

  sf.Nstar = 0;
  for (const auto& [Vj1, Vj2] : sf.blockSelectors)
    sf.Nstar += static_cast<int>(Vj1.rows() * Vj2.cols());

  for (const auto& [i, j] : forbidden.entries)
    if (i < 1 || i > m || j < 1 || j > n)
      throw std::invalid_argument("ForbiddenSet: index out of range");

  const int rows = sf.Nstar + m * n + static_cast<int>(forbidden.entries.size());
  sf.Acoup = Matrix::Zero(rows, p * p);
  sf.Bcoup = Matrix::Zero(rows, m * n);

  int r0 = 0;
  for (const auto& [Vj1, Vj2] : sf.blockSelectors) {
    const Matrix blk = kron(Vj2.transpose(), Vj1);
    sf.Acoup.block(r0, 0, blk.rows(), blk.cols()) = blk;
    r0 += static_cast<int>(blk.rows());
  }
  sf.Acoup.block(r0, 0, m * n, p * p) = kron(sf.V2, sf.V1);
  sf.Bcoup.block(r0, 0, m * n, m * n) = -Matrix::Identity(m * n, m * n);
  r0 += m * n;
  for (const auto& [i, j] : forbidden.entries) {
    // [V1 W V2^T]_{ij} = W(n+i-1, j-1) -> vec index (j-1)*p + (n+i-1)
    sf.Acoup(r0++, (j - 1) * p + (n + i - 1)) = 1.0;
  }

  // group index sets, lexicographic ell = i + s(j-1)
  std::vector<int> rowOff(sf.s + 1, 0), colOff(sf.t + 1, 0);
  for (int i = 0; i < sf.s; ++i) rowOff[i + 1] = rowOff[i] + bs.rowDims[i];
  for (int j = 0; j < sf.t; ++j) colOff[j + 1] = colOff[j] + bs.colDims[j];
  for (int j = 0; j < sf.t; ++j)
    for (int i = 0; i < sf.s; ++i) {
      std::vector<int> idx;
      idx.reserve(bs.rowDims[i] * bs.colDims[j]);
      for (int c = colOff[j]; c < colOff[j + 1]; ++c)
        for (int r = rowOff[i]; r < rowOff[i + 1]; ++r) idx.push_back(c * m + r);
      sf.groupSizes.push_back(static_cast<int>(idx.size()));
      sf.groupIndexSets.push_back(std::move(idx));
    }
  return sf;
}

inline H2Result h2_cost(const LtiSystem& sys, const Matrix& K) {
  return h2_cost(sys.A, sys.B2, sys.B1, sys.C, sys.D, K);
}

/// w_ell = squared Euclidean norm of v restricted to group ell.
inline Vector group_norms(const Vector& v, const StandardForm& sf) {
  if (v.size() != static_cast<long>(sf.m) * sf.n)
    throw std::invalid_argument("group_norms: length mismatch");
  Vector w = Vector::Zero(sf.num_groups());
  for (int ell = 0; ell < sf.num_groups(); ++ell)
    for (int k : sf.groupIndexSets[ell]) w(ell) += v(k) * v(k);
  return w;
}

}  // namespace gslq

#endif  // GSLQ_MODEL_HPP_
