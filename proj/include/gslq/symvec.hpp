// Symmetric-vectorization calculus, PSD projection, spectral norms and
// Lyapunov/H2 evaluation. Shared dense linear-algebra kernel; everything here
// is desk-scale and stateless.
//
// svec uses the orthonormal convention: off-diagonal entries carry a sqrt(2)
// factor so that <svec(A),svec(B)> = <A,B>_F and D^T D = I. Consequently the
// projection onto the PSD cone in svec coordinates is exactly
// svec . psd_project . smat.
#ifndef GSLQ_SYMVEC_HPP_
#define GSLQ_SYMVEC_HPP_

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace gslq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Numerical failure (eigensolver breakdown, iteration cap, ...) carrying the
/// best estimate available when the failure occurred.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double best_estimate)
      : std::runtime_error(what), best_estimate_(best_estimate) {}
  double best_estimate() const { return best_estimate_; }

 private:
  double best_estimate_;
};

inline Matrix symmetrized(const Matrix& S) { return 0.5 * (S + S.transpose()); }

inline Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

/// Column-major vectorization.
inline Vector vec(const Matrix& A) {
  return Eigen::Map<const Vector>(A.data(), A.size());
}

inline Matrix unvec(const Vector& v, int rows, int cols) {
  if (v.size() != static_cast<long>(rows) * cols)
    throw std::invalid_argument("unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

/// vec -> symmetrized square matrix view (used for iterate vectors that live
/// in R^{p^2} but represent symmetric matrices).
inline Matrix sym_from_vec(const Vector& v, int n) {
  return symmetrized(unvec(v, n, n));
}

/// Duplication/elimination pair between S^n and R^{n(n+1)/2}, orthonormal
/// scaling. T = D^T, T*D = I and D^T D = I.
struct SymVecMap {
  int dim = 0;
  Matrix D;  // n^2 x n(n+1)/2
  Matrix T;  // n(n+1)/2 x n^2

  int vec_dim() const { return dim * dim; }
  int svec_dim() const { return dim * (dim + 1) / 2; }
};

inline SymVecMap build_symvec(int n) {
  if (n < 1) throw std::invalid_argument("build_symvec: n must be >= 1");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  SymVecMap sv;
  sv.dim = n;
  sv.D = Matrix::Zero(n * n, n * (n + 1) / 2);
  int k = 0;
  for (int c = 0; c < n; ++c) {
    for (int r = c; r < n; ++r, ++k) {
      if (r == c) {
        sv.D(c * n + r, k) = 1.0;
      } else {
        sv.D(c * n + r, k) = inv_sqrt2;
        sv.D(r * n + c, k) = inv_sqrt2;
      }
    }
  }
  sv.T = sv.D.transpose();
  return sv;
}

/// svec of a (symmetrized) square matrix; column-major lower triangle,
/// off-diagonals scaled by sqrt(2).
inline Vector svec(const Matrix& S) {
  const int n = static_cast<int>(S.rows());
  if (S.cols() != n) throw std::invalid_argument("svec: matrix not square");
  const Matrix A = symmetrized(S);
  const double sqrt2 = std::sqrt(2.0);
  Vector v(n * (n + 1) / 2);
  int k = 0;
  for (int c = 0; c < n; ++c)
    for (int r = c; r < n; ++r, ++k) v(k) = (r == c) ? A(r, c) : sqrt2 * A(r, c);
  return v;
}

inline Matrix smat(const Vector& v) {
  // infer n from n(n+1)/2
  const int len = static_cast<int>(v.size());
  const int n = static_cast<int>((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0 + 0.5);
  if (n * (n + 1) / 2 != len) throw std::invalid_argument("smat: bad length");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Matrix S(n, n);
  int k = 0;
  for (int c = 0; c < n; ++c)
    for (int r = c; r < n; ++r, ++k) {
      const double x = (r == c) ? v(k) : inv_sqrt2 * v(k);
      S(r, c) = x;
      S(c, r) = x;
    }
  return S;
}

/// Nearest PSD matrix in Frobenius norm: eigendecomposition with negative
/// eigenvalues clamped to zero (no tolerance band).
inline Matrix psd_project(const Matrix& S) {
  const Matrix A = symmetrized(S);
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  if (es.info() != Eigen::Success)
    throw NumericalError("psd_project: eigensolver failed", 0.0);
  Vector lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

/// Largest singular value via power iteration on A^T A (all-ones start, one
/// safeguard restart). Relative tolerance 1e-10 on the estimate.
inline double spectral_norm(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  const Matrix& G = A;
  const bool wide = A.rows() < A.cols();
  // iterate on the smaller Gram side
  auto apply = [&](const Vector& v) -> Vector {
    if (wide) return G * (G.transpose() * v);
    return G.transpose() * (G * v);
  };
  const int dim = static_cast<int>(wide ? A.rows() : A.cols());
  const double rtol = 1e-10;
  const int cap = 20000;

  auto run = [&](Vector v) -> std::pair<double, bool> {
    double nv = v.norm();
    if (nv == 0.0) return {0.0, true};
    v /= nv;
    double est = 0.0;
    for (int it = 0; it < cap; ++it) {
      Vector w = apply(v);
      const double lam = v.dot(w);  // Rayleigh quotient for sigma^2
      const double nw = w.norm();
      if (nw == 0.0) return {0.0, true};
      v = w / nw;
      if (it > 0 && std::abs(lam - est) <= rtol * std::max(lam, 1e-300))
        return {std::sqrt(std::max(lam, 0.0)), true};
      est = lam;
    }
    return {std::sqrt(std::max(est, 0.0)), false};
  };

  auto [val, ok] = run(Vector::Ones(dim));
  if (ok) return val;
  // deterministic alternative start
  Vector v2(dim);
  for (int i = 0; i < dim; ++i) {
    const double s = std::sin((i + 1) * 12.9898) * 43758.5453;
    v2(i) = s - std::floor(s) + 0.5;
  }
  auto [val2, ok2] = run(v2);
  if (ok2) return val2;
  throw NumericalError("spectral_norm: power iteration did not converge",
                       std::max(val, val2));
}

/// Solve Acl*W + W*Acl^T + Q = 0 for stable Acl via the Kronecker-vectorized
/// dense linear system. Throws when Acl is not Hurwitz.
inline Matrix lyapunov_solve(const Matrix& Acl, const Matrix& Qsym) {
  const int n = static_cast<int>(Acl.rows());
  if (Acl.cols() != n || Qsym.rows() != n || Qsym.cols() != n)
    throw std::invalid_argument("lyapunov_solve: dimension mismatch");
  Eigen::EigenSolver<Matrix> es(Acl);
  const double abscissa = es.eigenvalues().real().maxCoeff();
  if (abscissa >= 0.0) {
    std::ostringstream oss;
    oss << "lyapunov_solve: unstable Acl, eigenvalue real part " << abscissa;
    throw std::invalid_argument(oss.str());
  }
  const Matrix I = Matrix::Identity(n, n);
  Matrix M = kron(I, Acl) + kron(Acl, I);
  Vector rhs = -vec(symmetrized(Qsym));
  Vector w = M.partialPivLu().solve(rhs);
  Matrix W = sym_from_vec(w, n);
  const double res = (Acl * W + W * Acl.transpose() + symmetrized(Qsym)).norm();
  const double qn = Qsym.norm();
  if (qn > 0.0 && res > 1e-8 * qn)
    throw NumericalError("lyapunov_solve: residual too large", res / qn);
  return W;
}

struct H2Result {
  double cost = std::numeric_limits<double>::infinity();
  double abscissa = 0.0;
  bool stable() const { return abscissa < 0.0; }
};

/// H2 cost Tr((C-DK) Wc (C-DK)^T) of u=-Kx with Wc the closed-loop
/// controllability Gramian; +inf when A - B2*K is not Hurwitz.
inline H2Result h2_cost(const Matrix& A, const Matrix& B2, const Matrix& B1,
                        const Matrix& C, const Matrix& D, const Matrix& K) {
  H2Result out;
  const Matrix Acl = A - B2 * K;
  Eigen::EigenSolver<Matrix> es(Acl);
  out.abscissa = es.eigenvalues().real().maxCoeff();
  if (out.abscissa >= 0.0) return out;
  const Matrix Wc = lyapunov_solve(Acl, B1 * B1.transpose());
  const Matrix E = C - D * K;
  out.cost = (E * Wc * E.transpose()).trace();
  return out;
}

}  // namespace gslq

#endif  // GSLQ_SYMVEC_HPP_
