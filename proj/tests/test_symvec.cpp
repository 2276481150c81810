#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace gslq;
using gslq::testing::random_matrix;
using gslq::testing::random_psd;
using gslq::testing::random_symmetric;

TEST(SymVec, DimensionOne) {
  const SymVecMap sv = build_symvec(1);
  ASSERT_EQ(sv.D.rows(), 1);
  ASSERT_EQ(sv.D.cols(), 1);
  EXPECT_DOUBLE_EQ(sv.D(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(sv.T(0, 0), 1.0);
}

TEST(SymVec, DimensionTwoOffDiagonalScaling) {
  const SymVecMap sv = build_symvec(2);
  ASSERT_EQ(sv.D.cols(), 3);
  // the off-diagonal svec coordinate feeds two vec slots with 1/sqrt(2)
  int offCol = 1;  // ordering: (0,0), (1,0), (1,1)
  Vector col = sv.D.col(offCol);
  std::vector<double> nz;
  for (int i = 0; i < 4; ++i)
    if (col(i) != 0.0) nz.push_back(col(i));
  ASSERT_EQ(nz.size(), 2u);
  EXPECT_NEAR(nz[0], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(nz[1], 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(SymVec, DuplicationEliminationIdentities) {
  for (int n : {1, 2, 3, 5, 8, 13, 20}) {
    const SymVecMap sv = build_symvec(n);
    const int r = sv.svec_dim();
    EXPECT_LE((sv.T * sv.D - Matrix::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((sv.D.transpose() * sv.D - Matrix::Identity(r, r)).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(SymVec, NormPreservation) {
  std::mt19937 rng(7);
  const Matrix S = random_symmetric(rng, 4);
  EXPECT_NEAR(svec(S).norm(), S.norm(), 1e-12);
  const SymVecMap sv = build_symvec(4);
  EXPECT_LE((sv.D * svec(S) - vec(S)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((smat(svec(S)) - S).cwiseAbs().maxCoeff(), 1e-12);
}

// --- psd_project -------------------------------------------------------------

TEST(PsdProject, FixesPsdInput) {
  std::mt19937 rng(11);
  const Matrix P = random_psd(rng, 4);
  EXPECT_LE((psd_project(P) - P).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PsdProject, AnalyticClamp) {
  Matrix S = Matrix::Zero(2, 2);
  S(0, 0) = 1;
  S(1, 1) = -1;
  const Matrix P = psd_project(S);
  EXPECT_NEAR(P(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(P(1, 1), 0.0, 1e-14);
  EXPECT_NEAR(P(0, 1), 0.0, 1e-14);
}

// Independent oracle: minimize ||G G^T - S||_F^2 over the factor G by plain
// gradient descent with backtracking. All local minima of this factorized
// objective are global, so a generic start finds the projection.
namespace {
Matrix psd_projection_oracle(const Matrix& S) {
  const int n = static_cast<int>(S.rows());
  std::mt19937 rng(1234);
  Matrix G = 0.5 * Matrix::Identity(n, n) +
             0.01 * gslq::testing::random_matrix(rng, n, n);
  double step = 0.1;
  double obj = (G * G.transpose() - S).squaredNorm();
  for (int it = 0; it < 200000; ++it) {
    const Matrix R = G * G.transpose() - S;
    const Matrix grad = 4.0 * R * G;
    Matrix Gn = G - step * grad;
    double objn = (Gn * Gn.transpose() - S).squaredNorm();
    int bt = 0;
    while (objn > obj && bt < 60) {
      step *= 0.5;
      Gn = G - step * grad;
      objn = (Gn * Gn.transpose() - S).squaredNorm();
      ++bt;
    }
    if (grad.norm() * step < 1e-14) break;
    G = Gn;
    obj = objn;
    step *= 1.1;
  }
  return G * G.transpose();
}
}  // namespace

TEST(PsdProject, MatchesFactorizedLocalSearchOracle) {
  std::mt19937 rng(23);
  const Matrix S = random_symmetric(rng, 5, 2.0);
  const Matrix P = psd_project(S);
  const Matrix Q = psd_projection_oracle(symmetrized(S));
  EXPECT_LE((P - Q).norm(), 1e-6);
}

TEST(PsdProject, IdempotentAndContractive) {
  std::mt19937 rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix S = random_symmetric(rng, 5, 3.0);
    const Matrix P = psd_project(S);
    EXPECT_LE((psd_project(P) - P).cwiseAbs().maxCoeff(), 1e-10);
    const Matrix Q = random_psd(rng, 5);
    EXPECT_LE((P - Q).norm(), (symmetrized(S) - Q).norm() + 1e-12);
  }
}

// --- spectral_norm -----------------------------------------------------------

TEST(SpectralNorm, IdentityAndRankOne) {
  EXPECT_NEAR(spectral_norm(Matrix::Identity(6, 6)), 1.0, 1e-10);
  Vector u(3), v(4);
  u << 2, 0, 0;
  v << 0, 3, 0, 0;
  EXPECT_NEAR(spectral_norm(u * v.transpose()), 6.0, 1e-9);
  EXPECT_DOUBLE_EQ(spectral_norm(Matrix::Zero(3, 3)), 0.0);
}

TEST(SpectralNorm, MatchesSvdOracle) {
  std::mt19937 rng(47);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix A = random_matrix(rng, 8, 5, 2.0);
    Eigen::JacobiSVD<Matrix> svd(A);
    EXPECT_NEAR(spectral_norm(A), svd.singularValues()(0), 1e-8);
  }
}

// --- lyapunov_solve ----------------------------------------------------------

TEST(Lyapunov, AnalyticCases) {
  const Matrix W = lyapunov_solve(-Matrix::Identity(3, 3), Matrix::Identity(3, 3));
  EXPECT_LE((W - 0.5 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);

  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = -1;
  A(1, 1) = -2;
  const Matrix W2 = lyapunov_solve(A, Matrix::Identity(2, 2));
  EXPECT_NEAR(W2(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(W2(1, 1), 0.25, 1e-12);
}

TEST(Lyapunov, ResidualOnRandomStableInstances) {
  std::mt19937 rng(59);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + rep % 9;  // up to 10
    Matrix A = random_matrix(rng, n, n);
    const double a = Eigen::EigenSolver<Matrix>(A).eigenvalues().real().maxCoeff();
    A -= (a + 0.5) * Matrix::Identity(n, n);
    const Matrix Q = random_psd(rng, n);
    const Matrix W = lyapunov_solve(A, Q);
    const double res = (A * W + W * A.transpose() + Q).norm();
    EXPECT_LE(res, 1e-8 * Q.norm());
  }
}

TEST(Lyapunov, RejectsUnstable) {
  Matrix A = Matrix::Identity(2, 2);
  try {
    lyapunov_solve(A, Matrix::Identity(2, 2));
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("eigenvalue real part"), std::string::npos);
  }
}

// --- h2_cost -----------------------------------------------------------------

TEST(H2Cost, ZeroOutputGivesZeroCost) {
  const LtiSystem sys = gslq::testing::example1_system();
  const Matrix C0 = Matrix::Zero(sys.q(), sys.n());
  const Matrix D0 = Matrix::Zero(sys.q(), sys.m());
  const Matrix K = gslq::testing::example1_K1();
  const H2Result r = h2_cost(sys.A, sys.B2, sys.B1, C0, D0, K);
  ASSERT_TRUE(r.stable());
  EXPECT_NEAR(r.cost, 0.0, 1e-12);
}

TEST(H2Cost, ReferenceGainStabilizesAndRespectsBound) {
  const LtiSystem sys = gslq::testing::example1_system();
  const Matrix K = gslq::testing::example1_K1();
  const H2Result r = h2_cost(sys.A, sys.B2, sys.B1, sys.C, sys.D, K);
  ASSERT_LT(r.abscissa, 0.0);
  // <R,W> of the reference solution matrix bounds the H2 cost from above
  const Matrix W = gslq::testing::example1_palm_W();
  const StandardForm sf = gslq::testing::example1_standard_form();
  const double rw = (sf.R * W).trace();
  EXPECT_NEAR(rw, 4.987, 5e-3);
  EXPECT_LE(r.cost, rw);
}

TEST(H2Cost, UnstableGainReportsInfinity) {
  const LtiSystem sys = gslq::testing::example1_system();
  const Matrix K = Matrix::Zero(2, 3);  // A is a chain of integrators
  const H2Result r = h2_cost(sys.A, sys.B2, sys.B1, sys.C, sys.D, K);
  EXPECT_FALSE(r.stable());
  EXPECT_TRUE(std::isinf(r.cost));
}
