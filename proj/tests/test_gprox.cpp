#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace gslq;
namespace gt = gslq::testing;

namespace {

// Exhaustive oracle for problem (gamma/mu)||pi(P)||_0 + 1/2||P - varpi||^2
// over ||pi(P)||_0 <= S: enumerate all 2^{st} keep/zero patterns.
double l0_objective(const Vector& P, const Vector& varpi, const StandardForm& sf,
                    double gamma, double mu) {
  return (gamma / mu) * nnz_groups(P, sf) + 0.5 * (P - varpi).squaredNorm();
}

double brute_force_l0_min(const Vector& varpi, const StandardForm& sf, double gamma,
                          double mu, int S) {
  const int st = sf.num_groups();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << st); ++mask) {
    int kept = 0;
    Vector P = Vector::Zero(varpi.size());
    for (int ell = 0; ell < st; ++ell)
      if (mask & (1u << ell)) {
        ++kept;
        for (int k : sf.groupIndexSets[ell]) P(k) = varpi(k);
      }
    if (kept > S) continue;
    best = std::min(best, l0_objective(P, varpi, sf, gamma, mu));
  }
  return best;
}

StandardForm two_group_form() {
  // m=3, n=1, row groups (2,1): exactly two groups of sizes 2 and 1
  Matrix A = -Matrix::Identity(1, 1);
  Matrix B1 = Matrix::Identity(1, 1);
  Matrix B2 = Matrix::Ones(1, 3);
  Matrix C = Matrix::Zero(4, 1);
  C(0, 0) = 1;
  Matrix D = Matrix::Zero(4, 3);
  D.bottomRows(3) = Matrix::Identity(3, 3);
  const LtiSystem sys(A, B1, B2, C, D);
  return assemble_standard_form(sys, VertexSet::certain(sys),
                                BlockStructure{{2, 1}, {1}});
}

}  // namespace

TEST(GroupL0Prox, ZeroInputGivesZero) {
  const StandardForm sf = gt::example1_standard_form();
  const Vector out = group_l0_prox(Vector::Zero(6), sf, {1.0, 2.0, -1});
  EXPECT_EQ(out.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GroupL0Prox, TwoGroupThresholdCase) {
  const StandardForm sf = two_group_form();
  ASSERT_EQ(sf.num_groups(), 2);
  ASSERT_EQ(sf.groupSizes[0], 2);
  ASSERT_EQ(sf.groupSizes[1], 1);
  // norms^2 = (4, 0.5); threshold 2*gamma/mu = 1
  Vector varpi(3);
  varpi << 2.0, 0.0, std::sqrt(0.5);
  const GroupProxParams params{1.0, 2.0, 2};
  const Vector out = group_l0_prox(varpi, sf, params);
  EXPECT_DOUBLE_EQ(out(0), 2.0);
  EXPECT_DOUBLE_EQ(out(1), 0.0);
  EXPECT_DOUBLE_EQ(out(2), 0.0);
  // agreement with the exhaustive pattern search
  const double obj = l0_objective(out, varpi, sf, 1.0, 2.0);
  EXPECT_NEAR(obj, brute_force_l0_min(varpi, sf, 1.0, 2.0, 2), 1e-12);
}

TEST(GroupL0Prox, ExhaustiveEquivalenceOnRandomInstances) {
  std::mt19937 rng(307);
  std::uniform_real_distribution<double> ug(0.05, 2.0), um(0.5, 4.0);
  for (int rep = 0; rep < 200; ++rep) {
    const auto inst = gt::random_feasible_instance(rng);
    const auto& sf = inst.sf;
    if (sf.num_groups() > 12) continue;
    const Vector varpi = gt::random_matrix(rng, sf.m * sf.n, 1, 1.5);
    const double gamma = ug(rng), mu = um(rng);
    std::uniform_int_distribution<int> us(0, sf.num_groups());
    const int S = us(rng);
    const Vector out = group_l0_prox(varpi, sf, {gamma, mu, S});
    // kept coordinates are bit-equal to the input
    for (long k = 0; k < out.size(); ++k)
      EXPECT_TRUE(out(k) == 0.0 || out(k) == varpi(k));
    EXPECT_NEAR(l0_objective(out, varpi, sf, gamma, mu),
                brute_force_l0_min(varpi, sf, gamma, mu, S), 1e-12);
  }
}

TEST(GroupL0Prox, BudgetSemantics) {
  const StandardForm sf = gt::example1_standard_form();
  std::mt19937 rng(311);
  const Vector varpi = 3.0 * gt::random_matrix(rng, 6, 1).cwiseAbs() +
                       Vector::Ones(6);  // all groups above threshold
  for (int S = 0; S <= 4; ++S) {
    const Vector out = group_l0_prox(varpi, sf, {0.01, 1.0, S});
    EXPECT_LE(nnz_groups(out, sf), S);
  }
  EXPECT_EQ(group_l0_prox(varpi, sf, {0.01, 1.0, 0}).cwiseAbs().maxCoeff(), 0.0);
}

TEST(GroupL0Prox, ExactThresholdBoundaryIsZeroed) {
  const StandardForm sf = two_group_form();
  // group 2 has squared norm exactly 2*gamma/mu = 4
  Vector varpi(3);
  varpi << 10.0, 0.0, 2.0;
  const Vector out = group_l0_prox(varpi, sf, {2.0, 1.0, -1});
  EXPECT_DOUBLE_EQ(out(0), 10.0);
  EXPECT_DOUBLE_EQ(out(2), 0.0);  // w = 4 is not > 4
}

TEST(GroupL0Prox, IdempotentAndSupportShrinking) {
  std::mt19937 rng(313);
  for (int rep = 0; rep < 50; ++rep) {
    const auto inst = gt::random_feasible_instance(rng);
    const auto& sf = inst.sf;
    const Vector varpi = gt::random_matrix(rng, sf.m * sf.n, 1, 2.0);
    const GroupProxParams params{0.3, 1.7, std::min(3, sf.num_groups())};
    const Vector once = group_l0_prox(varpi, sf, params);
    const Vector twice = group_l0_prox(once, sf, params);
    EXPECT_LE((once - twice).cwiseAbs().maxCoeff(), 0.0);
    for (long k = 0; k < once.size(); ++k)
      if (varpi(k) == 0.0) EXPECT_EQ(once(k), 0.0);
  }
}

// --- group_l1_prox -----------------------------------------------------------

TEST(GroupL1Prox, ZeroThresholdIsIdentity) {
  std::mt19937 rng(401);
  const StandardForm sf = gt::example1_standard_form();
  const Vector varpi = gt::random_matrix(rng, 6, 1);
  EXPECT_LE((group_l1_prox(varpi, sf, 0.0) - varpi).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(GroupL1Prox, AnalyticShrinkage) {
  const StandardForm sf = two_group_form();
  Vector varpi = Vector::Zero(3);
  varpi(2) = 3.0;  // single-entry group with norm 3
  const Vector out = group_l1_prox(varpi, sf, 1.0);
  EXPECT_NEAR(out(2), 2.0, 1e-14);  // scaled by 2/3
}

TEST(GroupL1Prox, SubgradientOptimalityResidual) {
  std::mt19937 rng(409);
  for (int rep = 0; rep < 50; ++rep) {
    const auto inst = gt::random_feasible_instance(rng);
    const auto& sf = inst.sf;
    const Vector varpi = gt::random_matrix(rng, sf.m * sf.n, 1, 2.0);
    const double thr = 0.4;
    const Vector out = group_l1_prox(varpi, sf, thr);
    const Vector w = group_norms(out, sf);
    for (int ell = 0; ell < sf.num_groups(); ++ell) {
      Vector g(sf.groupSizes[ell]), v(sf.groupSizes[ell]);
      int idx = 0;
      for (int k : sf.groupIndexSets[ell]) {
        g(idx) = out(k);
        v(idx) = varpi(k);
        ++idx;
      }
      if (w(ell) > 0.0) {
        // stationarity: out - varpi + thr * out/||out|| = 0
        const Vector resid = g - v + thr * g / g.norm();
        EXPECT_LE(resid.cwiseAbs().maxCoeff(), 1e-10);
      } else {
        EXPECT_LE(v.norm(), thr + 1e-10);
      }
    }
  }
}
