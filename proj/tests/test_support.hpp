// Shared fixtures: the two benchmark systems with their published gains, and
// random instance generators used across the suites.
#ifndef GSLQ_TEST_SUPPORT_HPP_
#define GSLQ_TEST_SUPPORT_HPP_

#include <random>

#include "gslq/gslq.hpp"

namespace gslq::testing {

// --- benchmark system 1: 3-state chain, 2 inputs, 2x2 gain blocks ----------

inline LtiSystem example1_system() {
  Matrix A(3, 3), B1 = Matrix::Identity(3, 3), B2(3, 2), C(3, 3), D(3, 2);
  A << 0, 1, 0, 0, 0, 1, 0, 0, 0;
  B2 << 0.9315, 0.7939, 0.9722, 0.1061, 0.5317, 0.7750;
  C.setZero();
  C(0, 0) = 1;
  D << 0, 0, 1, 0, 0, 1;
  return LtiSystem(A, B1, B2, C, D);
}

inline BlockStructure example1_blocks() { return BlockStructure{{1, 1}, {2, 1}}; }

inline StandardForm example1_standard_form() {
  const LtiSystem sys = example1_system();
  return assemble_standard_form(sys, VertexSet::certain(sys), example1_blocks());
}

// reference PALM solution matrix
inline Matrix example1_palm_W() {
  Matrix W(5, 5);
  W << 1.428, -0.940, 0, 0.722, 0.260,
      -0.940, 2.440, 0, 1.228, 0.733,
      0, 0, 1.478, 0, 1.278,
      0.722, 1.228, 0, 1.958, 0.976,
      0.260, 0.733, 1.278, 0.976, 1.601;
  return W;
}

inline Matrix example1_admm_W() {
  Matrix W(5, 5);
  W << 6.346, -2.709, 0, 0.200, 0,
      -2.709, 1.172, 0, 1.115, 0,
      0, 0, 0.759, 0, 1.026,
      0.200, 1.115, 0, 7.861, 3.460,
      0, 0, 1.026, 3.460, 2.615;
  return W;
}

inline Matrix example1_K1() {
  Matrix K(2, 3);
  K << 1.121, 0.935, 0, 0.508, 0.496, 0.865;
  return K;
}

inline Matrix example1_K2() {
  Matrix K(2, 3);
  K << 32.934, 77.077, 0, 0, 0, 1.354;
  return K;
}

inline Matrix example1_K3() {
  Matrix K(2, 3);
  K << 65.688, 169.089, 0.284, 0, 0, 1.095;
  return K;
}

inline Matrix example1_K4() {
  Matrix K(2, 3);
  K << 5.489, 1.946, 0, 0, 0, 1.815;
  return K;
}

// --- benchmark system 2: 5 states, 2 inputs, 2x3 gain blocks ---------------

inline LtiSystem example2_system() {
  Matrix A(5, 5), B1 = Matrix::Identity(5, 5), B2(5, 2), C(5, 5), D(5, 2);
  A << 0.3079, 0.1879, 0.1797, 0.2935, 0.6537,
      0.5194, 0.2695, 0.5388, 0.9624, 0.5366,
      0.7683, 0.4962, 0.2828, 0.9132, 0.9957,
      0.7892, 0.7391, 0.7609, 0.5682, 0.1420,
      0.8706, 0.1950, 0.2697, 0.4855, 0.9753;
  B2 << 0.6196, 0.6414, 0.7205, 0.9233, 0.2951, 0.8887, 0.6001, 0.6447, 0.7506,
      0.2956;
  C.setZero();
  C(0, 0) = 1;
  C(1, 1) = 1;
  D.setZero();
  D(2, 0) = 1;
  D(3, 1) = 1;
  return LtiSystem(A, B1, B2, C, D);
}

inline BlockStructure example2_blocks() { return BlockStructure{{1, 1}, {2, 2, 1}}; }

inline StandardForm example2_standard_form() {
  const LtiSystem sys = example2_system();
  return assemble_standard_form(sys, VertexSet::certain(sys), example2_blocks());
}

inline Matrix example2_sf_gain() {
  Matrix K(2, 5);
  K << 1.072, -0.211, 0.017, -0.434, 3.825, -0.310, 0.595, 0.695, 2.047, 0;
  return K;
}

inline Matrix example2_dft_k22_gain() {
  Matrix K(2, 5);
  K << 1.449, 0.208, 2.855, 4.266, 1.961, -0.375, 0.430, 0, 0, -0.987;
  return K;
}

inline Matrix example2_dft_k13_gain() {
  Matrix K(2, 5);
  K << 0.713, -0.950, -0.268, -0.411, 0, -0.022, 1.219, 0.890, 1.482, 9.626;
  return K;
}

// --- random instances -------------------------------------------------------

inline Matrix random_matrix(std::mt19937& rng, int rows, int cols, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix M(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) M(r, c) = scale * u(rng);
  return M;
}

inline Matrix random_symmetric(std::mt19937& rng, int n, double scale = 1.0) {
  return symmetrized(random_matrix(rng, n, n, scale));
}

inline Matrix random_psd(std::mt19937& rng, int n, double scale = 1.0) {
  const Matrix G = random_matrix(rng, n, n, scale);
  return G * G.transpose();
}

inline BlockStructure random_blocks(std::mt19937& rng, int n, int m) {
  std::uniform_int_distribution<int> coin(0, 1);
  auto split = [&](int total) {
    std::vector<int> dims;
    int left = total;
    while (left > 0) {
      int d = 1 + (coin(rng) && left > 1 ? 1 : 0);
      d = std::min(d, left);
      dims.push_back(d);
      left -= d;
    }
    return dims;
  };
  return BlockStructure{split(m), split(n)};
}

/// Strictly feasible instance: W = I satisfies W > 0 and
/// -(A_i + A_i^T + B1 B1^T) > 0 by construction, so Slater's condition holds
/// for the prox subproblem.
struct FeasibleInstance {
  LtiSystem sys;
  VertexSet vs;
  BlockStructure bs;
  StandardForm sf;
};

inline FeasibleInstance random_feasible_instance(std::mt19937& rng, int maxP = 8,
                                                 int maxM = 3) {
  std::uniform_int_distribution<int> un(1, 5), um(1, 3), uM(1, maxM);
  int n = un(rng), m = um(rng);
  while (n + m > maxP) {
    n = un(rng);
    m = um(rng);
  }
  const int Mv = uM(rng);

  FeasibleInstance inst;
  const Matrix B1 = 0.3 * Matrix::Identity(n, n);
  Matrix Cw = Matrix::Zero(n + m, n);
  Cw.topLeftCorner(n, n) = Matrix::Identity(n, n);
  Matrix Dw = Matrix::Zero(n + m, m);
  Dw.bottomRightCorner(m, m) = Matrix::Identity(m, m);
  const Matrix A0 = -2.0 * Matrix::Identity(n, n) + 0.1 * random_matrix(rng, n, n);
  const Matrix B20 = random_matrix(rng, n, m);
  inst.sys = LtiSystem(A0, B1, B20, Cw, Dw);

  inst.vs.vertices.clear();
  for (int i = 0; i < Mv; ++i) {
    const Matrix Ai = -2.0 * Matrix::Identity(n, n) + 0.1 * random_matrix(rng, n, n);
    const Matrix B2i = random_matrix(rng, n, m);
    inst.vs.vertices.emplace_back(Ai, B2i);
  }
  inst.bs = random_blocks(rng, n, m);
  inst.sf = assemble_standard_form(inst.sys, inst.vs, inst.bs);
  return inst;
}

}  // namespace gslq::testing

#endif  // GSLQ_TEST_SUPPORT_HPP_
