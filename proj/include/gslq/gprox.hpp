// Proximal operators for group sparsity on vec(P): exact group-l0 hard
// thresholding with an optional budget S on the number of nonzero blocks, and
// the group-l1 block soft threshold used by the convex baseline.
#ifndef GSLQ_GPROX_HPP_
#define GSLQ_GPROX_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gslq/model.hpp"

namespace gslq {

struct GroupProxParams {
  double gamma = 1.0;       // sparsity weight, > 0
  double stepWeight = 1.0;  // mu (PALM) or beta (ADMM), > 0
  int budget = -1;          // S; negative means S = st (no budget)
};

/// Exact solution of  min (gamma/mu)||pi(P)||_0 + 1/2 ||P - varpi||^2 over
/// ||pi(P)||_0 <= S: keep, among the S groups of largest squared norm, exactly
/// those with w_ell > 2*gamma/mu; kept coordinates are copied verbatim.
/// Ties in the top-S selection break toward the lower group index.
inline Vector group_l0_prox(const Vector& varpi, const StandardForm& sf,
                            const GroupProxParams& params) {
  const int st = sf.num_groups();
  int S = params.budget < 0 ? st : std::min(params.budget, st);
  const Vector w = group_norms(varpi, sf);
  const double threshold = 2.0 * params.gamma / params.stepWeight;

  std::vector<int> order(st);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return w(a) > w(b); });

  Vector out = Vector::Zero(varpi.size());
  for (int k = 0; k < S; ++k) {
    const int ell = order[k];
    if (w(ell) > threshold) {
      for (int idx : sf.groupIndexSets[ell]) out(idx) = varpi(idx);
    }
  }
  return out;
}

/// Blockwise soft threshold: each group scaled by max(0, 1 - thr/||group||).
inline Vector group_l1_prox(const Vector& varpi, const StandardForm& sf,
                            double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("group_l1_prox: threshold < 0");
  Vector out = Vector::Zero(varpi.size());
  const Vector w = group_norms(varpi, sf);
  for (int ell = 0; ell < sf.num_groups(); ++ell) {
    const double nrm = std::sqrt(w(ell));
    if (nrm <= threshold) continue;  // zero groups stay zero
    const double scale = 1.0 - threshold / nrm;
    for (int idx : sf.groupIndexSets[ell]) out(idx) = scale * varpi(idx);
  }
  return out;
}

}  // namespace gslq

#endif  // GSLQ_GPROX_HPP_
