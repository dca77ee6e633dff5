// SPDX-License-Identifier: Apache-2.0
#ifndef MULAN_BASELINES_HPP
#define MULAN_BASELINES_HPP

#include <cmath>
#include <string>
#include <vector>

#include "mulan/eig.hpp"
#include "mulan/toeplitz.hpp"
#include "mulan/types.hpp"

namespace mulan {

/// Estimated two-channel discrete-time filter pair. `residual` is the
/// criterion value at the solution (singular value for the cross-relation,
/// final objective for the LASSO variant).
struct DiscreteFilterPair {
  RealVector h1, h2;
  double residual = 0.0;
  std::string normalization;            // "unit-joint-norm" or "h1-first-tap"
  std::vector<double> objective_trace;  // LASSO only: objective per iteration
};

namespace detail {

inline void check_cr_inputs(const RealSignal& x1, const RealSignal& x2, int l) {
  if (l < 1) throw config_error("baseline: need L >= 1");
  if (x1.sample_rate != x2.sample_rate) throw config_error("baseline: sample rates differ");
  if (x1.size() != x2.size()) throw config_error("baseline: channel lengths differ");
  if (x1.size() < 2 * l) throw config_error("baseline: need N >= 2L samples");
  if (x1.samples.norm() == 0.0 || x2.samples.norm() == 0.0)
    throw config_error("baseline: zero signal");
}

}  // namespace detail

/// Cross-relation estimate: minimize ||Toep(x2) h1 - Toep(x1) h2|| over the
/// unit joint norm ||h1||^2 + ||h2||^2 = 1, i.e. the minimum right singular
/// vector of the stacked matrix [Toep(x2), -Toep(x1)].
inline DiscreteFilterPair cr_solve(const RealSignal& x1, const RealSignal& x2, int l) {
  detail::check_cr_inputs(x1, x2, l);
  const Eigen::Index rows = x1.size() - l + 1;
  RealMatrix a(rows, 2 * l);
  a.leftCols(l) = toeplitz_full(x2.samples, l);
  a.rightCols(l) = -toeplitz_full(x1.samples, l);
  auto [v, sigma] = min_right_singular_vector(a);
  DiscreteFilterPair out;
  out.h1 = v.head(l);
  out.h2 = v.tail(l);
  out.residual = sigma;
  out.normalization = "unit-joint-norm";
  return out;
}

/// Sparse cross-relation (LASSO form): the quadratic criterion of cr_solve
/// plus lambda * (||h1||_1 + ||h2||_1), anchored by h1(0) = 1. Solved with a
/// monotone accelerated proximal-gradient iteration; the step is 1/Lk with Lk
/// an upper curvature bound from power iteration. Returns the objective value
/// as the residual.
inline DiscreteFilterPair lasso_solve(const RealSignal& x1, const RealSignal& x2, int l,
                                      double lambda, int iters = 5000,
                                      double rel_tol = 1e-10) {
  detail::check_cr_inputs(x1, x2, l);
  if (lambda < 0.0) throw config_error("lasso_solve: lambda must be nonnegative");
  if (iters < 1) throw config_error("lasso_solve: need at least one iteration");

  const Eigen::Index rows = x1.size() - l + 1;
  RealMatrix a(rows, 2 * l);
  a.leftCols(l) = toeplitz_full(x2.samples, l);
  a.rightCols(l) = -toeplitz_full(x1.samples, l);
  const RealVector anchor = a.col(0);  // h1(0) = 1 contribution
  const RealMatrix a_free = a.rightCols(2 * l - 1);

  // quadratic pieces: f(g) = g'Gg + 2 g'c + ||anchor||^2
  const RealMatrix gram = a_free.transpose() * a_free;
  const RealVector lin = a_free.transpose() * anchor;
  const double offset = anchor.squaredNorm();

  auto smooth_value = [&](const RealVector& g) {
    return g.dot(gram * g) + 2.0 * g.dot(lin) + offset;
  };
  auto objective = [&](const RealVector& g) {
    return smooth_value(g) + lambda * (1.0 + g.lpNorm<1>());
  };

  // curvature bound 2*lambda_max(G) by power iteration
  RealVector p = RealVector::Ones(gram.rows()).normalized();
  double lam_max = 0.0;
  for (int i = 0; i < 64; ++i) {
    p = gram * p;
    lam_max = p.norm();
    if (lam_max == 0.0) break;
    p /= lam_max;
  }
  const double step = 1.0 / std::max(2.0 * lam_max * 1.02, 1e-300);

  auto prox_step = [&](const RealVector& from) {
    RealVector g = from - step * 2.0 * (gram * from + lin);
    const double cut = step * lambda;
    for (Eigen::Index i = 0; i < g.size(); ++i)
      g(i) = (g(i) > cut) ? g(i) - cut : ((g(i) < -cut) ? g(i) + cut : 0.0);
    return g;
  };

  RealVector x = RealVector::Zero(2 * l - 1);
  RealVector y = x;
  double t = 1.0;
  double fx = objective(x);
  DiscreteFilterPair out;
  out.objective_trace.push_back(fx);
  for (int it = 0; it < iters; ++it) {
    RealVector cand = prox_step(y);
    double fc = objective(cand);
    if (fc > fx) {
      // accelerated step overshot: restart momentum, fall back to a plain
      // proximal step from the current iterate (non-increasing by step size)
      cand = prox_step(x);
      fc = objective(cand);
      t = 1.0;
      y = cand;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = cand + ((t - 1.0) / t_next) * (cand - x);
      t = t_next;
    }
    const double improvement = fx - fc;
    x = std::move(cand);
    fx = std::min(fx, fc);
    out.objective_trace.push_back(fx);
    if (improvement >= 0.0 && improvement <= rel_tol * std::max(fx, 1e-300)) break;
  }

  out.h1 = RealVector(l);
  out.h1(0) = 1.0;
  out.h1.tail(l - 1) = x.head(l - 1);
  out.h2 = x.tail(l);
  out.residual = fx;
  out.normalization = "h1-first-tap";
  return out;
}

/// Top-K echo read-out from a discrete filter: the K largest |h| values under
/// a local-maximum constraint, falling back to plain top-K magnitudes if the
/// filter has fewer than K local maxima. Delays are tap indices over fs.
inline EchoSet peak_pick(const RealVector& filter, int k, double fs) {
  const int n = static_cast<int>(filter.size());
  if (k < 1 || k > n) throw config_error("peak_pick: K out of range");
  if (!(fs > 0.0)) throw config_error("peak_pick: need a positive sample rate");
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(filter(a)) > std::abs(filter(b));
  });
  auto is_local_max = [&](int i) {
    const double v = std::abs(filter(i));
    if (i > 0 && std::abs(filter(i - 1)) > v) return false;
    if (i + 1 < n && std::abs(filter(i + 1)) > v) return false;
    return true;
  };
  std::vector<int> picked;
  for (int i : order) {
    if (static_cast<int>(picked.size()) == k) break;
    if (is_local_max(i)) picked.push_back(i);
  }
  for (int i : order) {
    if (static_cast<int>(picked.size()) == k) break;
    if (!is_local_max(i)) picked.push_back(i);
  }
  std::vector<double> delays, weights;
  for (int i : picked) {
    delays.push_back(i / fs);
    weights.push_back(std::abs(filter(i)));
  }
  return EchoSet(std::move(delays), std::move(weights));
}

}  // namespace mulan

#endif  // MULAN_BASELINES_HPP
