// Nelder-Mead downhill simplex minimization for small smooth problems.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

namespace qcov {

struct SimplexOptions {
  double initial_step = 0.15;
  double f_tol = 1e-9;      // stop when the simplex function spread is below this
  double x_tol = 1e-8;      // ... and the simplex diameter is below this
  int max_iterations = 10000;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Classic Nelder-Mead (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5). Deterministic for a given starting point.
inline SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x0, const SimplexOptions& opt = {}) {
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  for (Eigen::Index i = 0; i < n; ++i) pts[i + 1](i) += opt.initial_step;
  std::vector<double> fv(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  std::vector<int> order(n + 1);
  SimplexResult result;
  for (result.iterations = 0; result.iterations < opt.max_iterations; ++result.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = order.front(), worst = order.back(), second_worst = order[n - 1];

    double diameter = 0.0;
    for (Eigen::Index i = 0; i <= n; ++i)
      diameter = std::max(diameter, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
    if (fv[worst] - fv[best] <= opt.f_tol && diameter <= opt.x_tol) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i <= n; ++i)
      if (static_cast<int>(i) != worst) centroid += pts[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
    const double f_reflected = f(reflected);
    if (f_reflected < fv[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        pts[worst] = expanded;
        fv[worst] = f_expanded;
      } else {
        pts[worst] = reflected;
        fv[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fv[second_worst]) {
      pts[worst] = reflected;
      fv[worst] = f_reflected;
      continue;
    }
    const Eigen::VectorXd contracted = centroid + 0.5 * (pts[worst] - centroid);
    const double f_contracted = f(contracted);
    if (f_contracted < fv[worst]) {
      pts[worst] = contracted;
      fv[worst] = f_contracted;
      continue;
    }
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (static_cast<int>(i) == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      fv[i] = f(pts[i]);
    }
  }

  const auto best_it = std::min_element(fv.begin(), fv.end());
  result.fx = *best_it;
  result.x = pts[static_cast<size_t>(best_it - fv.begin())];
  return result;
}

}  // namespace qcov
