#pragma once

#include <functional>
#include <span>
#include <vector>

// Limited-memory BFGS with optional box constraints. Unconstrained problems
// use a strong-Wolfe line search; constrained ones use gradient projection
// with an Armijo backtracking search on the projected path. Accepted iterates
// never increase the objective.

namespace pulselab {

using ObjectiveFn =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  int max_iterations = 2000;
  double gradient_tolerance = 1e-10;  // infinity norm of the projected gradient
  int history = 8;
  std::vector<double> lower;  // empty -> unbounded
  std::vector<double> upper;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search_steps = 60;
  // Early stop when the objective improves by less than this relative amount
  // for plateau_window consecutive iterations. Quasi-Newton convergence is
  // superlinear near an optimum, so a single stalled step already signals a
  // plateau (the L-BFGS-B ftol convention).
  double plateau_tolerance = 1e-13;
  int plateau_window = 1;
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

LbfgsResult lbfgs_minimize(const ObjectiveFn& objective, std::vector<double> x0,
                           const LbfgsOptions& options);

}  // namespace pulselab
