#include "core/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace pulselab {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

struct Box {
  const std::vector<double>* lower = nullptr;
  const std::vector<double>* upper = nullptr;
  bool active() const { return lower && !lower->empty(); }

  double clamp(double x, std::size_t i) const {
    if (!active()) return x;
    return std::min(std::max(x, (*lower)[i]), (*upper)[i]);
  }
  void project(std::vector<double>& x) const {
    if (!active()) return;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = clamp(x[i], i);
  }
  // Infinity norm of P(x - g) - x, the constrained stationarity measure.
  double projected_gradient_norm(std::span<const double> x,
                                 std::span<const double> g) const {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      m = std::max(m, std::abs(clamp(x[i] - g[i], i) - x[i]));
    return m;
  }
  bool at_bound(std::span<const double> x, std::size_t i, double gi) const {
    if (!active()) return false;
    constexpr double eps = 1e-12;
    return (x[i] <= (*lower)[i] + eps && gi > 0.0) ||
           (x[i] >= (*upper)[i] - eps && gi < 0.0);
  }
  // Largest step along d keeping x + alpha d feasible.
  double max_step(std::span<const double> x, std::span<const double> d) const {
    if (!active()) return std::numeric_limits<double>::infinity();
    double a = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (d[i] < 0.0) a = std::min(a, ((*lower)[i] - x[i]) / d[i]);
      if (d[i] > 0.0) a = std::min(a, ((*upper)[i] - x[i]) / d[i]);
    }
    return std::max(a, 0.0);
  }
};

struct Pair {
  std::vector<double> s, y;
  double rho;
};

// Two-loop recursion; gradient components on the active set are masked out
// beforehand so the direction stays inside the feasible face.
std::vector<double> lbfgs_direction(const std::deque<Pair>& pairs,
                                    std::vector<double> q) {
  std::vector<double> alpha(pairs.size());
  for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
    alpha[i] = pairs[i].rho * dot(pairs[i].s, q);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] -= alpha[i] * pairs[i].y[j];
  }
  if (!pairs.empty()) {
    const Pair& last = pairs.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double beta = pairs[i].rho * dot(pairs[i].y, q);
    for (std::size_t j = 0; j < q.size(); ++j)
      q[j] += (alpha[i] - beta) * pairs[i].s[j];
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFn& objective, std::vector<double> x0,
                           const LbfgsOptions& options) {
  const std::size_t n = x0.size();
  Box box;
  if (!options.lower.empty()) {
    box.lower = &options.lower;
    box.upper = &options.upper;
  }

  LbfgsResult result;
  std::vector<double> x = std::move(x0);
  box.project(x);
  std::vector<double> g(n), g_new(n), x_new(n);
  double f = objective(x, g);

  std::deque<Pair> pairs;
  double plateau_reference = f;
  int plateau_counter = 0;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (box.projected_gradient_norm(x, g) < options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    std::vector<double> masked = g;
    if (box.active())
      for (std::size_t i = 0; i < n; ++i)
        if (box.at_bound(x, i, g[i])) masked[i] = 0.0;

    std::vector<double> d = lbfgs_direction(pairs, masked);
    if (box.active()) {
      // Project onto the tangent cone: no component may point out of the box
      // at an active bound, whatever the history suggests.
      constexpr double eps = 1e-12;
      for (std::size_t i = 0; i < n; ++i) {
        if (box.at_bound(x, i, g[i])) d[i] = 0.0;
        if (x[i] <= (*box.lower)[i] + eps && d[i] < 0.0) d[i] = 0.0;
        if (x[i] >= (*box.upper)[i] - eps && d[i] > 0.0) d[i] = 0.0;
      }
    }
    double slope = dot(g, d);
    if (!(slope < 0.0)) {  // not a descent direction; restart from steepest descent
      pairs.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -masked[i];
      slope = dot(g, d);
      if (!(slope < 0.0)) break;  // stationary on the feasible face
    }

    // Strong Wolfe line search (bracket + bisection zoom), capped at the
    // feasibility limit; accepting the cap is fine, the variable joins the
    // active set on the next iteration.
    const double alpha_cap = box.max_step(x, d);
    if (!(alpha_cap > 0.0)) break;
    const double c1 = options.wolfe_c1, c2 = options.wolfe_c2;

    struct LinePoint {
      double alpha, f, slope;
    };
    auto eval = [&](double a) {
      for (std::size_t i = 0; i < n; ++i)
        x_new[i] = box.clamp(x[i] + a * d[i], i);
      const double v = objective(x_new, g_new);
      return LinePoint{a, v, dot(g_new, d)};
    };

    bool accepted = false;
    LinePoint lo{0.0, f, slope}, cur{0.0, f, slope}, hi{};
    bool bracketed = false;
    double alpha = std::min(1.0, alpha_cap);
    double f_prev = f;
    for (int ls = 0; ls < options.max_line_search_steps; ++ls) {
      cur = eval(alpha);
      if (cur.f > f + c1 * alpha * slope || (ls > 0 && cur.f >= f_prev)) {
        hi = cur;
        bracketed = true;
        break;
      }
      if (std::abs(cur.slope) <= -c2 * slope) {
        accepted = true;
        break;
      }
      if (cur.slope >= 0.0) {
        hi = lo;
        lo = cur;
        bracketed = true;
        break;
      }
      lo = cur;
      f_prev = cur.f;
      if (alpha >= alpha_cap) {  // sufficient decrease at the cap: take it
        accepted = true;
        break;
      }
      alpha = std::min(2.0 * alpha, alpha_cap);
    }
    if (!accepted && bracketed) {
      for (int z = 0; z < options.max_line_search_steps; ++z) {
        const double a = 0.5 * (lo.alpha + hi.alpha);
        cur = eval(a);
        if (cur.f > f + c1 * a * slope || cur.f >= lo.f) {
          hi = cur;
        } else {
          if (std::abs(cur.slope) <= -c2 * slope) {
            accepted = true;
            break;
          }
          if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
          lo = cur;
        }
        if (std::abs(hi.alpha - lo.alpha) <
            1e-12 * std::max(1.0, std::abs(lo.alpha)))
          break;
      }
      if (!accepted && lo.alpha > 0.0 && lo.f < f) {
        cur = eval(lo.alpha);  // best sufficient-decrease point found
        accepted = true;
      }
    }

    if (!accepted || !(cur.f <= f)) break;

    Pair p;
    p.s.resize(n);
    p.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = x_new[i] - x[i];
      p.y[i] = g_new[i] - g[i];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-13 * std::sqrt(dot(p.s, p.s)) * std::sqrt(dot(p.y, p.y))) {
      p.rho = 1.0 / sy;
      pairs.push_back(std::move(p));
      if (static_cast<int>(pairs.size()) > options.history) pairs.pop_front();
    }
    x.swap(x_new);
    g.swap(g_new);
    f = cur.f;

    // Plateau stop: no meaningful progress across a window of iterations.
    if (plateau_reference - f <=
        options.plateau_tolerance * std::max(1.0, std::abs(f))) {
      if (++plateau_counter >= options.plateau_window) break;
    } else {
      plateau_counter = 0;
      plateau_reference = f;
    }
  }

  if (!result.converged)
    result.converged =
        box.projected_gradient_norm(x, g) < options.gradient_tolerance;
  result.x = std::move(x);
  result.value = f;
  result.iterations = iter;
  return result;
}

}  // namespace pulselab
