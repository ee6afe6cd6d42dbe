#include "core/wigner.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pulselab {

namespace {

// Doubled angular momenta keep half-integers exact.
int doubled(double j) {
  const double d = 2.0 * j;
  const int i = static_cast<int>(std::lround(d));
  if (std::abs(d - i) > 1e-9)
    throw std::invalid_argument("angular momentum must be integer or half-integer");
  return i;
}

double log_factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(512);
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(double(i));
    return t;
  }();
  if (n < 0) throw std::domain_error("negative factorial");
  if (n < static_cast<int>(table.size())) return table[n];
  return std::lgamma(double(n) + 1.0);
}

bool triangle_ok(int two_a, int two_b, int two_c) {
  if ((two_a + two_b + two_c) % 2 != 0) return false;
  return two_c >= std::abs(two_a - two_b) && two_c <= two_a + two_b;
}

// log of Delta(abc) = (a+b-c)! (a-b+c)! (-a+b+c)! / (a+b+c+1)!
double log_triangle(int two_a, int two_b, int two_c) {
  return log_factorial((two_a + two_b - two_c) / 2) +
         log_factorial((two_a - two_b + two_c) / 2) +
         log_factorial((-two_a + two_b + two_c) / 2) -
         log_factorial((two_a + two_b + two_c) / 2 + 1);
}

}  // namespace

double wigner_3j(double j1, double j2, double j3, double m1, double m2,
                 double m3) {
  const int a = doubled(j1), b = doubled(j2), c = doubled(j3);
  const int ma = doubled(m1), mb = doubled(m2), mc = doubled(m3);
  if (ma + mb + mc != 0) return 0.0;
  if (std::abs(ma) > a || std::abs(mb) > b || std::abs(mc) > c) return 0.0;
  if ((a + ma) % 2 != 0 || (b + mb) % 2 != 0 || (c + mc) % 2 != 0) return 0.0;
  if (!triangle_ok(a, b, c)) return 0.0;

  const double log_pref =
      0.5 * (log_triangle(a, b, c) + log_factorial((a + ma) / 2) +
             log_factorial((a - ma) / 2) + log_factorial((b + mb) / 2) +
             log_factorial((b - mb) / 2) + log_factorial((c + mc) / 2) +
             log_factorial((c - mc) / 2));

  const int k_min = std::max({0, (b - c - ma) / 2, (a - c + mb) / 2});
  const int k_max =
      std::min({(a + b - c) / 2, (a - ma) / 2, (b + mb) / 2});
  double sum = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double log_term =
        log_factorial(k) + log_factorial((a + b - c) / 2 - k) +
        log_factorial((a - ma) / 2 - k) + log_factorial((b + mb) / 2 - k) +
        log_factorial((c - b + ma) / 2 + k) +
        log_factorial((c - a - mb) / 2 + k);
    const double term = std::exp(log_pref - log_term);
    sum += (k % 2 == 0 ? term : -term);
  }
  const int phase_exp = (a - b - mc) / 2;
  return (phase_exp % 2 == 0 ? sum : -sum);
}

double wigner_6j(double j1, double j2, double j3, double j4, double j5,
                 double j6) {
  const int a = doubled(j1), b = doubled(j2), c = doubled(j3);
  const int d = doubled(j4), e = doubled(j5), f = doubled(j6);
  if (!triangle_ok(a, b, c) || !triangle_ok(a, e, f) || !triangle_ok(d, b, f) ||
      !triangle_ok(d, e, c))
    return 0.0;

  const double log_pref =
      0.5 * (log_triangle(a, b, c) + log_triangle(a, e, f) +
             log_triangle(d, b, f) + log_triangle(d, e, c));

  const int t1 = (a + b + c) / 2, t2 = (a + e + f) / 2, t3 = (d + b + f) / 2,
            t4 = (d + e + c) / 2;
  const int q1 = (a + b + d + e) / 2, q2 = (b + c + e + f) / 2,
            q3 = (a + c + d + f) / 2;
  const int k_min = std::max({t1, t2, t3, t4});
  const int k_max = std::min({q1, q2, q3});
  double sum = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double log_term = log_factorial(k + 1) - log_factorial(k - t1) -
                            log_factorial(k - t2) - log_factorial(k - t3) -
                            log_factorial(k - t4) - log_factorial(q1 - k) -
                            log_factorial(q2 - k) - log_factorial(q3 - k);
    const double term = std::exp(log_pref + log_term);
    sum += (k % 2 == 0 ? term : -term);
  }
  return sum;
}

double clebsch_gordan(double j1, double m1, double j2, double m2, double j3,
                      double m3) {
  const int phase = doubled(j1) - doubled(j2) + doubled(m3);
  const double sign = (phase / 2) % 2 == 0 ? 1.0 : -1.0;
  return sign * std::sqrt(2.0 * j3 + 1.0) *
         wigner_3j(j1, j2, j3, m1, m2, -m3);
}

}  // namespace pulselab
