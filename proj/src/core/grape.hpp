#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "core/propagator.hpp"

namespace pulselab {

struct OptimizationSettings {
  double lambda = 1e-3;  // smoothness weight, in max-Rabi-normalized units
  int restarts = 1;
  int max_iterations = 2000;
  double gradient_tolerance = 1e-10;
  std::uint64_t seed = 0;
  enum class Bounds { Box, Reparameterize } bounds_mode = Bounds::Box;
  double init_amplitude = two_pi;  // Rabi initialization range [0, init_amplitude]
  double rabi_upper_bound = 0.0;   // 0 -> unbounded above
  double boundary_penalty = 0.0;   // optional weight pinning endpoint controls to 0
  double continuation_threshold = 1e-6;
};

struct OptimizationRecord {
  PulseProtocol pulse;
  double theta = 0.0;
  double infidelity = 1.0;
  double cost = 1.0;
  double t_int = 0.0;
  double t_ryd = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
  bool converged = false;
};

// Sum over adjacent pairs of ((f_{i+1} - f_i)/2)^2.
double smoothness_cost(std::span<const double> control);

// (1 - F) + lambda * sum of per-control smoothness costs; F is the fidelity of
// the noise-free propagation (decay rates ignored here).
double total_cost(const SystemConfig& config, const PulseProtocol& pulse,
                  const GateTarget& target, double lambda);

// Exact gradient of total_cost with respect to every control value (channel-
// major layout), from the adjoint recursion with eigendecomposition
// derivatives of the segment exponentials.
std::vector<double> cost_gradient(const SystemConfig& config,
                                  const PulseProtocol& pulse,
                                  const GateTarget& target, double lambda);

struct Ansatz {
  enum class Kind { Random, WarmStart } kind = Kind::Random;
  PulseProtocol warm_start;  // used when kind == WarmStart

  static Ansatz random() { return {}; }
  static Ansatz warm(PulseProtocol p) {
    return {Kind::WarmStart, std::move(p)};
  }
};

// Best-of-restarts optimization of an exchange gate of angle theta.
// Internal unit conventions: phase modulation fixes omega0 = 2*pi and
// v_dipole = v_over_omega * omega0; Rabi modulation fixes v_dipole = 2*pi
// with the reporting Omega (and v_over_omega) determined by the result.
OptimizationRecord optimize(Scheme scheme, Modulation modulation, double theta,
                            double duration, int segments, double v_over_omega,
                            const OptimizationSettings& settings,
                            const Ansatz& ansatz = Ansatz::random());

// One record per (duration, v_over_omega, run); deterministic given the
// master seed. For Rabi modulation pass a single placeholder v entry.
std::vector<OptimizationRecord> landscape_sweep(
    Scheme scheme, Modulation modulation, double theta,
    std::span<const double> durations, std::span<const double> v_over_omega,
    int runs_per_point, int segments, const OptimizationSettings& settings);

// Smallest grid duration whose best infidelity is below `threshold`, with the
// preceding grid point (if any) above `upper`.
std::optional<double> detect_speed_limit(
    std::span<const OptimizationRecord> records, double threshold = 1e-4,
    double upper = 1e-2);

// Warm-started sequential optimization from an iSWAP seed pulse down a
// descending theta grid at fixed maximal Rabi frequency; the duration is
// re-optimized (never decreased) along the way. Steps that miss the threshold
// are flagged via converged = false and the continuation proceeds.
std::vector<OptimizationRecord> continuation_theta(
    const PulseProtocol& seed_pulse, std::span<const double> thetas,
    const OptimizationSettings& settings);

}  // namespace pulselab
