#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "core/hilbert.hpp"

namespace pulselab {

// Piecewise-constant control protocol. For Rabi modulation the per-channel
// arrays are Rabi frequencies (rad/s) with all phases zero; for phase
// modulation they are phases (rad) and every admitted channel runs at the
// constant Rabi frequency omega0.
struct PulseProtocol {
  Scheme scheme = Scheme::A;
  Modulation modulation = Modulation::Rabi;
  double duration = 0.0;  // s (or unitless time in normalized runs)
  int segments = 0;
  std::vector<DriveChannel> channels;
  std::vector<std::vector<double>> controls;  // one array of length segments per channel
  double omega0 = 0.0;       // constant Rabi (phase modulation); reporting Omega otherwise
  double v_over_omega = 0.0;

  double dt() const { return duration / segments; }
  // Max Rabi frequency over channels and time; the reporting Omega.
  double max_rabi() const;
  void validate() const;
};

ControlSnapshot snapshot_for_segment(const PulseProtocol& pulse, int segment);

struct TrajectoryRecord {
  std::vector<double> times;
  // Per qubit-basis initial state: interacting-pair population and summed
  // single-atom Rydberg population at each recorded time.
  std::array<std::vector<double>, 4> p_interacting;
  std::array<std::vector<double>, 4> p_rydberg;
};

struct EvolutionResult {
  Matrix16 final_operator = Matrix16::Identity();
  double t_int = 0.0;  // time integral of P_|rr'> + P_|r'r>, qubit-basis averaged
  double t_ryd = 0.0;  // time integral of total single-atom Rydberg population
  std::array<double, 4> t_int_by_state = {0, 0, 0, 0};
  std::array<double, 4> t_ryd_by_state = {0, 0, 0, 0};
  std::optional<TrajectoryRecord> trajectory;
};

// One substep of a piecewise-constant schedule.
struct ScheduleStep {
  ControlSnapshot snapshot;
  double dt = 0.0;
};

// exp(-i H dt): eigendecomposition for Hermitian H, scaling-and-squaring
// otherwise (decay terms present).
Matrix16 step_exponential(const Matrix16& h, double dt, bool hermitian);

// Evolves an explicit substep schedule, accumulating the time-ordered product
// of step exponentials and the population integrals (trapezoid rule on the
// step grid, averaged over the four qubit-basis initial states).
EvolutionResult evolve_schedule(const SystemConfig& config,
                                std::span<const ScheduleStep> steps,
                                bool record_trajectory = false);

EvolutionResult propagate(const SystemConfig& config, const PulseProtocol& pulse,
                          int substeps_per_segment = 8,
                          bool record_trajectory = false);

// F = |tr(target^dag P U P)| / 4, Eq.-(6)-style with d = 4.
double gate_fidelity(const EvolutionResult& result, const GateTarget& target);
double gate_fidelity(const Matrix16& final_operator, const GateTarget& target);

// Accumulated exchange phase theta_dipole = T_int * V_dipole.
double exchange_phase(const EvolutionResult& result, const SystemConfig& config);

struct RescaledPulse {
  PulseProtocol pulse;
  bool v_ratio_broken = false;  // explicit V override changed V/Omega
};

// Rescales to a new maximal Rabi frequency: time axis scales by
// Omega_old/Omega_new, Rabi amplitudes by Omega_new/Omega_old, so the
// unitless pulse (and its noise-free fidelity) is invariant. V follows
// v_over_omega unless new_v_dipole > 0 overrides it.
RescaledPulse rescale_pulse(const PulseProtocol& pulse, double new_omega_max,
                            double new_v_dipole = 0.0);

}  // namespace pulselab
