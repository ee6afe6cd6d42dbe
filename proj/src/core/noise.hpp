#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "core/propagator.hpp"

namespace pulselab {

// Harmonic-trap and interaction geometry. The two atoms sit along x at the
// nominal separation; trap axes are aligned with the lab frame and
// omega_x = omega_y = omega_xy.
struct TrapConfig {
  double omega_xy = 0.0;     // rad/s
  double omega_z = 0.0;      // rad/s
  double temperature = 0.0;  // K
  double mass = 0.0;         // kg
  double separation = 0.0;   // m
  double c3 = 0.0;           // rad/s m^3
  bool zero_temperature = false;
};

// Effective wavevectors (rad/m) per drive channel and lab axis.
struct WavevectorConfig {
  std::array<std::array<double, 3>, n_drive_channels> k_eff = {};

  void set_channel(DriveChannel c, double kx, double ky = 0.0, double kz = 0.0) {
    k_eff[static_cast<int>(c)] = {kx, ky, kz};
  }
};

struct PsdTable {
  enum class Kind { Phase, Intensity };
  Kind kind = Kind::Phase;
  std::vector<double> frequency;  // Hz, strictly increasing
  std::vector<double> density;    // rad^2/Hz (phase) or 1/Hz (intensity)

  void validate() const;
  // Linear interpolation inside the tabulated range, zero outside.
  double interpolate(double f) const;
};

struct NoiseSources {
  bool interaction = false;
  bool doppler = false;
  bool decay = false;
  bool laser_phase = false;
  bool laser_intensity = false;

  bool any() const {
    return interaction || doppler || decay || laser_phase || laser_intensity;
  }
  static NoiseSources all() { return {true, true, true, true, true}; }
};

struct NoiseConfig {
  TrapConfig trap;
  WavevectorConfig wavevectors;
  std::optional<PsdTable> phase_psd;
  std::optional<PsdTable> intensity_psd;
  int substeps = 8;      // substeps per segment when intra-segment noise runs
  int psd_padding = 4;   // frequency grid densification, Delta f = 1/(padding*tau)
  bool shared_doppler = false;  // one velocity draw shared by both atoms
};

// Thermal harmonic-oscillator widths, sqrt(hbar (1 + 2 nbar) / (2 m omega))
// per axis {x, y, z}; nbar from the Bose factor at the trap frequency.
std::array<double, 3> position_sigma(const TrapConfig& trap);
// Velocity widths sqrt(hbar omega (1 + 2 nbar) / (2 m)).
std::array<double, 3> velocity_sigma(const TrapConfig& trap);
// Per-channel detuning standard deviation, sum over axes of k_eff * dv.
std::array<double, n_drive_channels> doppler_sigma(
    const TrapConfig& trap, const WavevectorConfig& wavevectors);

// Draws atom displacements and returns the perturbed interaction strength
// C3 / |r2 + d2 - r1 - d1|^3.
double sample_interaction(const TrapConfig& trap, std::mt19937_64& rng);

struct DopplerDraw {
  // Per atom, per channel laser detuning k_eff . v.
  std::array<std::array<double, n_drive_channels>, 2> channel = {};
  // Per atom {Delta^1, Delta^r, Delta^r'} after mapping channel detunings
  // onto the level ladder of the active scheme.
  std::array<std::array<double, 3>, 2> state = {};
};

DopplerDraw sample_doppler(const TrapConfig& trap,
                           const WavevectorConfig& wavevectors, Scheme scheme,
                           bool shared, std::mt19937_64& rng);

// Harmonic-sum synthesis of a noise time series from a PSD: values at the
// requested sample times, f(t) = sum_j 2 sqrt(S(f_j) df) cos(2 pi f_j t +
// phi_j) with phi_j uniform, f_j = j*df up to 1/(2 dt), df = 1/(padding*duration).
std::vector<double> sample_psd_series(const PsdTable& psd, double duration,
                                      double dt, int padding,
                                      std::span<const double> times,
                                      std::mt19937_64& rng);
// Convenience overload sampling at substep midpoints (j + 1/2) dt.
std::vector<double> sample_psd_series(const PsdTable& psd, double duration,
                                      double dt, int padding,
                                      std::mt19937_64& rng);

// All randomness of one Monte-Carlo shot, sampled up front so that noisy
// propagation itself is deterministic.
struct ShotDraws {
  std::optional<double> v_dipole;       // interaction noise
  std::optional<DopplerDraw> doppler;   // Doppler noise
  bool decay = false;                   // apply the configured decay rates
  // Per channel, sampled on the substep-midpoint grid; empty when inactive.
  std::array<std::vector<double>, n_drive_channels> phase_offset;
  std::array<std::vector<double>, n_drive_channels> intensity_alpha;

  bool intra_segment() const {
    for (const auto& v : phase_offset)
      if (!v.empty()) return true;
    for (const auto& v : intensity_alpha)
      if (!v.empty()) return true;
    return false;
  }
};

ShotDraws sample_shot(const PulseProtocol& pulse, const NoiseConfig& noise,
                      const NoiseSources& sources, Scheme scheme,
                      std::uint64_t seed, std::uint64_t shot_index);

// Propagation with the shot's noise applied per Eq.-(11)-style replacements:
// perturbed V, per-atom Doppler detunings, decay, and per-substep Rabi/phase
// modifications. With all draws empty this reduces exactly to propagate().
EvolutionResult noisy_propagate(const SystemConfig& config,
                                const PulseProtocol& pulse,
                                const ShotDraws& draws, int substeps);

struct BudgetRow {
  double mean = 0.0;
  double std_error = 0.0;
  long shots = 0;
  bool computed = false;
};

struct NoiseBudget {
  BudgetRow noise_free;
  BudgetRow interaction;
  BudgetRow doppler;
  BudgetRow decay;
  BudgetRow laser_phase;
  BudgetRow laser_intensity;
  BudgetRow combined;
};

// Per-source and combined Monte-Carlo infidelity budget with matched random
// streams across sources; deterministic given the seed.
NoiseBudget noise_budget(const SystemConfig& config, const PulseProtocol& pulse,
                         const GateTarget& target, const NoiseConfig& noise,
                         const NoiseSources& sources, long shots,
                         std::uint64_t seed);

}  // namespace pulselab
