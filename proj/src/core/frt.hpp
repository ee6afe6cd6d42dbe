#pragma once

#include <span>
#include <vector>

#include "core/noise.hpp"
#include "core/propagator.hpp"

// Fidelity response theory: frequency-resolved first-order sensitivity of a
// pulse to laser phase or intensity noise, built from connected correlators of
// Heisenberg-picture noise operators along the noise-free trajectory.

namespace pulselab {

enum class NoiseKind { Phase, Intensity };

// Per-channel noise operator at one instant:
//   phase:     (Omega/2) sum_atoms i (e^{i phi} |b><a| - h.c.)
//   intensity: (Omega/4) sum_atoms   (e^{i phi} |b><a| + h.c.)
Matrix16 noise_operator(NoiseKind kind, DriveChannel channel,
                        const ControlSnapshot& snapshot);

enum class StateAverage { BasisAverage, StateList };

struct ResponseSpectrum {
  NoiseKind kind = NoiseKind::Phase;
  std::vector<double> frequencies;  // cycles per time unit of the pulse
  std::vector<DriveChannel> channels;
  std::vector<std::vector<double>> values;  // per channel, per frequency

  double total_at(std::size_t fi) const {
    double s = 0.0;
    for (const auto& v : values) s += v[fi];
    return s;
  }
};

// I(f) = double time integral of cos(2 pi f (t - tau)) times the connected
// correlator of O_H, evaluated in factorized form on the substep-midpoint
// grid. BasisAverage takes the expectation in the maximally mixed state over
// the four qubit-pair basis states (correlator averaged, means averaged before
// subtraction); StateList averages per-state connected correlators over the
// supplied pure states.
ResponseSpectrum response_function(const SystemConfig& config,
                                   const PulseProtocol& pulse, NoiseKind kind,
                                   std::span<const double> frequencies,
                                   int substeps_per_segment = 8,
                                   StateAverage average = StateAverage::BasisAverage,
                                   std::span<const Vector16> states = {});

// Default grid: mixed linear/log coverage of [0, 10 * Omega_max / 2 pi].
std::vector<double> default_frequency_grid(const PulseProtocol& pulse,
                                           int points = 400);

// Sum over channels of the trapezoid integral of S(f) I(f) df.
double frt_infidelity(const ResponseSpectrum& spectrum, const PsdTable& psd);

struct ZeroFrequencyAudit {
  DriveChannel channel;
  double phase_response;
  double intensity_response;
};

// f = 0 response values per channel; certifies shot-to-shot robustness.
std::vector<ZeroFrequencyAudit> zero_frequency_audit(
    const SystemConfig& config, const PulseProtocol& pulse,
    int substeps_per_segment = 8,
    StateAverage average = StateAverage::BasisAverage);

}  // namespace pulselab
