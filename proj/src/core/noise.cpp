#include "core/noise.hpp"

#include <cmath>

#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace pulselab {

namespace {

constexpr std::uint64_t stream_interaction = 0x01;
constexpr std::uint64_t stream_doppler = 0x02;
constexpr std::uint64_t stream_phase = 0x03;
constexpr std::uint64_t stream_intensity = 0x04;

std::array<double, 3> trap_frequencies(const TrapConfig& trap) {
  return {trap.omega_xy, trap.omega_xy, trap.omega_z};
}

double mean_occupation(const TrapConfig& trap, double omega) {
  if (trap.zero_temperature) return 0.0;
  if (!(trap.temperature > 0.0))
    throw std::domain_error(
        "temperature must be positive (or set the zero-temperature flag)");
  const double x =
      constants::hbar * omega / (constants::k_boltzmann * trap.temperature);
  return 1.0 / std::expm1(x);
}

}  // namespace

void PsdTable::validate() const {
  if (frequency.size() != density.size())
    throw std::invalid_argument("PSD columns must have equal length");
  for (std::size_t i = 0; i + 1 < frequency.size(); ++i)
    if (!(frequency[i] < frequency[i + 1]))
      throw std::invalid_argument("PSD frequencies must be strictly increasing");
  for (double d : density)
    if (!(d >= 0.0) || !std::isfinite(d))
      throw std::invalid_argument("PSD densities must be finite and >= 0");
}

double PsdTable::interpolate(double f) const {
  if (frequency.empty()) return 0.0;
  if (f < frequency.front() || f > frequency.back()) return 0.0;
  const auto it = std::lower_bound(frequency.begin(), frequency.end(), f);
  const std::size_t hi = static_cast<std::size_t>(it - frequency.begin());
  if (hi == 0 || frequency[hi] == f) return density[hi];
  const std::size_t lo = hi - 1;
  const double w = (f - frequency[lo]) / (frequency[hi] - frequency[lo]);
  return (1.0 - w) * density[lo] + w * density[hi];
}

std::array<double, 3> position_sigma(const TrapConfig& trap) {
  std::array<double, 3> out;
  const auto omegas = trap_frequencies(trap);
  for (int a = 0; a < 3; ++a) {
    const double nbar = mean_occupation(trap, omegas[a]);
    out[a] = std::sqrt(constants::hbar * (1.0 + 2.0 * nbar) /
                       (2.0 * trap.mass * omegas[a]));
  }
  return out;
}

std::array<double, 3> velocity_sigma(const TrapConfig& trap) {
  std::array<double, 3> out;
  const auto omegas = trap_frequencies(trap);
  for (int a = 0; a < 3; ++a) {
    const double nbar = mean_occupation(trap, omegas[a]);
    out[a] = std::sqrt(constants::hbar * omegas[a] * (1.0 + 2.0 * nbar) /
                       (2.0 * trap.mass));
  }
  return out;
}

std::array<double, n_drive_channels> doppler_sigma(
    const TrapConfig& trap, const WavevectorConfig& wavevectors) {
  const auto dv = velocity_sigma(trap);
  std::array<double, n_drive_channels> out{};
  for (int c = 0; c < n_drive_channels; ++c)
    for (int a = 0; a < 3; ++a) out[c] += wavevectors.k_eff[c][a] * dv[a];
  return out;
}

double sample_interaction(const TrapConfig& trap, std::mt19937_64& rng) {
  const auto sigma = position_sigma(trap);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (;;) {
    double diff[3];
    for (int a = 0; a < 3; ++a) {
      const double d1 = sigma[a] * unit(rng);
      const double d2 = sigma[a] * unit(rng);
      diff[a] = d2 - d1;
    }
    diff[0] += trap.separation;
    const double r = std::sqrt(diff[0] * diff[0] + diff[1] * diff[1] +
                               diff[2] * diff[2]);
    if (r > 0.0) return trap.c3 / (r * r * r);
  }
}

DopplerDraw sample_doppler(const TrapConfig& trap,
                           const WavevectorConfig& wavevectors, Scheme scheme,
                           bool shared, std::mt19937_64& rng) {
  const auto dv = velocity_sigma(trap);
  std::normal_distribution<double> unit(0.0, 1.0);

  DopplerDraw draw;
  std::array<std::array<double, 3>, 2> velocity{};
  for (int a = 0; a < 3; ++a) velocity[0][a] = dv[a] * unit(rng);
  if (shared)
    velocity[1] = velocity[0];
  else
    for (int a = 0; a < 3; ++a) velocity[1][a] = dv[a] * unit(rng);

  for (int atom = 0; atom < 2; ++atom)
    for (int c = 0; c < n_drive_channels; ++c) {
      double d = 0.0;
      for (int a = 0; a < 3; ++a) d += wavevectors.k_eff[c][a] * velocity[atom][a];
      draw.channel[atom][c] = d;
    }

  // Map laser detunings onto the state ladder of the active scheme: each
  // state's rotating-frame detuning is the sum of channel detunings along its
  // drive path from the qubit manifold.
  for (int atom = 0; atom < 2; ++atom) {
    const auto& ch = draw.channel[atom];
    auto& st = draw.state[atom];
    if (scheme == Scheme::A) {
      st[0] = 0.0;                                         // |1>
      st[1] = ch[static_cast<int>(DriveChannel::c1r)];     // |r>
      st[2] = ch[static_cast<int>(DriveChannel::c0rp)];    // |r'>
    } else {
      const double d01 = ch[static_cast<int>(DriveChannel::c01)];
      const double d1r = ch[static_cast<int>(DriveChannel::c1r)];
      const double drrp = ch[static_cast<int>(DriveChannel::crrp)];
      st[0] = d01;
      st[1] = d01 + d1r;
      st[2] = d01 + d1r + drrp;
    }
  }
  return draw;
}

std::vector<double> sample_psd_series(const PsdTable& psd, double duration,
                                      double dt, int padding,
                                      std::span<const double> times,
                                      std::mt19937_64& rng) {
  psd.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (duration / dt < 2.0)
    throw std::invalid_argument("series needs at least two samples");
  if (padding < 1) padding = 1;

  std::vector<double> series(times.size(), 0.0);
  if (psd.frequency.empty()) return series;

  const double df = 1.0 / (padding * duration);
  const double f_max = 1.0 / (2.0 * dt);
  std::uniform_real_distribution<double> phase_dist(0.0, two_pi);
  for (std::size_t j = 1;; ++j) {
    const double f = j * df;
    if (f > f_max) break;
    const double amp = 2.0 * std::sqrt(psd.interpolate(f) * df);
    const double phi = phase_dist(rng);  // drawn even for zero bins: grid-stable
    if (amp == 0.0) continue;
    for (std::size_t m = 0; m < times.size(); ++m)
      series[m] += amp * std::cos(two_pi * f * times[m] + phi);
  }
  return series;
}

std::vector<double> sample_psd_series(const PsdTable& psd, double duration,
                                      double dt, int padding,
                                      std::mt19937_64& rng) {
  const std::size_t n = static_cast<std::size_t>(std::llround(duration / dt));
  std::vector<double> times(n);
  for (std::size_t m = 0; m < n; ++m) times[m] = (m + 0.5) * dt;
  return sample_psd_series(psd, duration, dt, padding, times, rng);
}

ShotDraws sample_shot(const PulseProtocol& pulse, const NoiseConfig& noise,
                      const NoiseSources& sources, Scheme scheme,
                      std::uint64_t seed, std::uint64_t shot_index) {
  ShotDraws draws;
  if (sources.interaction) {
    auto rng = make_stream(seed, shot_index, stream_interaction);
    draws.v_dipole = sample_interaction(noise.trap, rng);
  }
  if (sources.doppler) {
    auto rng = make_stream(seed, shot_index, stream_doppler);
    draws.doppler = sample_doppler(noise.trap, noise.wavevectors, scheme,
                                   noise.shared_doppler, rng);
  }
  draws.decay = sources.decay;

  const double dt_sub = pulse.dt() / noise.substeps;
  if (sources.laser_phase) {
    if (!noise.phase_psd) throw ConfigError("laser phase noise requires a phase PSD");
    for (DriveChannel c : pulse.channels) {
      auto rng = make_stream(seed, shot_index, stream_phase,
                             static_cast<std::uint64_t>(c));
      draws.phase_offset[static_cast<int>(c)] = sample_psd_series(
          *noise.phase_psd, pulse.duration, dt_sub, noise.psd_padding, rng);
    }
  }
  if (sources.laser_intensity) {
    if (!noise.intensity_psd)
      throw ConfigError("laser intensity noise requires an intensity PSD");
    for (DriveChannel c : pulse.channels) {
      auto rng = make_stream(seed, shot_index, stream_intensity,
                             static_cast<std::uint64_t>(c));
      draws.intensity_alpha[static_cast<int>(c)] = sample_psd_series(
          *noise.intensity_psd, pulse.duration, dt_sub, noise.psd_padding, rng);
    }
  }
  return draws;
}

EvolutionResult noisy_propagate(const SystemConfig& config,
                                const PulseProtocol& pulse,
                                const ShotDraws& draws, int substeps) {
  pulse.validate();
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");

  SystemConfig cfg = config;
  if (draws.v_dipole) cfg.v_dipole = *draws.v_dipole;
  if (!draws.decay) {
    cfg.gamma_r = 0.0;
    cfg.gamma_rp = 0.0;
  }

  const double dt_sub = pulse.dt() / substeps;
  std::vector<ScheduleStep> steps;
  steps.reserve(static_cast<std::size_t>(pulse.segments) * substeps);
  for (int k = 0; k < pulse.segments; ++k) {
    const ControlSnapshot base = snapshot_for_segment(pulse, k);
    for (int j = 0; j < substeps; ++j) {
      const std::size_t idx = static_cast<std::size_t>(k) * substeps + j;
      ControlSnapshot snap = base;
      if (draws.doppler)
        snap.detuning = draws.doppler->state;
      for (int ci = 0; ci < n_drive_channels; ++ci) {
        if (!snap.active[ci]) continue;
        if (!draws.phase_offset[ci].empty())
          snap.phase[ci] += draws.phase_offset[ci].at(idx);
        if (!draws.intensity_alpha[ci].empty())
          snap.rabi[ci] *= 1.0 + 0.5 * draws.intensity_alpha[ci].at(idx);
      }
      steps.push_back({snap, dt_sub});
    }
  }
  return evolve_schedule(cfg, steps);
}

NoiseBudget noise_budget(const SystemConfig& config, const PulseProtocol& pulse,
                         const GateTarget& target, const NoiseConfig& noise,
                         const NoiseSources& sources, long shots,
                         std::uint64_t seed) {
  pulse.validate();
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  if ((sources.interaction || sources.doppler) && noise.trap.separation > 0.0) {
    const double v_geom =
        noise.trap.c3 / std::pow(noise.trap.separation, 3.0);
    if (std::abs(v_geom - config.v_dipole) >
        1e-9 * std::max(std::abs(config.v_dipole), 1.0))
      throw ConfigError(
          "trap geometry (c3, separation) inconsistent with v_dipole");
  }

  NoiseBudget budget;

  {  // Noise-free reference (no decay either).
    ShotDraws empty;
    const EvolutionResult evo = noisy_propagate(config, pulse, empty, 1);
    budget.noise_free.mean = std::max(0.0, 1.0 - gate_fidelity(evo, target));
    budget.noise_free.shots = 1;
    budget.noise_free.computed = true;
  }

  if (sources.decay) {  // Deterministic: a single non-Hermitian propagation.
    ShotDraws draws;
    draws.decay = true;
    const EvolutionResult evo = noisy_propagate(config, pulse, draws, 1);
    budget.decay.mean = std::max(0.0, 1.0 - gate_fidelity(evo, target));
    budget.decay.shots = 1;
    budget.decay.computed = true;
  }

  auto monte_carlo = [&](const NoiseSources& active) {
    BudgetRow row;
    std::vector<double> values(static_cast<std::size_t>(shots));
    parallel_for(values.size(), [&](std::size_t s) {
      const ShotDraws draws =
          sample_shot(pulse, noise, active, config.scheme, seed, s);
      const int substeps = draws.intra_segment() ? noise.substeps : 1;
      const EvolutionResult evo = noisy_propagate(config, pulse, draws, substeps);
      values[s] = std::max(0.0, 1.0 - gate_fidelity(evo, target));
    });
    // Compensated summation keeps budgets stable across shot counts.
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
      const double y = v - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    row.mean = sum / static_cast<double>(shots);
    double var = 0.0;
    for (double v : values) var += (v - row.mean) * (v - row.mean);
    if (shots > 1)
      row.std_error =
          std::sqrt(var / (static_cast<double>(shots) * (shots - 1)));
    row.shots = shots;
    row.computed = true;
    return row;
  };

  if (sources.interaction) {
    NoiseSources only;
    only.interaction = true;
    budget.interaction = monte_carlo(only);
  }
  if (sources.doppler) {
    NoiseSources only;
    only.doppler = true;
    budget.doppler = monte_carlo(only);
  }
  if (sources.laser_phase) {
    NoiseSources only;
    only.laser_phase = true;
    budget.laser_phase = monte_carlo(only);
  }
  if (sources.laser_intensity) {
    NoiseSources only;
    only.laser_intensity = true;
    budget.laser_intensity = monte_carlo(only);
  }
  if (sources.interaction || sources.doppler || sources.laser_phase ||
      sources.laser_intensity) {
    budget.combined = monte_carlo(sources);
  } else if (sources.decay) {
    budget.combined = budget.decay;  // no stochastic channel enabled
  }
  return budget;
}

}  // namespace pulselab
