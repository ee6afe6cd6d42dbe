#include "core/frt.hpp"

#include <algorithm>
#include <cmath>

namespace pulselab {

Matrix16 noise_operator(NoiseKind kind, DriveChannel channel,
                        const ControlSnapshot& snapshot) {
  const int ci = static_cast<int>(channel);
  if (!snapshot.active[ci]) return Matrix16::Zero();
  const double omega = snapshot.rabi[ci];
  const double phi = snapshot.phase[ci];
  // channel_drive_structure carries the 1/2 prefactor of the drive term.
  if (kind == NoiseKind::Phase)
    return omega * (std::cos(phi) * channel_drive_structure(channel, true) -
                    std::sin(phi) * channel_drive_structure(channel, false));
  return 0.5 * omega *
         (std::cos(phi) * channel_drive_structure(channel, false) +
          std::sin(phi) * channel_drive_structure(channel, true));
}

namespace {

// Noise-free trajectory sampled at substep midpoints.
struct Trajectory {
  std::vector<Matrix16> u_mid;          // U(t_j), t_j = (j + 1/2) dt_sub
  std::vector<ControlSnapshot> snaps;   // segment controls at t_j
  double dt = 0.0;
};

Trajectory midpoint_trajectory(const SystemConfig& config,
                               const PulseProtocol& pulse, int substeps) {
  pulse.validate();
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  SystemConfig cfg = config;
  cfg.gamma_r = 0.0;  // responses are defined along the noise-free evolution
  cfg.gamma_rp = 0.0;

  Trajectory traj;
  traj.dt = pulse.dt() / substeps;
  traj.u_mid.reserve(static_cast<std::size_t>(pulse.segments) * substeps);
  traj.snaps.reserve(traj.u_mid.capacity());

  Matrix16 u = Matrix16::Identity();
  for (int k = 0; k < pulse.segments; ++k) {
    const ControlSnapshot snap = snapshot_for_segment(pulse, k);
    const Matrix16 h = build_hamiltonian(cfg, snap);
    const Matrix16 half = step_exponential(h, 0.5 * traj.dt, true);
    for (int j = 0; j < substeps; ++j) {
      u = half * u;  // advance to the substep midpoint
      traj.u_mid.push_back(u);
      traj.snaps.push_back(snap);
      u = half * u;  // complete the substep
    }
  }
  return traj;
}

std::vector<Vector16> averaging_states(StateAverage average,
                                       std::span<const Vector16> states) {
  if (average == StateAverage::BasisAverage) {
    std::vector<Vector16> out(4, Vector16::Zero());
    for (int q = 0; q < 4; ++q) out[q](qubit_indices[q]) = 1.0;
    return out;
  }
  if (states.empty())
    throw std::invalid_argument("StateList averaging needs at least one state");
  std::vector<Vector16> out(states.begin(), states.end());
  for (auto& s : out) s.normalize();
  return out;
}

}  // namespace

ResponseSpectrum response_function(const SystemConfig& config,
                                   const PulseProtocol& pulse, NoiseKind kind,
                                   std::span<const double> frequencies,
                                   int substeps_per_segment,
                                   StateAverage average,
                                   std::span<const Vector16> states) {
  const Trajectory traj = midpoint_trajectory(config, pulse, substeps_per_segment);
  const std::vector<Vector16> psi = averaging_states(average, states);
  const std::size_t n_states = psi.size();
  const std::size_t m = traj.u_mid.size();

  ResponseSpectrum spectrum;
  spectrum.kind = kind;
  spectrum.frequencies.assign(frequencies.begin(), frequencies.end());
  spectrum.channels = pulse.channels;
  spectrum.values.assign(pulse.channels.size(),
                         std::vector<double>(frequencies.size(), 0.0));

  for (std::size_t c = 0; c < pulse.channels.size(); ++c) {
    const DriveChannel channel = pulse.channels[c];
    // v_s(t_j) = U^dag O U |psi_s> and m_s(t_j) = <psi_s| v_s(t_j)>.
    std::vector<std::vector<Vector16>> v(n_states, std::vector<Vector16>(m));
    std::vector<std::vector<double>> mexp(n_states, std::vector<double>(m));
    for (std::size_t j = 0; j < m; ++j) {
      const Matrix16 op = noise_operator(kind, channel, traj.snaps[j]);
      for (std::size_t s = 0; s < n_states; ++s) {
        const Vector16 evolved = traj.u_mid[j] * psi[s];
        v[s][j] = traj.u_mid[j].adjoint() * (op * evolved);
        mexp[s][j] = (psi[s].adjoint() * v[s][j])(0).real();
      }
    }

    for (std::size_t fi = 0; fi < spectrum.frequencies.size(); ++fi) {
      const double w = two_pi * spectrum.frequencies[fi];
      double response = 0.0;
      if (average == StateAverage::BasisAverage) {
        // Mixed-state connected correlator: means averaged before subtraction.
        double mc = 0.0, ms = 0.0, norm2 = 0.0;
        for (std::size_t s = 0; s < n_states; ++s) {
          Vector16 vc = Vector16::Zero(), vs = Vector16::Zero();
          double mbar_c = 0.0, mbar_s = 0.0;
          for (std::size_t j = 0; j < m; ++j) {
            const double t = (j + 0.5) * traj.dt;
            const double cw = std::cos(w * t), sw = std::sin(w * t);
            vc += cw * v[s][j];
            vs += sw * v[s][j];
            mbar_c += cw * mexp[s][j];
            mbar_s += sw * mexp[s][j];
          }
          norm2 += vc.squaredNorm() + vs.squaredNorm();
          mc += mbar_c;
          ms += mbar_s;
        }
        norm2 /= static_cast<double>(n_states);
        mc /= static_cast<double>(n_states);
        ms /= static_cast<double>(n_states);
        response = norm2 - mc * mc - ms * ms;
      } else {
        for (std::size_t s = 0; s < n_states; ++s) {
          Vector16 vc = Vector16::Zero(), vs = Vector16::Zero();
          double mbar_c = 0.0, mbar_s = 0.0;
          for (std::size_t j = 0; j < m; ++j) {
            const double t = (j + 0.5) * traj.dt;
            const double cw = std::cos(w * t), sw = std::sin(w * t);
            vc += cw * v[s][j];
            vs += sw * v[s][j];
            mbar_c += cw * mexp[s][j];
            mbar_s += sw * mexp[s][j];
          }
          response += vc.squaredNorm() + vs.squaredNorm() - mbar_c * mbar_c -
                      mbar_s * mbar_s;
        }
        response /= static_cast<double>(n_states);
      }
      spectrum.values[c][fi] = response * traj.dt * traj.dt;
    }
  }
  return spectrum;
}

std::vector<double> default_frequency_grid(const PulseProtocol& pulse,
                                           int points) {
  const double f_max = 10.0 * pulse.max_rabi() / two_pi;
  std::vector<double> grid;
  grid.reserve(points);
  const int n_lin = points / 2;
  const int n_log = points - n_lin;
  for (int i = 0; i < n_lin; ++i) grid.push_back(f_max * i / (n_lin - 1));
  const double lo = f_max * 1e-3;
  for (int i = 0; i < n_log; ++i)
    grid.push_back(lo * std::pow(f_max / lo, i / double(n_log - 1)));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

double frt_infidelity(const ResponseSpectrum& spectrum, const PsdTable& psd) {
  psd.validate();
  const auto& f = spectrum.frequencies;
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const double a = psd.interpolate(f[i]) * spectrum.total_at(i);
    const double b = psd.interpolate(f[i + 1]) * spectrum.total_at(i + 1);
    integral += 0.5 * (a + b) * (f[i + 1] - f[i]);
  }
  return integral;
}

std::vector<ZeroFrequencyAudit> zero_frequency_audit(
    const SystemConfig& config, const PulseProtocol& pulse,
    int substeps_per_segment, StateAverage average) {
  const double zero[] = {0.0};
  const ResponseSpectrum phase = response_function(
      config, pulse, NoiseKind::Phase, zero, substeps_per_segment, average);
  const ResponseSpectrum intensity = response_function(
      config, pulse, NoiseKind::Intensity, zero, substeps_per_segment, average);
  std::vector<ZeroFrequencyAudit> out;
  for (std::size_t c = 0; c < pulse.channels.size(); ++c)
    out.push_back({pulse.channels[c], phase.values[c][0], intensity.values[c][0]});
  return out;
}

}  // namespace pulselab
