#include "core/propagator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace pulselab {

double PulseProtocol::max_rabi() const {
  if (modulation == Modulation::Phase) return omega0;
  double m = 0.0;
  for (const auto& arr : controls)
    for (double v : arr) m = std::max(m, v);
  return m;
}

void PulseProtocol::validate() const {
  if (segments < 2) throw std::invalid_argument("pulse needs at least 2 segments");
  if (!(duration > 0.0)) throw std::invalid_argument("pulse duration must be positive");
  if (channels.size() != controls.size())
    throw std::invalid_argument("one control array per channel required");
  for (DriveChannel c : channels)
    if (!channel_admitted(scheme, c))
      throw ConfigError(std::string("channel ") + channel_name(c) +
                        " not admitted by scheme");
  for (const auto& arr : controls) {
    if (static_cast<int>(arr.size()) != segments)
      throw std::invalid_argument("control array length must equal segment count");
    for (double v : arr) {
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite control value");
      if (modulation == Modulation::Rabi && v < 0.0)
        throw std::invalid_argument("Rabi control values must be non-negative");
    }
  }
  if (modulation == Modulation::Phase && !(omega0 > 0.0))
    throw std::invalid_argument("phase modulation requires a positive omega0");
}

ControlSnapshot snapshot_for_segment(const PulseProtocol& pulse, int segment) {
  ControlSnapshot s;
  for (std::size_t i = 0; i < pulse.channels.size(); ++i) {
    const double v = pulse.controls[i][segment];
    if (pulse.modulation == Modulation::Rabi)
      s.set(pulse.channels[i], v, 0.0);
    else
      s.set(pulse.channels[i], pulse.omega0, v);
  }
  return s;
}

Matrix16 step_exponential(const Matrix16& h, double dt, bool hermitian) {
  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix16> es(h);
    Vector16 phases;
    for (int i = 0; i < 16; ++i)
      phases(i) = std::polar(1.0, -es.eigenvalues()(i) * dt);
    return es.eigenvectors() * phases.asDiagonal() *
           es.eigenvectors().adjoint();
  }
  const Matrix16 a = std::complex<double>(0.0, -dt) * h;
  return a.exp();
}

namespace {

struct PopulationAccumulator {
  std::array<double, 4> p_int_prev{}, p_ryd_prev{};
  std::array<double, 4> t_int{}, t_ryd{};
  TrajectoryRecord* record = nullptr;
  bool first = true;

  void sample(const Matrix16& u, double t, double dt_since_prev) {
    std::array<double, 4> p_int, p_ryd;
    const int rrp = pair_index(level_r, level_rp);
    const int rpr = pair_index(level_rp, level_r);
    for (int q = 0; q < 4; ++q) {
      const int col = qubit_indices[q];
      p_int[q] = std::norm(u(rrp, col)) + std::norm(u(rpr, col));
      double ryd = 0.0;
      for (int row = 0; row < pair_dimension; ++row) {
        const int occ = rydberg_occupancy(row);
        if (occ) ryd += occ * std::norm(u(row, col));
      }
      p_ryd[q] = ryd;
    }
    if (!first) {
      for (int q = 0; q < 4; ++q) {
        t_int[q] += 0.5 * dt_since_prev * (p_int_prev[q] + p_int[q]);
        t_ryd[q] += 0.5 * dt_since_prev * (p_ryd_prev[q] + p_ryd[q]);
      }
    }
    if (record) {
      record->times.push_back(t);
      for (int q = 0; q < 4; ++q) {
        record->p_interacting[q].push_back(p_int[q]);
        record->p_rydberg[q].push_back(p_ryd[q]);
      }
    }
    p_int_prev = p_int;
    p_ryd_prev = p_ryd;
    first = false;
  }
};

}  // namespace

EvolutionResult evolve_schedule(const SystemConfig& config,
                                std::span<const ScheduleStep> steps,
                                bool record_trajectory) {
  EvolutionResult result;
  if (record_trajectory) result.trajectory.emplace();

  PopulationAccumulator acc;
  acc.record = result.trajectory ? &*result.trajectory : nullptr;

  const bool hermitian = config.gamma_r == 0.0 && config.gamma_rp == 0.0;
  Matrix16 u = Matrix16::Identity();
  double t = 0.0;
  acc.sample(u, t, 0.0);

  Matrix16 step = Matrix16::Identity();
  const ControlSnapshot* prev_snapshot = nullptr;
  double prev_dt = -1.0;
  for (const ScheduleStep& s : steps) {
    if (!prev_snapshot || !(*prev_snapshot == s.snapshot) || prev_dt != s.dt) {
      step = step_exponential(build_hamiltonian(config, s.snapshot), s.dt, hermitian);
      prev_snapshot = &s.snapshot;
      prev_dt = s.dt;
    }
    u = step * u;
    t += s.dt;
    acc.sample(u, t, s.dt);
  }

  result.final_operator = u;
  result.t_int_by_state = acc.t_int;
  result.t_ryd_by_state = acc.t_ryd;
  result.t_int = 0.25 * (acc.t_int[0] + acc.t_int[1] + acc.t_int[2] + acc.t_int[3]);
  result.t_ryd = 0.25 * (acc.t_ryd[0] + acc.t_ryd[1] + acc.t_ryd[2] + acc.t_ryd[3]);
  return result;
}

EvolutionResult propagate(const SystemConfig& config, const PulseProtocol& pulse,
                          int substeps_per_segment, bool record_trajectory) {
  pulse.validate();
  if (substeps_per_segment < 1)
    throw std::invalid_argument("substeps_per_segment must be >= 1");

  std::vector<ScheduleStep> steps;
  steps.reserve(static_cast<std::size_t>(pulse.segments) * substeps_per_segment);
  const double dt_sub = pulse.dt() / substeps_per_segment;
  for (int k = 0; k < pulse.segments; ++k) {
    const ControlSnapshot snap = snapshot_for_segment(pulse, k);
    for (int j = 0; j < substeps_per_segment; ++j)
      steps.push_back({snap, dt_sub});
  }
  return evolve_schedule(config, steps, record_trajectory);
}

double gate_fidelity(const Matrix16& final_operator, const GateTarget& target) {
  const Matrix4 projected = project_to_qubit(final_operator);
  return std::abs((target.matrix.adjoint() * projected).trace()) / 4.0;
}

double gate_fidelity(const EvolutionResult& result, const GateTarget& target) {
  return gate_fidelity(result.final_operator, target);
}

double exchange_phase(const EvolutionResult& result, const SystemConfig& config) {
  return result.t_int * config.v_dipole;
}

RescaledPulse rescale_pulse(const PulseProtocol& pulse, double new_omega_max,
                            double new_v_dipole) {
  pulse.validate();
  if (!(new_omega_max > 0.0))
    throw std::invalid_argument("new maximal Rabi frequency must be positive");
  const double omega_old = pulse.max_rabi();
  if (!(omega_old > 0.0))
    throw std::invalid_argument("pulse has no drive to rescale");
  const double amp_scale = new_omega_max / omega_old;

  RescaledPulse out;
  out.pulse = pulse;
  out.pulse.duration = pulse.duration / amp_scale;
  out.pulse.omega0 = pulse.omega0 * amp_scale;
  if (pulse.modulation == Modulation::Rabi)
    for (auto& arr : out.pulse.controls)
      for (double& v : arr) v *= amp_scale;
  if (new_v_dipole > 0.0) {
    const double preserved = pulse.v_over_omega * new_omega_max;
    out.pulse.v_over_omega = new_v_dipole / new_omega_max;
    out.v_ratio_broken =
        std::abs(new_v_dipole - preserved) > 1e-12 * std::abs(preserved);
  }
  return out;
}

}  // namespace pulselab
