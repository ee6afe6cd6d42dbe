#include "pulselab/pulselab.h"

#include <cstring>
#include <memory>
#include <string>

#include "core/frt.hpp"
#include "core/grape.hpp"
#include "core/noise.hpp"
#include "core/propagator.hpp"
#include "core/sr88.hpp"

using namespace pulselab;

namespace {

thread_local std::string g_last_error;

plab_status fail(plab_status code, const char* what) {
  g_last_error = what ? what : "unknown error";
  return code;
}

// Maps C++ exceptions onto status codes at the API boundary.
template <typename Fn>
plab_status guarded(Fn&& fn) {
  try {
    fn();
    return PLAB_OK;
  } catch (const DataGapError& e) {
    return fail(PLAB_ERR_DATA_GAP, e.what());
  } catch (const ConfigError& e) {
    return fail(PLAB_ERR_CONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(PLAB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(PLAB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(PLAB_ERR_NUMERICAL, e.what());
  }
}

Scheme to_scheme(plab_scheme s) {
  return s == PLAB_SCHEME_A ? Scheme::A : Scheme::B;
}
Modulation to_modulation(plab_modulation m) {
  return m == PLAB_MOD_RABI ? Modulation::Rabi : Modulation::Phase;
}
DriveChannel to_channel(plab_channel c) { return static_cast<DriveChannel>(c); }
plab_channel from_channel(DriveChannel c) {
  return static_cast<plab_channel>(c);
}

SystemConfig to_config(const plab_system_config& c) {
  return {c.v_dipole, c.gamma_r, c.gamma_rp, to_scheme(c.scheme)};
}

TrapConfig to_trap(const plab_trap_config& t) {
  return {t.omega_xy, t.omega_z,   t.temperature,
          t.mass,     t.separation, t.c3,
          t.zero_temperature != 0};
}

OptimizationSettings to_settings(const plab_opt_settings& s) {
  OptimizationSettings out;
  out.lambda = s.lambda;
  out.restarts = s.restarts;
  out.max_iterations = s.max_iterations;
  out.gradient_tolerance = s.gradient_tolerance;
  out.seed = s.seed;
  out.bounds_mode = s.bounds_mode == 1
                        ? OptimizationSettings::Bounds::Reparameterize
                        : OptimizationSettings::Bounds::Box;
  out.init_amplitude = s.init_amplitude;
  out.rabi_upper_bound = s.rabi_upper_bound;
  out.boundary_penalty = s.boundary_penalty;
  out.continuation_threshold = s.continuation_threshold;
  return out;
}

}  // namespace

struct plab_pulse {
  PulseProtocol p;
};
struct plab_evolution {
  EvolutionResult r;
};
struct plab_record_set {
  std::vector<OptimizationRecord> records;
};
struct plab_psd {
  PsdTable table;
};
struct plab_spectrum {
  ResponseSpectrum s;
};
struct plab_atomic {
  Sr88Model model;
};
struct plab_decay_report {
  DecayReport r;
};

extern "C" {

const char* plab_version(void) { return "0.1.0"; }
const char* plab_last_error(void) { return g_last_error.c_str(); }

plab_status plab_pulse_create(plab_scheme scheme, plab_modulation modulation,
                              double duration, int n_segments,
                              const plab_channel* channels, int n_channels,
                              const double* controls, double omega0,
                              double v_over_omega, plab_pulse** out) {
  if (!out || !channels || !controls)
    return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer argument");
  return guarded([&] {
    PulseProtocol p;
    p.scheme = to_scheme(scheme);
    p.modulation = to_modulation(modulation);
    p.duration = duration;
    p.segments = n_segments;
    p.omega0 = omega0;
    p.v_over_omega = v_over_omega;
    for (int c = 0; c < n_channels; ++c) {
      p.channels.push_back(to_channel(channels[c]));
      p.controls.emplace_back(controls + c * n_segments,
                              controls + (c + 1) * n_segments);
    }
    p.validate();
    *out = new plab_pulse{std::move(p)};
  });
}

void plab_pulse_destroy(plab_pulse* pulse) { delete pulse; }

plab_pulse* plab_pulse_clone(const plab_pulse* pulse) {
  return pulse ? new plab_pulse{pulse->p} : nullptr;
}

plab_scheme plab_pulse_scheme(const plab_pulse* p) {
  return p->p.scheme == Scheme::A ? PLAB_SCHEME_A : PLAB_SCHEME_B;
}
plab_modulation plab_pulse_modulation(const plab_pulse* p) {
  return p->p.modulation == Modulation::Rabi ? PLAB_MOD_RABI : PLAB_MOD_PHASE;
}
double plab_pulse_duration(const plab_pulse* p) { return p->p.duration; }
int plab_pulse_segments(const plab_pulse* p) { return p->p.segments; }
int plab_pulse_channel_count(const plab_pulse* p) {
  return static_cast<int>(p->p.channels.size());
}
plab_channel plab_pulse_channel(const plab_pulse* p, int index) {
  return from_channel(p->p.channels.at(index));
}
plab_status plab_pulse_controls(const plab_pulse* p, int index, double* buffer,
                                size_t buffer_len) {
  if (!p || !buffer) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    const auto& arr = p->p.controls.at(index);
    if (buffer_len < arr.size())
      throw std::invalid_argument("controls buffer too small");
    std::memcpy(buffer, arr.data(), arr.size() * sizeof(double));
  });
}
double plab_pulse_omega0(const plab_pulse* p) { return p->p.omega0; }
double plab_pulse_v_over_omega(const plab_pulse* p) {
  return p->p.v_over_omega;
}
double plab_pulse_max_rabi(const plab_pulse* p) { return p->p.max_rabi(); }

plab_status plab_pulse_rescale(const plab_pulse* pulse, double new_omega_max,
                               double new_v_dipole, plab_pulse** out,
                               int* v_ratio_broken) {
  if (!pulse || !out) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    RescaledPulse r = rescale_pulse(pulse->p, new_omega_max, new_v_dipole);
    if (v_ratio_broken) *v_ratio_broken = r.v_ratio_broken ? 1 : 0;
    *out = new plab_pulse{std::move(r.pulse)};
  });
}

plab_status plab_propagate(const plab_system_config* config,
                           const plab_pulse* pulse, int substeps,
                           plab_evolution** out) {
  if (!config || !pulse || !out)
    return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    *out = new plab_evolution{propagate(to_config(*config), pulse->p, substeps)};
  });
}

void plab_evolution_destroy(plab_evolution* e) { delete e; }
double plab_evolution_t_int(const plab_evolution* e) { return e->r.t_int; }
double plab_evolution_t_ryd(const plab_evolution* e) { return e->r.t_ryd; }

plab_status plab_evolution_final_operator(const plab_evolution* e,
                                          double* buffer, size_t buffer_len) {
  if (!e || !buffer) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  if (buffer_len < 512)
    return fail(PLAB_ERR_INVALID_ARGUMENT, "buffer must hold 512 doubles");
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      buffer[2 * (16 * i + j)] = e->r.final_operator(i, j).real();
      buffer[2 * (16 * i + j) + 1] = e->r.final_operator(i, j).imag();
    }
  return PLAB_OK;
}

plab_status plab_evolution_fidelity(const plab_evolution* e, double theta,
                                    double* out) {
  if (!e || !out) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = gate_fidelity(e->r, embed_target(theta)); });
}

double plab_evolution_exchange_phase(const plab_evolution* e,
                                     const plab_system_config* config) {
  return exchange_phase(e->r, to_config(*config));
}

plab_opt_settings plab_opt_settings_default(void) {
  const OptimizationSettings d;
  plab_opt_settings s;
  s.lambda = d.lambda;
  s.restarts = d.restarts;
  s.max_iterations = d.max_iterations;
  s.gradient_tolerance = d.gradient_tolerance;
  s.seed = d.seed;
  s.bounds_mode = 0;
  s.init_amplitude = d.init_amplitude;
  s.rabi_upper_bound = d.rabi_upper_bound;
  s.boundary_penalty = d.boundary_penalty;
  s.continuation_threshold = d.continuation_threshold;
  return s;
}

plab_status plab_optimize(plab_scheme scheme, plab_modulation modulation,
                          double theta, double duration, int segments,
                          double v_over_omega,
                          const plab_opt_settings* settings,
                          const plab_pulse* warm_start, plab_record_set** out) {
  if (!settings || !out) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    const Ansatz ansatz =
        warm_start ? Ansatz::warm(warm_start->p) : Ansatz::random();
    OptimizationRecord rec =
        optimize(to_scheme(scheme), to_modulation(modulation), theta, duration,
                 segments, v_over_omega, to_settings(*settings), ansatz);
    auto* set = new plab_record_set;
    set->records.push_back(std::move(rec));
    *out = set;
  });
}

plab_status plab_landscape_sweep(plab_scheme scheme, plab_modulation modulation,
                                 double theta, const double* durations,
                                 int n_durations, const double* v_over_omega,
                                 int n_v, int runs_per_point, int segments,
                                 const plab_opt_settings* settings,
                                 plab_record_set** out) {
  if (!settings || !out || !durations || !v_over_omega)
    return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    auto* set = new plab_record_set;
    set->records = landscape_sweep(
        to_scheme(scheme), to_modulation(modulation), theta,
        {durations, static_cast<std::size_t>(n_durations)},
        {v_over_omega, static_cast<std::size_t>(n_v)}, runs_per_point, segments,
        to_settings(*settings));
    *out = set;
  });
}

plab_status plab_continuation_theta(const plab_pulse* seed_pulse,
                                    const double* thetas, int n_thetas,
                                    const plab_opt_settings* settings,
                                    plab_record_set** out) {
  if (!seed_pulse || !thetas || !settings || !out)
    return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    auto* set = new plab_record_set;
    set->records = continuation_theta(
        seed_pulse->p, {thetas, static_cast<std::size_t>(n_thetas)},
        to_settings(*settings));
    *out = set;
  });
}

void plab_record_set_destroy(plab_record_set* r) { delete r; }
int plab_record_count(const plab_record_set* r) {
  return static_cast<int>(r->records.size());
}
plab_status plab_record_pulse(const plab_record_set* r, int i,
                              plab_pulse** out) {
  if (!r || !out) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = new plab_pulse{r->records.at(i).pulse}; });
}
double plab_record_theta(const plab_record_set* r, int i) {
  return r->records.at(i).theta;
}
double plab_record_infidelity(const plab_record_set* r, int i) {
  return r->records.at(i).infidelity;
}
double plab_record_cost(const plab_record_set* r, int i) {
  return r->records.at(i).cost;
}
double plab_record_t_int(const plab_record_set* r, int i) {
  return r->records.at(i).t_int;
}
double plab_record_t_ryd(const plab_record_set* r, int i) {
  return r->records.at(i).t_ryd;
}
int plab_record_iterations(const plab_record_set* r, int i) {
  return r->records.at(i).iterations;
}
uint64_t plab_record_seed(const plab_record_set* r, int i) {
  return r->records.at(i).seed;
}
int plab_record_converged(const plab_record_set* r, int i) {
  return r->records.at(i).converged ? 1 : 0;
}

int plab_detect_speed_limit(const plab_record_set* records, double threshold,
                            double upper, double* tau_star) {
  const auto result = detect_speed_limit(records->records, threshold, upper);
  if (result && tau_star) *tau_star = *result;
  return result ? 1 : 0;
}

plab_status plab_psd_create(plab_noise_kind kind, const double* frequency_hz,
                            const double* density, size_t rows,
                            plab_psd** out) {
  if (!frequency_hz || !density || !out)
    return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    PsdTable t;
    t.kind = kind == PLAB_NOISE_PHASE ? PsdTable::Kind::Phase
                                      : PsdTable::Kind::Intensity;
    t.frequency.assign(frequency_hz, frequency_hz + rows);
    t.density.assign(density, density + rows);
    t.validate();
    *out = new plab_psd{std::move(t)};
  });
}

void plab_psd_destroy(plab_psd* psd) { delete psd; }

plab_noise_params plab_noise_params_default(void) {
  plab_noise_params p{};
  p.substeps = 8;
  p.psd_padding = 4;
  return p;
}

plab_status plab_position_sigma(const plab_trap_config* trap,
                                double out_xyz[3]) {
  if (!trap || !out_xyz) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    const auto s = position_sigma(to_trap(*trap));
    std::memcpy(out_xyz, s.data(), sizeof(double) * 3);
  });
}

plab_status plab_velocity_sigma(const plab_trap_config* trap,
                                double out_xyz[3]) {
  if (!trap || !out_xyz) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    const auto s = velocity_sigma(to_trap(*trap));
    std::memcpy(out_xyz, s.data(), sizeof(double) * 3);
  });
}

namespace {

NoiseConfig to_noise_config(const plab_noise_params& p) {
  NoiseConfig n;
  n.trap = to_trap(p.trap);
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 3; ++a) n.wavevectors.k_eff[c][a] = p.k_eff[c][a];
  if (p.phase_psd) n.phase_psd = p.phase_psd->table;
  if (p.intensity_psd) n.intensity_psd = p.intensity_psd->table;
  n.substeps = p.substeps > 0 ? p.substeps : 8;
  n.psd_padding = p.psd_padding > 0 ? p.psd_padding : 4;
  n.shared_doppler = p.shared_doppler != 0;
  return n;
}

}  // namespace

plab_status plab_doppler_sigma(const plab_noise_params* params,
                               double out_per_channel[4]) {
  if (!params || !out_per_channel)
    return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    const NoiseConfig n = to_noise_config(*params);
    const auto s = doppler_sigma(n.trap, n.wavevectors);
    std::memcpy(out_per_channel, s.data(), sizeof(double) * 4);
  });
}

plab_status plab_noise_budget(const plab_system_config* config,
                              const plab_pulse* pulse, double theta,
                              const plab_noise_params* params, unsigned sources,
                              long shots, uint64_t seed,
                              plab_budget_row rows[PLAB_BUDGET_ROWS]) {
  if (!config || !pulse || !params || !rows)
    return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    NoiseSources src;
    src.interaction = sources & PLAB_SOURCE_INTERACTION;
    src.doppler = sources & PLAB_SOURCE_DOPPLER;
    src.decay = sources & PLAB_SOURCE_DECAY;
    src.laser_phase = sources & PLAB_SOURCE_LASER_PHASE;
    src.laser_intensity = sources & PLAB_SOURCE_LASER_INTENSITY;
    const NoiseBudget b =
        noise_budget(to_config(*config), pulse->p, embed_target(theta),
                     to_noise_config(*params), src, shots, seed);
    const BudgetRow* ordered[PLAB_BUDGET_ROWS] = {
        &b.noise_free, &b.interaction,     &b.doppler, &b.decay,
        &b.laser_phase, &b.laser_intensity, &b.combined};
    for (int i = 0; i < PLAB_BUDGET_ROWS; ++i) {
      rows[i].mean = ordered[i]->mean;
      rows[i].std_error = ordered[i]->std_error;
      rows[i].shots = ordered[i]->shots;
      rows[i].computed = ordered[i]->computed ? 1 : 0;
    }
  });
}

plab_status plab_response_function(const plab_system_config* config,
                                   const plab_pulse* pulse,
                                   plab_noise_kind kind,
                                   const double* frequencies,
                                   size_t n_frequencies, int substeps,
                                   plab_spectrum** out) {
  if (!config || !pulse || !frequencies || !out)
    return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    *out = new plab_spectrum{response_function(
        to_config(*config), pulse->p,
        kind == PLAB_NOISE_PHASE ? NoiseKind::Phase : NoiseKind::Intensity,
        {frequencies, n_frequencies}, substeps)};
  });
}

plab_status plab_default_frequency_grid(const plab_pulse* pulse, double* buffer,
                                        size_t len, size_t* written) {
  if (!pulse || !buffer || !written)
    return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    const auto grid = default_frequency_grid(pulse->p);
    if (len < grid.size())
      throw std::invalid_argument("frequency buffer too small");
    std::memcpy(buffer, grid.data(), grid.size() * sizeof(double));
    *written = grid.size();
  });
}

void plab_spectrum_destroy(plab_spectrum* s) { delete s; }
size_t plab_spectrum_points(const plab_spectrum* s) {
  return s->s.frequencies.size();
}
int plab_spectrum_channel_count(const plab_spectrum* s) {
  return static_cast<int>(s->s.channels.size());
}
plab_channel plab_spectrum_channel(const plab_spectrum* s, int index) {
  return from_channel(s->s.channels.at(index));
}
plab_status plab_spectrum_frequencies(const plab_spectrum* s, double* buffer,
                                      size_t len) {
  if (!s || !buffer) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  if (len < s->s.frequencies.size())
    return fail(PLAB_ERR_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buffer, s->s.frequencies.data(),
              s->s.frequencies.size() * sizeof(double));
  return PLAB_OK;
}
plab_status plab_spectrum_values(const plab_spectrum* s, int channel_index,
                                 double* buffer, size_t len) {
  if (!s || !buffer) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    const auto& v = s->s.values.at(channel_index);
    if (len < v.size()) throw std::invalid_argument("buffer too small");
    std::memcpy(buffer, v.data(), v.size() * sizeof(double));
  });
}

plab_status plab_frt_infidelity(const plab_spectrum* spectrum,
                                const plab_psd* psd, double* out) {
  if (!spectrum || !psd || !out)
    return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = frt_infidelity(spectrum->s, psd->table); });
}

plab_status plab_zero_frequency_audit(const plab_system_config* config,
                                      const plab_pulse* pulse, int substeps,
                                      double* phase_out, double* intensity_out,
                                      int* n_channels) {
  if (!config || !pulse || !phase_out || !intensity_out || !n_channels)
    return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    const auto audit =
        zero_frequency_audit(to_config(*config), pulse->p, substeps);
    *n_channels = static_cast<int>(audit.size());
    for (std::size_t i = 0; i < audit.size(); ++i) {
      phase_out[i] = audit[i].phase_response;
      intensity_out[i] = audit[i].intensity_response;
    }
  });
}

plab_status plab_atomic_create(const char* qd_table_path, plab_atomic** out) {
  if (!qd_table_path || !out)
    return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  try {
    *out = new plab_atomic{Sr88Model::from_file(qd_table_path)};
    return PLAB_OK;
  } catch (const std::exception& e) {
    return fail(PLAB_ERR_IO, e.what());
  }
}

void plab_atomic_destroy(plab_atomic* atomic) { delete atomic; }

namespace {
Series to_series(plab_series s) { return static_cast<Series>(s); }
plab_series from_series(Series s) { return static_cast<plab_series>(s); }
}  // namespace

plab_status plab_quantum_defect(const plab_atomic* atomic, plab_series series,
                                int n, double* out) {
  if (!atomic || !out) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = atomic->model.quantum_defect(to_series(series), n); });
}

plab_status plab_level_energy_ghz(const plab_atomic* atomic, plab_series series,
                                  int n, double* out) {
  if (!atomic || !out) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded(
      [&] { *out = atomic->model.level_energy_ghz(to_series(series), n); });
}

plab_status plab_decay_rate(const plab_atomic* atomic, plab_series series,
                            int n, plab_decay_report** out) {
  if (!atomic || !out) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    *out = new plab_decay_report{atomic->model.decay_rate(to_series(series), n)};
  });
}

void plab_decay_report_destroy(plab_decay_report* r) { delete r; }
double plab_decay_report_rate(const plab_decay_report* r) { return r->r.rate; }
double plab_decay_report_lifetime(const plab_decay_report* r) {
  return r->r.lifetime;
}
int plab_decay_report_channel_count(const plab_decay_report* r) {
  return static_cast<int>(r->r.channels.size());
}
plab_status plab_decay_report_channel(const plab_decay_report* r, int index,
                                      plab_series* series, int* n, double* j,
                                      double* partial_rate) {
  if (!r) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    const DecayChannel& c = r->r.channels.at(index);
    if (series) *series = from_series(c.series);
    if (n) *n = c.n;
    if (j) *j = c.j;
    if (partial_rate) *partial_rate = c.partial_rate;
  });
}
int plab_decay_report_complete(const plab_decay_report* r) {
  return r->r.complete_coverage ? 1 : 0;
}

plab_status plab_scaling_laws(const plab_atomic* atomic, int n,
                              plab_scaling* out) {
  if (!atomic || !out) return fail(PLAB_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    const ScalingLaws laws = atomic->model.scaling_laws(n);
    out->c3 = laws.c3;
    out->rabi_factor = laws.rabi_factor;
    out->wavelength = laws.wavelength;
    out->keff_factor = laws.keff_factor;
    out->gamma_r = laws.gamma_r;
    out->gamma_rp = laws.gamma_rp;
  });
}

double plab_sr88_mass(void) { return constants::mass_sr88; }

}  // extern "C"
