/*
 * pulselab C API: pulse synthesis and noise analysis for native iSWAP /
 * exchange gates on two dipole-coupled Rydberg atoms.
 *
 * Conventions:
 *   - All rates and frequencies are angular (rad/s) unless a name says _hz.
 *   - Functions return PLAB_OK (0) on success or a nonzero plab_status;
 *     plab_last_error() describes the most recent failure on this thread.
 *   - Objects behind plab_* handles are created and destroyed by the library;
 *     every *_create / functions returning a new handle pair with *_destroy.
 *   - Handles are immutable after creation and safe to share across threads.
 */

#ifndef PULSELAB_H
#define PULSELAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PLAB_API __declspec(dllexport)
#else
#define PLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum plab_status {
  PLAB_OK = 0,
  PLAB_ERR_INVALID_ARGUMENT = 1,
  PLAB_ERR_CONFIG = 2,
  PLAB_ERR_DATA_GAP = 3,
  PLAB_ERR_NUMERICAL = 4,
  PLAB_ERR_IO = 5
} plab_status;

typedef enum plab_scheme { PLAB_SCHEME_A = 0, PLAB_SCHEME_B = 1 } plab_scheme;
typedef enum plab_modulation {
  PLAB_MOD_RABI = 0,
  PLAB_MOD_PHASE = 1
} plab_modulation;
/* Drive channels 0<->1, 1<->r, 0<->r', r<->r'. */
typedef enum plab_channel {
  PLAB_CH_01 = 0,
  PLAB_CH_1R = 1,
  PLAB_CH_0RP = 2,
  PLAB_CH_RRP = 3
} plab_channel;
typedef enum plab_noise_kind {
  PLAB_NOISE_PHASE = 0,
  PLAB_NOISE_INTENSITY = 1
} plab_noise_kind;
typedef enum plab_series {
  PLAB_SERIES_3S1 = 0,
  PLAB_SERIES_3P0 = 1,
  PLAB_SERIES_3D1 = 2
} plab_series;

PLAB_API const char* plab_version(void);
/* Message for the most recent error on the calling thread. */
PLAB_API const char* plab_last_error(void);

/* ------------------------------------------------------------------ pulses */

typedef struct plab_pulse plab_pulse;

/* controls: n_channels rows of n_segments values, row-major. Rabi arrays in
 * rad/s for Rabi modulation, phases in rad for phase modulation. */
PLAB_API plab_status plab_pulse_create(plab_scheme scheme,
                                       plab_modulation modulation,
                                       double duration, int n_segments,
                                       const plab_channel* channels,
                                       int n_channels, const double* controls,
                                       double omega0, double v_over_omega,
                                       plab_pulse** out);
PLAB_API void plab_pulse_destroy(plab_pulse* pulse);
PLAB_API plab_pulse* plab_pulse_clone(const plab_pulse* pulse);

PLAB_API plab_scheme plab_pulse_scheme(const plab_pulse* pulse);
PLAB_API plab_modulation plab_pulse_modulation(const plab_pulse* pulse);
PLAB_API double plab_pulse_duration(const plab_pulse* pulse);
PLAB_API int plab_pulse_segments(const plab_pulse* pulse);
PLAB_API int plab_pulse_channel_count(const plab_pulse* pulse);
PLAB_API plab_channel plab_pulse_channel(const plab_pulse* pulse, int index);
PLAB_API plab_status plab_pulse_controls(const plab_pulse* pulse, int index,
                                         double* buffer, size_t buffer_len);
PLAB_API double plab_pulse_omega0(const plab_pulse* pulse);
PLAB_API double plab_pulse_v_over_omega(const plab_pulse* pulse);
PLAB_API double plab_pulse_max_rabi(const plab_pulse* pulse);

/* Rescale to a new maximal Rabi frequency: the time axis contracts by
 * omega_old/omega_new and V tracks v_over_omega unless new_v_dipole > 0
 * overrides it (then *v_ratio_broken is set). */
PLAB_API plab_status plab_pulse_rescale(const plab_pulse* pulse,
                                        double new_omega_max,
                                        double new_v_dipole,
                                        plab_pulse** out,
                                        int* v_ratio_broken);

/* -------------------------------------------------------------- propagation */

typedef struct plab_system_config {
  double v_dipole; /* rad/s */
  double gamma_r;  /* rad/s */
  double gamma_rp; /* rad/s */
  plab_scheme scheme;
} plab_system_config;

typedef struct plab_evolution plab_evolution;

PLAB_API plab_status plab_propagate(const plab_system_config* config,
                                    const plab_pulse* pulse,
                                    int substeps_per_segment,
                                    plab_evolution** out);
PLAB_API void plab_evolution_destroy(plab_evolution* evolution);
PLAB_API double plab_evolution_t_int(const plab_evolution* evolution);
PLAB_API double plab_evolution_t_ryd(const plab_evolution* evolution);
/* 16x16 row-major complex matrix as interleaved re,im pairs (512 doubles). */
PLAB_API plab_status plab_evolution_final_operator(
    const plab_evolution* evolution, double* buffer, size_t buffer_len);
/* F = |tr(U_XY(theta)^dag P U P)| / 4. */
PLAB_API plab_status plab_evolution_fidelity(const plab_evolution* evolution,
                                             double theta, double* out);
PLAB_API double plab_evolution_exchange_phase(const plab_evolution* evolution,
                                              const plab_system_config* config);

/* ------------------------------------------------------------- optimization */

typedef struct plab_opt_settings {
  double lambda;
  int restarts;
  int max_iterations;
  double gradient_tolerance;
  uint64_t seed;
  int bounds_mode; /* 0 = box, 1 = squared reparameterization */
  double init_amplitude;
  double rabi_upper_bound; /* 0 = unbounded */
  double boundary_penalty;
  double continuation_threshold;
} plab_opt_settings;

PLAB_API plab_opt_settings plab_opt_settings_default(void);

typedef struct plab_record_set plab_record_set;

/* Unitless synthesis; durations and rates follow the internal convention
 * (phase modulation: Omega0 = 2*pi; Rabi modulation: V_dipole = 2*pi). */
PLAB_API plab_status plab_optimize(plab_scheme scheme,
                                   plab_modulation modulation, double theta,
                                   double duration, int segments,
                                   double v_over_omega,
                                   const plab_opt_settings* settings,
                                   const plab_pulse* warm_start, /* nullable */
                                   plab_record_set** out);

PLAB_API plab_status plab_landscape_sweep(
    plab_scheme scheme, plab_modulation modulation, double theta,
    const double* durations, int n_durations, const double* v_over_omega,
    int n_v, int runs_per_point, int segments,
    const plab_opt_settings* settings, plab_record_set** out);

PLAB_API plab_status plab_continuation_theta(const plab_pulse* seed_pulse,
                                             const double* thetas, int n_thetas,
                                             const plab_opt_settings* settings,
                                             plab_record_set** out);

PLAB_API void plab_record_set_destroy(plab_record_set* records);
PLAB_API int plab_record_count(const plab_record_set* records);
PLAB_API plab_status plab_record_pulse(const plab_record_set* records,
                                       int index, plab_pulse** out);
PLAB_API double plab_record_theta(const plab_record_set* r, int i);
PLAB_API double plab_record_infidelity(const plab_record_set* r, int i);
PLAB_API double plab_record_cost(const plab_record_set* r, int i);
PLAB_API double plab_record_t_int(const plab_record_set* r, int i);
PLAB_API double plab_record_t_ryd(const plab_record_set* r, int i);
PLAB_API int plab_record_iterations(const plab_record_set* r, int i);
PLAB_API uint64_t plab_record_seed(const plab_record_set* r, int i);
PLAB_API int plab_record_converged(const plab_record_set* r, int i);

/* Smallest grid duration whose best infidelity is below `threshold` with the
 * preceding grid point above `upper`. Returns 1 and sets *tau_star when
 * found, 0 otherwise. */
PLAB_API int plab_detect_speed_limit(const plab_record_set* records,
                                     double threshold, double upper,
                                     double* tau_star);

/* -------------------------------------------------------------------- noise */

typedef struct plab_trap_config {
  double omega_xy;    /* rad/s */
  double omega_z;     /* rad/s */
  double temperature; /* K */
  double mass;        /* kg */
  double separation;  /* m */
  double c3;          /* rad/s m^3 */
  int zero_temperature;
} plab_trap_config;

typedef struct plab_psd plab_psd;

PLAB_API plab_status plab_psd_create(plab_noise_kind kind,
                                     const double* frequency_hz,
                                     const double* density, size_t rows,
                                     plab_psd** out);
PLAB_API void plab_psd_destroy(plab_psd* psd);

typedef struct plab_noise_params {
  plab_trap_config trap;
  double k_eff[4][3]; /* rad/m per channel per axis */
  const plab_psd* phase_psd;     /* nullable */
  const plab_psd* intensity_psd; /* nullable */
  int substeps;
  int psd_padding;
  int shared_doppler;
} plab_noise_params;

PLAB_API plab_noise_params plab_noise_params_default(void);

PLAB_API plab_status plab_position_sigma(const plab_trap_config* trap,
                                         double out_xyz[3]);
PLAB_API plab_status plab_velocity_sigma(const plab_trap_config* trap,
                                         double out_xyz[3]);
PLAB_API plab_status plab_doppler_sigma(const plab_noise_params* params,
                                        double out_per_channel[4]);

enum {
  PLAB_SOURCE_INTERACTION = 1 << 0,
  PLAB_SOURCE_DOPPLER = 1 << 1,
  PLAB_SOURCE_DECAY = 1 << 2,
  PLAB_SOURCE_LASER_PHASE = 1 << 3,
  PLAB_SOURCE_LASER_INTENSITY = 1 << 4,
  PLAB_SOURCE_ATOMIC = PLAB_SOURCE_INTERACTION | PLAB_SOURCE_DOPPLER |
                       PLAB_SOURCE_DECAY,
  PLAB_SOURCE_ALL = PLAB_SOURCE_ATOMIC | PLAB_SOURCE_LASER_PHASE |
                    PLAB_SOURCE_LASER_INTENSITY
};

typedef struct plab_budget_row {
  double mean;
  double std_error;
  long shots;
  int computed;
} plab_budget_row;

/* Row order: noise-free, interaction, doppler, decay, laser phase, laser
 * intensity, all-combined. */
enum { PLAB_BUDGET_ROWS = 7 };

PLAB_API plab_status plab_noise_budget(const plab_system_config* config,
                                       const plab_pulse* pulse, double theta,
                                       const plab_noise_params* params,
                                       unsigned sources, long shots,
                                       uint64_t seed,
                                       plab_budget_row rows[PLAB_BUDGET_ROWS]);

/* ---------------------------------------------------------------------- frt */

typedef struct plab_spectrum plab_spectrum;

PLAB_API plab_status plab_response_function(const plab_system_config* config,
                                            const plab_pulse* pulse,
                                            plab_noise_kind kind,
                                            const double* frequencies,
                                            size_t n_frequencies, int substeps,
                                            plab_spectrum** out);
/* 400-point default grid spanning [0, 10 * max_rabi / 2 pi]. */
PLAB_API plab_status plab_default_frequency_grid(const plab_pulse* pulse,
                                                 double* buffer, size_t len,
                                                 size_t* written);
PLAB_API void plab_spectrum_destroy(plab_spectrum* spectrum);
PLAB_API size_t plab_spectrum_points(const plab_spectrum* spectrum);
PLAB_API int plab_spectrum_channel_count(const plab_spectrum* spectrum);
PLAB_API plab_channel plab_spectrum_channel(const plab_spectrum* spectrum,
                                            int index);
PLAB_API plab_status plab_spectrum_frequencies(const plab_spectrum* spectrum,
                                               double* buffer, size_t len);
PLAB_API plab_status plab_spectrum_values(const plab_spectrum* spectrum,
                                          int channel_index, double* buffer,
                                          size_t len);
/* Sum over channels of the trapezoid integral S(f) I(f) df. */
PLAB_API plab_status plab_frt_infidelity(const plab_spectrum* spectrum,
                                         const plab_psd* psd, double* out);
/* Per-channel (I_phase(0), I_intensity(0)); arrays sized to channel count. */
PLAB_API plab_status plab_zero_frequency_audit(const plab_system_config* config,
                                               const plab_pulse* pulse,
                                               int substeps, double* phase_out,
                                               double* intensity_out,
                                               int* n_channels);

/* ------------------------------------------------------------- atomic data */

typedef struct plab_atomic plab_atomic;

PLAB_API plab_status plab_atomic_create(const char* qd_table_path,
                                        plab_atomic** out);
PLAB_API void plab_atomic_destroy(plab_atomic* atomic);

PLAB_API plab_status plab_quantum_defect(const plab_atomic* atomic,
                                         plab_series series, int n,
                                         double* out);
PLAB_API plab_status plab_level_energy_ghz(const plab_atomic* atomic,
                                           plab_series series, int n,
                                           double* out);

typedef struct plab_decay_report plab_decay_report;

PLAB_API plab_status plab_decay_rate(const plab_atomic* atomic,
                                     plab_series series, int n,
                                     plab_decay_report** out);
PLAB_API void plab_decay_report_destroy(plab_decay_report* report);
PLAB_API double plab_decay_report_rate(const plab_decay_report* report);
PLAB_API double plab_decay_report_lifetime(const plab_decay_report* report);
PLAB_API int plab_decay_report_channel_count(const plab_decay_report* report);
PLAB_API plab_status plab_decay_report_channel(const plab_decay_report* report,
                                               int index, plab_series* series,
                                               int* n, double* j,
                                               double* partial_rate);
PLAB_API int plab_decay_report_complete(const plab_decay_report* report);

typedef struct plab_scaling {
  double c3;          /* rad/s m^3 */
  double rabi_factor; /* Omega(n)/Omega(61) at fixed laser power */
  double wavelength;  /* m */
  double keff_factor; /* k_eff(n)/k_eff(61) */
  double gamma_r;     /* 1/s */
  double gamma_rp;    /* 1/s */
} plab_scaling;

PLAB_API plab_status plab_scaling_laws(const plab_atomic* atomic, int n,
                                       plab_scaling* out);

PLAB_API double plab_sr88_mass(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PULSELAB_H */
