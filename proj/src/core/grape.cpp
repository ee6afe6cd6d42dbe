#include "core/grape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "core/lbfgs.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace pulselab {

double smoothness_cost(std::span<const double> control) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < control.size(); ++i) {
    const double d = 0.5 * (control[i + 1] - control[i]);
    c += d * d;
  }
  return c;
}

namespace {

// Adjoint GRAPE engine for one (scheme, modulation, duration, segments)
// problem. Controls are flattened channel-major; the forward pass stores the
// per-segment eigensystems and partial products so the backward pass can form
// exact exponential derivatives.
class GrapeProblem {
 public:
  GrapeProblem(const SystemConfig& config, const PulseProtocol& shape,
               const GateTarget& target, double lambda, double boundary_penalty)
      : config_(config),
        shape_(shape),
        target_embedded_(embed_qubit_matrix(target.matrix)),
        lambda_(lambda),
        boundary_penalty_(boundary_penalty),
        n_(shape.segments),
        dt_(shape.dt()) {
    config_.gamma_r = 0.0;  // cost is defined on the noise-free propagation
    config_.gamma_rp = 0.0;
    eigvecs_.resize(n_);
    eigvals_.resize(n_);
    forward_.resize(n_);
  }

  int parameter_count() const {
    return n_ * static_cast<int>(shape_.channels.size());
  }

  PulseProtocol pulse_from(std::span<const double> x) const {
    PulseProtocol p = shape_;
    p.controls.assign(p.channels.size(), std::vector<double>(n_));
    for (std::size_t c = 0; c < p.channels.size(); ++c)
      for (int k = 0; k < n_; ++k) p.controls[c][k] = x[c * n_ + k];
    return p;
  }

  double value_and_gradient(std::span<const double> x, std::span<double> grad) {
    const std::size_t nch = shape_.channels.size();
    // Forward pass: segment Hamiltonians, eigensystems, running products.
    Matrix16 u = Matrix16::Identity();
    for (int k = 0; k < n_; ++k) {
      const Matrix16 h = build_hamiltonian(config_, snapshot_at(x, k));
      Eigen::SelfAdjointEigenSolver<Matrix16> es(h);
      eigvecs_[k] = es.eigenvectors();
      eigvals_[k] = es.eigenvalues();
      Vector16 phases;
      for (int i = 0; i < 16; ++i)
        phases(i) = std::polar(1.0, -eigvals_[k](i) * dt_);
      const Matrix16 uk =
          eigvecs_[k] * phases.asDiagonal() * eigvecs_[k].adjoint();
      u = uk * u;
      forward_[k] = u;
    }
    const std::complex<double> z = (target_embedded_.adjoint() * u).trace();
    const double fidelity = std::abs(z) / 4.0;

    double cost = 1.0 - fidelity;
    for (std::size_t c = 0; c < nch; ++c)
      cost += lambda_ * smoothness_cost(x.subspan(c * n_, n_));
    if (boundary_penalty_ > 0.0)
      for (std::size_t c = 0; c < nch; ++c) {
        const double f0 = x[c * n_], fN = x[c * n_ + n_ - 1];
        cost += boundary_penalty_ * (f0 * f0 + fN * fN);
      }
    if (grad.empty()) return cost;

    // dF = Re(conj(z) dz) / (4 |z|); at z = 0 the modulus is not smooth, use 0.
    const std::complex<double> zbar =
        std::abs(z) > 0.0 ? std::conj(z) / (4.0 * std::abs(z))
                          : std::complex<double>(0.0);

    // Backward pass: R_k = E^dag U_{N-1}...U_{k+1}; W_k = X_{k-1} R_k.
    Matrix16 r = target_embedded_.adjoint();
    for (int k = n_ - 1; k >= 0; --k) {
      const Matrix16 w = k > 0 ? Matrix16(forward_[k - 1] * r) : r;
      const Matrix16 b = eigvecs_[k].adjoint() * w * eigvecs_[k];

      // Divided-difference kernel of the exponential map.
      Matrix16 kernel;
      for (int i = 0; i < 16; ++i) {
        const std::complex<double> ai(0.0, -eigvals_[k](i) * dt_);
        const std::complex<double> ei = std::exp(ai);
        for (int j = 0; j < 16; ++j) {
          const std::complex<double> aj(0.0, -eigvals_[k](j) * dt_);
          const std::complex<double> d = aj - ai;
          // kernel(j,i) pairs with b(i,j); entries with nearly equal
          // eigenvalues fall back to the derivative limit e^{a}.
          kernel(j, i) = std::abs(d) < 1e-14
                             ? ei
                             : (std::exp(aj) - ei) / d;
        }
      }

      for (std::size_t c = 0; c < nch; ++c) {
        const auto ch = shape_.channels[c];
        double alpha, beta;  // dH = alpha * Re-structure + beta * Im-structure
        if (shape_.modulation == Modulation::Rabi) {
          alpha = 1.0;
          beta = 0.0;
        } else {
          const double phi = x[c * n_ + k];
          alpha = -shape_.omega0 * std::sin(phi);
          beta = shape_.omega0 * std::cos(phi);
        }
        Matrix16 m = alpha * structure_in_eigenbasis(k, ch, false);
        if (beta != 0.0) m += beta * structure_in_eigenbasis(k, ch, true);

        std::complex<double> dz(0.0);
        for (int i = 0; i < 16; ++i)
          for (int j = 0; j < 16; ++j) dz += b(i, j) * kernel(j, i) * m(j, i);
        dz *= std::complex<double>(0.0, -dt_);

        grad[c * n_ + k] = -(zbar * dz).real() + smooth_grad(x, c, k);
      }
      r = r * segment_unitary(k);
    }
    return cost;
  }

 private:
  ControlSnapshot snapshot_at(std::span<const double> x, int k) const {
    ControlSnapshot s;
    for (std::size_t c = 0; c < shape_.channels.size(); ++c) {
      const double v = x[c * n_ + k];
      if (shape_.modulation == Modulation::Rabi)
        s.set(shape_.channels[c], v, 0.0);
      else
        s.set(shape_.channels[c], shape_.omega0, v);
    }
    return s;
  }

  Matrix16 segment_unitary(int k) const {
    Vector16 phases;
    for (int i = 0; i < 16; ++i)
      phases(i) = std::polar(1.0, -eigvals_[k](i) * dt_);
    return eigvecs_[k] * phases.asDiagonal() * eigvecs_[k].adjoint();
  }

  Matrix16 structure_in_eigenbasis(int k, DriveChannel c, bool imag) const {
    return eigvecs_[k].adjoint() * channel_drive_structure(c, imag) *
           eigvecs_[k];
  }

  double smooth_grad(std::span<const double> x, std::size_t c, int k) const {
    const double* f = x.data() + c * n_;
    double g = 0.0;
    if (k >= 1) g += 0.5 * (f[k] - f[k - 1]);
    if (k <= n_ - 2) g -= 0.5 * (f[k + 1] - f[k]);
    g *= lambda_;
    if (boundary_penalty_ > 0.0 && (k == 0 || k == n_ - 1))
      g += 2.0 * boundary_penalty_ * f[k];
    return g;
  }

  SystemConfig config_;
  PulseProtocol shape_;  // controls unused; carries channel layout etc.
  Matrix16 target_embedded_;
  double lambda_;
  double boundary_penalty_;
  int n_;
  double dt_;
  std::vector<Matrix16> eigvecs_;
  std::vector<Eigen::Matrix<double, 16, 1>> eigvals_;
  std::vector<Matrix16> forward_;
};

PulseProtocol make_shape(Scheme scheme, Modulation modulation, double duration,
                         int segments, double v_over_omega) {
  PulseProtocol p;
  p.scheme = scheme;
  p.modulation = modulation;
  p.duration = duration;
  p.segments = segments;
  p.channels = admitted_channels(scheme);
  p.controls.assign(p.channels.size(), std::vector<double>(segments, 0.0));
  p.omega0 = two_pi;
  p.v_over_omega = v_over_omega;
  return p;
}

SystemConfig config_for(Modulation modulation, double v_over_omega) {
  SystemConfig cfg;
  // Internal units: phase modulation pins Omega0 = 2*pi; Rabi modulation pins
  // V_dipole = 2*pi and lets the maximal Rabi frequency emerge.
  cfg.v_dipole =
      modulation == Modulation::Phase ? v_over_omega * two_pi : two_pi;
  return cfg;
}

std::vector<double> flatten(const PulseProtocol& p) {
  std::vector<double> x;
  x.reserve(p.channels.size() * p.segments);
  for (const auto& arr : p.controls) x.insert(x.end(), arr.begin(), arr.end());
  return x;
}

}  // namespace

double total_cost(const SystemConfig& config, const PulseProtocol& pulse,
                  const GateTarget& target, double lambda) {
  pulse.validate();
  GrapeProblem problem(config, pulse, target, lambda, 0.0);
  const std::vector<double> x = flatten(pulse);
  return problem.value_and_gradient(x, {});
}

std::vector<double> cost_gradient(const SystemConfig& config,
                                  const PulseProtocol& pulse,
                                  const GateTarget& target, double lambda) {
  pulse.validate();
  GrapeProblem problem(config, pulse, target, lambda, 0.0);
  const std::vector<double> x = flatten(pulse);
  std::vector<double> grad(x.size());
  problem.value_and_gradient(x, grad);
  return grad;
}

namespace {

OptimizationRecord run_single(Scheme scheme, Modulation modulation,
                              double theta, double duration, int segments,
                              double v_over_omega,
                              const OptimizationSettings& settings,
                              const Ansatz& ansatz, std::uint64_t run_seed) {
  const GateTarget target = embed_target(theta);
  SystemConfig cfg = config_for(modulation, v_over_omega);
  PulseProtocol shape =
      make_shape(scheme, modulation, duration, segments, v_over_omega);

  std::vector<double> x0;
  if (ansatz.kind == Ansatz::Kind::WarmStart) {
    PulseProtocol warm = ansatz.warm_start;
    warm.duration = duration;
    x0 = flatten(warm);
  } else {
    auto rng = make_stream(run_seed);
    x0.resize(shape.channels.size() * static_cast<std::size_t>(segments));
    if (modulation == Modulation::Rabi) {
      std::uniform_real_distribution<double> dist(0.0, settings.init_amplitude);
      for (double& v : x0) v = dist(rng);
    } else {
      std::uniform_real_distribution<double> dist(-two_pi / 2.0, two_pi / 2.0);
      for (double& v : x0) v = dist(rng);
    }
  }

  const bool reparam = modulation == Modulation::Rabi &&
                       settings.bounds_mode ==
                           OptimizationSettings::Bounds::Reparameterize;

  // settings.lambda is quoted for controls measured in units of Omega; Rabi
  // arrays carry the internal unit 2*pi, so the raw smoothness weight scales
  // by 1/(2*pi)^2. Phase arrays are unit-free.
  const double lambda_raw = modulation == Modulation::Rabi
                                ? settings.lambda / (two_pi * two_pi)
                                : settings.lambda;
  GrapeProblem problem(cfg, shape, target, lambda_raw,
                       settings.boundary_penalty);
  ObjectiveFn objective;
  if (!reparam) {
    objective = [&problem](std::span<const double> x, std::span<double> g) {
      return problem.value_and_gradient(x, g);
    };
  } else {
    // Omega = g^2 keeps Rabi amplitudes non-negative without explicit bounds.
    objective = [&problem](std::span<const double> g_params,
                           std::span<double> grad) {
      std::vector<double> x(g_params.size());
      for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = g_params[i] * g_params[i];
      const double v = problem.value_and_gradient(x, grad);
      for (std::size_t i = 0; i < grad.size(); ++i)
        grad[i] *= 2.0 * g_params[i];
      return v;
    };
  }

  LbfgsOptions opts;
  opts.max_iterations = settings.max_iterations;
  opts.gradient_tolerance = settings.gradient_tolerance;
  if (modulation == Modulation::Rabi && !reparam) {
    const double upper = settings.rabi_upper_bound > 0.0
                             ? settings.rabi_upper_bound
                             : std::numeric_limits<double>::infinity();
    opts.lower.assign(x0.size(), 0.0);
    opts.upper.assign(x0.size(), upper);
  }
  if (reparam)
    for (double& v : x0) v = std::sqrt(std::max(0.0, v));

  LbfgsResult res = lbfgs_minimize(objective, std::move(x0), opts);
  if (reparam)
    for (double& v : res.x) v = v * v;

  OptimizationRecord rec;
  rec.theta = theta;
  rec.pulse = problem.pulse_from(res.x);
  rec.cost = res.value;
  rec.iterations = res.iterations;
  rec.seed = run_seed;
  rec.converged = res.converged;
  if (modulation == Modulation::Rabi) {
    const double omega_max = rec.pulse.max_rabi();
    rec.pulse.omega0 = omega_max;
    rec.pulse.v_over_omega = omega_max > 0.0 ? cfg.v_dipole / omega_max : 0.0;
  }
  const EvolutionResult evo = propagate(cfg, rec.pulse, 8);
  rec.infidelity = std::max(0.0, 1.0 - gate_fidelity(evo, target));
  rec.t_int = evo.t_int;
  rec.t_ryd = evo.t_ryd;
  return rec;
}

}  // namespace

OptimizationRecord optimize(Scheme scheme, Modulation modulation, double theta,
                            double duration, int segments, double v_over_omega,
                            const OptimizationSettings& settings,
                            const Ansatz& ansatz) {
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  const int restarts =
      ansatz.kind == Ansatz::Kind::WarmStart ? 1 : std::max(1, settings.restarts);
  std::vector<OptimizationRecord> records(restarts);
  parallel_for(restarts, [&](std::size_t r) {
    const std::uint64_t run_seed = mix_stream(settings.seed, 0x6f70u, r);
    records[r] = run_single(scheme, modulation, theta, duration, segments,
                            v_over_omega, settings, ansatz, run_seed);
  });
  return *std::min_element(records.begin(), records.end(),
                           [](const auto& a, const auto& b) {
                             return a.infidelity < b.infidelity;
                           });
}

std::vector<OptimizationRecord> landscape_sweep(
    Scheme scheme, Modulation modulation, double theta,
    std::span<const double> durations, std::span<const double> v_over_omega,
    int runs_per_point, int segments, const OptimizationSettings& settings) {
  if (durations.empty() || v_over_omega.empty())
    throw std::invalid_argument("sweep grids must be non-empty");
  struct Task {
    double duration, v;
    int run;
  };
  std::vector<Task> tasks;
  for (double d : durations)
    for (double v : v_over_omega)
      for (int r = 0; r < runs_per_point; ++r) tasks.push_back({d, v, r});

  // Seeds enumerate runs exactly like optimize() enumerates restarts, so a
  // single-point sweep reproduces optimize() record for record.
  std::vector<OptimizationRecord> records(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t i) {
    const Task& t = tasks[i];
    const std::uint64_t run_seed = mix_stream(settings.seed, 0x6f70u, i);
    records[i] = run_single(scheme, modulation, theta, t.duration, segments,
                            t.v, settings, Ansatz::random(), run_seed);
  });
  return records;
}

std::optional<double> detect_speed_limit(
    std::span<const OptimizationRecord> records, double threshold,
    double upper) {
  std::map<double, double> best;  // duration -> best infidelity
  for (const auto& r : records) {
    auto [it, inserted] = best.emplace(r.pulse.duration, r.infidelity);
    if (!inserted) it->second = std::min(it->second, r.infidelity);
  }
  double prev = std::numeric_limits<double>::quiet_NaN();
  bool first = true;
  for (const auto& [duration, infidelity] : best) {
    if (infidelity < threshold && (first || prev > upper)) return duration;
    prev = infidelity;
    first = false;
  }
  return std::nullopt;
}

std::vector<OptimizationRecord> continuation_theta(
    const PulseProtocol& seed_pulse, std::span<const double> thetas,
    const OptimizationSettings& settings) {
  seed_pulse.validate();
  if (seed_pulse.modulation != Modulation::Rabi)
    throw std::invalid_argument("continuation expects a Rabi-modulated seed");
  const double pi = two_pi / 2.0;

  SystemConfig cfg = config_for(Modulation::Rabi, seed_pulse.v_over_omega);
  {
    const EvolutionResult evo = propagate(cfg, seed_pulse, 8);
    const double seed_infidelity =
        1.0 - gate_fidelity(evo, embed_target(pi));
    if (!(seed_infidelity < settings.continuation_threshold))
      throw std::invalid_argument(
          "continuation seed pulse must implement the iSWAP gate below the "
          "threshold");
  }

  OptimizationSettings step_settings = settings;
  step_settings.rabi_upper_bound = seed_pulse.max_rabi();  // fixed max Rabi

  std::vector<OptimizationRecord> out;
  PulseProtocol current = seed_pulse;
  double min_duration = seed_pulse.duration;
  for (double theta : thetas) {
    if (std::abs(theta - pi) < 1e-12) {
      OptimizationRecord rec;
      rec.theta = pi;
      rec.pulse = current;
      const EvolutionResult evo = propagate(cfg, current, 8);
      rec.infidelity = std::max(0.0, 1.0 - gate_fidelity(evo, embed_target(pi)));
      rec.cost = rec.infidelity;
      rec.t_int = evo.t_int;
      rec.t_ryd = evo.t_ryd;
      rec.converged = true;
      out.push_back(std::move(rec));
      continue;
    }
    static constexpr double ladder[] = {1.0, 1.03, 1.07, 1.12, 1.2, 1.35};
    OptimizationRecord best;
    best.infidelity = std::numeric_limits<double>::infinity();
    for (double factor : ladder) {
      const double duration = std::max(min_duration, min_duration * factor);
      OptimizationRecord rec =
          run_single(current.scheme, Modulation::Rabi, theta, duration,
                     current.segments, current.v_over_omega, step_settings,
                     Ansatz::warm(current), mix_stream(settings.seed, 0x6374u));
      if (rec.infidelity < best.infidelity) best = rec;
      if (rec.infidelity < settings.continuation_threshold) break;
    }
    best.converged = best.infidelity < settings.continuation_threshold;
    current = best.pulse;
    min_duration = std::max(min_duration, best.pulse.duration);
    out.push_back(std::move(best));
  }
  return out;
}

}  // namespace pulselab
