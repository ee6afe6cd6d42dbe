#include "core/hilbert.hpp"

#include <cmath>

namespace pulselab {

namespace {

const std::vector<DriveChannel> scheme_a_channels = {DriveChannel::c1r,
                                                     DriveChannel::c0rp};
const std::vector<DriveChannel> scheme_b_channels = {
    DriveChannel::c01, DriveChannel::c1r, DriveChannel::crrp};

}  // namespace

const std::vector<DriveChannel>& admitted_channels(Scheme scheme) {
  return scheme == Scheme::A ? scheme_a_channels : scheme_b_channels;
}

bool channel_admitted(Scheme scheme, DriveChannel c) {
  for (DriveChannel a : admitted_channels(scheme))
    if (a == c) return true;
  return false;
}

const char* channel_name(DriveChannel c) {
  switch (c) {
    case DriveChannel::c01: return "01";
    case DriveChannel::c1r: return "1r";
    case DriveChannel::c0rp: return "0rp";
    case DriveChannel::crrp: return "rrp";
  }
  return "?";
}

const Matrix16& channel_drive_structure(DriveChannel c, bool imaginary_part) {
  static std::array<Matrix16, 2 * n_drive_channels> cache = [] {
    std::array<Matrix16, 2 * n_drive_channels> out;
    for (int ci = 0; ci < n_drive_channels; ++ci) {
      const auto [a, b] = channel_levels(static_cast<DriveChannel>(ci));
      for (int part = 0; part < 2; ++part) {
        // coupling = 0.5 * f * |b><a| + h.c. per atom, f = 1 or i.
        const std::complex<double> f =
            part == 0 ? std::complex<double>(1.0, 0.0)
                      : std::complex<double>(0.0, 1.0);
        Matrix16 m = Matrix16::Zero();
        for (int other = 0; other < 4; ++other) {
          // atom 1 active: |b other><a other|
          m(pair_index(b, other), pair_index(a, other)) += 0.5 * f;
          m(pair_index(a, other), pair_index(b, other)) += 0.5 * std::conj(f);
          // atom 2 active: |other b><other a|
          m(pair_index(other, b), pair_index(other, a)) += 0.5 * f;
          m(pair_index(other, a), pair_index(other, b)) += 0.5 * std::conj(f);
        }
        out[2 * ci + part] = m;
      }
    }
    return out;
  }();
  return cache[2 * static_cast<int>(c) + (imaginary_part ? 1 : 0)];
}

Matrix16 build_hamiltonian(const SystemConfig& config,
                           const ControlSnapshot& snapshot) {
  Matrix16 h = Matrix16::Zero();

  // Exchange block V (|r r'><r' r| + h.c.).
  const int rrp = pair_index(level_r, level_rp);
  const int rpr = pair_index(level_rp, level_r);
  h(rrp, rpr) += config.v_dipole;
  h(rpr, rrp) += config.v_dipole;

  for (int ci = 0; ci < n_drive_channels; ++ci) {
    const auto c = static_cast<DriveChannel>(ci);
    if (!snapshot.active[ci]) continue;
    if (!channel_admitted(config.scheme, c))
      throw ConfigError(std::string("drive channel ") + channel_name(c) +
                        " not admitted by the configured scheme");
    const double omega = snapshot.rabi[ci];
    if (omega == 0.0 && snapshot.phase[ci] == 0.0) continue;
    const double cp = std::cos(snapshot.phase[ci]);
    const double sp = std::sin(snapshot.phase[ci]);
    h += (omega * cp) * channel_drive_structure(c, false);
    h += (omega * sp) * channel_drive_structure(c, true);
  }

  // Detunings -Delta^a |a><a| per atom on |1>, |r>, |r'>, and decay.
  const std::complex<double> half_i(0.0, 0.5);
  for (int atom = 0; atom < 2; ++atom) {
    for (int li = 0; li < 3; ++li) {
      const int level = level_1 + li;
      const double delta = snapshot.detuning[atom][li];
      const std::complex<double> gamma_term =
          level == level_r ? -half_i * config.gamma_r
          : level == level_rp ? -half_i * config.gamma_rp
                              : std::complex<double>(0.0);
      const std::complex<double> diag = -delta + gamma_term;
      if (diag == std::complex<double>(0.0)) continue;
      for (int other = 0; other < 4; ++other) {
        const int idx = atom == 0 ? pair_index(level, other)
                                  : pair_index(other, level);
        h(idx, idx) += diag;
      }
    }
  }
  return h;
}

GateTarget embed_target(double theta) {
  if (!(theta > 0.0) || theta > two_pi / 2.0 + 1e-12)
    throw std::invalid_argument("exchange angle must lie in (0, pi]");
  GateTarget t;
  t.theta = theta;
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  t.matrix = Matrix4::Identity();
  t.matrix(1, 1) = c;
  t.matrix(2, 2) = c;
  t.matrix(1, 2) = std::complex<double>(0.0, s);
  t.matrix(2, 1) = std::complex<double>(0.0, s);
  return t;
}

Matrix4 project_to_qubit(const Matrix16& u) {
  Matrix4 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = u(qubit_indices[i], qubit_indices[j]);
  return out;
}

Matrix16 embed_qubit_matrix(const Matrix4& m) {
  Matrix16 out = Matrix16::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(qubit_indices[i], qubit_indices[j]) = m(i, j);
  return out;
}

}  // namespace pulselab
