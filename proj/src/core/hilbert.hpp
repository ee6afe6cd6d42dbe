#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "core/units.hpp"

// Two-atom, four-level model space. Single-atom levels are indexed
// 0 -> |0>, 1 -> |1>, 2 -> |r>, 3 -> |r'>; pair states are ordered row-major,
// index(a1, a2) = 4*a1 + a2, so the computational qubit states |00>, |01>,
// |10>, |11> sit at indices {0, 1, 4, 5}.

namespace pulselab {

using Matrix16 = Eigen::Matrix<std::complex<double>, 16, 16>;
using Matrix4 = Eigen::Matrix4cd;
using Vector16 = Eigen::Matrix<std::complex<double>, 16, 1>;

inline constexpr int level_0 = 0;
inline constexpr int level_1 = 1;
inline constexpr int level_r = 2;
inline constexpr int level_rp = 3;

inline constexpr int pair_dimension = 16;
inline constexpr int pair_index(int a1, int a2) { return 4 * a1 + a2; }
inline constexpr std::array<int, 4> qubit_indices = {0, 1, 4, 5};

// Number of atoms in a Rydberg level (|r> or |r'>) for a pair-basis index.
inline constexpr int rydberg_occupancy(int pair) {
  const int a1 = pair / 4, a2 = pair % 4;
  return (a1 >= level_r ? 1 : 0) + (a2 >= level_r ? 1 : 0);
}

enum class Scheme { A, B };
enum class Modulation { Rabi, Phase };

// Global drives between single-atom levels; the tag names the coupled pair
// (a, b) with the e^{+i phi} factor attached to |b><a|.
enum class DriveChannel { c01 = 0, c1r = 1, c0rp = 2, crrp = 3 };
inline constexpr int n_drive_channels = 4;

struct ChannelLevels {
  int a, b;
};
inline constexpr ChannelLevels channel_levels(DriveChannel c) {
  switch (c) {
    case DriveChannel::c01: return {level_0, level_1};
    case DriveChannel::c1r: return {level_1, level_r};
    case DriveChannel::c0rp: return {level_0, level_rp};
    case DriveChannel::crrp: return {level_r, level_rp};
  }
  return {0, 0};
}

const std::vector<DriveChannel>& admitted_channels(Scheme scheme);
bool channel_admitted(Scheme scheme, DriveChannel c);
const char* channel_name(DriveChannel c);

struct SystemConfig {
  double v_dipole = 0.0;  // V_dipole = C3/R^3, rad/s
  double gamma_r = 0.0;   // effective |r> decay rate, rad/s
  double gamma_rp = 0.0;  // effective |r'> decay rate, rad/s
  Scheme scheme = Scheme::A;
};

// Controls and detunings at one instant. Channels not admitted by the scheme
// must stay inactive. Detunings are per atom ({Delta^1, Delta^r, Delta^r'}),
// entering the Hamiltonian as -Delta |a><a|.
struct ControlSnapshot {
  std::array<bool, n_drive_channels> active = {false, false, false, false};
  std::array<double, n_drive_channels> rabi = {0, 0, 0, 0};
  std::array<double, n_drive_channels> phase = {0, 0, 0, 0};
  std::array<std::array<double, 3>, 2> detuning = {{{0, 0, 0}, {0, 0, 0}}};

  void set(DriveChannel c, double omega, double phi = 0.0) {
    const int i = static_cast<int>(c);
    active[i] = true;
    rabi[i] = omega;
    phase[i] = phi;
  }
  bool operator==(const ControlSnapshot&) const = default;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// H/hbar for the full two-atom space: exchange block, per-atom drive terms of
// the admitted channels, per-atom diagonal detunings on |1>, |r>, |r'>, and
// the non-Hermitian -i/2 Gamma diagonals on |r>, |r'>.
Matrix16 build_hamiltonian(const SystemConfig& config, const ControlSnapshot& snapshot);

// Single-atom drive operator (Omega/2)(e^{i phi}|b><a| + h.c.) summed over the
// two atoms, at unit Rabi frequency. Used for Hamiltonian assembly and for the
// exact GRAPE derivatives.
const Matrix16& channel_drive_structure(DriveChannel c, bool imaginary_part);

struct GateTarget {
  double theta = 0.0;
  Matrix4 matrix = Matrix4::Identity();
};

// U_XY(theta) acting on the qubit subspace: identity on |00>, |11>, a
// cos/i*sin rotation on the {|01>, |10>} block.
GateTarget embed_target(double theta);

Matrix4 project_to_qubit(const Matrix16& u);

// Scatter a 4x4 qubit-subspace matrix into the 16-dimensional pair space
// (zero elsewhere); the adjoint trace against this gives tr(m^dag P U P).
Matrix16 embed_qubit_matrix(const Matrix4& m);

}  // namespace pulselab
