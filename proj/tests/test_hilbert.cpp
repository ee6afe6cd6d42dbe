#include <doctest.h>

#include <random>

#include "core/hilbert.hpp"
#include "test_helpers.hpp"

using namespace pulselab;

TEST_SUITE_BEGIN("hilbert");

TEST_CASE("pair basis indexing is the documented row-major bijection") {
  bool seen[16] = {};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const int idx = pair_index(a, b);
      REQUIRE(idx >= 0);
      REQUIRE(idx < 16);
      CHECK(!seen[idx]);
      seen[idx] = true;
    }
  CHECK(qubit_indices == std::array<int, 4>{0, 1, 4, 5});
  CHECK(pair_index(level_r, level_rp) == 11);
  CHECK(pair_index(level_rp, level_r) == 14);
}

TEST_CASE("scheme channel admission") {
  CHECK(channel_admitted(Scheme::A, DriveChannel::c1r));
  CHECK(channel_admitted(Scheme::A, DriveChannel::c0rp));
  CHECK(!channel_admitted(Scheme::A, DriveChannel::c01));
  CHECK(!channel_admitted(Scheme::A, DriveChannel::crrp));
  CHECK(channel_admitted(Scheme::B, DriveChannel::c01));
  CHECK(channel_admitted(Scheme::B, DriveChannel::c1r));
  CHECK(channel_admitted(Scheme::B, DriveChannel::crrp));
  CHECK(!channel_admitted(Scheme::B, DriveChannel::c0rp));
}

TEST_CASE("bare exchange Hamiltonian has exactly the two coupling entries") {
  SystemConfig cfg;
  cfg.v_dipole = 3.7;
  const Matrix16 h = build_hamiltonian(cfg, ControlSnapshot{});
  int nonzero = 0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      if (std::abs(h(i, j)) > 0.0) ++nonzero;
  CHECK(nonzero == 2);
  CHECK(h(11, 14) == std::complex<double>(3.7, 0.0));
  CHECK(h(14, 11) == std::complex<double>(3.7, 0.0));
}

TEST_CASE("single scheme-A drive produces the 8-entry 1<->r coupling") {
  SystemConfig cfg;
  ControlSnapshot snap;
  const double omega = 1.3;
  snap.set(DriveChannel::c1r, omega);
  const Matrix16 h = build_hamiltonian(cfg, snap);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  // 4 spectator states x 2 atoms = 8 couplings, each with its Hermitian twin.
  int upper = 0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      if (std::abs(h(i, j)) > 0.0) {
        if (j > i) ++upper;
        CHECK(std::abs(h(i, j)) == doctest::Approx(omega / 2));
      }
  CHECK(upper == 8);
  CHECK(h(pair_index(2, 0), pair_index(1, 0)).real() ==
        doctest::Approx(omega / 2));
  CHECK(h(pair_index(0, 2), pair_index(0, 1)).real() ==
        doctest::Approx(omega / 2));
}

TEST_CASE("decay diagonal counts Rydberg occupancy per pair state") {
  SystemConfig cfg;
  cfg.gamma_r = 0.8;
  const Matrix16 h = build_hamiltonian(cfg, ControlSnapshot{});
  // Oracle: enumerate |r> occupancy of every pair state.
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const int occ = (a == level_r) + (b == level_r);
      const auto d = h(pair_index(a, b), pair_index(a, b));
      CHECK(d.real() == doctest::Approx(0.0));
      CHECK(d.imag() == doctest::Approx(-0.5 * 0.8 * occ));
    }
}

TEST_CASE("channel/scheme mismatch raises a configuration error") {
  SystemConfig cfg;
  cfg.scheme = Scheme::A;
  ControlSnapshot snap;
  snap.set(DriveChannel::c01, 1.0);
  CHECK_THROWS_AS(build_hamiltonian(cfg, snap), ConfigError);
}

TEST_CASE("Hermiticity for random snapshots with zero decay") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    SystemConfig cfg;
    cfg.scheme = trial % 2 ? Scheme::A : Scheme::B;
    cfg.v_dipole = std::abs(dist(rng)) * 5;
    ControlSnapshot snap;
    for (DriveChannel c : admitted_channels(cfg.scheme))
      snap.set(c, std::abs(dist(rng)) * 3, dist(rng) * 3);
    for (int atom = 0; atom < 2; ++atom)
      for (int l = 0; l < 3; ++l) snap.detuning[atom][l] = dist(rng);
    const Matrix16 h = build_hamiltonian(cfg, snap);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("Hamiltonian is linear in each isolated parameter") {
  auto linear_in = [](auto&& make) {
    const Matrix16 h0 = make(0.0);
    const Matrix16 h1 = make(1.0);
    const Matrix16 h2 = make(2.3);
    return ((h2 - h0) - 2.3 * (h1 - h0)).cwiseAbs().maxCoeff();
  };
  CHECK(linear_in([](double x) {
          SystemConfig cfg;
          cfg.v_dipole = x;
          return build_hamiltonian(cfg, ControlSnapshot{});
        }) < 1e-14);
  CHECK(linear_in([](double x) {
          SystemConfig cfg;
          ControlSnapshot snap;
          snap.set(DriveChannel::c1r, x, 0.0);
          return build_hamiltonian(cfg, snap);
        }) < 1e-14);
  CHECK(linear_in([](double x) {
          SystemConfig cfg;
          ControlSnapshot snap;
          snap.detuning[0][1] = x;
          snap.detuning[1][2] = 0.5 * x;
          return build_hamiltonian(cfg, snap);
        }) < 1e-14);
  CHECK(linear_in([](double x) {
          SystemConfig cfg;
          cfg.gamma_r = x;
          cfg.gamma_rp = 0.7 * x;
          return build_hamiltonian(cfg, ControlSnapshot{});
        }) < 1e-14);
}

TEST_CASE("global drives commute with atom swap when detunings match") {
  // SWAP permutation on the pair basis.
  Eigen::Matrix<std::complex<double>, 16, 16> swap = Matrix16::Zero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) swap(pair_index(b, a), pair_index(a, b)) = 1.0;

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    SystemConfig cfg;
    cfg.scheme = trial % 2 ? Scheme::A : Scheme::B;
    cfg.v_dipole = 2.0;
    cfg.gamma_r = 0.1;
    ControlSnapshot snap;
    for (DriveChannel c : admitted_channels(cfg.scheme))
      snap.set(c, std::abs(dist(rng)), dist(rng));
    for (int l = 0; l < 3; ++l) {
      const double d = dist(rng);
      snap.detuning[0][l] = d;
      snap.detuning[1][l] = d;
    }
    const Matrix16 h = build_hamiltonian(cfg, snap);
    CHECK((swap * h * swap - h).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("embed_target matches the closed form") {
  SUBCASE("theta = pi is the iSWAP") {
    const GateTarget t = embed_target(two_pi / 2.0);
    Matrix4 expected = Matrix4::Zero();
    expected(0, 0) = 1.0;
    expected(3, 3) = 1.0;
    expected(1, 2) = std::complex<double>(0.0, 1.0);
    expected(2, 1) = std::complex<double>(0.0, 1.0);
    CHECK((t.matrix - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("theta -> 0 limit is the identity") {
    const GateTarget t = embed_target(1e-9);
    CHECK((t.matrix - Matrix4::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("theta = pi/2 central block") {
    const GateTarget t = embed_target(two_pi / 4.0);
    const double c = std::sqrt(2.0) / 2.0;
    CHECK(t.matrix(1, 1).real() == doctest::Approx(c));
    CHECK(t.matrix(1, 2).imag() == doctest::Approx(c));
    CHECK(t.matrix(2, 1).imag() == doctest::Approx(c));
    CHECK(t.matrix(2, 2).real() == doctest::Approx(c));
  }
  SUBCASE("unitarity, symmetry, corner entries") {
    for (double theta : {0.3, 1.2, 2.9, two_pi / 2.0}) {
      const GateTarget t = embed_target(theta);
      CHECK((t.matrix * t.matrix.adjoint() - Matrix4::Identity())
                .cwiseAbs()
                .maxCoeff() < 1e-12);
      CHECK((t.matrix - t.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-15);
      CHECK(t.matrix(0, 0) == std::complex<double>(1.0));
      CHECK(t.matrix(3, 3) == std::complex<double>(1.0));
    }
  }
  SUBCASE("one-parameter group on the central block") {
    const GateTarget a = embed_target(0.7);
    const GateTarget b = embed_target(1.1);
    const GateTarget ab = embed_target(1.8);
    CHECK((a.matrix * b.matrix - ab.matrix).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("domain") {
    CHECK_THROWS_AS(embed_target(0.0), std::invalid_argument);
    CHECK_THROWS_AS(embed_target(4.0), std::invalid_argument);
  }
}

TEST_CASE("project_to_qubit extracts the ordered qubit block") {
  CHECK((project_to_qubit(Matrix16::Identity()) - Matrix4::Identity())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  Matrix16 sevens = Matrix16::Constant(std::complex<double>(7.0, 0.0));
  CHECK((project_to_qubit(sevens) - Matrix4::Constant(7.0)).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("exchange evolution acts as identity on the qubit subspace") {
  // Analytic oracle: exp of the 2x2 exchange block is a rotation confined to
  // |rr'>, |r'r|; the qubit block stays exactly the identity.
  SystemConfig cfg;
  cfg.v_dipole = 1.9;
  const Matrix16 h = build_hamiltonian(cfg, ControlSnapshot{});
  for (double t : {0.17, 0.9, 3.4}) {
    const Matrix16 u = step_exponential(h, t, true);
    CHECK((project_to_qubit(u) - Matrix4::Identity()).cwiseAbs().maxCoeff() <
          1e-12);
    // the rotation itself
    CHECK(std::abs(u(11, 11) - std::complex<double>(std::cos(cfg.v_dipole * t),
                                                    0.0)) < 1e-12);
    CHECK(std::abs(u(11, 14) -
                   std::complex<double>(0.0, -std::sin(cfg.v_dipole * t))) <
          1e-12);
  }
}

TEST_SUITE_END();
