#include <doctest.h>

#include "test_helpers.hpp"

using namespace pulselab;
using pulselab::testing::config_for_pulse;
using pulselab::testing::random_pulse;

TEST_SUITE_BEGIN("grape");

TEST_CASE("smoothness cost termwise") {
  CHECK(smoothness_cost(std::vector<double>{3.3, 3.3, 3.3, 3.3}) == 0.0);
  CHECK(smoothness_cost(std::vector<double>{0.0, 2.0}) == doctest::Approx(1.0));
  // Eq.-(7)-style sum evaluated by hand: (1/2)^2 + (2/2)^2.
  CHECK(smoothness_cost(std::vector<double>{0.0, 1.0, 3.0}) ==
        doctest::Approx(1.25));
}

TEST_CASE("total cost structure") {
  const PulseProtocol pulse = random_pulse(Scheme::A, Modulation::Rabi, 10, 2.0, 21);
  const SystemConfig cfg = config_for_pulse(pulse);
  const GateTarget target = embed_target(two_pi / 2.0);

  const double c0 = total_cost(cfg, pulse, target, 0.0);
  const double f = gate_fidelity(propagate(cfg, pulse, 1), target);
  CHECK(c0 == doctest::Approx(1.0 - f).epsilon(1e-12));

  double smooth_sum = 0.0;
  for (const auto& arr : pulse.controls) smooth_sum += smoothness_cost(arr);
  const double c1 = total_cost(cfg, pulse, target, 1e-3);
  const double c2 = total_cost(cfg, pulse, target, 2e-3);
  CHECK(c1 - c0 == doctest::Approx(1e-3 * smooth_sum).epsilon(1e-10));
  CHECK(c2 - c1 == doctest::Approx(1e-3 * smooth_sum).epsilon(1e-10));

  SUBCASE("decay rates do not enter the cost") {
    SystemConfig decaying = cfg;
    decaying.gamma_r = 0.3;
    CHECK(total_cost(decaying, pulse, target, 1e-3) == doctest::Approx(c1));
  }
}

TEST_CASE("smoothness gradient of [0, 2] is -lambda, +lambda") {
  PulseProtocol pulse;
  pulse.scheme = Scheme::A;
  pulse.modulation = Modulation::Rabi;
  pulse.duration = 1.0;
  pulse.segments = 2;
  pulse.channels = admitted_channels(Scheme::A);
  pulse.controls = {{0.0, 2.0}, {0.0, 0.0}};
  pulse.omega0 = two_pi;
  const SystemConfig cfg = config_for_pulse(pulse);
  const GateTarget target = embed_target(two_pi / 2.0);
  const double lambda = 0.5;
  const auto g1 = cost_gradient(cfg, pulse, target, lambda);
  const auto g0 = cost_gradient(cfg, pulse, target, 0.0);
  CHECK(g1[0] - g0[0] == doctest::Approx(-lambda));
  CHECK(g1[1] - g0[1] == doctest::Approx(+lambda));
  CHECK(g1[2] - g0[2] == doctest::Approx(0.0));
}

TEST_CASE("gradient matches central finite differences") {
  // Deviations are measured against the gradient's infinity norm; the
  // finite-difference step is 1e-6 of the control scale.
  const GateTarget target = embed_target(two_pi / 2.0);
  int case_index = 0;
  for (Scheme scheme : {Scheme::A, Scheme::B})
    for (Modulation mod : {Modulation::Rabi, Modulation::Phase}) {
      for (int rep = 0; rep < 3; ++rep) {
        PulseProtocol pulse =
            random_pulse(scheme, mod, 6, 1.7, 1000 + 17 * case_index++);
        const SystemConfig cfg = config_for_pulse(pulse);
        const double lambda = 1e-3;
        const auto grad = cost_gradient(cfg, pulse, target, lambda);

        double scale = 0.0;
        for (double g : grad) scale = std::max(scale, std::abs(g));
        REQUIRE(scale > 0.0);

        const double h = 1e-6 * two_pi;
        std::size_t flat = 0;
        double worst = 0.0;
        for (std::size_t c = 0; c < pulse.controls.size(); ++c)
          for (int k = 0; k < pulse.segments; ++k, ++flat) {
            PulseProtocol plus = pulse, minus = pulse;
            plus.controls[c][k] += h;
            minus.controls[c][k] = std::max(
                mod == Modulation::Rabi ? 0.0 : -1e9, minus.controls[c][k] - h);
            const double fd = (total_cost(cfg, plus, target, lambda) -
                               total_cost(cfg, minus, target, lambda)) /
                              (plus.controls[c][k] - minus.controls[c][k]);
            worst = std::max(worst, std::abs(grad[flat] - fd) / scale);
          }
        CHECK(worst < 1e-5);
      }
    }
}

TEST_CASE("flat controls have zero smoothness gradient") {
  PulseProtocol pulse = random_pulse(Scheme::A, Modulation::Rabi, 8, 2.0, 5);
  for (auto& arr : pulse.controls) std::fill(arr.begin(), arr.end(), 0.0);
  const SystemConfig cfg = config_for_pulse(pulse);
  const GateTarget target = embed_target(two_pi / 2.0);
  const auto with = cost_gradient(cfg, pulse, target, 10.0);
  const auto without = cost_gradient(cfg, pulse, target, 0.0);
  for (std::size_t i = 0; i < with.size(); ++i)
    CHECK(with[i] == doctest::Approx(without[i]).epsilon(1e-12));
}

TEST_CASE("optimization records respect the Rabi lower bound") {
  const auto& rec = pulselab::testing::converged_rabi_iswap();
  for (const auto& arr : rec.pulse.controls)
    for (double v : arr) CHECK(v >= 0.0);
  CHECK(rec.infidelity < 1e-6);
  CHECK(rec.pulse.omega0 == doctest::Approx(rec.pulse.max_rabi()));
  CHECK(rec.pulse.v_over_omega ==
        doctest::Approx(two_pi / rec.pulse.max_rabi()));
}

TEST_CASE("warm start converges immediately with no fidelity loss") {
  const auto& rec = pulselab::testing::converged_rabi_iswap();
  OptimizationSettings settings;  // same lambda as the seed run
  settings.seed = 99;
  settings.lambda = 1e-4;
  const OptimizationRecord warmed =
      optimize(Scheme::A, Modulation::Rabi, two_pi / 2.0, rec.pulse.duration,
               rec.pulse.segments, 0.0, settings, Ansatz::warm(rec.pulse));
  CHECK(warmed.iterations <= 5);
  CHECK(warmed.infidelity <= rec.infidelity * (1.0 + 1e-6) + 1e-12);
}

TEST_CASE("determinism: same master seed gives identical records") {
  OptimizationSettings settings;
  settings.restarts = 2;
  settings.seed = 4242;
  settings.max_iterations = 60;
  auto run = [&] {
    return optimize(Scheme::A, Modulation::Phase, two_pi / 2.0, 2.5, 16, 2.0,
                    settings);
  };
  const OptimizationRecord a = run();
  const OptimizationRecord b = run();
  CHECK(a.infidelity == b.infidelity);
  CHECK(a.cost == b.cost);
  CHECK(a.seed == b.seed);
  CHECK(a.pulse.controls == b.pulse.controls);
}

TEST_CASE("single-point sweep reproduces optimize") {
  OptimizationSettings settings;
  settings.restarts = 1;
  settings.seed = 7;
  settings.max_iterations = 40;
  const double durations[] = {2.0};
  const double vs[] = {2.0};
  const auto sweep = landscape_sweep(Scheme::A, Modulation::Phase,
                                     two_pi / 2.0, durations, vs, 1, 12, settings);
  REQUIRE(sweep.size() == 1);
  const auto single = optimize(Scheme::A, Modulation::Phase, two_pi / 2.0, 2.0,
                               12, 2.0, settings);
  CHECK(sweep[0].infidelity == single.infidelity);
  CHECK(sweep[0].pulse.controls == single.pulse.controls);
  CHECK(sweep[0].seed == single.seed);
}

TEST_CASE("sweep determinism is bitwise") {
  OptimizationSettings settings;
  settings.seed = 31;
  settings.max_iterations = 30;
  const double durations[] = {1.5, 2.5};
  const double vs[] = {2.0};
  const auto a = landscape_sweep(Scheme::A, Modulation::Phase, two_pi / 2.0,
                                 durations, vs, 2, 10, settings);
  const auto b = landscape_sweep(Scheme::A, Modulation::Phase, two_pi / 2.0,
                                 durations, vs, 2, 10, settings);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].infidelity == b[i].infidelity);
    CHECK(a[i].pulse.controls == b[i].pulse.controls);
  }
}

TEST_CASE("speed limit detection on synthetic records") {
  auto fake = [](double duration, double infidelity) {
    OptimizationRecord r;
    r.pulse.duration = duration;
    r.infidelity = infidelity;
    return r;
  };
  SUBCASE("all below threshold picks the first grid point") {
    const std::vector<OptimizationRecord> recs = {fake(1.0, 1e-6), fake(2.0, 1e-7)};
    const auto tau = detect_speed_limit(recs);
    REQUIRE(tau.has_value());
    CHECK(*tau == 1.0);
  }
  SUBCASE("drop across one step") {
    const std::vector<OptimizationRecord> recs = {
        fake(1.0, 0.3), fake(2.0, 0.05), fake(3.0, 2e-5), fake(4.0, 1e-8)};
    const auto tau = detect_speed_limit(recs);
    REQUIRE(tau.has_value());
    CHECK(*tau == 3.0);
  }
  SUBCASE("best-per-duration grouping") {
    const std::vector<OptimizationRecord> recs = {
        fake(1.0, 0.3), fake(1.0, 0.4), fake(2.0, 1e-5), fake(2.0, 0.2)};
    const auto tau = detect_speed_limit(recs);
    REQUIRE(tau.has_value());
    CHECK(*tau == 2.0);
  }
  SUBCASE("no point below threshold") {
    const std::vector<OptimizationRecord> recs = {fake(1.0, 0.3), fake(2.0, 0.01)};
    CHECK(!detect_speed_limit(recs).has_value());
  }
}

TEST_CASE("continuation with grid {pi} returns the seed record") {
  const auto& rec = pulselab::testing::converged_rabi_iswap();
  OptimizationSettings settings;
  settings.seed = 5;
  const double thetas[] = {two_pi / 2.0};
  const auto chain = continuation_theta(rec.pulse, thetas, settings);
  REQUIRE(chain.size() == 1);
  CHECK(chain[0].converged);
  CHECK(chain[0].pulse.controls == rec.pulse.controls);
  CHECK(chain[0].infidelity < 1e-6);
}

TEST_CASE("continuation rejects a bad seed") {
  PulseProtocol bad = random_pulse(Scheme::A, Modulation::Rabi, 8, 2.0, 77);
  OptimizationSettings settings;
  const double thetas[] = {two_pi / 2.0, 2.0};
  CHECK_THROWS_AS(continuation_theta(bad, thetas, settings),
                  std::invalid_argument);
}

TEST_CASE("squared-reparameterization mode also respects the bound") {
  OptimizationSettings settings;
  settings.restarts = 2;
  settings.seed = 404;
  settings.max_iterations = 300;
  settings.bounds_mode = OptimizationSettings::Bounds::Reparameterize;
  const auto rec =
      optimize(Scheme::A, Modulation::Rabi, two_pi / 2.0, 4.0, 24, 0.0, settings);
  for (const auto& arr : rec.pulse.controls)
    for (double v : arr) CHECK(v >= 0.0);
}

TEST_SUITE_END();
