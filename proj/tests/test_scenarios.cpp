#include "cascade/scenarios.hpp"

#include "doctest.h"

#include <cmath>

using namespace cascade;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

SystemParams small_params(int emitters, int cutoff) {
  SystemParams p;
  p.n_emitters_target = emitters;
  p.cutoff_s = cutoff;
  p.cutoff_t = cutoff;
  return p;
}

}  // namespace

TEST_CASE("cascaded layout and term counts") {
  SystemParams p;  // defaults: 2 emitters, cutoffs (10, 10)
  const ScenarioSystem sys = build_cascaded(p);
  CHECK(sys.layout().dim() == 968);  // 2 * 11 * 2 * 2 * 11
  CHECK(sys.layout().factor_count() == 5);
  CHECK(sys.source_cavity_slot == 1);
  CHECK(sys.target_cavity_slot == 4);
  // pump, source emitter decay, both cavity decays, two target emitter decays
  CHECK(sys.spec.dissipators.size() == 6);
  CHECK(sys.spec.cascades.size() == 2);
  // default scale 2: the collective-jump normalization
  CHECK(sys.spec.cascades[0].strength ==
        doctest::Approx(2.0 * std::sqrt(p.kappa_s * p.gamma_t)));
  SystemParams half = p;
  half.cascade_scale = 1.0;
  CHECK(build_cascaded(half).spec.cascades[0].strength ==
        doctest::Approx(std::sqrt(p.kappa_s * p.gamma_t)));
  CHECK(is_hermitian(sys.spec.hamiltonian.matrix));

  const ScenarioSystem one = build_cascaded(small_params(1, 10));
  CHECK(one.layout().dim() == 484);  // 2 * 11 * 2 * 11
  CHECK(one.spec.dissipators.size() == 5);
  CHECK(one.spec.cascades.size() == 1);
}

TEST_CASE("target-only builds") {
  const SystemParams p = small_params(2, 4);
  const ScenarioSystem inc = build_incoherent_drive(p);
  CHECK(inc.layout().dim() == 20);  // 2 * 2 * 5
  CHECK(inc.source_cavity_slot == -1);
  CHECK(inc.target_cavity_slot == 2);
  // cavity decay + per emitter (decay + pump)
  CHECK(inc.spec.dissipators.size() == 5);
  CHECK(inc.spec.cascades.empty());

  const ScenarioSystem coh = build_coherent_drive(p);
  CHECK(coh.spec.dissipators.size() == 3);  // no pump dissipators
  // drive enters the Hamiltonian instead
  const ScenarioSystem undriven = build_incoherent_drive([&] {
    SystemParams q = p;
    q.pump_target = 0.0;
    return q;
  }());
  Matrix drive = Matrix::Zero(coh.layout().dim(), coh.layout().dim());
  for (int slot = 0; slot < 2; ++slot) {
    const Matrix sm = embed(sigma_minus(), slot, coh.layout()).matrix;
    drive += p.pump_target * (sm + Matrix(sm.adjoint()));
  }
  CHECK(max_abs(coh.spec.hamiltonian.matrix -
                (undriven.spec.hamiltonian.matrix + drive)) < 1e-14);

  SystemParams bad = p;
  bad.g_t = 0.0;
  CHECK_THROWS_AS(build_coherent_drive(bad), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  SystemParams p;
  p.gamma_t = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = SystemParams{};
  p.n_emitters_target = 3;
  CHECK_THROWS_AS(build_cascaded(p), std::invalid_argument);
  p = SystemParams{};
  p.cutoff_t = 0;
  CHECK_THROWS_AS(build_cascaded(p), std::invalid_argument);
}

TEST_CASE("embed_state preserves content under cutoff growth") {
  const SystemParams small = small_params(1, 2);
  const ScenarioSystem sys = build_cascaded(small);
  const DensityMatrix steady = steady_state_nullspace(sys.spec, 64);

  const SystemParams big = small_params(1, 4);
  const ScenarioSystem big_sys = build_cascaded(big);
  const DensityMatrix lifted = embed_state(steady, big_sys.layout());
  CHECK(std::abs(lifted.matrix.trace() - 1.0) < 1e-12);

  const PhotonDistribution before = photon_distribution(steady, 1);
  const PhotonDistribution after = photon_distribution(lifted, 1);
  for (int n = 0; n <= before.cutoff(); ++n) {
    CHECK(after.probabilities[n] == doctest::Approx(before.probabilities[n]));
  }
  for (int n = before.cutoff() + 1; n <= after.cutoff(); ++n) {
    CHECK(after.probabilities[n] == 0.0);
  }

  // shrinking is rejected
  CHECK_THROWS_AS(embed_state(lifted, sys.layout()), std::invalid_argument);
}

TEST_CASE("kappa_s = 0 decouples the target completely") {
  SystemParams p = small_params(1, 2);
  p.kappa_s = 0.0;
  p.pump_source = 0.05;
  const ScenarioSystem sys = build_cascaded(p);
  CHECK(sys.spec.cascades[0].strength == 0.0);
  const SteadyStateRun run = solve_steady_state(
      sys, DensityMatrix::vacuum(sys.layout()), SteadyStateOptions{});
  REQUIRE(run.converged);
  const PhotonDistribution target = photon_distribution(run.state, 3);
  CHECK(target.probabilities[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(target.mean() < 1e-8);
}

TEST_CASE("sign flip of coupling and Hamiltonian leaves observables fixed") {
  const SystemParams p = small_params(1, 2);
  ScenarioSystem sys = build_cascaded(p);
  ScenarioSystem flipped = build_cascaded(p);
  flipped.spec.hamiltonian.matrix *= -1.0;
  for (CascadeTerm& c : flipped.spec.cascades) c.strength = -c.strength;

  const DensityMatrix a = steady_state_nullspace(sys.spec, 64);
  const DensityMatrix b = steady_state_nullspace(flipped.spec, 64);
  CHECK(std::abs(g_n(a, 1, 2) - g_n(b, 1, 2)) < 1e-8);
  CHECK(std::abs(g_n(a, 3, 2) - g_n(b, 3, 2)) < 1e-8);
  CHECK(std::abs(photon_distribution(a, 3).mean() -
                 photon_distribution(b, 3).mean()) < 1e-10);
}

TEST_CASE("solve_steady_state matches the null-space oracle") {
  const SystemParams p = small_params(1, 2);
  const ScenarioSystem sys = build_cascaded(p);
  SteadyStateOptions opts;
  const SteadyStateRun run =
      solve_steady_state(sys, DensityMatrix::vacuum(sys.layout()), opts);
  REQUIRE(run.converged);
  const DensityMatrix oracle = steady_state_nullspace(sys.spec, 64);
  CHECK(max_abs(run.state.matrix - oracle.matrix) < 1e-7);

  // the RK4-only route lands on the same state
  SteadyStateOptions rk4_only = opts;
  rk4_only.use_linear_solver = false;
  const SteadyStateRun slow =
      solve_steady_state(sys, DensityMatrix::vacuum(sys.layout()), rk4_only);
  REQUIRE(slow.converged);
  CHECK(max_abs(slow.state.matrix - oracle.matrix) < 1e-7);
}

TEST_CASE("run_point produces records for both cavities") {
  const EscalationPlan plan{2, 2, 4};
  SteadyStateOptions opts;
  const PointResult r = run_point(ScenarioKind::Cascaded, small_params(1, 2),
                                  0.1, plan, opts, 4);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].system == "source");
  CHECK(r.records[1].system == "target");
  for (const CorrelationRecord& rec : r.records) {
    CHECK(rec.pump == 0.1);
    CHECK(rec.g.size() == 3);  // g2, g3, g4
    CHECK(rec.mean_photons > 0.0);
  }
  CHECK(r.steady_converged);
  // g_of maps indices to orders
  CHECK(r.records[0].g_of(2) == r.records[0].g[0]);
  CHECK_THROWS_AS(r.records[0].g_of(5), std::invalid_argument);
}

TEST_CASE("run_sweep is deterministic across worker counts") {
  SweepPlan plan;
  plan.pump_grid = {0.05, 0.1, 0.2};
  plan.kind = ScenarioKind::IncoherentDrive;
  plan.n_max = 3;
  plan.cutoffs = {2, 2, 4};
  plan.workers = 1;
  const SystemParams p = small_params(1, 2);
  const auto serial = run_sweep(plan, p);
  plan.workers = 4;
  const auto parallel = run_sweep(plan, p);
  REQUIRE(serial.size() == parallel.size());
  REQUIRE(serial.size() == 3);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].pump == parallel[i].pump);
    CHECK(serial[i].system == parallel[i].system);
    CHECK(serial[i].mean_photons == parallel[i].mean_photons);  // bitwise
    for (std::size_t k = 0; k < serial[i].g.size(); ++k) {
      CHECK(serial[i].g[k] == parallel[i].g[k]);
    }
  }
  // sorted by pump
  CHECK(serial[0].pump < serial[1].pump);
  CHECK(serial[1].pump < serial[2].pump);
}

TEST_CASE("transition_analysis on synthetic curves") {
  auto record = [](double pump, double g2, double g3) {
    CorrelationRecord r;
    r.pump = pump;
    r.g = {g2, g3};
    return r;
  };
  // source curvature: +1 then -1; target: -1 then +1 -> diff -2 then +2,
  // crossing at the midpoint
  std::vector<CorrelationRecord> source{record(1.0, 1.0, 2.0),
                                        record(2.0, 2.0, 2.0)};
  std::vector<CorrelationRecord> target{record(1.0, 1.5, 1.0),
                                        record(2.0, 1.0, 2.0)};
  const CrossingEstimate c = transition_analysis(source, target);
  REQUIRE(c.status == CrossingEstimate::Found);
  CHECK(c.pump == doctest::Approx(1.5));

  // identical curves -> degenerate
  const CrossingEstimate d = transition_analysis(source, source);
  CHECK(d.status == CrossingEstimate::Degenerate);

  // parallel curves -> no crossing
  std::vector<CorrelationRecord> shifted{record(1.0, 1.0, 3.0),
                                         record(2.0, 2.0, 4.0)};
  const CrossingEstimate n = transition_analysis(source, shifted);
  CHECK(n.status == CrossingEstimate::NoCrossing);

  CHECK_THROWS_AS(transition_analysis(source, {}), std::invalid_argument);
}

TEST_CASE("log_grid") {
  const std::vector<double> g = log_grid(1e-3, 10.0, 30);
  REQUIRE(g.size() == 30);
  CHECK(g.front() == 1e-3);
  CHECK(g.back() == 10.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] > g[i - 1]);
    // constant ratio
    if (i >= 2) {
      CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(log_grid(1.0, 0.5, 5), std::invalid_argument);
}
