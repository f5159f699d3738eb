#include "numstab/ensemble.hpp"

#include <cmath>

#include "doctest.h"
#include "numstab/qfunc.hpp"

using namespace numstab;

namespace {

EnsembleSpec small_spec() {
  EnsembleSpec spec;
  spec.base.measurement_rate = 1.0;
  spec.base.gain = 20.0;
  spec.base.n_star = 2;
  spec.base.dt = 1e-3;
  spec.base.t_final = 0.5;
  spec.base.n_max = 18;
  spec.base.record_stride = 10;
  spec.master_seed = 99;
  spec.n_traj = 130;  // spans three chunks
  spec.workers = 1;
  return spec;
}

bool identical(const EnsembleStats& a, const EnsembleStats& b) {
  return a.times == b.times && a.mean_distance == b.mean_distance &&
         a.se_distance == b.se_distance && a.mean_n == b.mean_n &&
         a.se_n == b.se_n && a.outcome_histogram == b.outcome_histogram &&
         a.success_rate == b.success_rate &&
         a.mean_final_n_var == b.mean_final_n_var &&
         a.n_total == b.n_total && a.n_invalid == b.n_invalid;
}

}  // namespace

TEST_CASE("ensemble statistics are bit-identical for any worker count") {
  EnsembleSpec spec = small_spec();
  EnsembleStats one = run_ensemble(spec);
  for (int workers : {2, 3, 7}) {
    EnsembleSpec w = spec;
    w.workers = workers;
    CHECK(identical(one, run_ensemble(w)));
  }
}

TEST_CASE("a one-trajectory ensemble reproduces the bare trajectory") {
  EnsembleSpec spec = small_spec();
  spec.n_traj = 1;
  EnsembleStats stats = run_ensemble(spec);
  TrajectoryRecord rec =
      simulate_trajectory_stream(spec.base, spec.master_seed, 0);

  REQUIRE(rec.valid);
  REQUIRE(stats.times.size() == rec.times.size());
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    CHECK(stats.mean_distance[i] == rec.distance[i]);
    CHECK(stats.mean_n[i] == rec.n_est[i]);
    CHECK(stats.se_distance[i] == 0.0);
  }
  CHECK(stats.n_total == 1);
  CHECK(stats.mean_final_n_var == rec.n_var.back());
}

TEST_CASE("outcome histogram counts every valid trajectory once") {
  EnsembleSpec spec = small_spec();
  spec.base.t_final = 1.0;
  EnsembleStats stats = run_ensemble(spec);
  int total = 0;
  for (const auto& [level, count] : stats.outcome_histogram) {
    CHECK(count > 0);
    CHECK(level >= kUncollapsed);
    total += count;
  }
  CHECK(total == stats.n_valid());
}

TEST_CASE("an ensemble with no surviving trajectory raises an error") {
  EnsembleSpec spec = small_spec();
  spec.n_traj = 8;
  spec.base.n_max = 12;
  spec.base.n_star = 0;
  spec.base.initial_state.kind = InitialStateKind::kCoherent;
  spec.base.initial_state.amplitude = Complex(3.2, 0.0);  // clipped hard
  CHECK_THROWS_AS(run_ensemble(spec), AllInvalidError);
}

TEST_CASE("sweep slots reproduce standalone runs at shifted stream offsets") {
  EnsembleSpec spec = small_spec();
  spec.n_traj = 40;
  spec.kappa_sweep = {0.0, 0.05};
  auto sweep = run_kappa_sweep(spec);
  REQUIRE(sweep.size() == 2);
  CHECK(sweep[0].first == 0.0);
  CHECK(sweep[1].first == 0.05);

  EnsembleSpec slot1 = spec;
  slot1.kappa_sweep.clear();
  slot1.base.kappa = 0.05;
  EnsembleStats direct = run_ensemble_offset(slot1, 40);
  CHECK(identical(sweep[1].second, direct));
}

TEST_CASE("cavity decay lowers the closed-loop success rate") {
  EnsembleSpec spec = small_spec();
  spec.n_traj = 48;
  spec.base.t_final = 5.0;
  spec.kappa_sweep = {0.0, 0.05};
  auto sweep = run_kappa_sweep(spec);
  CHECK(sweep[0].second.success_rate > sweep[1].second.success_rate);
}

TEST_CASE("monotonicity check accepts declines and flags genuine rises") {
  EnsembleStats stats;
  stats.times = {0.0, 1.0, 2.0, 3.0};
  stats.mean_distance = {0.9, 0.5, 0.2, 0.1};
  stats.se_distance = {0.01, 0.01, 0.01, 0.01};
  MonotonicityReport ok = check_monotone_decrease(stats);
  CHECK(ok.pass);
  CHECK(ok.violating_steps.empty());

  // A rise within the combined-error allowance is tolerated.
  stats.mean_distance = {0.9, 0.5, 0.512, 0.1};
  CHECK(check_monotone_decrease(stats).pass);

  stats.mean_distance = {0.9, 0.5, 0.6, 0.1};
  MonotonicityReport bad = check_monotone_decrease(stats);
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.violating_steps.size() == 1);
  CHECK(bad.violating_steps[0] == 1);  // index of the row the rise starts at
  CHECK(bad.worst_excess == doctest::Approx(0.1 - 2.0 * std::hypot(0.01, 0.01))
                                .epsilon(1e-9));
}
