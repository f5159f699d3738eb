#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "numstab/sme.hpp"

namespace numstab {

// A trajectory counts as collapsed when its final number variance drops
// below this; the outcome level is then the nearest integer to <n>.
inline constexpr double kCollapseVarianceThreshold = 1e-3;
// Success means this much population on the target level at the end.
inline constexpr double kSuccessPopulation = 0.99;
// Histogram key for valid trajectories that never collapsed.
inline constexpr int kUncollapsed = -1;

struct EnsembleSpec {
  SimParams base{};
  int n_traj = 100;
  std::uint64_t master_seed = 0;
  // Worker threads; 0 defers to NUMSTAB_WORKERS, then hardware_concurrency.
  int workers = 0;
  // kappa values for run_kappa_sweep, in units of the measurement rate.
  std::vector<double> kappa_sweep{};
};

// Per-time-row mean and standard error over the valid trajectories, plus
// final-state outcome tallies. Invalid trajectories contribute nothing but
// their count and failure reasons. All aggregation is done in a fixed
// pairwise order, so results are bit-identical for any worker count.
struct EnsembleStats {
  std::vector<double> times;
  std::vector<double> mean_distance;
  std::vector<double> se_distance;
  std::vector<double> mean_n;
  std::vector<double> se_n;
  std::map<int, int> outcome_histogram;  // level -> count, kUncollapsed key
  double success_rate = 0.0;             // over valid trajectories
  double mean_final_n_var = 0.0;
  int n_total = 0;
  int n_invalid = 0;
  std::vector<std::string> failure_reasons;  // distinct reasons observed

  int n_valid() const { return n_total - n_invalid; }
};

// Raised when an ensemble has no valid trajectory left to aggregate; the
// message carries the distinct failure reasons encountered.
struct AllInvalidError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

EnsembleStats run_ensemble(const EnsembleSpec& spec);

// Same, with trajectory i drawing from noise stream stream_offset + i.
// Sweep slots use disjoint offsets so their trajectories are independent.
EnsembleStats run_ensemble_offset(const EnsembleSpec& spec,
                                  std::uint64_t stream_offset);

// One ensemble per kappa_sweep entry; slot s uses offset s * n_traj so the
// slots draw disjoint noise streams off the shared master seed.
std::vector<std::pair<double, EnsembleStats>> run_kappa_sweep(
    const EnsembleSpec& spec);

// Checks that mean_distance never rises by more than se_mult combined
// standard errors between consecutive recorded times.
struct MonotonicityReport {
  bool pass = true;
  std::vector<int> violating_steps;
  double worst_excess = 0.0;  // largest rise beyond the allowance
};

MonotonicityReport check_monotone_decrease(const EnsembleStats& stats,
                                           double se_mult = 2.0);

}  // namespace numstab
