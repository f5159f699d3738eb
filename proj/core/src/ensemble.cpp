#include "numstab/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

namespace numstab {

namespace {

// Trajectories are aggregated in fixed-size chunks. A chunk is always
// processed by a single worker in index order, and chunk partials are
// reduced in slot order afterwards, so the schedule cannot leak into the
// floating-point result.
constexpr int kChunkSize = 64;

struct ChunkPartial {
  int n_done = 0;
  int n_invalid = 0;
  int n_success = 0;
  double final_var_sum = 0.0;
  std::vector<double> sum_d, sum_d2, sum_n, sum_n2;
  std::map<int, int> histogram;
  std::vector<std::string> failure_reasons;

  void absorb(ChunkPartial&& other) {
    n_done += other.n_done;
    n_invalid += other.n_invalid;
    n_success += other.n_success;
    final_var_sum += other.final_var_sum;
    auto add = [](std::vector<double>& a, const std::vector<double>& b) {
      if (a.empty()) {
        a = b;
        return;
      }
      if (b.empty()) return;
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    add(sum_d, other.sum_d);
    add(sum_d2, other.sum_d2);
    add(sum_n, other.sum_n);
    add(sum_n2, other.sum_n2);
    for (const auto& [level, count] : other.histogram) {
      histogram[level] += count;
    }
    for (auto& r : other.failure_reasons) {
      if (std::find(failure_reasons.begin(), failure_reasons.end(), r) ==
          failure_reasons.end()) {
        failure_reasons.push_back(std::move(r));
      }
    }
  }
};

std::vector<double> pairwise_rows(std::vector<std::vector<double>>& rows,
                                  std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return std::move(rows[lo]);
  std::size_t mid = lo + (hi - lo) / 2;
  std::vector<double> left = pairwise_rows(rows, lo, mid);
  std::vector<double> right = pairwise_rows(rows, mid, hi);
  for (std::size_t i = 0; i < left.size(); ++i) left[i] += right[i];
  return left;
}

std::vector<double> pairwise_sum(std::vector<std::vector<double>> rows,
                                 std::size_t fallback_len) {
  if (rows.empty()) return std::vector<double>(fallback_len, 0.0);
  return pairwise_rows(rows, 0, rows.size());
}

ChunkPartial pairwise_partials(std::vector<ChunkPartial>& slots,
                               std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return std::move(slots[lo]);
  std::size_t mid = lo + (hi - lo) / 2;
  ChunkPartial left = pairwise_partials(slots, lo, mid);
  left.absorb(pairwise_partials(slots, mid, hi));
  return left;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NUMSTAB_WORKERS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<double> recording_times(const SimParams& p) {
  const int total = p.total_steps();
  std::vector<double> t;
  t.push_back(0.0);
  for (int k = p.record_stride; k <= total; k += p.record_stride) {
    t.push_back(k * p.dt);
  }
  if (total % p.record_stride != 0) t.push_back(total * p.dt);
  return t;
}

ChunkPartial process_chunk(const SimParams& base, std::uint64_t master_seed,
                           std::uint64_t stream_offset, int first, int last,
                           std::size_t series_len) {
  ChunkPartial part;
  std::vector<std::vector<double>> d_rows, d2_rows, n_rows, n2_rows;
  for (int i = first; i < last; ++i) {
    TrajectoryRecord rec =
        simulate_trajectory_stream(base, master_seed, stream_offset + i);
    ++part.n_done;
    if (!rec.valid) {
      ++part.n_invalid;
      if (std::find(part.failure_reasons.begin(), part.failure_reasons.end(),
                    rec.failure_reason) == part.failure_reasons.end()) {
        part.failure_reasons.push_back(rec.failure_reason);
      }
      continue;
    }
    if (rec.distance.size() != series_len) {
      throw std::logic_error("ensemble: trajectory record length mismatch");
    }
    const double fvar = rec.n_var.back();
    const double fmean = rec.n_est.back();
    std::vector<double> sq(series_len);
    for (std::size_t r = 0; r < series_len; ++r) {
      sq[r] = rec.distance[r] * rec.distance[r];
    }
    d2_rows.push_back(std::move(sq));
    sq.resize(series_len);
    for (std::size_t r = 0; r < series_len; ++r) {
      sq[r] = rec.n_est[r] * rec.n_est[r];
    }
    n2_rows.push_back(std::move(sq));
    d_rows.push_back(std::move(rec.distance));
    n_rows.push_back(std::move(rec.n_est));

    part.final_var_sum += fvar;
    int level = kUncollapsed;
    if (fvar < kCollapseVarianceThreshold) {
      level = static_cast<int>(std::llround(fmean));
    }
    ++part.histogram[level];
    Eigen::VectorXd pops = rec.final_state.populations();
    if (base.n_star < pops.size() &&
        pops(base.n_star) >= kSuccessPopulation) {
      ++part.n_success;
    }
  }
  part.sum_d = pairwise_sum(std::move(d_rows), series_len);
  part.sum_d2 = pairwise_sum(std::move(d2_rows), series_len);
  part.sum_n = pairwise_sum(std::move(n_rows), series_len);
  part.sum_n2 = pairwise_sum(std::move(n2_rows), series_len);
  return part;
}

}  // namespace

EnsembleStats run_ensemble_offset(const EnsembleSpec& spec,
                                  std::uint64_t stream_offset) {
  if (spec.n_traj < 1) {
    throw std::invalid_argument("EnsembleSpec: n_traj must be >= 1");
  }
  spec.base.validate();
  const std::vector<double> times = recording_times(spec.base);
  const std::size_t len = times.size();

  const int n_chunks = (spec.n_traj + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkPartial> slots(static_cast<std::size_t>(n_chunks));
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&]() {
    try {
      for (;;) {
        int c = next.fetch_add(1);
        if (c >= n_chunks) break;
        int first = c * kChunkSize;
        int last = std::min(spec.n_traj, first + kChunkSize);
        slots[static_cast<std::size_t>(c)] = process_chunk(
            spec.base, spec.master_seed, stream_offset, first, last, len);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  const int workers = std::min(resolve_workers(spec.workers), n_chunks);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  ChunkPartial total = pairwise_partials(slots, 0, slots.size());

  EnsembleStats stats;
  stats.times = times;
  stats.n_total = total.n_done;
  stats.n_invalid = total.n_invalid;
  stats.outcome_histogram = std::move(total.histogram);
  stats.failure_reasons = std::move(total.failure_reasons);
  const int nv = stats.n_valid();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  stats.mean_distance.assign(len, nan);
  stats.se_distance.assign(len, 0.0);
  stats.mean_n.assign(len, nan);
  stats.se_n.assign(len, 0.0);
  if (nv == 0) {
    std::string msg = "all " + std::to_string(stats.n_total) +
                      " trajectories invalid";
    for (const auto& r : stats.failure_reasons) msg += "; " + r;
    throw AllInvalidError(msg);
  }
  stats.success_rate = static_cast<double>(total.n_success) / nv;
  stats.mean_final_n_var = total.final_var_sum / nv;

  auto finish = [nv](double sum, double sumsq, double& mean, double& se) {
    mean = sum / nv;
    if (nv < 2) {
      se = 0.0;
      return;
    }
    double var = (sumsq - nv * mean * mean) / (nv - 1);
    se = std::sqrt(std::max(0.0, var) / nv);
  };
  for (std::size_t r = 0; r < len; ++r) {
    finish(total.sum_d[r], total.sum_d2[r], stats.mean_distance[r],
           stats.se_distance[r]);
    finish(total.sum_n[r], total.sum_n2[r], stats.mean_n[r], stats.se_n[r]);
  }
  return stats;
}

EnsembleStats run_ensemble(const EnsembleSpec& spec) {
  return run_ensemble_offset(spec, 0);
}

std::vector<std::pair<double, EnsembleStats>> run_kappa_sweep(
    const EnsembleSpec& spec) {
  if (spec.kappa_sweep.empty()) {
    throw std::invalid_argument("run_kappa_sweep: kappa_sweep is empty");
  }
  std::vector<std::pair<double, EnsembleStats>> out;
  out.reserve(spec.kappa_sweep.size());
  for (std::size_t s = 0; s < spec.kappa_sweep.size(); ++s) {
    EnsembleSpec slot = spec;
    slot.base.kappa = spec.kappa_sweep[s];
    out.emplace_back(spec.kappa_sweep[s],
                     run_ensemble_offset(
                         slot, s * static_cast<std::uint64_t>(spec.n_traj)));
  }
  return out;
}

MonotonicityReport check_monotone_decrease(const EnsembleStats& stats,
                                           double se_mult) {
  MonotonicityReport rep;
  for (std::size_t i = 0; i + 1 < stats.mean_distance.size(); ++i) {
    double rise = stats.mean_distance[i + 1] - stats.mean_distance[i];
    double allowance =
        se_mult * std::hypot(stats.se_distance[i], stats.se_distance[i + 1]);
    if (rise > allowance) {
      rep.pass = false;
      rep.violating_steps.push_back(static_cast<int>(i));
      rep.worst_excess = std::max(rep.worst_excess, rise - allowance);
    }
  }
  return rep;
}

}  // namespace numstab
