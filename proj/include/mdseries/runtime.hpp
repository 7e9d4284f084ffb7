#pragma once

// Shared-memory execution of Newton's method: a job queue whose counter is
// guarded by a mutex, stages that launch and join a set of worker threads,
// and timing of the resulting speedup and efficiency.

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mdseries/errors.hpp"
#include "mdseries/newton.hpp"

namespace mdseries {

/// Hands out the indices 0 .. job_count - 1, each exactly once.
class JobQueue {
 public:
  explicit JobQueue(std::size_t job_count, std::size_t start = 0)
      : count_(job_count), next_(start < job_count ? start : job_count) {}

  /// The next unclaimed index, or nothing once all are taken.
  std::optional<std::size_t> claim_next() {
    std::lock_guard<std::mutex> lock(mutex_);
    if (next_ == count_) return std::nullopt;
    return next_++;
  }

  /// Makes every later claim report exhaustion.
  void drain() {
    std::lock_guard<std::mutex> lock(mutex_);
    next_ = count_;
  }

  std::size_t job_count() const noexcept { return count_; }

  std::size_t counter() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return next_;
  }

 private:
  const std::size_t count_;
  std::size_t next_;
  mutable std::mutex mutex_;
};

/// First job start and last job end of one stage.
struct StageSpan {
  std::chrono::steady_clock::time_point first_start;
  std::chrono::steady_clock::time_point last_end;
};

/// Runs job(0 .. count - 1) on `workers` threads sharing one queue and
/// returns after joining them all.  With one worker the jobs run in order on
/// the calling thread.  When jobs throw, the remaining jobs are skipped and
/// a JobError names the smallest failing index.  A non-null `log` receives
/// the span of the stage.
void run_stage(std::size_t count, const std::function<void(std::size_t)>& job,
               unsigned workers, std::vector<StageSpan>* log = nullptr);

/// A StageRunner that executes every stage with run_stage.
StageRunner make_stage_runner(unsigned workers, std::vector<StageSpan>* log = nullptr);

/// Newton's method with both stages of every step spread over `workers`
/// threads: one job per polynomial for evaluation and differentiation, one
/// job per right-hand side update in the block solve.  Results do not
/// depend on the worker count.
template <int K>
NewtonResult<K> parallel_newton(const PolySystem<K>& f, std::span<const Complex<K>> x0,
                                const NewtonConfig& cfg, unsigned workers,
                                std::vector<StageSpan>* log = nullptr) {
  if (workers < 1) throw ArgumentError("need at least one worker");
  return run_newton<K>(f, x0, cfg, make_stage_runner(workers, log));
}

template <int K>
NewtonResult<K> parallel_newton(const PolySystem<K>& f, const Vector<K>& x0,
                                const NewtonConfig& cfg, unsigned workers,
                                std::vector<StageSpan>* log = nullptr) {
  return parallel_newton<K>(f, std::span<const Complex<K>>(x0), cfg, workers, log);
}

struct BenchResult {
  unsigned workers = 1;
  double wall_seconds = 0.0;
  double speedup = 1.0;
  double efficiency = 1.0;
  int iterations = 0;
  double final_update_norm = 0.0;
};

/// Times parallel_newton for every worker count, keeping the minimum of
/// `repetitions` runs, and relates each time to the one-worker time.  The
/// worker list must contain 1.
template <int K>
std::vector<BenchResult> measure_efficiency(const PolySystem<K>& f, const Vector<K>& x0,
                                            const NewtonConfig& cfg,
                                            std::span<const unsigned> worker_list,
                                            int repetitions = 3) {
  if (worker_list.empty()) throw ArgumentError("empty worker list");
  bool has_one = false;
  for (unsigned w : worker_list) {
    if (w < 1) throw ArgumentError("worker counts must be positive");
    has_one = has_one || w == 1;
  }
  if (!has_one) throw ArgumentError("the worker list must include 1");
  if (repetitions < 1) throw ArgumentError("need at least one repetition");

  std::vector<BenchResult> out;
  for (unsigned w : worker_list) {
    BenchResult b;
    b.workers = w;
    for (int r = 0; r < repetitions; ++r) {
      const auto start = std::chrono::steady_clock::now();
      const auto res = parallel_newton<K>(f, x0, cfg, w);
      const double t =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (r == 0 || t < b.wall_seconds) b.wall_seconds = t;
      b.iterations = res.trace.iterations();
      b.final_update_norm = res.trace.final_update_norm();
    }
    out.push_back(b);
  }
  double base = 0.0;
  for (const auto& b : out) {
    if (b.workers == 1) base = b.wall_seconds;
  }
  for (auto& b : out) {
    b.speedup = base / b.wall_seconds;
    b.efficiency = b.speedup / b.workers;
  }
  return out;
}

/// Problem description for one benchmark CSV row.
struct BenchCase {
  std::uint64_t seed = 0;
  int npolys = 0;
  int nvars = 0;
  int terms = 0;
  int degree = 0;
  int k = 0;
};

inline constexpr const char* kBenchCsvHeader =
    "seed,N,n,terms,degree,k,workers,wall_seconds,speedup,efficiency";

void write_bench_rows(std::ostream& os, const BenchCase& c,
                      std::span<const BenchResult> results);

/// Physical cores from /proc/cpuinfo, or the hardware thread count when
/// that is unavailable (at least 1).
unsigned physical_cores();

}  // namespace mdseries
