#include "mdseries/runtime.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <set>
#include <string>
#include <thread>
#include <utility>

namespace mdseries {

namespace {

struct FailureSlot {
  std::mutex mutex;
  std::size_t index = 0;
  std::string message;
  bool failed = false;

  void record(std::size_t i, std::string what) {
    std::lock_guard<std::mutex> lock(mutex);
    if (!failed || i < index) {
      index = i;
      message = std::move(what);
    }
    failed = true;
  }
};

std::string describe(std::exception_ptr e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown exception";
  }
}

}  // namespace

void run_stage(std::size_t count, const std::function<void(std::size_t)>& job,
               unsigned workers, std::vector<StageSpan>* log) {
  if (workers < 1) throw ArgumentError("need at least one worker");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        job(i);
      } catch (...) {
        throw JobError(i, describe(std::current_exception()));
      }
    }
    if (log) log->push_back({start, Clock::now()});
    return;
  }

  JobQueue queue(count);
  FailureSlot failure;
  auto work = [&] {
    while (auto i = queue.claim_next()) {
      try {
        job(*i);
      } catch (...) {
        failure.record(*i, describe(std::current_exception()));
        queue.drain();
      }
    }
  };
  const unsigned spawned = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  std::vector<std::thread> pool;
  pool.reserve(spawned - 1);
  for (unsigned w = 1; w < spawned; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (log) log->push_back({start, Clock::now()});
  if (failure.failed) throw JobError(failure.index, failure.message);
}

StageRunner make_stage_runner(unsigned workers, std::vector<StageSpan>* log) {
  if (workers < 1) throw ArgumentError("need at least one worker");
  return [workers, log](std::size_t count, const std::function<void(std::size_t)>& job) {
    run_stage(count, job, workers, log);
  };
}

void write_bench_rows(std::ostream& os, const BenchCase& c,
                      std::span<const BenchResult> results) {
  char buf[256];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%llu,%d,%d,%d,%d,%d,%u,%.6f,%.4f,%.4f\n",
                  static_cast<unsigned long long>(c.seed), c.npolys, c.nvars, c.terms,
                  c.degree, c.k, r.workers, r.wall_seconds, r.speedup, r.efficiency);
    os << buf;
  }
}

unsigned physical_cores() {
  std::ifstream in("/proc/cpuinfo");
  std::set<std::pair<int, int>> cores;
  int physical = 0;
  int core = -1;
  std::string line;
  auto flush = [&] {
    if (core >= 0) cores.insert({physical, core});
    physical = 0;
    core = -1;
  };
  while (std::getline(in, line)) {
    if (line.empty()) {
      flush();
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, line.find_last_not_of(" \t", colon - 1) + 1);
    const std::string value = line.substr(colon + 1);
    try {
      if (key == "physical id") physical = std::stoi(value);
      if (key == "core id") core = std::stoi(value);
    } catch (const std::exception&) {
    }
  }
  flush();
  if (!cores.empty()) return static_cast<unsigned>(cores.size());
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace mdseries
