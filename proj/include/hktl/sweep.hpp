#pragma once

// Parallel residual sweeps.  Each point is evaluated independently into a
// preallocated matrix and the reduction runs sequentially afterwards, so the
// report is bit-identical for any thread count.  HKTL_THREADS caps the pool.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "hktl/chart.hpp"
#include "hktl/report.hpp"

namespace hktl {

struct CheckDef {
  std::string name;
  std::string anchor;
  double tolerance = 0.0;
  std::function<double(const ChartPoint&)> residual;
};

inline int sweep_thread_count() {
  if (const char* env = std::getenv("HKTL_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline ResidualReport run_residual_sweep(const std::vector<ChartPoint>& points,
                                         const std::vector<CheckDef>& checks,
                                         std::uint64_t seed) {
  if (points.empty()) throw SamplingError("residual sweep over an empty admissible sample");
  const size_t npts = points.size();
  const size_t nchk = checks.size();
  std::vector<double> values(npts * nchk, 0.0);

  const int threads = std::min<int>(sweep_thread_count(), static_cast<int>(npts));
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= npts) return;
      try {
        for (size_t c = 0; c < nchk; ++c)
          values[i * nchk + c] = std::abs(checks[c].residual(points[i]));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  ResidualReport report;
  report.seed = seed;
  for (size_t c = 0; c < nchk; ++c) {
    ResidualCheck rc;
    rc.name = checks[c].name;
    rc.anchor = checks[c].anchor;
    rc.tolerance = checks[c].tolerance;
    rc.count = static_cast<long>(npts);
    double sum = 0.0;
    for (size_t i = 0; i < npts; ++i) {
      const double v = values[i * nchk + c];
      rc.max = std::max(rc.max, v);
      sum += v;
    }
    rc.mean = sum / static_cast<double>(npts);
    rc.pass = rc.max <= rc.tolerance;
    report.checks.push_back(std::move(rc));
  }
  for (size_t i = 0; i < npts; ++i)
    for (size_t c = 0; c < nchk; ++c)
      report.per_point.push_back(
          {points[i].coords_vec(), static_cast<int>(c), values[i * nchk + c]});
  return report;
}

}  // namespace hktl
