#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "ltipar/discretizer.hpp"
#include "ltipar/model.hpp"

namespace ltipar {

struct WorkerTiming {
  int workers = 1;
  double seconds = 0.0;
  /// 100 * (1 - parallel / serial); NaN without a serial run.
  double speedup_percent = 0.0;
};

struct BenchReport {
  std::size_t steps = 0;
  double T = 0.0;
  int hardware_threads = 1;
  std::optional<double> serial_seconds;
  std::vector<WorkerTiming> parallel;
  std::vector<std::string> channel_labels;
  /// Each channel stepped alone over the whole run, single-threaded.
  std::vector<double> per_channel_seconds;
  /// Summation of channel outputs alone, single-threaded.
  double summation_seconds = 0.0;

  const WorkerTiming* timing_for(int workers) const;
};

struct BenchOptions {
  int repeats = 3;  // best-of
  int warmup = 1;   // runs discarded before timing
  bool include_serial = true;
  std::size_t block_steps = 4096;
};

/// Times the serial model (if given and enabled), the parallel engine per
/// worker count, and a single-threaded breakdown into per-channel stepping
/// and summation. Model construction and decomposition are not timed.
BenchReport benchmark(const StateSpaceModel* model, const DiscreteParallelModel& dpm,
                      const Eigen::MatrixXd& inputs, const std::vector<int>& worker_counts,
                      const BenchOptions& options = {});

}  // namespace ltipar
