#include "ltipar/benchmark.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <limits>

#include "ltipar/error.hpp"
#include "ltipar/simulation.hpp"
#include "step_kernel.hpp"

namespace ltipar {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename Fn>
double best_of(const BenchOptions& options, Fn&& fn) {
  for (int w = 0; w < options.warmup; ++w) fn();
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < std::max(options.repeats, 1); ++k) {
    const auto start = Clock::now();
    fn();
    best = std::min(best, seconds_since(start));
  }
  return best;
}

}  // namespace

const WorkerTiming* BenchReport::timing_for(int workers) const {
  for (const auto& t : parallel) {
    if (t.workers == workers) return &t;
  }
  return nullptr;
}

BenchReport benchmark(const StateSpaceModel* model, const DiscreteParallelModel& dpm,
                      const Eigen::MatrixXd& inputs, const std::vector<int>& worker_counts,
                      const BenchOptions& options) {
  if (dpm.channels.empty()) throw Error(ErrorKind::EmptyChannelSet, "nothing to benchmark");

  BenchReport report;
  report.steps = static_cast<std::size_t>(inputs.cols()) - 1;
  report.T = dpm.T;
  report.hardware_threads = omp_get_num_procs();

  SimulationOptions sim;
  sim.record_channels = false;
  sim.block_steps = options.block_steps;

  if (model != nullptr && options.include_serial) {
    report.serial_seconds =
        best_of(options, [&] { (void)simulate_serial(*model, dpm.rule, dpm.T, inputs, sim); });
  }

  for (int w : worker_counts) {
    WorkerTiming timing;
    timing.workers = effective_workers(w);
    timing.seconds = best_of(options, [&] { (void)simulate_parallel(dpm, inputs, w, sim); });
    timing.speedup_percent = report.serial_seconds
                                 ? 100.0 * (1.0 - timing.seconds / *report.serial_seconds)
                                 : std::numeric_limits<double>::quiet_NaN();
    report.parallel.push_back(timing);
  }

  // Breakdown: one blocked pass, timing each channel and the summation separately.
  const auto r = static_cast<std::size_t>(dpm.inputs());
  const auto m = static_cast<std::size_t>(dpm.outputs());
  const std::size_t block = std::max<std::size_t>(options.block_steps, 1);
  std::vector<detail::StepKernel> kernels;
  std::vector<detail::KernelState> states;
  for (const auto& c : dpm.channels) {
    kernels.push_back(detail::kernel_from_equations(c, dpm.depth, r));
    states.push_back(detail::initial_state(kernels.back(), Eigen::VectorXd()));
    report.channel_labels.push_back(c.label);
  }
  std::vector<std::vector<double>> buffers(kernels.size(), std::vector<double>(block * m));
  std::vector<double> y(block * m);
  report.per_channel_seconds.assign(kernels.size(), 0.0);
  for (std::size_t b0 = 1; b0 <= report.steps; b0 += block) {
    const std::size_t b1 = std::min(report.steps + 1, b0 + block);
    for (std::size_t c = 0; c < kernels.size(); ++c) {
      const auto start = Clock::now();
      detail::advance(kernels[c], inputs.data(), b0, b1, states[c], buffers[c].data());
      report.per_channel_seconds[c] += seconds_since(start);
    }
    const auto start = Clock::now();
    for (std::size_t i = b0; i < b1; ++i) {
      for (std::size_t p = 0; p < m; ++p) {
        double acc = 0.0;
        for (const auto& b : buffers) acc += b[(i - b0) * m + p];
        for (std::size_t q = 0; q < r; ++q) {
          acc += dpm.feedthrough(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) *
                 inputs(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(i));
        }
        y[(i - b0) * m + p] = acc;
      }
    }
    report.summation_seconds += seconds_since(start);
  }
  return report;
}

}  // namespace ltipar
