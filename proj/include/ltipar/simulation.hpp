#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ltipar/discretizer.hpp"
#include "ltipar/model.hpp"

namespace ltipar {

struct InputSignal {
  enum class Kind { Step, Ramp, Sine, Table };

  Kind kind = Kind::Step;
  double amplitude = 1.0;  // step height, ramp slope, or sine amplitude
  double frequency = 0.0;  // Hz, sine only
  double phase = 0.0;      // rad, sine only
  double start_time = 0.0;
  std::vector<double> samples;  // table only, one per step

  /// Value at step i (time i*T). Tables hold their last sample.
  double at(std::size_t i, double T) const;

  /// "step:<amp>", "ramp:<slope>", "sine:<amp>:<hz>[:<phase>]"; an optional
  /// "@<start>" suffix delays the signal. Tables come from files, not specs.
  static InputSignal parse(std::string_view spec);
};

/// Samples signals into an r x (N+1) matrix. One signal is broadcast to all
/// inputs; otherwise exactly r signals are required. Table signals must have
/// at least N samples.
Eigen::MatrixXd sample_inputs(const std::vector<InputSignal>& signals, Eigen::Index inputs,
                              double T, std::size_t steps);

/// Sampled run of either engine; every series has steps + 1 samples.
struct Trace {
  double T = 0.0;
  std::size_t steps = 0;
  std::vector<std::vector<double>> inputs;   // [input][i]
  std::vector<std::vector<double>> outputs;  // [output][i]
  std::vector<std::string> channel_labels;
  std::vector<std::vector<std::vector<double>>> per_channel;  // [channel][output][i]
  std::vector<std::string> state_labels;
  std::vector<std::vector<double>> states;  // [variable][i], when recorded
};

struct SimulationOptions {
  bool record_channels = true;
  /// Reference engine only: keep every virtual variable (mesh order).
  bool record_states = false;
  /// Time steps per synchronization block of the OpenMP engine.
  std::size_t block_steps = 4096;
  /// Serial engine initial state; empty means zero.
  Eigen::VectorXd initial_state;
  /// Parallel engines, one per channel; empty means zero. A nonzero serial
  /// initial state has no unique split across channels.
  std::vector<Eigen::VectorXd> channel_initial_states;
};

/// Steps the full model with the same derivative rule the channels use:
/// N(z^-1) x = T D(z^-1) (A x + B u), y = C x + D u, with x[0] the initial
/// state and samples before 0 taken as zero. The implicit step matrix is
/// factored once; SingularStepMatrix if it is singular.
Trace simulate_serial(const StateSpaceModel& model, const DerivativeRule& rule, double T,
                      const Eigen::MatrixXd& inputs, const SimulationOptions& options = {});

/// OpenMP engine: channels are split across `workers` threads, each advancing
/// its channels over a block of steps into private buffers, followed by a
/// summation pass in channel-index order. Output is bitwise independent of
/// the worker count.
Trace simulate_parallel(const DiscreteParallelModel& dpm, const Eigen::MatrixXd& inputs,
                        int workers, const SimulationOptions& options = {});

/// Single-threaded reference for simulate_parallel, bitwise identical to it.
/// The only engine that can record every virtual variable.
Trace simulate_parallel_reference(const DiscreteParallelModel& dpm, const Eigen::MatrixXd& inputs,
                                  const SimulationOptions& options = {});

/// Worker count after applying the LTIPAR_MAX_WORKERS cap; at least 1.
int effective_workers(int requested);

struct TraceComparison {
  double max_abs = 0.0;
  double rms = 0.0;
  std::size_t argmax_step = 0;
  std::size_t argmax_output = 0;
};

/// ShapeMismatch unless T, step count and output count agree.
TraceComparison compare(const Trace& a, const Trace& b);

}  // namespace ltipar
