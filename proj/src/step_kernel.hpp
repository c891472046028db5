#pragma once

// Internal: explicit linear recurrence shared by every engine,
//   x[i] = sum_{l>=1} F_l x[i-l] + sum_{l>=0} H_l u[i-l],   out = C x[i].

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "ltipar/discretizer.hpp"
#include "ltipar/model.hpp"

namespace ltipar::detail {

struct StepKernel {
  std::size_t states = 0;
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::size_t depth = 0;
  std::vector<double> F;  // depth blocks, states x states, row-major
  std::vector<double> H;  // depth+1 blocks, states x inputs, row-major
  std::vector<double> C;  // outputs x states, row-major
};

struct KernelState {
  std::vector<double> history;  // depth blocks of x[i-l], l = 1..depth
  std::vector<double> next;
};

StepKernel kernel_from_model(const StateSpaceModel& model, const DerivativeRule& rule, double T);
StepKernel kernel_from_equations(const DiscreteChannel& channel, std::size_t depth,
                                 std::size_t inputs);

/// History filled with x0 (zero when empty).
KernelState initial_state(const StepKernel& k, const Eigen::VectorXd& x0);

/// Output C x for the current head of the history.
void current_output(const StepKernel& k, const KernelState& s, double* out);

/// Advances steps [begin, end). `u` is column-major r x (N+1); `out` receives
/// `outputs` values per step and `states_out`, if set, `states` values per step.
void advance(const StepKernel& k, const double* u, std::size_t begin, std::size_t end,
             KernelState& s, double* out, double* states_out = nullptr);

}  // namespace ltipar::detail
