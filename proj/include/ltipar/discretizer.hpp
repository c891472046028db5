#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ltipar/parallelizer.hpp"

namespace ltipar {

/// Derivative approximation s ~ z^future_depth * N(z^-1) / (T * D(z^-1)).
///
/// Coefficient lists are ascending in powers of z^-1. Rules with
/// future_depth > 0 need samples that have not happened yet and are rejected
/// by every discretization and simulation entry point.
struct DerivativeRule {
  std::string name;
  std::vector<double> numerator;
  std::vector<double> denominator;
  std::size_t past_depth = 0;
  std::size_t future_depth = 0;

  static DerivativeRule tustin();
  static DerivativeRule backward_euler();
  /// (z - 1)/T; needs the next sample, kept only to be rejected.
  static DerivativeRule forward_euler();
  /// Explicit update x[i] = x[i-1] + T f(x[i-1], u[i-1]), i.e. (1 - z^-1)/(T z^-1).
  static DerivativeRule forward_euler_shifted();
  static DerivativeRule from_name(std::string_view name);

  bool causal() const noexcept { return future_depth == 0; }
};

/// Throws AcausalRule for future_depth > 0 and InvalidArgument for malformed lists.
void require_causal(const DerivativeRule& rule);

/// Another variable of the same channel appearing on the right-hand side.
struct Coupling {
  std::size_t variable = 0;     // channel-local index
  std::vector<double> coeffs;   // by lag 0..depth
};

/// Explicit recurrence for one virtual variable y:
///
///   sum_l a_l y[i-l] = sum_l sum_q m_l[q] u_q[i-l] + sum_c sum_l c_l x_c[i-l]
///
/// with a_0 = 1. Lag-0 couplings make a channel's equations jointly implicit,
/// the same way the second-order mesh rows reference each other's current value.
struct DifferenceEquation {
  std::string label;
  std::vector<double> output_coeffs;              // a_0..a_p
  std::vector<std::vector<double>> input_coeffs;  // [lag][input]
  std::vector<Coupling> couplings;
};

/// Substitutes the rule into x' = A x + B u row by row and clears the z^-1
/// denominators. Throws UnstableNormalization when a row's a_0 before
/// normalization falls below 1e-12 in magnitude.
std::vector<DifferenceEquation> discretize_states(const Eigen::MatrixXd& A,
                                                  const Eigen::MatrixXd& B,
                                                  const std::vector<std::string>& labels,
                                                  const DerivativeRule& rule, double T);

std::vector<DifferenceEquation> discretize_channel(const Channel& channel,
                                                   const DerivativeRule& rule, double T);

struct DiscreteChannel {
  std::size_t index = 0;
  std::string label;
  std::vector<DifferenceEquation> equations;
  Eigen::MatrixXd output_map;  // outputs x variables
};

struct DiscreteParallelModel {
  DerivativeRule rule;
  double T = 0.0;
  std::size_t depth = 0;
  std::vector<DiscreteChannel> channels;
  Eigen::MatrixXd feedthrough;

  Eigen::Index inputs() const noexcept { return feedthrough.cols(); }
  Eigen::Index outputs() const noexcept { return feedthrough.rows(); }
  std::size_t variable_count() const noexcept;
};

DiscreteParallelModel discretize(const ParallelModel& pm, const DerivativeRule& rule, double T);

/// Stacked form Ad * Yd + Md * Ud = 0.
///
/// Yd = (v1[i], v1[i-1], .., v2[i], v2[i-1], ..) over every channel variable;
/// Ud = (u1[i], u1[i-1], .., u2[i], ..).
struct MeshSystem {
  Eigen::MatrixXd Ad;
  Eigen::MatrixXd Md;
  std::vector<std::string> y_layout;
  std::vector<std::string> u_layout;
  std::size_t depth = 0;
};

MeshSystem build_mesh(const DiscreteParallelModel& dpm);

/// max over steps i = 1..N of |Ad Yd + Md Ud|, with samples before 0 taken as zero.
/// `variables` holds one series per mesh row; `inputs` is r x (N+1).
double mesh_residual(const MeshSystem& mesh, const std::vector<std::vector<double>>& variables,
                     const Eigen::MatrixXd& inputs);

}  // namespace ltipar
