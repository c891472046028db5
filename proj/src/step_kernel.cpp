#include "step_kernel.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "ltipar/error.hpp"

namespace ltipar::detail {

namespace {

void append_row_major(std::vector<double>& dst, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) dst.push_back(m(i, j));
  }
}

double rule_coeff(const std::vector<double>& v, std::size_t k) { return k < v.size() ? v[k] : 0.0; }

Eigen::PartialPivLU<Eigen::MatrixXd> factor_step_matrix(const Eigen::MatrixXd& m,
                                                         const std::string& what) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double limit = static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon();
  if (!(lu.rcond() > limit)) {
    throw Error(ErrorKind::SingularStepMatrix,
                what + " step matrix is singular (rcond " + std::to_string(lu.rcond()) + ")");
  }
  return lu;
}

}  // namespace

StepKernel kernel_from_model(const StateSpaceModel& model, const DerivativeRule& rule, double T) {
  require_causal(rule);
  if (!(T > 0.0)) throw Error(ErrorKind::InvalidArgument, "sample time must be positive");
  const auto n = model.states();
  const auto I = Eigen::MatrixXd::Identity(n, n);
  const std::size_t depth = std::max(rule.numerator.size(), rule.denominator.size()) - 1;

  const Eigen::MatrixXd m0 = rule_coeff(rule.numerator, 0) * I -
                             T * rule_coeff(rule.denominator, 0) * model.A();
  const auto lu = factor_step_matrix(m0, "serial");

  StepKernel k;
  k.states = static_cast<std::size_t>(n);
  k.inputs = static_cast<std::size_t>(model.inputs());
  k.outputs = static_cast<std::size_t>(model.outputs());
  k.depth = depth;
  for (std::size_t l = 1; l <= depth; ++l) {
    const Eigen::MatrixXd ml = rule_coeff(rule.numerator, l) * I -
                               T * rule_coeff(rule.denominator, l) * model.A();
    append_row_major(k.F, lu.solve(-ml));
  }
  for (std::size_t l = 0; l <= depth; ++l) {
    append_row_major(k.H, lu.solve(T * rule_coeff(rule.denominator, l) * model.B()));
  }
  append_row_major(k.C, model.C());
  return k;
}

StepKernel kernel_from_equations(const DiscreteChannel& channel, std::size_t depth,
                                 std::size_t inputs) {
  const auto q = static_cast<Eigen::Index>(channel.equations.size());
  Eigen::MatrixXd k0 = Eigen::MatrixXd::Identity(q, q);
  std::vector<Eigen::MatrixXd> rhs(depth, Eigen::MatrixXd::Zero(q, q));
  std::vector<Eigen::MatrixXd> in(depth + 1,
                                  Eigen::MatrixXd::Zero(q, static_cast<Eigen::Index>(inputs)));
  bool implicit = false;
  for (Eigen::Index v = 0; v < q; ++v) {
    const auto& eq = channel.equations[static_cast<std::size_t>(v)];
    for (std::size_t l = 1; l <= depth; ++l) rhs[l - 1](v, v) = -eq.output_coeffs[l];
    for (std::size_t l = 0; l <= depth; ++l) {
      for (std::size_t j = 0; j < inputs; ++j) {
        in[l](v, static_cast<Eigen::Index>(j)) = eq.input_coeffs[l][j];
      }
    }
    for (const auto& c : eq.couplings) {
      const auto col = static_cast<Eigen::Index>(c.variable);
      if (c.coeffs[0] != 0.0) {
        k0(v, col) -= c.coeffs[0];
        implicit = true;
      }
      for (std::size_t l = 1; l <= depth; ++l) rhs[l - 1](v, col) += c.coeffs[l];
    }
  }
  if (implicit) {
    const auto lu = factor_step_matrix(k0, "channel " + channel.label);
    for (auto& m : rhs) m = lu.solve(m);
    for (auto& m : in) m = lu.solve(m);
  }

  StepKernel k;
  k.states = static_cast<std::size_t>(q);
  k.inputs = inputs;
  k.outputs = static_cast<std::size_t>(channel.output_map.rows());
  k.depth = depth;
  for (const auto& m : rhs) append_row_major(k.F, m);
  for (const auto& m : in) append_row_major(k.H, m);
  append_row_major(k.C, channel.output_map);
  return k;
}

KernelState initial_state(const StepKernel& k, const Eigen::VectorXd& x0) {
  KernelState s;
  s.history.assign(std::max<std::size_t>(k.depth, 1) * k.states, 0.0);
  s.next.assign(k.states, 0.0);
  if (x0.size() > 0) {
    if (static_cast<std::size_t>(x0.size()) != k.states) {
      throw Error(ErrorKind::DimensionMismatch, "initial state has " + std::to_string(x0.size()) +
                                                    " entries, expected " +
                                                    std::to_string(k.states));
    }
    for (std::size_t l = 0; l < std::max<std::size_t>(k.depth, 1); ++l) {
      for (std::size_t j = 0; j < k.states; ++j) {
        s.history[l * k.states + j] = x0(static_cast<Eigen::Index>(j));
      }
    }
  }
  return s;
}

void current_output(const StepKernel& k, const KernelState& s, double* out) {
  for (std::size_t p = 0; p < k.outputs; ++p) {
    double acc = 0.0;
    const double* c = &k.C[p * k.states];
    for (std::size_t j = 0; j < k.states; ++j) acc += c[j] * s.history[j];
    out[p] = acc;
  }
}

void advance(const StepKernel& k, const double* u, std::size_t begin, std::size_t end,
             KernelState& s, double* out, double* states_out) {
  const std::size_t n = k.states;
  const std::size_t r = k.inputs;
  const std::size_t nn = n * n;
  const std::size_t nr = n * r;
  double* hist = s.history.data();
  double* next = s.next.data();

  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t row = 0; row < n; ++row) {
      double acc = 0.0;
      for (std::size_t l = 1; l <= k.depth; ++l) {
        const double* f = &k.F[(l - 1) * nn + row * n];
        const double* x = &hist[(l - 1) * n];
        for (std::size_t j = 0; j < n; ++j) acc += f[j] * x[j];
      }
      for (std::size_t l = 0; l <= k.depth && l <= i; ++l) {
        const double* h = &k.H[l * nr + row * r];
        const double* ui = u + (i - l) * r;
        for (std::size_t q = 0; q < r; ++q) acc += h[q] * ui[q];
      }
      next[row] = acc;
    }
    for (std::size_t l = k.depth; l > 1; --l) {
      std::copy(hist + (l - 2) * n, hist + (l - 1) * n, hist + (l - 1) * n);
    }
    std::copy(next, next + n, hist);

    double* o = out + (i - begin) * k.outputs;
    for (std::size_t p = 0; p < k.outputs; ++p) {
      const double* c = &k.C[p * n];
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += c[j] * hist[j];
      o[p] = acc;
    }
    if (states_out != nullptr) std::copy(hist, hist + n, states_out + (i - begin) * n);
  }
}

}  // namespace ltipar::detail
