#include "ltipar/discretizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ltipar/error.hpp"

namespace ltipar {

namespace {

constexpr double kMinNormalization = 1e-12;

double coeff(const std::vector<double>& v, std::size_t k) { return k < v.size() ? v[k] : 0.0; }

}  // namespace

DerivativeRule DerivativeRule::tustin() { return {"tustin", {2.0, -2.0}, {1.0, 1.0}, 1, 0}; }

DerivativeRule DerivativeRule::backward_euler() {
  return {"backward-euler", {1.0, -1.0}, {1.0}, 1, 0};
}

DerivativeRule DerivativeRule::forward_euler() {
  return {"forward-euler", {1.0, -1.0}, {1.0}, 1, 1};
}

DerivativeRule DerivativeRule::forward_euler_shifted() {
  return {"forward-euler-shifted", {1.0, -1.0}, {0.0, 1.0}, 1, 0};
}

DerivativeRule DerivativeRule::from_name(std::string_view name) {
  if (name == "tustin" || name == "bilinear") return tustin();
  if (name == "backward-euler") return backward_euler();
  if (name == "forward-euler") return forward_euler();
  if (name == "forward-euler-shifted") return forward_euler_shifted();
  throw Error(ErrorKind::InvalidArgument, "unknown derivative rule '" + std::string(name) + "'");
}

void require_causal(const DerivativeRule& rule) {
  if (rule.numerator.empty() || rule.denominator.empty()) {
    throw Error(ErrorKind::InvalidArgument, "rule '" + rule.name + "' has empty coefficient lists");
  }
  if (std::all_of(rule.denominator.begin(), rule.denominator.end(),
                  [](double d) { return d == 0.0; })) {
    throw Error(ErrorKind::InvalidArgument, "rule '" + rule.name + "' has a zero denominator");
  }
  if (!rule.causal()) {
    throw Error(ErrorKind::AcausalRule,
                "rule '" + rule.name + "' uses " + std::to_string(rule.future_depth) +
                    " future sample(s); only causal rules can be simulated");
  }
}

std::vector<DifferenceEquation> discretize_states(const Eigen::MatrixXd& A,
                                                  const Eigen::MatrixXd& B,
                                                  const std::vector<std::string>& labels,
                                                  const DerivativeRule& rule, double T) {
  require_causal(rule);
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw Error(ErrorKind::InvalidArgument, "sample time must be positive and finite");
  }
  const std::size_t depth = std::max(rule.numerator.size(), rule.denominator.size()) - 1;
  const auto n = static_cast<std::size_t>(A.rows());
  const auto r = static_cast<std::size_t>(B.cols());

  std::vector<DifferenceEquation> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto ki = static_cast<Eigen::Index>(k);
    // Row k of N(z^-1) x = T D(z^-1) (A x + B u).
    const double a0_raw = coeff(rule.numerator, 0) - T * coeff(rule.denominator, 0) * A(ki, ki);
    if (!(std::abs(a0_raw) >= kMinNormalization)) {
      throw Error(ErrorKind::UnstableNormalization,
                  "leading coefficient of '" + labels[k] + "' is " + std::to_string(a0_raw) +
                      "; sample time collides with the pole");
    }

    DifferenceEquation eq;
    eq.label = labels[k];
    eq.output_coeffs.resize(depth + 1);
    eq.input_coeffs.assign(depth + 1, std::vector<double>(r, 0.0));
    for (std::size_t l = 0; l <= depth; ++l) {
      const double nl = coeff(rule.numerator, l);
      const double dl = coeff(rule.denominator, l);
      eq.output_coeffs[l] = l == 0 ? 1.0 : (nl - T * dl * A(ki, ki)) / a0_raw;
      for (std::size_t q = 0; q < r; ++q) {
        eq.input_coeffs[l][q] = T * dl * B(ki, static_cast<Eigen::Index>(q)) / a0_raw;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double a = A(ki, static_cast<Eigen::Index>(j));
      if (j == k || a == 0.0) continue;
      Coupling c{j, std::vector<double>(depth + 1)};
      for (std::size_t l = 0; l <= depth; ++l) {
        c.coeffs[l] = T * coeff(rule.denominator, l) * a / a0_raw;
      }
      eq.couplings.push_back(std::move(c));
    }
    out.push_back(std::move(eq));
  }
  return out;
}

std::vector<DifferenceEquation> discretize_channel(const Channel& channel,
                                                   const DerivativeRule& rule, double T) {
  return discretize_states(channel.local_model.A(), channel.local_model.B(), channel.state_labels,
                           rule, T);
}

std::size_t DiscreteParallelModel::variable_count() const noexcept {
  std::size_t total = 0;
  for (const auto& c : channels) total += c.equations.size();
  return total;
}

DiscreteParallelModel discretize(const ParallelModel& pm, const DerivativeRule& rule, double T) {
  require_causal(rule);
  DiscreteParallelModel out;
  out.rule = rule;
  out.T = T;
  out.depth = std::max(rule.numerator.size(), rule.denominator.size()) - 1;
  out.feedthrough = pm.feedthrough;
  out.channels.reserve(pm.channels.size());
  for (const auto& c : pm.channels) {
    out.channels.push_back(
        DiscreteChannel{c.index, c.label, discretize_channel(c, rule, T), c.local_model.C()});
  }
  return out;
}

MeshSystem build_mesh(const DiscreteParallelModel& dpm) {
  const std::size_t width = dpm.depth + 1;
  const std::size_t vars = dpm.variable_count();
  const auto r = static_cast<std::size_t>(dpm.inputs());

  MeshSystem mesh;
  mesh.depth = dpm.depth;
  mesh.Ad = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vars),
                                  static_cast<Eigen::Index>(vars * width));
  mesh.Md = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vars),
                                  static_cast<Eigen::Index>(r * width));

  auto lag_label = [](const std::string& name, std::size_t l) {
    return l == 0 ? name + "[i]" : name + "[i-" + std::to_string(l) + "]";
  };
  for (std::size_t q = 0; q < r; ++q) {
    for (std::size_t l = 0; l < width; ++l) mesh.u_layout.push_back(lag_label("u" + std::to_string(q + 1), l));
  }

  mesh.y_layout.reserve(vars * width);
  std::size_t row = 0;
  for (const auto& ch : dpm.channels) {
    const std::size_t base = row;
    for (const auto& eq : ch.equations) {
      for (std::size_t l = 0; l < width; ++l) mesh.y_layout.push_back(lag_label(eq.label, l));
      const auto ri = static_cast<Eigen::Index>(row);
      for (std::size_t l = 0; l < width; ++l) {
        mesh.Ad(ri, static_cast<Eigen::Index>(row * width + l)) = -eq.output_coeffs[l];
        for (std::size_t q = 0; q < r; ++q) {
          mesh.Md(ri, static_cast<Eigen::Index>(q * width + l)) = eq.input_coeffs[l][q];
        }
      }
      for (const auto& c : eq.couplings) {
        for (std::size_t l = 0; l < width; ++l) {
          mesh.Ad(ri, static_cast<Eigen::Index>((base + c.variable) * width + l)) += c.coeffs[l];
        }
      }
      ++row;
    }
  }
  return mesh;
}

double mesh_residual(const MeshSystem& mesh, const std::vector<std::vector<double>>& variables,
                     const Eigen::MatrixXd& inputs) {
  const std::size_t width = mesh.depth + 1;
  const auto vars = static_cast<std::size_t>(mesh.Ad.rows());
  const auto r = static_cast<std::size_t>(inputs.rows());
  if (variables.size() != vars || static_cast<std::size_t>(mesh.Md.cols()) != r * width) {
    throw Error(ErrorKind::ShapeMismatch, "trajectory does not match the mesh layout");
  }
  const auto steps = static_cast<std::size_t>(inputs.cols());
  for (const auto& v : variables) {
    if (v.size() != steps) throw Error(ErrorKind::ShapeMismatch, "variable series length mismatch");
  }

  Eigen::VectorXd yd(static_cast<Eigen::Index>(vars * width));
  Eigen::VectorXd ud(static_cast<Eigen::Index>(r * width));
  double worst = 0.0;
  for (std::size_t i = 1; i < steps; ++i) {
    for (std::size_t l = 0; l < width; ++l) {
      const bool valid = i >= l;
      for (std::size_t v = 0; v < vars; ++v) {
        yd(static_cast<Eigen::Index>(v * width + l)) = valid ? variables[v][i - l] : 0.0;
      }
      for (std::size_t q = 0; q < r; ++q) {
        ud(static_cast<Eigen::Index>(q * width + l)) =
            valid ? inputs(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(i - l)) : 0.0;
      }
    }
    worst = std::max(worst, (mesh.Ad * yd + mesh.Md * ud).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace ltipar
