#include "ltipar/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ltipar/error.hpp"

namespace ltipar {

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

}  // namespace

PlanDocument build_plan(const StateSpaceModel& model, const std::string& name,
                        const std::optional<DerivativeRule>& rule, double T,
                        const SpectralTolerances& tolerances) {
  PlanDocument plan;
  plan.name = name;
  plan.model = model;
  plan.transfer = stage("transfer function", [&] { return transfer_matrix(model); });
  const auto roots =
      stage("root finding", [&] { return find_roots(plan.transfer.denominator, tolerances); });
  plan.spectrum =
      stage("spectrum classification", [&] { return classify_spectrum(roots, tolerances); });
  plan.residues = stage("partial fraction decomposition",
                        [&] { return decompose_matrix(plan.transfer, plan.spectrum); });
  plan.parallel =
      stage("channel realization", [&] { return realize_channels(plan.residues, plan.spectrum); });
  if (rule) {
    plan.rule = *rule;
    plan.T = T;
    plan.mesh = stage("discretization", [&] { return build_mesh(discretize(plan.parallel, *rule, T)); });
  }
  return plan;
}

double recombination_error(const PlanDocument& plan) {
  const PolyMatrix back = recombine(plan.residues, plan.spectrum, plan.transfer.denominator);
  const PolyMatrix& num = plan.transfer.numerator;
  double scale = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < num.rows(); ++i) {
    for (std::size_t j = 0; j < num.cols(); ++j) {
      scale = std::max({scale, num(i, j).max_abs_coeff(), back(i, j).max_abs_coeff()});
      const std::size_t len = std::max(num(i, j).coeffs().size(), back(i, j).coeffs().size());
      for (std::size_t k = 0; k < len; ++k) {
        worst = std::max(worst, std::abs(num(i, j)[k] - back(i, j)[k]));
      }
    }
  }
  return scale == 0.0 ? 0.0 : worst / scale;
}

}  // namespace ltipar
