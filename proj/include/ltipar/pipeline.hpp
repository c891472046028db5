#pragma once

#include <optional>
#include <string>

#include "ltipar/discretizer.hpp"
#include "ltipar/documents.hpp"
#include "ltipar/model.hpp"

namespace ltipar {

/// Runs transfer function, root finding, classification, partial fractions
/// and channel realization, plus discretization and mesh assembly when a rule
/// is given. Failures are rethrown with the name of the stage that failed.
PlanDocument build_plan(const StateSpaceModel& model, const std::string& name,
                        const std::optional<DerivativeRule>& rule = std::nullopt, double T = 0.0,
                        const SpectralTolerances& tolerances = {});

/// Largest coefficient difference between the recombined residues and the
/// plan's numerator, relative to the largest numerator coefficient.
double recombination_error(const PlanDocument& plan);

}  // namespace ltipar
