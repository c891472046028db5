#pragma once

#include <cstddef>

#include "ltipar/model.hpp"
#include "ltipar/parallelizer.hpp"

namespace ltipar {

/// Physical parameters of a separately excited DC drive with a first-order
/// power converter, in relative units.
struct DcDriveParams {
  double J = 0.02;    // rotor inertia
  double R = 1.0;     // armature resistance
  double c = 1.0;     // back-emf constant
  double L = 0.008;   // armature inductance
  double Tc = 1e-3;   // converter time constant
};

/// States (position, speed, current, converter voltage), one input, position output:
///   a12 = 1, a23 = 1/Tm, a32 = a33 = -1/Te, a34 = 1/Te, a44 = -1/Tc, b4 = -a44
/// with Tm = J R / c^2 and Te = L / R.
StateSpaceModel dc_drive_model(const DcDriveParams& params = {});

/// `count` independent lightly damped second-order channels sharing one
/// input and one output; built directly as channels since a characteristic
/// polynomial of that degree is not numerically meaningful.
ParallelModel widened_fixture(std::size_t count);

}  // namespace ltipar
