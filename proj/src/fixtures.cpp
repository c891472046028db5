#include "ltipar/fixtures.hpp"

#include "ltipar/error.hpp"
#include "ltipar/pfd.hpp"
#include "ltipar/spectral.hpp"

namespace ltipar {

StateSpaceModel dc_drive_model(const DcDriveParams& p) {
  if (!(p.J > 0 && p.R > 0 && p.c != 0 && p.L > 0 && p.Tc > 0)) {
    throw Error(ErrorKind::InvalidArgument,
                "dcDriveParams: J, R, L, Tc must be positive and c nonzero");
  }
  const double Tm = p.J * p.R / (p.c * p.c);
  const double Te = p.L / p.R;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
  A(0, 1) = 1.0;
  A(1, 2) = 1.0 / Tm;
  A(2, 1) = -1.0 / Te;
  A(2, 2) = -1.0 / Te;
  A(2, 3) = 1.0 / Te;
  A(3, 3) = -1.0 / p.Tc;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 1);
  B(3, 0) = -A(3, 3);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(1, 4);
  C(0, 0) = 1.0;
  return validate_model(A, B, C, Eigen::MatrixXd::Zero(1, 1));
}

ParallelModel widened_fixture(std::size_t count) {
  if (count == 0) throw Error(ErrorKind::InvalidArgument, "widened fixture needs channels");
  SpectrumClassification spectrum;
  for (std::size_t k = 0; k < count; ++k) {
    // Ascending re keeps the groups in classification order.
    const double re = -1.0 - static_cast<double>(count - k);
    const double im = 100.0 + 10.0 * static_cast<double>(k);
    spectrum.complex_groups.push_back({re, im, 1});
  }
  ResidueSet residues = ResidueSet::zeros(spectrum, 1, 1);
  for (std::size_t k = 0; k < count; ++k) {
    residues.complex[k][0].c1(0, 0) = 1.0;
    residues.complex[k][0].c0(0, 0) = static_cast<double>(k + 1);
  }
  return realize_channels(residues, spectrum);
}

}  // namespace ltipar
