#pragma once

#include <Eigen/Dense>

#include <vector>

#include "ltipar/model.hpp"
#include "ltipar/spectral.hpp"

namespace ltipar {

/// Numerator c1*s + c0 over a power of the quadratic factor of a conjugate pair.
struct QuadraticResidue {
  double c1 = 0.0;
  double c0 = 0.0;
};

/// Partial fractions of one scalar rational entry. Powers are stored at
/// index power-1; group order follows the SpectrumClassification.
struct ScalarResidues {
  double feedthrough = 0.0;
  std::vector<double> integrator;
  std::vector<std::vector<double>> real;
  std::vector<std::vector<QuadraticResidue>> complex;
};

struct QuadraticResidueMatrix {
  Eigen::MatrixXd c1;
  Eigen::MatrixXd c0;
};

/// Matrix-valued partial fractions of an m x r transfer matrix.
struct ResidueSet {
  Eigen::MatrixXd feedthrough;
  std::vector<Eigen::MatrixXd> integrator;
  std::vector<std::vector<Eigen::MatrixXd>> real;
  std::vector<std::vector<QuadraticResidueMatrix>> complex;

  Eigen::Index rows() const noexcept { return feedthrough.rows(); }
  Eigen::Index cols() const noexcept { return feedthrough.cols(); }

  /// Zero-filled set shaped after the spectrum.
  static ResidueSet zeros(const SpectrumClassification& spectrum, Eigen::Index rows,
                          Eigen::Index cols);
  ScalarResidues entry(Eigen::Index i, Eigen::Index j) const;
  void set_entry(Eigen::Index i, Eigen::Index j, const ScalarResidues& e);
};

/// Decomposes num/den over the classified spectrum of den by matching the
/// coefficients of s^0..s^(n-1) after multiplying through by den.
///
/// Throws DegreeViolation if deg(num) > deg(den) or the spectrum does not
/// account for deg(den), and SingularSystem if the coefficient system is
/// numerically singular (usually a mis-classified spectrum).
ScalarResidues decompose_entry(const Polynomial& num, const Polynomial& den,
                               const SpectrumClassification& spectrum);

/// Cellwise decompose_entry; errors carry the (output, input) cell index.
ResidueSet decompose_matrix(const TransferMatrix& tf, const SpectrumClassification& spectrum);

/// Sums every term back over den; inverse of decompose_entry.
Polynomial recombine_entry(const ScalarResidues& residues, const SpectrumClassification& spectrum,
                           const Polynomial& den);
PolyMatrix recombine(const ResidueSet& residues, const SpectrumClassification& spectrum,
                     const Polynomial& den);

/// Polynomial den / factor^power built from the spectrum's factors, with
/// factor the group's (s - lambda), s, or quadratic factor.
enum class GroupKind { Integrator, Real, Complex };
Polynomial cofactor_polynomial(const SpectrumClassification& spectrum, GroupKind kind,
                               std::size_t group, std::size_t power);

}  // namespace ltipar
