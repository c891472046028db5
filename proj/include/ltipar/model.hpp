#pragma once

#include <Eigen/Dense>

#include "ltipar/polynomial.hpp"

namespace ltipar {

/// Continuous-time LTI model  x' = A x + B u,  y = C x + D u.
///
/// Dimensions: A is n x n, B is n x r, C is m x n, D is m x r. Instances are
/// only produced by validate_model, so a StateSpaceModel is always consistent.
class StateSpaceModel {
 public:
  const Eigen::MatrixXd& A() const noexcept { return a_; }
  const Eigen::MatrixXd& B() const noexcept { return b_; }
  const Eigen::MatrixXd& C() const noexcept { return c_; }
  const Eigen::MatrixXd& D() const noexcept { return d_; }

  Eigen::Index states() const noexcept { return a_.rows(); }
  Eigen::Index outputs() const noexcept { return c_.rows(); }
  Eigen::Index inputs() const noexcept { return b_.cols(); }

 private:
  friend StateSpaceModel validate_model(Eigen::MatrixXd, Eigen::MatrixXd, Eigen::MatrixXd,
                                        Eigen::MatrixXd);
  StateSpaceModel() = default;

  Eigen::MatrixXd a_, b_, c_, d_;
};

/// Checks dimensions and finiteness. Throws Error{DimensionMismatch} naming
/// the offending matrix, or Error{NonFinite}.
StateSpaceModel validate_model(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
                               Eigen::MatrixXd D);

struct CharpolyAdjugate {
  Polynomial charpoly;  // det(sE - A), monic, degree n
  PolyMatrix adjugate;  // adj(sE - A), n x n, entries of degree <= n-1
};

/// Faddeev-LeVerrier recursion; yields det(sE - A) and adj(sE - A) together.
CharpolyAdjugate charpoly_and_adjugate(const StateSpaceModel& model);
CharpolyAdjugate charpoly_and_adjugate(const Eigen::MatrixXd& A);

/// m x r rational matrix over a shared monic denominator.
struct TransferMatrix {
  PolyMatrix numerator;
  Polynomial denominator;
};

/// numerator = C adj(sE - A) B + det(sE - A) D, denominator = det(sE - A).
TransferMatrix transfer_matrix(const StateSpaceModel& model);

}  // namespace ltipar
