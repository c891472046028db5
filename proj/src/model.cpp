#include "ltipar/model.hpp"

#include <cmath>
#include <string>

#include "ltipar/error.hpp"

namespace ltipar {

namespace {

std::string shape(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_finite(const Eigen::MatrixXd& m, const char* name) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::NonFinite, std::string("matrix ") + name + " has non-finite entries");
  }
}

void require_finite(const Polynomial& p, const char* what) {
  for (double c : p.coeffs()) {
    if (!std::isfinite(c)) {
      throw Error(ErrorKind::NonFinite, std::string(what) + " produced a non-finite coefficient");
    }
  }
}

}  // namespace

StateSpaceModel validate_model(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
                               Eigen::MatrixXd D) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch,
                "matrix A must be square and non-empty, got " + shape(A));
  }
  const auto n = A.rows();
  if (B.rows() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "matrix B must have " + std::to_string(n) + " rows, got " + shape(B));
  }
  if (B.cols() == 0) throw Error(ErrorKind::DimensionMismatch, "matrix B has no input columns");
  if (C.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "matrix C must have " + std::to_string(n) + " columns, got " + shape(C));
  }
  if (C.rows() == 0) throw Error(ErrorKind::DimensionMismatch, "matrix C has no output rows");
  if (D.rows() != C.rows() || D.cols() != B.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "matrix D must be " + std::to_string(C.rows()) +
                                                  "x" + std::to_string(B.cols()) + ", got " +
                                                  shape(D));
  }
  require_finite(A, "A");
  require_finite(B, "B");
  require_finite(C, "C");
  require_finite(D, "D");

  StateSpaceModel model;
  model.a_ = std::move(A);
  model.b_ = std::move(B);
  model.c_ = std::move(C);
  model.d_ = std::move(D);
  return model;
}

CharpolyAdjugate charpoly_and_adjugate(const StateSpaceModel& model) {
  return charpoly_and_adjugate(model.A());
}

// M_1 = E, c_{n-1} = -tr(A M_1); M_k = A M_{k-1} + c_{n-k+1} E, c_{n-k} = -tr(A M_k)/k.
// adj(sE - A) = sum_k M_k s^(n-k).
CharpolyAdjugate charpoly_and_adjugate(const Eigen::MatrixXd& A) {
  const auto n = static_cast<std::size_t>(A.rows());
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  std::vector<Eigen::MatrixXd> terms;
  terms.reserve(n);

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(A.rows(), A.cols());
  for (std::size_t k = 1; k <= n; ++k) {
    M = A * M;
    M.diagonal().array() += c[n - k + 1];
    terms.push_back(M);
    c[n - k] = -(A * M).trace() / static_cast<double>(k);
  }

  CharpolyAdjugate out;
  out.charpoly = Polynomial(c);
  require_finite(out.charpoly, "characteristic polynomial");

  out.adjugate = PolyMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> entry(n, 0.0);
      for (std::size_t k = 1; k <= n; ++k) {
        entry[n - k] = terms[k - 1](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
      out.adjugate(i, j) = Polynomial(std::move(entry));
      require_finite(out.adjugate(i, j), "adjugate");
    }
  }
  return out;
}

TransferMatrix transfer_matrix(const StateSpaceModel& model) {
  const auto [den, adj] = charpoly_and_adjugate(model);
  const auto n = static_cast<std::size_t>(model.states());
  const auto m = static_cast<std::size_t>(model.outputs());
  const auto r = static_cast<std::size_t>(model.inputs());
  const auto& B = model.B();
  const auto& C = model.C();
  const auto& D = model.D();

  // adj(sE - A) B first (n x r), then C times that.
  PolyMatrix adj_b(n, r);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < r; ++j) {
      Polynomial acc;
      for (std::size_t l = 0; l < n; ++l) {
        const double b = B(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j));
        if (b != 0.0) acc += adj(k, l).scaled(b);
      }
      adj_b(k, j) = std::move(acc);
    }
  }

  TransferMatrix tf;
  tf.denominator = den;
  tf.numerator = PolyMatrix(m, r);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      Polynomial acc;
      for (std::size_t k = 0; k < n; ++k) {
        const double c = C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        if (c != 0.0) acc += adj_b(k, j).scaled(c);
      }
      const double d = D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (d != 0.0) acc += den.scaled(d);
      require_finite(acc, "transfer numerator");
      tf.numerator(i, j) = acc.trimmed();
    }
  }
  return tf;
}

}  // namespace ltipar
