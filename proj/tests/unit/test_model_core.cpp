#include <random>

#include "doctest.h"
#include "ltipar/error.hpp"
#include "ltipar/fixtures.hpp"
#include "ltipar/model.hpp"
#include "oracles.hpp"

using namespace ltipar;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an ltipar::Error");
  return ErrorKind::Parse;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = d(rng);
  }
  return m;
}

}  // namespace

TEST_CASE("polynomial storage and arithmetic") {
  CHECK(Polynomial().coeffs() == std::vector<double>{0.0});
  CHECK(Polynomial({1.0, 2.0, 0.0, 0.0}).degree() == 1);
  CHECK(Polynomial({0.0, 0.0}).is_zero());
  const Polynomial p{1.0, 1.0};
  CHECK((p * p) == Polynomial({1.0, 2.0, 1.0}));
  CHECK(p.pow(3) == Polynomial({1.0, 3.0, 3.0, 1.0}));
  CHECK(p.pow(0) == Polynomial({1.0}));
  CHECK((p - p).is_zero());
  CHECK(Polynomial({3.0, 2.0, 1.0}).derivative() == Polynomial({2.0, 2.0}));
  CHECK(Polynomial::quadratic_factor(-62.5, 48.0) ==
        Polynomial({62.5 * 62.5 + 48.0 * 48.0, 125.0, 1.0}));
  CHECK(Polynomial({1.0, 1e-14, 2.0, 1e-15}).trimmed().degree() == 2);
  CHECK(Polynomial({2.0, 4.0}).monic() == Polynomial({0.5, 1.0}));
  CHECK(Polynomial({1.0, 2.0, 3.0})(2.0) == doctest::Approx(17.0));
}

TEST_CASE("validate_model accepts consistent models") {
  SUBCASE("DC drive with the reference parameters") {
    const StateSpaceModel m = dc_drive_model();
    CHECK(m.states() == 4);
    CHECK(m.inputs() == 1);
    CHECK(m.outputs() == 1);
    CHECK(m.A()(1, 2) == 50.0);
    CHECK(m.A()(2, 1) == -125.0);
    CHECK(m.A()(2, 2) == -125.0);
    CHECK(m.A()(2, 3) == 125.0);
    CHECK(m.A()(3, 3) == -1000.0);
    CHECK(m.B()(3, 0) == 1000.0);
  }
  SUBCASE("minimal integrator") {
    const auto m = validate_model(mat({{0}}), mat({{1}}), mat({{1}}), mat({{0}}));
    CHECK(m.states() == 1);
  }
}

TEST_CASE("validate_model rejects inconsistent or non-finite input") {
  auto msg_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(kind_of([] {
          validate_model(Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(2, 1),
                         Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Zero(1, 1));
        }) == ErrorKind::DimensionMismatch);
  const std::string msg = msg_of([] {
    validate_model(Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(2, 1),
                   Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Zero(1, 1));
  });
  CHECK(msg.find("A") != std::string::npos);
  CHECK(kind_of([] {
          validate_model(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 1),
                         Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Zero(1, 1));
        }) == ErrorKind::DimensionMismatch);
  CHECK(msg_of([] {
          validate_model(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 1),
                         Eigen::MatrixXd::Zero(1, 3), Eigen::MatrixXd::Zero(1, 1));
        }).find("C") != std::string::npos);
  CHECK(msg_of([] {
          validate_model(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 1),
                         Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Zero(2, 1));
        }).find("D") != std::string::npos);
  CHECK(kind_of([] {
          validate_model(mat({{std::nan("")}}), mat({{1}}), mat({{1}}), mat({{0}}));
        }) == ErrorKind::NonFinite);
  CHECK(kind_of([] {
          validate_model(mat({{0}}), mat({{INFINITY}}), mat({{1}}), mat({{0}}));
        }) == ErrorKind::NonFinite);
}

TEST_CASE("charpoly_and_adjugate examples") {
  SUBCASE("DC drive denominator") {
    const auto ca = charpoly_and_adjugate(dc_drive_model());
    // s^4 + 1125 s^3 + 131250 s^2 + 6.25e6 s, expanded by hand from the
    // parameter values: -(a33 + a44) = 1125, a33 a44 - a23 a32 = 125000 + 6250,
    // a44 a32 a23 = 6.25e6.
    const std::vector<double> expected{0.0, 6.25e6, 131250.0, 1125.0, 1.0};
    REQUIRE(ca.charpoly.coeffs().size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
      CHECK(ca.charpoly[k] == doctest::Approx(expected[k]).epsilon(1e-12));
    }
  }
  SUBCASE("1x1 zero matrix") {
    const auto ca = charpoly_and_adjugate(mat({{0}}));
    CHECK(ca.charpoly == Polynomial({0.0, 1.0}));
    CHECK(ca.adjugate(0, 0) == Polynomial({1.0}));
  }
  SUBCASE("2x2 identity") {
    const auto ca = charpoly_and_adjugate(Eigen::MatrixXd::Identity(2, 2));
    CHECK(ca.charpoly == Polynomial({1.0, -2.0, 1.0}));
    CHECK(ca.adjugate(0, 0) == Polynomial({-1.0, 1.0}));
    CHECK(ca.adjugate(1, 1) == Polynomial({-1.0, 1.0}));
    CHECK(ca.adjugate(0, 1).is_zero());
    CHECK(ca.adjugate(1, 0).is_zero());
  }
}

TEST_CASE("charpoly and adjugate agree with the permutation expansion") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 6;
    const Eigen::MatrixXd A = random_matrix(rng, n, n);
    const auto ca = charpoly_and_adjugate(A);
    const auto sa = oracle::s_minus_a(A);
    CHECK(relative_coeff_error(ca.charpoly, oracle::leibniz_det(sa)) <= 1e-10);
    const auto adj = oracle::leibniz_adjugate(sa);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double scale = std::max(1.0, ca.charpoly.max_abs_coeff());
        const auto& a = ca.adjugate(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        const auto& b = adj(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        double worst = 0.0;
        for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
          worst = std::max(worst, std::abs(a[k] - b[k]));
        }
        CHECK(worst <= 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("product identity (sE - A) adj(sE - A) = det(sE - A) E") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 6;
    const Eigen::MatrixXd A = random_matrix(rng, n, n);
    const auto ca = charpoly_and_adjugate(A);
    const auto sa = oracle::s_minus_a(A);
    const double scale = ca.charpoly.max_abs_coeff();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Polynomial acc;
        for (int k = 0; k < n; ++k) {
          acc = acc + sa(static_cast<std::size_t>(i), static_cast<std::size_t>(k)) *
                          ca.adjugate(static_cast<std::size_t>(k), static_cast<std::size_t>(j));
        }
        if (i == j) acc = acc - ca.charpoly;
        CHECK(acc.max_abs_coeff() <= 1e-9 * scale);
      }
    }
  }
}

TEST_CASE("transfer_matrix examples") {
  SUBCASE("DC drive") {
    const auto tf = transfer_matrix(dc_drive_model());
    REQUIRE(tf.numerator.rows() == 1);
    REQUIRE(tf.numerator.cols() == 1);
    // a12 a23 a34 b4 = 1 * 50 * 125 * 1000
    CHECK(tf.numerator(0, 0).degree() == 0);
    CHECK(tf.numerator(0, 0)[0] == doctest::Approx(6.25e6).epsilon(1e-12));
    CHECK(tf.denominator.degree() == 4);
  }
  SUBCASE("first-order lag") {
    const auto tf = transfer_matrix(validate_model(mat({{-1}}), mat({{1}}), mat({{1}}), mat({{0}})));
    CHECK(tf.numerator(0, 0) == Polynomial({1.0}));
    CHECK(tf.denominator == Polynomial({1.0, 1.0}));
  }
  SUBCASE("feedthrough makes numerator and denominator degrees equal") {
    const auto tf = transfer_matrix(validate_model(mat({{-1}}), mat({{1}}), mat({{1}}), mat({{1}})));
    CHECK(tf.numerator(0, 0) == Polynomial({2.0, 1.0}));
    CHECK(tf.denominator == Polynomial({1.0, 1.0}));
  }
  SUBCASE("MIMO shape") {
    const auto tf = transfer_matrix(validate_model(mat({{-1, 0}, {0, -2}}), mat({{1, 0, 1}, {0, 1, 1}}),
                                                   mat({{1, 1}, {1, 0}}), Eigen::MatrixXd::Zero(2, 3)));
    CHECK(tf.numerator.rows() == 2);
    CHECK(tf.numerator.cols() == 3);
    CHECK(tf.numerator(1, 1).is_zero());
    CHECK(tf.numerator(0, 2) == Polynomial({3.0, 2.0}));
  }
}

TEST_CASE("models with D = 0 give strictly proper entries") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 7;
    const int m = 1 + trial % 3;
    const int r = 1 + (trial / 3) % 3;
    const auto model = validate_model(random_matrix(rng, n, n), random_matrix(rng, n, r),
                                      random_matrix(rng, m, n), Eigen::MatrixXd::Zero(m, r));
    const auto tf = transfer_matrix(model);
    CHECK(tf.denominator.degree() == static_cast<std::size_t>(n));
    CHECK(tf.denominator.leading() == 1.0);
    for (std::size_t i = 0; i < tf.numerator.rows(); ++i) {
      for (std::size_t j = 0; j < tf.numerator.cols(); ++j) {
        CHECK(tf.numerator(i, j).degree() < static_cast<std::size_t>(n));
      }
    }
  }
}

TEST_CASE("numerator equals C adj B + det D against the oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 5;
    const auto model = validate_model(random_matrix(rng, n, n), random_matrix(rng, n, 2),
                                      random_matrix(rng, 2, n), random_matrix(rng, 2, 2));
    const auto tf = transfer_matrix(model);
    const auto sa = oracle::s_minus_a(model.A());
    const auto det = oracle::leibniz_det(sa);
    const auto adj = oracle::leibniz_adjugate(sa);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        Polynomial expect = det.scaled(model.D()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        for (std::size_t a = 0; a < static_cast<std::size_t>(n); ++a) {
          for (std::size_t b = 0; b < static_cast<std::size_t>(n); ++b) {
            expect = expect + adj(a, b).scaled(model.C()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) *
                                               model.B()(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j)));
          }
        }
        CHECK(relative_coeff_error(tf.numerator(i, j), expect) <= 1e-9);
      }
    }
  }
}
