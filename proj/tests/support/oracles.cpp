#include "oracles.hpp"

#include <algorithm>
#include <numeric>

namespace oracle {

Polynomial leibniz_det(const PolyMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return Polynomial::constant(1.0);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Polynomial det;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j] ? 1 : 0;
    }
    Polynomial term = Polynomial::constant(inversions % 2 == 0 ? 1.0 : -1.0);
    for (std::size_t i = 0; i < n; ++i) term = term * m(i, perm[i]);
    det = det + term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

PolyMatrix leibniz_adjugate(const PolyMatrix& m) {
  const std::size_t n = m.rows();
  PolyMatrix adj(n, n);
  if (n == 1) {
    adj(0, 0) = Polynomial::constant(1.0);
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      PolyMatrix minor(n - 1, n - 1);
      for (std::size_t r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (std::size_t c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(rr, cc++) = m(r, c);
        }
        ++rr;
      }
      const double sign = (i + j) % 2 == 0 ? 1.0 : -1.0;
      adj(j, i) = leibniz_det(minor).scaled(sign);
    }
  }
  return adj;
}

PolyMatrix s_minus_a(const Eigen::MatrixXd& A) {
  const auto n = static_cast<std::size_t>(A.rows());
  PolyMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      m(i, j) = i == j ? Polynomial({-a, 1.0}) : Polynomial({-a});
    }
  }
  return m;
}

Complex simple_residue(const Polynomial& num, const Polynomial& den, Complex pole) {
  return num(pole) / den.derivative()(pole);
}

std::pair<double, double> quadratic_from_residue(Complex K, Complex pole) {
  return {2.0 * K.real(), -2.0 * (K * std::conj(pole)).real()};
}

RandomSystem random_stable_siso(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> real_pole(-50.0, -0.5);
  std::uniform_real_distribution<double> pair_re(-30.0, -0.5);
  std::uniform_real_distribution<double> pair_im(1.0, 40.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto far_from_all = [](const std::vector<Complex>& poles, Complex p) {
    for (const auto& q : poles) {
      if (std::abs(p - q) < 0.25) return false;
    }
    return true;
  };

  std::vector<Complex> poles;
  Eigen::MatrixXd modal = Eigen::MatrixXd::Zero(n, n);
  int k = 0;
  while (k < n) {
    if (n - k >= 2 && coin(rng) < 0.5) {
      const Complex p(pair_re(rng), pair_im(rng));
      if (!far_from_all(poles, p)) continue;
      modal(k, k) = p.real();
      modal(k, k + 1) = p.imag();
      modal(k + 1, k) = -p.imag();
      modal(k + 1, k + 1) = p.real();
      poles.push_back(p);
      poles.push_back(std::conj(p));
      k += 2;
    } else {
      const Complex p(real_pole(rng), 0.0);
      if (!far_from_all(poles, p)) continue;
      modal(k, k) = p.real();
      poles.push_back(p);
      k += 1;
    }
  }

  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = gauss(rng);
  }
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  Eigen::VectorXd scale(n);
  for (int i = 0; i < n; ++i) scale(i) = 0.5 + 1.5 * coin(rng);
  const Eigen::MatrixXd S = q * scale.asDiagonal();
  const Eigen::MatrixXd A = S * modal * S.inverse();

  Eigen::MatrixXd B(n, 1), C(1, n);
  for (int i = 0; i < n; ++i) {
    B(i, 0) = gauss(rng);
    C(0, i) = gauss(rng);
  }
  return RandomSystem{ltipar::validate_model(A, B, C, Eigen::MatrixXd::Zero(1, 1)), poles};
}

std::pair<Polynomial, Polynomial> substitute_rule(const Polynomial& num, const Polynomial& den,
                                                  const ltipar::DerivativeRule& rule, double T) {
  const Polynomial N(rule.numerator);
  const Polynomial TD = Polynomial(rule.denominator).scaled(T);
  const std::size_t d = den.degree();
  auto substitute = [&](const Polynomial& p) {
    Polynomial out;
    for (std::size_t k = 0; k <= p.degree(); ++k) {
      out = out + (N.pow(k) * TD.pow(d - k)).scaled(p[k]);
    }
    return out;
  };
  return {substitute(num), substitute(den)};
}

std::pair<Polynomial, Polynomial> equations_transfer(const ltipar::DiscreteChannel& channel,
                                                     std::size_t inputs, std::size_t row,
                                                     std::size_t col) {
  const std::size_t q = channel.equations.size();
  PolyMatrix P(q, q);
  PolyMatrix Q(q, inputs);
  for (std::size_t v = 0; v < q; ++v) {
    const auto& eq = channel.equations[v];
    P(v, v) = Polynomial(eq.output_coeffs);
    for (const auto& c : eq.couplings) P(v, c.variable) = P(v, c.variable) - Polynomial(c.coeffs);
    for (std::size_t j = 0; j < inputs; ++j) {
      std::vector<double> m;
      for (const auto& lag : eq.input_coeffs) m.push_back(lag[j]);
      Q(v, j) = Polynomial(m);
    }
  }
  const PolyMatrix adj = leibniz_adjugate(P);
  Polynomial num;
  for (std::size_t a = 0; a < q; ++a) {
    const double c = channel.output_map(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(a));
    if (c == 0.0) continue;
    for (std::size_t b = 0; b < q; ++b) num = num + (adj(a, b) * Q(b, col)).scaled(c);
  }
  return {num, leibniz_det(P)};
}

double max_rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace oracle
