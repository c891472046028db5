#include "ltipar/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace ltipar {

Polynomial::Polynomial(std::initializer_list<double> ascending) : coeffs_(ascending) {
  normalize_storage();
}

Polynomial::Polynomial(std::vector<double> ascending) : coeffs_(std::move(ascending)) {
  normalize_storage();
}

void Polynomial::normalize_storage() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

Polynomial Polynomial::monomial(std::size_t degree, double c) {
  std::vector<double> v(degree + 1, 0.0);
  v[degree] = c;
  return Polynomial(std::move(v));
}

Polynomial Polynomial::linear_factor(double root) { return Polynomial({-root, 1.0}); }

Polynomial Polynomial::quadratic_factor(double re, double im) {
  return Polynomial({re * re + im * im, -2.0 * re, 1.0});
}

std::size_t Polynomial::degree() const noexcept { return coeffs_.size() - 1; }

bool Polynomial::is_zero() const noexcept { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

double Polynomial::max_abs_coeff() const noexcept {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double Polynomial::operator()(double s) const noexcept {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

std::complex<double> Polynomial::operator()(std::complex<double> s) const noexcept {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() == 1) return Polynomial();
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::scaled(double factor) const {
  std::vector<double> v = coeffs_;
  for (double& c : v) c *= factor;
  return Polynomial(std::move(v));
}

Polynomial Polynomial::monic() const {
  if (is_zero()) return *this;
  return scaled(1.0 / leading());
}

Polynomial Polynomial::trimmed(double rel_tol) const {
  const double limit = rel_tol * max_abs_coeff();
  std::vector<double> v = coeffs_;
  while (v.size() > 1 && std::abs(v.back()) <= limit) v.pop_back();
  if (v.size() == 1 && std::abs(v[0]) <= limit) v[0] = 0.0;
  return Polynomial(std::move(v));
}

Polynomial Polynomial::truncated(std::size_t count) const {
  if (count == 0) return Polynomial();
  std::vector<double> v(coeffs_.begin(),
                        coeffs_.begin() + static_cast<std::ptrdiff_t>(std::min(count, coeffs_.size())));
  return Polynomial(std::move(v));
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  normalize_storage();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  normalize_storage();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  std::vector<double> v(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return Polynomial(std::move(v));
}

Polynomial Polynomial::pow(std::size_t exponent) const {
  Polynomial result = Polynomial::constant(1.0);
  for (std::size_t k = 0; k < exponent; ++k) result = result * *this;
  return result;
}

double relative_coeff_error(const Polynomial& a, const Polynomial& b) {
  const std::size_t len = std::max(a.coeffs().size(), b.coeffs().size());
  const double scale = std::max(a.max_abs_coeff(), b.max_abs_coeff());
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < len; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst / scale;
}

std::size_t PolyMatrix::max_degree() const noexcept {
  std::size_t d = 0;
  for (const auto& p : entries_) d = std::max(d, p.degree());
  return d;
}

}  // namespace ltipar
