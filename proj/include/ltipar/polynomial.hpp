#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace ltipar {

/// Real polynomial with coefficients stored in ascending degree order.
///
/// `coeffs()[k]` holds the coefficient of s^k. The zero polynomial is stored
/// as a single zero coefficient, so `coeffs()` is never empty.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  Polynomial(std::initializer_list<double> ascending);
  explicit Polynomial(std::vector<double> ascending);

  static Polynomial constant(double c) { return Polynomial({c}); }
  static Polynomial monomial(std::size_t degree, double c = 1.0);
  /// (s - root)
  static Polynomial linear_factor(double root);
  /// s^2 - 2*re*s + (re^2 + im^2), the real factor of a conjugate pair.
  static Polynomial quadratic_factor(double re, double im);

  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  double operator[](std::size_t k) const noexcept {
    return k < coeffs_.size() ? coeffs_[k] : 0.0;
  }

  /// Index of the highest nonzero coefficient; 0 for constants and zero.
  std::size_t degree() const noexcept;
  bool is_zero() const noexcept;
  double leading() const noexcept { return coeffs_[degree()]; }
  double max_abs_coeff() const noexcept;

  double operator()(double s) const noexcept;
  std::complex<double> operator()(std::complex<double> s) const noexcept;

  Polynomial derivative() const;
  Polynomial scaled(double factor) const;
  /// Divides by the leading coefficient. Zero polynomial is returned as is.
  Polynomial monic() const;
  /// Drops trailing coefficients with |c| <= rel_tol * max|c|.
  Polynomial trimmed(double rel_tol = 1e-12) const;
  /// Keeps only coefficients of degree < count.
  Polynomial truncated(std::size_t count) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double c, const Polynomial& p) { return p.scaled(c); }

  Polynomial pow(std::size_t exponent) const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.coeffs_ == b.coeffs_;
  }

 private:
  void normalize_storage();

  std::vector<double> coeffs_;
};

/// Largest |a_k - b_k| divided by max(max|a_k|, max|b_k|); 0 when both are zero.
double relative_coeff_error(const Polynomial& a, const Polynomial& b);

/// Rectangular matrix of polynomials, row-major.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Polynomial& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Polynomial& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  std::size_t max_degree() const noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Polynomial> entries_;
};

}  // namespace ltipar
