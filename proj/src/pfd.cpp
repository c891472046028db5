#include "ltipar/pfd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ltipar/error.hpp"

namespace ltipar {

namespace {

constexpr double kPruneRelative = 1e-12;

double power_of_two_scale(double magnitude) {
  if (magnitude == 0.0 || !std::isfinite(magnitude)) return 1.0;
  return std::ldexp(1.0, -std::ilogb(magnitude));
}

// One column per unknown: integrator powers, then real group powers, then
// (c1, c0) per complex group power. Factorized once, reused per entry.
class PartialFractionBasis {
 public:
  explicit PartialFractionBasis(const SpectrumClassification& spectrum) : spectrum_(spectrum) {
    n_ = spectrum.degree();
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Eigen::Index col = 0;
    auto put = [&](const Polynomial& p) {
      for (std::size_t k = 0; k < p.coeffs().size() && k < n_; ++k) {
        m(static_cast<Eigen::Index>(k), col) = p.coeffs()[k];
      }
      ++col;
    };
    for (std::size_t j = 1; j <= spectrum.zero_multiplicity; ++j) {
      put(cofactor_polynomial(spectrum, GroupKind::Integrator, 0, j));
    }
    for (std::size_t g = 0; g < spectrum.real_groups.size(); ++g) {
      for (std::size_t j = 1; j <= spectrum.real_groups[g].multiplicity; ++j) {
        put(cofactor_polynomial(spectrum, GroupKind::Real, g, j));
      }
    }
    const Polynomial s = Polynomial::monomial(1);
    for (std::size_t g = 0; g < spectrum.complex_groups.size(); ++g) {
      for (std::size_t j = 1; j <= spectrum.complex_groups[g].multiplicity; ++j) {
        const Polynomial base = cofactor_polynomial(spectrum, GroupKind::Complex, g, j);
        put(s * base);
        put(base);
      }
    }

    row_scale_ = Eigen::VectorXd::Ones(n);
    col_scale_ = Eigen::VectorXd::Ones(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      col_scale_(j) = power_of_two_scale(m.col(j).cwiseAbs().maxCoeff());
    }
    m = m * col_scale_.asDiagonal();
    for (Eigen::Index i = 0; i < n; ++i) {
      row_scale_(i) = power_of_two_scale(m.row(i).cwiseAbs().maxCoeff());
    }
    m = row_scale_.asDiagonal() * m;

    lu_.compute(m);
    if (n > 0 && !(lu_.rcond() > static_cast<double>(n) * std::numeric_limits<double>::epsilon())) {
      throw Error(ErrorKind::SingularSystem,
                  "partial fraction coefficient system is singular (rcond " +
                      std::to_string(lu_.rcond()) + "); spectrum likely mis-classified");
    }
  }

  std::size_t order() const noexcept { return n_; }

  ScalarResidues solve(const Polynomial& num, const Polynomial& den) const {
    if (den.degree() != n_) {
      throw Error(ErrorKind::DegreeViolation,
                  "spectrum accounts for degree " + std::to_string(n_) +
                      " but denominator has degree " + std::to_string(den.degree()));
    }
    if (!num.is_zero() && num.degree() > den.degree()) {
      throw Error(ErrorKind::DegreeViolation, "numerator degree " + std::to_string(num.degree()) +
                                                  " exceeds denominator degree " +
                                                  std::to_string(den.degree()));
    }
    ScalarResidues out;
    Polynomial remainder = num;
    if (!num.is_zero() && num.degree() == n_) {
      out.feedthrough = num.leading() / den.leading();
      remainder = (num - den.scaled(out.feedthrough)).truncated(n_);
    }

    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index k = 0; k < n; ++k) rhs(k) = remainder[static_cast<std::size_t>(k)];
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (n > 0) {
      x = col_scale_.asDiagonal() * lu_.solve(row_scale_.asDiagonal() * rhs);
    }
    if (!x.allFinite()) {
      throw Error(ErrorKind::SingularSystem, "partial fraction solve produced non-finite values");
    }
    const double largest = n > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(x(k)) <= kPruneRelative * largest) x(k) = 0.0;
    }

    Eigen::Index at = 0;
    out.integrator.resize(spectrum_.zero_multiplicity);
    for (auto& v : out.integrator) v = x(at++);
    out.real.resize(spectrum_.real_groups.size());
    for (std::size_t g = 0; g < out.real.size(); ++g) {
      out.real[g].resize(spectrum_.real_groups[g].multiplicity);
      for (auto& v : out.real[g]) v = x(at++);
    }
    out.complex.resize(spectrum_.complex_groups.size());
    for (std::size_t g = 0; g < out.complex.size(); ++g) {
      out.complex[g].resize(spectrum_.complex_groups[g].multiplicity);
      for (auto& q : out.complex[g]) {
        q.c1 = x(at++);
        q.c0 = x(at++);
      }
    }
    return out;
  }

 private:
  const SpectrumClassification& spectrum_;
  std::size_t n_ = 0;
  Eigen::VectorXd row_scale_;
  Eigen::VectorXd col_scale_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace

Polynomial cofactor_polynomial(const SpectrumClassification& spectrum, GroupKind kind,
                               std::size_t group, std::size_t power) {
  std::size_t zero_power = spectrum.zero_multiplicity;
  if (kind == GroupKind::Integrator) zero_power -= power;
  Polynomial p = Polynomial::monomial(zero_power);
  for (std::size_t g = 0; g < spectrum.real_groups.size(); ++g) {
    std::size_t mult = spectrum.real_groups[g].multiplicity;
    if (kind == GroupKind::Real && g == group) mult -= power;
    if (mult > 0) p = p * Polynomial::linear_factor(spectrum.real_groups[g].value).pow(mult);
  }
  for (std::size_t g = 0; g < spectrum.complex_groups.size(); ++g) {
    const auto& cg = spectrum.complex_groups[g];
    std::size_t mult = cg.multiplicity;
    if (kind == GroupKind::Complex && g == group) mult -= power;
    if (mult > 0) p = p * Polynomial::quadratic_factor(cg.re, cg.im).pow(mult);
  }
  return p;
}

ResidueSet ResidueSet::zeros(const SpectrumClassification& spectrum, Eigen::Index rows,
                             Eigen::Index cols) {
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(rows, cols);
  ResidueSet out;
  out.feedthrough = z;
  out.integrator.assign(spectrum.zero_multiplicity, z);
  for (const auto& g : spectrum.real_groups) out.real.emplace_back(g.multiplicity, z);
  for (const auto& g : spectrum.complex_groups) {
    out.complex.emplace_back(g.multiplicity, QuadraticResidueMatrix{z, z});
  }
  return out;
}

ScalarResidues ResidueSet::entry(Eigen::Index i, Eigen::Index j) const {
  ScalarResidues e;
  e.feedthrough = feedthrough(i, j);
  for (const auto& m : integrator) e.integrator.push_back(m(i, j));
  for (const auto& group : real) {
    auto& dst = e.real.emplace_back();
    for (const auto& m : group) dst.push_back(m(i, j));
  }
  for (const auto& group : complex) {
    auto& dst = e.complex.emplace_back();
    for (const auto& q : group) dst.push_back({q.c1(i, j), q.c0(i, j)});
  }
  return e;
}

void ResidueSet::set_entry(Eigen::Index i, Eigen::Index j, const ScalarResidues& e) {
  feedthrough(i, j) = e.feedthrough;
  for (std::size_t k = 0; k < integrator.size(); ++k) integrator[k](i, j) = e.integrator[k];
  for (std::size_t g = 0; g < real.size(); ++g) {
    for (std::size_t k = 0; k < real[g].size(); ++k) real[g][k](i, j) = e.real[g][k];
  }
  for (std::size_t g = 0; g < complex.size(); ++g) {
    for (std::size_t k = 0; k < complex[g].size(); ++k) {
      complex[g][k].c1(i, j) = e.complex[g][k].c1;
      complex[g][k].c0(i, j) = e.complex[g][k].c0;
    }
  }
}

ScalarResidues decompose_entry(const Polynomial& num, const Polynomial& den,
                               const SpectrumClassification& spectrum) {
  const Polynomial monic_den = den.monic();
  const Polynomial scaled_num = num.scaled(1.0 / den.leading());
  return PartialFractionBasis(spectrum).solve(scaled_num, monic_den);
}

ResidueSet decompose_matrix(const TransferMatrix& tf, const SpectrumClassification& spectrum) {
  const auto rows = static_cast<Eigen::Index>(tf.numerator.rows());
  const auto cols = static_cast<Eigen::Index>(tf.numerator.cols());
  const Polynomial den = tf.denominator.monic();
  const double inv_lead = 1.0 / tf.denominator.leading();
  const PartialFractionBasis basis(spectrum);

  ResidueSet out = ResidueSet::zeros(spectrum, rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto& num = tf.numerator(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      try {
        out.set_entry(i, j, basis.solve(num.scaled(inv_lead), den));
      } catch (const Error& e) {
        throw Error(e.kind(), "cell (" + std::to_string(i) + ", " + std::to_string(j) +
                                  "): " + e.what());
      }
    }
  }
  return out;
}

Polynomial recombine_entry(const ScalarResidues& residues, const SpectrumClassification& spectrum,
                           const Polynomial& den) {
  Polynomial acc = den.scaled(residues.feedthrough);
  for (std::size_t k = 0; k < residues.integrator.size(); ++k) {
    if (residues.integrator[k] != 0.0) {
      acc += cofactor_polynomial(spectrum, GroupKind::Integrator, 0, k + 1)
                 .scaled(residues.integrator[k]);
    }
  }
  for (std::size_t g = 0; g < residues.real.size(); ++g) {
    for (std::size_t k = 0; k < residues.real[g].size(); ++k) {
      if (residues.real[g][k] != 0.0) {
        acc += cofactor_polynomial(spectrum, GroupKind::Real, g, k + 1).scaled(residues.real[g][k]);
      }
    }
  }
  for (std::size_t g = 0; g < residues.complex.size(); ++g) {
    for (std::size_t k = 0; k < residues.complex[g].size(); ++k) {
      const auto& q = residues.complex[g][k];
      if (q.c1 == 0.0 && q.c0 == 0.0) continue;
      acc += Polynomial({q.c0, q.c1}) * cofactor_polynomial(spectrum, GroupKind::Complex, g, k + 1);
    }
  }
  return acc;
}

PolyMatrix recombine(const ResidueSet& residues, const SpectrumClassification& spectrum,
                     const Polynomial& den) {
  PolyMatrix out(static_cast<std::size_t>(residues.rows()),
                 static_cast<std::size_t>(residues.cols()));
  for (Eigen::Index i = 0; i < residues.rows(); ++i) {
    for (Eigen::Index j = 0; j < residues.cols(); ++j) {
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          recombine_entry(residues.entry(i, j), spectrum, den);
    }
  }
  return out;
}

}  // namespace ltipar
