#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ltipar/polynomial.hpp"

namespace ltipar {

using ComplexValue = std::complex<double>;

struct SpectralTolerances {
  /// |lambda| <= zero_tol * (1 + max group magnitude) counts as a zero root.
  double zero_tol = 1e-9;
  /// |a - b| <= cluster_tol * max(1, |a|) merges two roots.
  double cluster_tol = 1e-8;
  /// A cluster of k roots also merges within multiplicity_slack times the
  /// perturbation size of a k-fold root: the larger of eps^(1/k) relative and
  /// (n eps sum|a_j||c|^j / prod over the other roots |c - r|)^(1/k). 0 disables.
  double multiplicity_slack = 4.0;
  int max_iterations = 0;  // 0: library default
};

struct RealGroup {
  double value;
  std::size_t multiplicity;
};

struct ComplexGroup {
  double re;
  double im;  // > 0; the conjugate is implicit
  std::size_t multiplicity;
};

struct SpectrumClassification {
  std::size_t zero_multiplicity = 0;
  std::vector<RealGroup> real_groups;        // ascending by value
  std::vector<ComplexGroup> complex_groups;  // ascending by (re, im)

  /// k0 + sum of real multiplicities + 2 * sum of complex multiplicities.
  std::size_t degree() const noexcept;
  /// All roots implied by the groups, conjugates included, with repetition.
  std::vector<ComplexValue> roots() const;
  /// lambda^k0 * prod (lambda - l_i)^m_i * prod ((lambda - re)^2 + im^2)^m_j
  Polynomial reconstruct() const;

  friend bool operator==(const SpectrumClassification&, const SpectrumClassification&) = default;
};

inline bool operator==(const RealGroup& a, const RealGroup& b) {
  return a.value == b.value && a.multiplicity == b.multiplicity;
}
inline bool operator==(const ComplexGroup& a, const ComplexGroup& b) {
  return a.re == b.re && a.im == b.im && a.multiplicity == b.multiplicity;
}

/// All deg(p) roots with repetition, via eigenvalues of the balanced companion
/// matrix. Exactly-zero low-order coefficients are deflated as exact zero roots.
std::vector<ComplexValue> find_roots(const Polynomial& p, const SpectralTolerances& cfg = {});

/// Clusters roots and sorts them into zero / real / conjugate-pair groups.
SpectrumClassification classify_spectrum(const std::vector<ComplexValue>& roots,
                                         const SpectralTolerances& cfg = {});

}  // namespace ltipar
