#include "ltipar/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ltipar/error.hpp"

namespace ltipar {

namespace {

// Parlett-Reinsch balancing with power-of-two scaling, so the similarity
// transform introduces no rounding.
void balance_companion(Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  constexpr double radix = 2.0;
  constexpr double radix2 = radix * radix;
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double col = m.col(i).lpNorm<1>() - std::abs(m(i, i));
      const double row = m.row(i).lpNorm<1>() - std::abs(m(i, i));
      if (col == 0.0 || row == 0.0) continue;
      double g = row / radix;
      double f = 1.0;
      const double s = col + row;
      double c = col;
      while (c < g) {
        f *= radix;
        c *= radix2;
      }
      g = row * radix;
      while (c > g) {
        f /= radix;
        c /= radix2;
      }
      if ((c + row) / f < 0.95 * s) {
        converged = false;
        m.row(i) /= f;
        m.col(i) *= f;
      }
    }
  }
}

// Newton steps that are kept only while they shrink |p(r)| and stay well
// inside the distance to the nearest other eigenvalue. Members of a split
// multiple root are left alone so their mean stays accurate.
ComplexValue polish(const Polynomial& p, const Polynomial& dp, ComplexValue r, double separation) {
  const bool real = r.imag() == 0.0;
  double best = std::abs(p(r));
  for (int it = 0; it < 4 && best > 0.0; ++it) {
    ComplexValue next;
    if (real) {
      const double d = dp(r.real());
      if (d == 0.0) break;
      next = r.real() - p(r.real()) / d;
    } else {
      const ComplexValue d = dp(r);
      if (d == ComplexValue(0.0)) break;
      next = r - p(r) / d;
    }
    if (!(std::abs(next - r) <= 0.01 * separation)) break;
    const double res = std::abs(p(next));
    if (!(res < best)) break;
    best = res;
    r = next;
  }
  return r;
}

double cluster_radius(const SpectralTolerances& cfg, std::size_t size, ComplexValue center) {
  double rel = cfg.cluster_tol;
  if (size > 1 && cfg.multiplicity_slack > 0.0) {
    const double eps = std::numeric_limits<double>::epsilon();
    rel = std::max(rel, cfg.multiplicity_slack * std::pow(eps, 1.0 / static_cast<double>(size)));
  }
  return rel * std::max(1.0, std::abs(center));
}

// Perturbation scale of a k-fold root at c of the monic polynomial with the
// given roots: (deg eps sum |a_j| |c|^j / prod_{others} |c - r|)^(1/k).
class RootConditioning {
 public:
  explicit RootConditioning(const std::vector<ComplexValue>& roots) : roots_(roots) {
    std::vector<ComplexValue> c{ComplexValue(1.0, 0.0)};
    for (const auto& r : roots) {
      c.push_back(ComplexValue(0.0, 0.0));
      for (std::size_t j = c.size() - 1; j > 0; --j) c[j] = c[j - 1] - r * c[j];
      c[0] = -r * c[0];
    }
    abs_coeffs_.reserve(c.size());
    for (const auto& v : c) abs_coeffs_.push_back(std::abs(v));
  }

  double radius(const SpectralTolerances& cfg, ComplexValue center,
                const std::vector<bool>& member) const {
    std::size_t k = 0;
    double others = 1.0;
    for (std::size_t i = 0; i < roots_.size(); ++i) {
      if (member[i]) {
        ++k;
      } else {
        others *= std::abs(center - roots_[i]);
      }
    }
    double r = cluster_radius(cfg, k, center);
    if (k < 2 || cfg.multiplicity_slack <= 0.0 || !(others > 0.0)) return r;
    const double mag = std::abs(center);
    double budget = 0.0;
    for (auto it = abs_coeffs_.rbegin(); it != abs_coeffs_.rend(); ++it) budget = budget * mag + *it;
    budget *= static_cast<double>(roots_.size()) * std::numeric_limits<double>::epsilon();
    return std::max(r, cfg.multiplicity_slack *
                           std::pow(budget / others, 1.0 / static_cast<double>(k)));
  }

 private:
  const std::vector<ComplexValue>& roots_;
  std::vector<double> abs_coeffs_;
};

struct Cluster {
  ComplexValue anchor;
  ComplexValue deviation_sum{0.0, 0.0};
  std::size_t count = 1;

  // Anchor plus mean deviation: identical members reproduce the anchor bitwise.
  ComplexValue center() const { return anchor + deviation_sum / static_cast<double>(count); }
  void add(ComplexValue v) {
    deviation_sum += v - anchor;
    ++count;
  }
};

bool by_re_im(const ComplexValue& a, const ComplexValue& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

std::size_t SpectrumClassification::degree() const noexcept {
  std::size_t d = zero_multiplicity;
  for (const auto& g : real_groups) d += g.multiplicity;
  for (const auto& g : complex_groups) d += 2 * g.multiplicity;
  return d;
}

std::vector<ComplexValue> SpectrumClassification::roots() const {
  std::vector<ComplexValue> out(zero_multiplicity, ComplexValue(0.0, 0.0));
  for (const auto& g : real_groups) out.insert(out.end(), g.multiplicity, ComplexValue(g.value, 0.0));
  for (const auto& g : complex_groups) {
    for (std::size_t k = 0; k < g.multiplicity; ++k) {
      out.emplace_back(g.re, g.im);
      out.emplace_back(g.re, -g.im);
    }
  }
  return out;
}

Polynomial SpectrumClassification::reconstruct() const {
  Polynomial p = Polynomial::monomial(zero_multiplicity);
  for (const auto& g : real_groups) p = p * Polynomial::linear_factor(g.value).pow(g.multiplicity);
  for (const auto& g : complex_groups) {
    p = p * Polynomial::quadratic_factor(g.re, g.im).pow(g.multiplicity);
  }
  return p;
}

std::vector<ComplexValue> find_roots(const Polynomial& p, const SpectralTolerances& cfg) {
  const std::size_t deg = p.degree();
  if (deg == 0) throw Error(ErrorKind::DegreeZero, "cannot find roots of a degree-zero polynomial");

  std::vector<ComplexValue> roots;
  roots.reserve(deg);

  std::size_t shift = 0;
  while (p.coeffs()[shift] == 0.0) ++shift;
  roots.insert(roots.end(), shift, ComplexValue(0.0, 0.0));

  const std::size_t d = deg - shift;
  if (d > 0) {
    const double lead = p.leading();
    std::vector<double> reduced(p.coeffs().begin() + static_cast<std::ptrdiff_t>(shift),
                                p.coeffs().end());
    const Polynomial q(reduced);
    const Polynomial dq = q.derivative();

    if (d == 1) {
      roots.emplace_back(-reduced[0] / lead, 0.0);
    } else {
      const auto n = static_cast<Eigen::Index>(d);
      Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
      for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        companion(i, n - 1) = -reduced[static_cast<std::size_t>(i)] / lead;
      }
      balance_companion(companion);

      Eigen::EigenSolver<Eigen::MatrixXd> solver;
      if (cfg.max_iterations > 0) solver.setMaxIterations(cfg.max_iterations);
      solver.compute(companion, false);
      if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NonConvergence,
                    "companion eigenvalue iteration did not converge (degree " +
                        std::to_string(d) + ")");
      }
      const auto& ev = solver.eigenvalues();
      for (Eigen::Index i = 0; i < n; ++i) {
        double separation = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
          if (j != i) separation = std::min(separation, std::abs(ev(j) - ev(i)));
        }
        roots.push_back(polish(q, dq, ev(i), separation));
      }
    }
  }

  const double scale = p.max_abs_coeff();
  for (const auto& r : roots) {
    const double bound =
        1e-6 * scale * std::pow(std::max(1.0, std::abs(r)), static_cast<double>(deg));
    if (!(std::abs(p(r)) <= bound)) {
      throw Error(ErrorKind::NonConvergence, "root residual above bound after iteration");
    }
  }
  return roots;
}

SpectrumClassification classify_spectrum(const std::vector<ComplexValue>& roots,
                                         const SpectralTolerances& cfg) {
  std::vector<ComplexValue> sorted = roots;
  std::sort(sorted.begin(), sorted.end(), by_re_im);

  // Seeded in (re, im) order, each cluster is the largest set of nearest free
  // roots that fits the perturbation radius of a root of that multiplicity.
  const RootConditioning conditioning(sorted);
  std::vector<Cluster> clusters;
  std::vector<bool> taken(sorted.size(), false);
  for (std::size_t s = 0; s < sorted.size(); ++s) {
    if (taken[s]) continue;
    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t j = s; j < sorted.size(); ++j) {
      if (!taken[j]) near.emplace_back(std::abs(sorted[j] - sorted[s]), j);
    }
    std::stable_sort(near.begin(), near.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::size_t size = 1;
    std::vector<bool> member(sorted.size(), false);
    for (std::size_t k = near.size(); k >= 2; --k) {
      Cluster c{sorted[s]};
      for (std::size_t i = 1; i < k; ++i) c.add(sorted[near[i].second]);
      const ComplexValue center = c.center();
      std::fill(member.begin(), member.end(), false);
      for (std::size_t i = 0; i < k; ++i) member[near[i].second] = true;
      const double radius = conditioning.radius(cfg, center, member);
      bool fits = true;
      for (std::size_t i = 0; i < k && fits; ++i) {
        fits = std::abs(sorted[near[i].second] - center) <= radius;
      }
      if (fits) {
        size = k;
        break;
      }
    }
    Cluster c{sorted[s]};
    taken[s] = true;
    for (std::size_t i = 1; i < size; ++i) {
      c.add(sorted[near[i].second]);
      taken[near[i].second] = true;
    }
    clusters.push_back(c);
  }

  double max_mag = 0.0;
  for (const auto& c : clusters) max_mag = std::max(max_mag, std::abs(c.center()));
  const double zero_limit = cfg.zero_tol * (1.0 + max_mag);

  SpectrumClassification out;
  std::vector<Cluster> upper, lower;
  for (const auto& c : clusters) {
    const ComplexValue center = c.center();
    if (std::abs(center) <= zero_limit) {
      out.zero_multiplicity += c.count;
    } else if (std::abs(center.imag()) <= cfg.cluster_tol * std::max(1.0, std::abs(center))) {
      out.real_groups.push_back({center.real(), c.count});
    } else if (center.imag() > 0.0) {
      upper.push_back(c);
    } else {
      lower.push_back(c);
    }
  }

  std::vector<bool> used(lower.size(), false);
  for (const auto& u : upper) {
    const ComplexValue target = std::conj(u.center());
    std::size_t pick = lower.size();
    double pick_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < lower.size(); ++k) {
      if (used[k] || lower[k].count != u.count) continue;
      const double dist = std::abs(lower[k].center() - target);
      if (dist <= cluster_radius(cfg, u.count, target) && dist < pick_dist) {
        pick = k;
        pick_dist = dist;
      }
    }
    if (pick == lower.size()) {
      throw Error(ErrorKind::UnpairedComplexRoot,
                  "complex root " + std::to_string(u.center().real()) + "+" +
                      std::to_string(u.center().imag()) + "i has no conjugate partner");
    }
    used[pick] = true;
    const ComplexValue a = u.center();
    const ComplexValue b = lower[pick].center();
    out.complex_groups.push_back(
        {0.5 * (a.real() + b.real()), 0.5 * (a.imag() + std::abs(b.imag())), u.count});
  }
  for (std::size_t k = 0; k < lower.size(); ++k) {
    if (!used[k]) {
      throw Error(ErrorKind::UnpairedComplexRoot,
                  "complex root " + std::to_string(lower[k].center().real()) +
                      std::to_string(lower[k].center().imag()) + "i has no conjugate partner");
    }
  }

  std::sort(out.real_groups.begin(), out.real_groups.end(),
            [](const RealGroup& a, const RealGroup& b) { return a.value < b.value; });
  std::sort(out.complex_groups.begin(), out.complex_groups.end(),
            [](const ComplexGroup& a, const ComplexGroup& b) {
              if (a.re != b.re) return a.re < b.re;
              return a.im < b.im;
            });
  return out;
}

}  // namespace ltipar
