#include "ltipar/parallelizer.hpp"

#include <Eigen/SVD>

#include <complex>
#include <string>

#include "ltipar/error.hpp"

namespace ltipar {

namespace {

// Residue stacks of rank-one terms carry noise near 1e-12; 1e-9 stays below
// the recombination tolerance.
constexpr double kRankRelative = 1e-9;

struct InputReduction {
  Eigen::MatrixXd input_map;  // lanes x r
  Eigen::MatrixXd taps;       // stacked rows x lanes
};

// Factors the stacked coefficient rows S (rows x r) as taps * input_map with
// as few lanes as the numerical rank allows. Single-input channels keep the
// residues verbatim.
InputReduction reduce_inputs(const Eigen::MatrixXd& stacked) {
  InputReduction out;
  if (stacked.cols() == 1) {
    out.input_map = Eigen::MatrixXd::Ones(1, 1);
    out.taps = stacked;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > kRankRelative * sigma(0)) ++rank;
  out.input_map = svd.matrixV().leftCols(rank).transpose();
  out.taps = svd.matrixU().leftCols(rank) * sigma.head(rank).asDiagonal();
  return out;
}

std::string state_label(const std::string& channel_label, std::size_t k, std::size_t order) {
  if (order == 1) return channel_label;
  if (order <= 9) return channel_label + std::to_string(k + 1);
  return channel_label + "_" + std::to_string(k + 1);
}

struct GroupTerms {
  GroupKind kind;
  std::size_t group;
  std::size_t multiplicity;
  double pole_re;
  double pole_im;
  // Per power: one matrix (first order) or c1 then c0 (quadratic).
  std::vector<std::vector<Eigen::MatrixXd>> powers;
};

void emit_channel(const GroupTerms& terms, std::size_t top, std::size_t lanes, Eigen::MatrixXd A,
                  Eigen::MatrixXd B, Eigen::MatrixXd C, ParallelModel& pm) {
  const std::size_t width = terms.kind == GroupKind::Complex ? 2 : 1;
  const auto order = static_cast<std::size_t>(A.rows());
  const Eigen::Index m = pm.outputs();
  const Eigen::Index r = pm.inputs();
  const std::size_t index = pm.channels.size();
  const std::string label = "y" + std::to_string(index + 1);
  std::vector<std::string> labels;
  labels.reserve(order);
  for (std::size_t k = 0; k < order; ++k) labels.push_back(state_label(label, k, order));

  ChannelKind kind = ChannelKind::FirstOrder;
  if (terms.kind == GroupKind::Integrator) kind = ChannelKind::IntegratorChain;
  if (terms.kind == GroupKind::Complex) kind = ChannelKind::SecondOrderSection;

  pm.channels.push_back(Channel{
      kind,
      validate_model(std::move(A), std::move(B), std::move(C), Eigen::MatrixXd::Zero(m, r)),
      TermRef{terms.kind, terms.group, terms.multiplicity},
      index,
      top,
      lanes,
      label,
      std::move(labels),
  });
  pm.total_order += order;
  pm.pruned_order += (terms.multiplicity - top) * width;
}

// Simple conjugate pair with several inputs: the complex residue
// K = (c1 p + c0) / (2 i im) is split as sum_l u_l w_l^T, and each term is the
// real and imaginary part of z' = p z + w^T u, y = 2 Re(u z). This keeps two
// states per complex rank, where stacking (c1, c0) would need one lane each.
void realize_modal_pair(const GroupTerms& terms, ParallelModel& pm) {
  const Eigen::Index m = pm.outputs();
  const Eigen::Index r = pm.inputs();
  const std::complex<double> p(terms.pole_re, terms.pole_im);
  const Eigen::MatrixXcd K =
      (terms.powers[0][0].cast<std::complex<double>>() * p +
       terms.powers[0][1].cast<std::complex<double>>()) /
      std::complex<double>(0.0, 2.0 * terms.pole_im);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > kRankRelative * sigma(0)) ++rank;

  const Eigen::Index n = 2 * rank;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd B(n, r);
  Eigen::MatrixXd C(m, n);
  for (Eigen::Index l = 0; l < rank; ++l) {
    const Eigen::VectorXcd u = svd.matrixU().col(l) * sigma(l);
    const Eigen::VectorXcd w = svd.matrixV().col(l).conjugate();
    const Eigen::Index x1 = 2 * l;
    const Eigen::Index x2 = 2 * l + 1;
    A(x1, x1) = terms.pole_re;
    A(x1, x2) = -terms.pole_im;
    A(x2, x1) = terms.pole_im;
    A(x2, x2) = terms.pole_re;
    B.row(x1) = w.real().transpose();
    B.row(x2) = w.imag().transpose();
    C.col(x1) = 2.0 * u.real();
    C.col(x2) = -2.0 * u.imag();
  }
  emit_channel(terms, 1, static_cast<std::size_t>(rank), std::move(A), std::move(B), std::move(C),
               pm);
}

void realize_group(const GroupTerms& terms, ParallelModel& pm) {
  const std::size_t width = terms.kind == GroupKind::Complex ? 2 : 1;
  const std::size_t contribution = terms.multiplicity * width;

  std::size_t top = 0;
  for (std::size_t j = 0; j < terms.powers.size(); ++j) {
    for (const auto& m : terms.powers[j]) {
      if (!m.isZero(0.0)) top = j + 1;
    }
  }
  if (top == 0) {
    pm.pruned_order += contribution;
    return;
  }
  if (width == 2 && top == 1 && pm.inputs() > 1) {
    realize_modal_pair(terms, pm);
    return;
  }

  const Eigen::Index m = pm.outputs();
  const Eigen::Index r = pm.inputs();
  const auto per_power = static_cast<Eigen::Index>(terms.powers[0].size());
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(top) * per_power * m, r);
  for (std::size_t j = 0; j < top; ++j) {
    for (Eigen::Index p = 0; p < per_power; ++p) {
      stacked.middleRows((static_cast<Eigen::Index>(j) * per_power + p) * m, m) =
          terms.powers[j][static_cast<std::size_t>(p)];
    }
  }
  const InputReduction red = reduce_inputs(stacked);
  const auto lanes = static_cast<std::size_t>(red.input_map.rows());
  const std::size_t order = top * lanes * width;
  const auto n = static_cast<Eigen::Index>(order);

  auto idx = [&](std::size_t section, std::size_t lane, std::size_t comp) {
    return static_cast<Eigen::Index>((section * lanes + lane) * width + comp);
  };
  auto tap = [&](std::size_t section, Eigen::Index p, std::size_t lane) {
    return red.taps.block((static_cast<Eigen::Index>(section) * per_power + p) * m,
                          static_cast<Eigen::Index>(lane), m, 1);
  };

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, r);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, n);

  if (width == 1) {
    for (std::size_t s = 0; s < top; ++s) {
      for (std::size_t l = 0; l < lanes; ++l) {
        A(idx(s, l, 0), idx(s, l, 0)) = terms.pole_re;
        if (s > 0) A(idx(s, l, 0), idx(s - 1, l, 0)) = 1.0;
        C.col(idx(s, l, 0)) = tap(s, 0, l);
      }
    }
    for (std::size_t l = 0; l < lanes; ++l) {
      B.row(idx(0, l, 0)) = red.input_map.row(static_cast<Eigen::Index>(l));
    }
    // Single output, single stage: carry the residue as the input gain so the
    // channel variable is the channel output itself.
    if (m == 1 && top == 1) {
      for (std::size_t l = 0; l < lanes; ++l) {
        B.row(idx(0, l, 0)) *= C(0, idx(0, l, 0));
        C(0, idx(0, l, 0)) = 1.0;
      }
    }
  } else {
    // Controllable canonical section: xi'' = -a1 xi' - a0 xi + v, output c0 xi + c1 xi'.
    const double a1 = -2.0 * terms.pole_re;
    const double a0 = terms.pole_re * terms.pole_re + terms.pole_im * terms.pole_im;
    for (std::size_t s = 0; s < top; ++s) {
      for (std::size_t l = 0; l < lanes; ++l) {
        A(idx(s, l, 0), idx(s, l, 1)) = 1.0;
        A(idx(s, l, 1), idx(s, l, 0)) = -a0;
        A(idx(s, l, 1), idx(s, l, 1)) = -a1;
        if (s > 0) A(idx(s, l, 1), idx(s - 1, l, 0)) = 1.0;
        C.col(idx(s, l, 1)) = tap(s, 0, l);
        C.col(idx(s, l, 0)) = tap(s, 1, l);
      }
    }
    for (std::size_t l = 0; l < lanes; ++l) {
      B.row(idx(0, l, 1)) = red.input_map.row(static_cast<Eigen::Index>(l));
    }
  }

  emit_channel(terms, top, lanes, std::move(A), std::move(B), std::move(C), pm);
}

}  // namespace

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::IntegratorChain: return "integrator-chain";
    case ChannelKind::FirstOrder: return "first-order";
    case ChannelKind::SecondOrderSection: return "second-order-section";
  }
  return "unknown";
}

ParallelModel realize_channels(const ResidueSet& residues, const SpectrumClassification& spectrum) {
  if (residues.integrator.size() != spectrum.zero_multiplicity ||
      residues.real.size() != spectrum.real_groups.size() ||
      residues.complex.size() != spectrum.complex_groups.size()) {
    throw Error(ErrorKind::ShapeMismatch, "residue set does not match the spectrum structure");
  }

  ParallelModel pm;
  pm.feedthrough = residues.feedthrough;
  pm.spectrum_order = spectrum.degree();

  if (spectrum.zero_multiplicity > 0) {
    GroupTerms t{GroupKind::Integrator, 0, spectrum.zero_multiplicity, 0.0, 0.0, {}};
    for (const auto& m : residues.integrator) t.powers.push_back({m});
    realize_group(t, pm);
  }
  for (std::size_t g = 0; g < spectrum.real_groups.size(); ++g) {
    const auto& rg = spectrum.real_groups[g];
    GroupTerms t{GroupKind::Real, g, rg.multiplicity, rg.value, 0.0, {}};
    for (const auto& m : residues.real[g]) t.powers.push_back({m});
    realize_group(t, pm);
  }
  for (std::size_t g = 0; g < spectrum.complex_groups.size(); ++g) {
    const auto& cg = spectrum.complex_groups[g];
    GroupTerms t{GroupKind::Complex, g, cg.multiplicity, cg.re, cg.im, {}};
    for (const auto& q : residues.complex[g]) t.powers.push_back({q.c1, q.c0});
    realize_group(t, pm);
  }
  return pm;
}

TransferMatrix channel_transfer(const Channel& channel) {
  return transfer_matrix(channel.local_model);
}

OrderReport verify_order(const ParallelModel& pm, std::size_t expected) {
  OrderReport report;
  report.expected = expected;
  report.pruned = pm.pruned_order;
  for (const auto& c : pm.channels) {
    report.channel_orders.push_back(c.order());
    report.total += c.order();
    if (c.lanes > 1) {
      report.notes.push_back("channel " + c.label + " uses " + std::to_string(c.lanes) +
                             " input lanes");
    }
  }
  if (pm.pruned_order > 0) {
    report.notes.push_back("order " + std::to_string(pm.pruned_order) +
                           " pruned as unobservable (zero residues)");
  }
  report.pass = report.total + report.pruned == expected;
  if (!report.pass) {
    report.notes.push_back("realized " + std::to_string(report.total) + " + pruned " +
                           std::to_string(report.pruned) + " != expected " +
                           std::to_string(expected));
  }
  return report;
}

StateSpaceModel assemble_block_diagonal(const ParallelModel& pm) {
  if (pm.channels.empty()) {
    throw Error(ErrorKind::EmptyChannelSet, "parallel model has no channels");
  }
  const auto n = static_cast<Eigen::Index>(pm.total_order);
  const Eigen::Index m = pm.outputs();
  const Eigen::Index r = pm.inputs();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd B(n, r);
  Eigen::MatrixXd C(m, n);
  Eigen::Index at = 0;
  for (const auto& c : pm.channels) {
    const auto k = c.local_model.states();
    A.block(at, at, k, k) = c.local_model.A();
    B.middleRows(at, k) = c.local_model.B();
    C.middleCols(at, k) = c.local_model.C();
    at += k;
  }
  return validate_model(std::move(A), std::move(B), std::move(C), pm.feedthrough);
}

}  // namespace ltipar
