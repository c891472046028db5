#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ltipar/model.hpp"
#include "ltipar/pfd.hpp"
#include "ltipar/spectral.hpp"

namespace ltipar {

enum class ChannelKind { IntegratorChain, FirstOrder, SecondOrderSection };

std::string_view to_string(ChannelKind kind);

/// The spectrum group a channel realizes, covering powers 1..sections.
struct TermRef {
  GroupKind group_kind = GroupKind::Real;
  std::size_t group = 0;
  std::size_t multiplicity = 1;  // of the group in the spectrum
};

/// One independent subsystem. Its local model is a cascade of `sections`
/// identical first- or second-order sections per input lane; each stage is
/// tapped into the output so a single channel covers every power of its
/// group. States of different channels never interact.
struct Channel {
  ChannelKind kind;
  StateSpaceModel local_model;
  TermRef source;
  std::size_t index = 0;
  std::size_t sections = 1;
  std::size_t lanes = 1;
  std::string label;
  std::vector<std::string> state_labels;

  std::size_t order() const noexcept { return static_cast<std::size_t>(local_model.states()); }
};

/// y = sum of channel outputs (in index order) + feedthrough * u.
struct ParallelModel {
  std::vector<Channel> channels;
  Eigen::MatrixXd feedthrough;
  /// Sum of channel orders.
  std::size_t total_order = 0;
  /// Order of terms dropped because their residues vanished.
  std::size_t pruned_order = 0;
  /// Degree of the spectrum the residues were computed over.
  std::size_t spectrum_order = 0;

  Eigen::Index inputs() const noexcept { return feedthrough.cols(); }
  Eigen::Index outputs() const noexcept { return feedthrough.rows(); }
};

ParallelModel realize_channels(const ResidueSet& residues, const SpectrumClassification& spectrum);

/// Transfer function of a channel computed from its local model.
TransferMatrix channel_transfer(const Channel& channel);

struct OrderReport {
  bool pass = false;
  std::size_t expected = 0;
  std::size_t total = 0;
  std::size_t pruned = 0;
  std::vector<std::size_t> channel_orders;
  std::vector<std::string> notes;
};

/// Passes iff realized plus pruned order accounts for `expected`.
OrderReport verify_order(const ParallelModel& pm, std::size_t expected);

/// Block-diagonal state-space model of all channels with a summing output map.
StateSpaceModel assemble_block_diagonal(const ParallelModel& pm);

}  // namespace ltipar
