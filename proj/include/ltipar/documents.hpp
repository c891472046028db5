#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "ltipar/benchmark.hpp"
#include "ltipar/discretizer.hpp"
#include "ltipar/fixtures.hpp"
#include "ltipar/model.hpp"
#include "ltipar/parallelizer.hpp"
#include "ltipar/pfd.hpp"
#include "ltipar/simulation.hpp"
#include "ltipar/spectral.hpp"

namespace ltipar {

/// Reads a whole file; Parse error if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

struct ModelDocument {
  std::string name;
  StateSpaceModel model;
  std::optional<DcDriveParams> dc_drive;
};

/// JSON model document: "A", "B", "C", "D" either as nested row arrays or as
/// flat row-major arrays sized by "n", "m", "r"; or a "dcDriveParams" object
/// instead of the matrices. Errors name the field, or the line for syntax errors.
ModelDocument parse_model_document(std::string_view text);
std::string serialize_model_document(const std::string& name, const StateSpaceModel& model);

/// Everything needed to simulate or re-verify a decomposition without
/// recomputing it.
struct PlanDocument {
  std::string name;
  std::optional<StateSpaceModel> model;
  TransferMatrix transfer;
  SpectrumClassification spectrum;
  ResidueSet residues;
  ParallelModel parallel;
  std::optional<DerivativeRule> rule;
  double T = 0.0;
  std::optional<MeshSystem> mesh;
};

/// Doubles are written in shortest round-trip form, so a reload is bitwise exact.
std::string serialize_plan(const PlanDocument& plan);
PlanDocument parse_plan(std::string_view text);

/// True if the text is a JSON object tagged as a plan.
bool looks_like_plan(std::string_view text);

/// Header t,u1..,Y1..[,channel columns]; one row per sample, %.17g.
void write_trace_csv(std::ostream& out, const Trace& trace, bool per_channel = true);

std::string bench_report_json(const BenchReport& report, const std::string& model_name);

/// gnuplot script plotting every output column of a trace CSV against t.
std::string gnuplot_script(const std::string& csv_path, const Trace& trace);

}  // namespace ltipar
