// Timing harness: serial full-model stepping against the OpenMP channel engine.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ltipar/benchmark.hpp"
#include "ltipar/documents.hpp"
#include "ltipar/error.hpp"
#include "ltipar/fixtures.hpp"
#include "ltipar/pipeline.hpp"
#include "ltipar/simulation.hpp"

using namespace ltipar;

namespace {

struct Case {
  std::string name;
  StateSpaceModel serial_model;
  ParallelModel parallel;
};

Case make_case(const std::string& fixture, std::size_t channels) {
  if (fixture == "dc-drive") {
    const StateSpaceModel m = dc_drive_model();
    return {"dc-drive", m, build_plan(m, "dc-drive").parallel};
  }
  ParallelModel pm = widened_fixture(channels);
  StateSpaceModel m = assemble_block_diagonal(pm);
  return {"widened-" + std::to_string(channels), std::move(m), std::move(pm)};
}

void print_report(const std::string& name, const BenchReport& rep) {
  std::printf("%s: N=%zu T=%g hardware threads %d\n", name.c_str(), rep.steps, rep.T,
              rep.hardware_threads);
  if (rep.serial_seconds) std::printf("  %-28s %10.4f s\n", "serial model", *rep.serial_seconds);
  double channel_total = 0.0;
  for (std::size_t c = 0; c < rep.per_channel_seconds.size(); ++c) {
    if (rep.per_channel_seconds.size() <= 8) {
      std::printf("  channel %-20s %10.4f s\n", rep.channel_labels[c].c_str(),
                  rep.per_channel_seconds[c]);
    }
    channel_total += rep.per_channel_seconds[c];
  }
  std::printf("  %-28s %10.4f s\n", "all channels, 1 thread", channel_total);
  std::printf("  %-28s %10.4f s\n", "summation", rep.summation_seconds);
  const WorkerTiming* base = rep.timing_for(1);
  for (const auto& t : rep.parallel) {
    std::printf("  parallel, %2d worker(s)       %10.4f s", t.workers, t.seconds);
    if (std::isfinite(t.speedup_percent)) std::printf("  vs serial %+7.1f%%", t.speedup_percent);
    if (base && t.workers != 1) std::printf("  vs 1 worker x%.2f", base->seconds / t.seconds);
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ltipar_bench: serial vs OpenMP channel engine timings"};
  std::string fixture = "both";
  std::size_t channels = 64;
  std::size_t steps = 100000;
  double T = 1e-5;
  std::vector<int> workers{1, 2, 4};
  BenchOptions opts;
  std::string json_path;
  app.add_option("--fixture", fixture, "dc-drive, widened or both")
      ->check(CLI::IsMember({"dc-drive", "widened", "both"}))
      ->capture_default_str();
  app.add_option("--channels", channels, "second-order channels in the widened fixture")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--steps", steps, "steps N")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--T", T, "sample time, s")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--workers", workers, "worker counts")->delimiter(',')->capture_default_str();
  app.add_option("--repeats", opts.repeats, "timed repeats, best of")->check(CLI::PositiveNumber);
  app.add_option("--block", opts.block_steps, "steps per synchronization block")
      ->check(CLI::PositiveNumber);
  app.add_option("--json", json_path, "write the last report as JSON");
  CLI11_PARSE(app, argc, argv);

  std::vector<std::string> fixtures;
  if (fixture == "both" || fixture == "dc-drive") fixtures.push_back("dc-drive");
  if (fixture == "both" || fixture == "widened") fixtures.push_back("widened");

  try {
    for (const auto& f : fixtures) {
      const Case c = make_case(f, channels);
      const DiscreteParallelModel dpm = discretize(c.parallel, DerivativeRule::tustin(), T);
      const Eigen::MatrixXd u =
          sample_inputs({InputSignal::parse("step:1")}, dpm.inputs(), T, steps);

      const TraceComparison cmp = compare(
          simulate_serial(c.serial_model, DerivativeRule::tustin(), T, u),
          simulate_parallel(dpm, u, workers.empty() ? 1 : workers.back()));
      const BenchReport rep = benchmark(&c.serial_model, dpm, u, workers, opts);
      print_report(c.name, rep);
      std::printf("  serial vs parallel maxAbs %.3g\n", cmp.max_abs);
      if (!json_path.empty()) {
        std::ofstream(json_path) << bench_report_json(rep, c.name);
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", std::string(to_string(e.kind())).c_str(), e.what());
    return 3;
  }
  return 0;
}
