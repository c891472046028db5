#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ltipar/benchmark.hpp"
#include "ltipar/documents.hpp"
#include "ltipar/error.hpp"
#include "ltipar/fixtures.hpp"
#include "ltipar/pipeline.hpp"
#include "ltipar/simulation.hpp"

namespace ltipar::cli {

namespace {

constexpr const char* kBuiltinDcDrive = "builtin:dc-drive";
constexpr const char* kBuiltinWidened = "builtin:widened:";

// Thrown for bad user input discovered after option parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v, int digits = 10) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v + 0.0);
  return buf;
}

std::string fmt_root(const ComplexValue& z) {
  if (z.imag() == 0.0) return fmt(z.real());
  return fmt(z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag())) + "i";
}

std::string fmt_poly(const Polynomial& p) {
  std::string s = "[";
  for (std::size_t k = 0; k < p.coeffs().size(); ++k) {
    if (k > 0) s += ", ";
    s += fmt(p.coeffs()[k], 17);
  }
  return s + "]";
}

// What a positional <model|plan> argument resolved to.
struct Source {
  std::string name;
  std::optional<StateSpaceModel> model;
  std::optional<PlanDocument> plan;          // when the file was a plan
  std::optional<ParallelModel> prebuilt;     // builtin widened fixture
};

Source load_source(const std::string& arg) {
  Source src;
  if (arg == kBuiltinDcDrive) {
    src.name = "dc-drive";
    src.model = dc_drive_model();
    return src;
  }
  if (arg.rfind(kBuiltinWidened, 0) == 0) {
    const std::string count = arg.substr(std::string(kBuiltinWidened).size());
    char* end = nullptr;
    const long k = std::strtol(count.c_str(), &end, 10);
    if (count.empty() || *end != '\0' || k <= 0) throw UsageError("bad channel count in '" + arg + "'");
    src.name = "widened-" + count;
    src.prebuilt = widened_fixture(static_cast<std::size_t>(k));
    return src;
  }
  const std::string text = read_text_file(arg);
  if (looks_like_plan(text)) {
    src.plan = parse_plan(text);
    src.name = src.plan->name;
    src.model = src.plan->model;
  } else {
    ModelDocument doc = parse_model_document(text);
    src.name = doc.name;
    src.model = std::move(doc.model);
  }
  return src;
}

std::vector<InputSignal> parse_inputs(const std::vector<std::string>& specs) {
  std::vector<InputSignal> out;
  for (const auto& spec : specs) {
    if (spec.rfind("table:", 0) == 0) {
      InputSignal s;
      s.kind = InputSignal::Kind::Table;
      std::istringstream in(read_text_file(spec.substr(6)));
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        try {
          s.samples.push_back(std::stod(line));
        } catch (const std::exception&) {
          throw Error(ErrorKind::Parse, "table '" + spec.substr(6) + "': bad sample '" + line + "'");
        }
      }
      out.push_back(std::move(s));
    } else {
      out.push_back(InputSignal::parse(spec));
    }
  }
  if (out.empty()) out.push_back(InputSignal::parse("step:1"));
  return out;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Parse:
    case ErrorKind::InvalidArgument:
    case ErrorKind::AcausalRule:
      return kUsage;
    default:
      return kNumeric;
  }
}

// Options shared by the simulation-style commands.
struct RunOptions {
  std::optional<std::string> rule;
  std::optional<double> T;
  std::size_t steps = 100000;
  std::vector<std::string> inputs;
  int workers = 1;

  DerivativeRule resolved_rule(const Source& src) const {
    if (rule) return DerivativeRule::from_name(*rule);
    if (src.plan && src.plan->rule) return *src.plan->rule;
    return DerivativeRule::tustin();
  }
  double resolved_T(const Source& src) const {
    if (T) return *T;
    if (src.plan && src.plan->rule) return src.plan->T;
    return 1e-5;
  }
};

void add_run_options(CLI::App* cmd, RunOptions& o, std::size_t default_steps) {
  o.steps = default_steps;
  cmd->add_option("--rule", o.rule, "derivative rule: tustin, backward-euler, forward-euler-shifted");
  cmd->add_option("--T", o.T, "sample time, s")->check(CLI::PositiveNumber);
  cmd->add_option("--steps", o.steps, "number of steps N")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--input", o.inputs, "step:<amp>, ramp:<slope>, sine:<amp>:<hz>[:<phase>], table:<file>; one per input or one broadcast");
}

ParallelModel parallel_model_of(const Source& src) {
  if (src.prebuilt) return *src.prebuilt;
  if (src.plan) return src.plan->parallel;
  return build_plan(*src.model, src.name).parallel;
}

// ---------------------------------------------------------------- inspect

int cmd_inspect(const std::string& path, std::ostream& out) {
  const Source src = load_source(path);
  if (!src.model) throw UsageError("inspect needs a model (or a plan that embeds one)");
  const StateSpaceModel& m = *src.model;
  out << "model: " << src.name << "\n";
  out << "dimensions: n=" << m.states() << " m=" << m.outputs() << " r=" << m.inputs() << "\n";
  const PlanDocument plan = build_plan(m, src.name);
  out << "denominator (ascending): " << fmt_poly(plan.transfer.denominator) << "\n";
  for (std::size_t i = 0; i < plan.transfer.numerator.rows(); ++i) {
    for (std::size_t j = 0; j < plan.transfer.numerator.cols(); ++j) {
      out << "numerator(" << i + 1 << "," << j + 1 << "): " << fmt_poly(plan.transfer.numerator(i, j))
          << "\n";
    }
  }
  out << "poles:";
  for (const auto& z : plan.spectrum.roots()) out << " {" << fmt_root(z) << "}";
  out << "\n";
  out << "classification: zero multiplicity " << plan.spectrum.zero_multiplicity << "\n";
  for (const auto& g : plan.spectrum.real_groups) {
    out << "  real " << fmt(g.value) << " x" << g.multiplicity << "\n";
  }
  for (const auto& g : plan.spectrum.complex_groups) {
    out << "  complex pair " << fmt(g.re) << " +/- " << fmt(g.im) << "i x" << g.multiplicity << "\n";
  }
  out << "channels:";
  for (const auto& c : plan.parallel.channels) {
    out << " " << c.label << "(" << to_string(c.kind) << ", order " << c.order() << ")";
  }
  out << "\n";
  return kOk;
}

// ------------------------------------------------------------ parallelize

int cmd_parallelize(const std::string& path, const std::string& out_path,
                    const std::optional<std::string>& rule, const std::optional<double>& T,
                    std::ostream& out) {
  const Source src = load_source(path);
  if (!src.model) throw UsageError("parallelize needs a model document");
  if (T && !rule) throw UsageError("--T needs --rule");
  std::optional<DerivativeRule> r;
  if (rule) r = DerivativeRule::from_name(*rule);
  const PlanDocument plan = build_plan(*src.model, src.name, r, T.value_or(1e-5));
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + out_path + "'");
  f << serialize_plan(plan);
  out << "wrote " << out_path << ": " << plan.parallel.channels.size() << " channels, order "
      << plan.parallel.total_order << " (+" << plan.parallel.pruned_order << " pruned)\n";
  return kOk;
}

// --------------------------------------------------------------- simulate

void write_trace(const std::string& path, const Trace& trace, bool gnuplot, std::ostream& out) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  write_trace_csv(f, trace);
  out << "wrote " << path << "\n";
  if (gnuplot) {
    const std::string script = path + ".gp";
    std::ofstream g(script);
    g << gnuplot_script(std::filesystem::path(path).filename().string(), trace);
    out << "wrote " << script << "\n";
  }
}

int cmd_simulate(const std::string& path, const std::string& engine, const RunOptions& o,
                 const std::string& prefix, bool gnuplot, std::ostream& out) {
  if (engine != "serial" && engine != "parallel" && engine != "both") {
    throw UsageError("--engine must be serial, parallel or both");
  }
  const Source src = load_source(path);
  const DerivativeRule rule = o.resolved_rule(src);
  const double T = o.resolved_T(src);
  const bool serial = engine != "parallel";
  const bool parallel = engine != "serial";
  if (serial && !src.model) throw UsageError("the serial engine needs the original model");

  const Eigen::Index r = src.model ? src.model->inputs() : parallel_model_of(src).inputs();
  const Eigen::MatrixXd u = sample_inputs(parse_inputs(o.inputs), r, T, o.steps);

  std::optional<Trace> ts, tp;
  if (serial) {
    ts = simulate_serial(*src.model, rule, T, u);
    write_trace(prefix + ".serial.csv", *ts, gnuplot, out);
  }
  if (parallel) {
    const DiscreteParallelModel dpm = discretize(parallel_model_of(src), rule, T);
    tp = simulate_parallel(dpm, u, o.workers);
    write_trace(prefix + ".parallel.csv", *tp, gnuplot, out);
  }
  if (ts && tp) {
    const TraceComparison c = compare(*ts, *tp);
    out << "comparison: maxAbs " << fmt(c.max_abs, 6) << " rms " << fmt(c.rms, 6) << " at step "
        << c.argmax_step << " output " << c.argmax_output + 1 << "\n";
  }
  return kOk;
}

// ----------------------------------------------------------------- verify

struct VerifyTolerances {
  double recombination = 1e-8;
  double trace = 1e-6;
};

int cmd_verify(const std::string& path, const RunOptions& o, const VerifyTolerances& tol,
               std::ostream& out) {
  const Source src = load_source(path);
  if (src.prebuilt) throw UsageError("verify needs a model or plan");
  const PlanDocument plan = src.plan ? *src.plan : build_plan(*src.model, src.name);
  bool ok = true;
  auto line = [&](const std::string& name, bool pass, const std::string& detail) {
    out << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
    ok = ok && pass;
  };

  const double rec = recombination_error(plan);
  line("recombination", rec <= tol.recombination,
       "relative coefficient error " + fmt(rec, 3) + " <= " + fmt(tol.recombination, 3));

  const std::size_t expected = plan.transfer.denominator.degree();
  const OrderReport order = verify_order(plan.parallel, expected);
  std::string orders;
  for (auto k : order.channel_orders) orders += (orders.empty() ? "" : ",") + std::to_string(k);
  line("order", order.pass,
       "channels [" + orders + "] sum " + std::to_string(order.total) + " + pruned " +
           std::to_string(order.pruned) + " vs n=" + std::to_string(expected));
  for (const auto& note : order.notes) out << "       note: " << note << "\n";

  if (plan.model) {
    const DerivativeRule rule = o.resolved_rule(src);
    const double T = o.resolved_T(src);
    const Eigen::MatrixXd u = sample_inputs(parse_inputs(o.inputs), plan.model->inputs(), T, o.steps);
    const Trace ts = simulate_serial(*plan.model, rule, T, u);
    const Trace tp = simulate_parallel(discretize(plan.parallel, rule, T), u, o.workers);
    const TraceComparison c = compare(ts, tp);
    double peak = 0.0;
    for (const auto& y : ts.outputs) {
      for (double v : y) peak = std::max(peak, std::abs(v));
    }
    const double limit = tol.trace * std::max(1.0, peak);
    line("trace", c.max_abs <= limit,
         "maxAbs " + fmt(c.max_abs, 3) + " <= " + fmt(limit, 3) + " (" + rule.name + ", T=" +
             fmt(T) + ", N=" + std::to_string(o.steps) + ")");
  } else {
    out << "[SKIP] trace: plan has no embedded model\n";
  }
  out << (ok ? "verify: all checks passed\n" : "verify: FAILED\n");
  return ok ? kOk : kVerificationFailed;
}

// ------------------------------------------------------------------ bench

int cmd_bench(const std::string& path, const RunOptions& o, const std::vector<int>& workers,
              int repeats, const std::optional<std::string>& out_path, std::ostream& out) {
  const Source src = load_source(path);
  const DerivativeRule rule = o.resolved_rule(src);
  const double T = o.resolved_T(src);
  const DiscreteParallelModel dpm = discretize(parallel_model_of(src), rule, T);
  const Eigen::MatrixXd u = sample_inputs(parse_inputs(o.inputs), dpm.inputs(), T, o.steps);
  BenchOptions opts;
  opts.repeats = repeats;
  // The widened fixture has no source model; its block-diagonal assembly is the serial baseline.
  std::optional<StateSpaceModel> serial = src.model;
  if (!serial && src.prebuilt) serial = assemble_block_diagonal(*src.prebuilt);
  const BenchReport rep = benchmark(serial ? &*serial : nullptr, dpm, u, workers, opts);

  out << "bench " << src.name << ": N=" << rep.steps << " T=" << fmt(T) << " hardware threads "
      << rep.hardware_threads << "\n";
  if (rep.serial_seconds) {
    out << "  serial model            " << fmt(*rep.serial_seconds, 4) << " s\n";
  } else {
    out << "  serial model            n/a\n";
  }
  double channel_total = 0.0;
  for (std::size_t c = 0; c < rep.per_channel_seconds.size(); ++c) {
    if (rep.per_channel_seconds.size() <= 16 || c < 4) {
      out << "  channel " << rep.channel_labels[c] << std::string(16 - std::min<std::size_t>(15, rep.channel_labels[c].size()), ' ')
          << fmt(rep.per_channel_seconds[c], 4) << " s\n";
    } else if (c == 4) {
      out << "  ... (" << rep.per_channel_seconds.size() - 4 << " more channels)\n";
    }
    channel_total += rep.per_channel_seconds[c];
  }
  out << "  all channels            " << fmt(channel_total, 4) << " s\n";
  out << "  summation               " << fmt(rep.summation_seconds, 4) << " s\n";
  for (const auto& t : rep.parallel) {
    out << "  parallel, " << t.workers << " worker(s)    " << fmt(t.seconds, 4) << " s";
    if (std::isfinite(t.speedup_percent)) out << "  speedup " << fmt(t.speedup_percent, 3) << "%";
    out << "\n";
  }
  if (out_path) {
    std::ofstream f(*out_path);
    if (!f) throw UsageError("cannot write '" + *out_path + "'");
    f << bench_report_json(rep, src.name);
    out << "wrote " << *out_path << "\n";
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parallel decomposition and simulation of LTI state-space models", "ltipar"};
  app.require_subcommand(1);

  std::string source;
  const char* source_help = "model document, plan, or builtin:dc-drive / builtin:widened:<k>";

  auto* inspect = app.add_subcommand("inspect", "print transfer function, poles and channels");
  inspect->add_option("model", source, source_help)->required();

  auto* parallelize = app.add_subcommand("parallelize", "write a decomposition plan");
  std::string plan_out;
  std::optional<std::string> par_rule;
  std::optional<double> par_T;
  parallelize->add_option("model", source, source_help)->required();
  parallelize->add_option("-o,--output", plan_out, "plan path")->required();
  parallelize->add_option("--rule", par_rule, "also discretize and store mesh matrices");
  parallelize->add_option("--T", par_T, "sample time for --rule, s")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "simulate and write trace CSV files");
  RunOptions sim_opts;
  std::string engine = "both";
  std::string prefix = "trace";
  bool gnuplot = false;
  simulate->add_option("model", source, source_help)->required();
  add_run_options(simulate, sim_opts, 100000);
  simulate->add_option("--engine", engine, "serial, parallel or both")->capture_default_str();
  simulate->add_option("--workers", sim_opts.workers, "parallel workers")->check(CLI::PositiveNumber);
  simulate->add_option("-o,--output", prefix, "output prefix")->capture_default_str();
  simulate->add_flag("--gnuplot", gnuplot, "also write gnuplot scripts");

  auto* verify = app.add_subcommand("verify", "check decomposition, order and trace equivalence");
  RunOptions ver_opts;
  VerifyTolerances tol;
  verify->add_option("model", source, source_help)->required();
  add_run_options(verify, ver_opts, 10000);
  verify->add_option("--workers", ver_opts.workers, "parallel workers")->check(CLI::PositiveNumber);
  verify->add_option("--recombination-tol", tol.recombination, "relative coefficient tolerance")
      ->capture_default_str();
  verify->add_option("--trace-tol", tol.trace, "trace tolerance, relative to max(1, peak)")
      ->capture_default_str();

  auto* bench = app.add_subcommand("bench", "time serial and parallel engines");
  RunOptions bench_opts;
  std::vector<int> bench_workers{1};
  int repeats = 3;
  std::optional<std::string> report_path;
  bench->add_option("model", source, source_help)->required();
  add_run_options(bench, bench_opts, 100000);
  bench->add_option("--workers", bench_workers, "worker counts, e.g. 1,3")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--repeats", repeats, "timed repeats (best of)")->check(CLI::PositiveNumber);
  bench->add_option("-o,--output", report_path, "bench report JSON path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*inspect) return cmd_inspect(source, out);
    if (*parallelize) return cmd_parallelize(source, plan_out, par_rule, par_T, out);
    if (*simulate) return cmd_simulate(source, engine, sim_opts, prefix, gnuplot, out);
    if (*verify) return cmd_verify(source, ver_opts, tol, out);
    if (*bench) return cmd_bench(source, bench_opts, bench_workers, repeats, report_path, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kUsage;
}

}  // namespace ltipar::cli
