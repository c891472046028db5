#include "ltipar/simulation.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "ltipar/error.hpp"
#include "step_kernel.hpp"

namespace ltipar {

namespace {

double parse_number(std::string_view text, std::string_view spec) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(value)) {
    throw Error(ErrorKind::InvalidArgument,
                "bad number '" + std::string(text) + "' in input spec '" + std::string(spec) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? s.size() - start : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<std::vector<double>> input_series(const Eigen::MatrixXd& inputs) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(inputs.rows()));
  for (Eigen::Index q = 0; q < inputs.rows(); ++q) {
    out[static_cast<std::size_t>(q)].assign(inputs.row(q).begin(), inputs.row(q).end());
  }
  return out;
}

void require_inputs(const Eigen::MatrixXd& inputs, Eigen::Index expected_rows) {
  if (inputs.rows() != expected_rows) {
    throw Error(ErrorKind::DimensionMismatch, "input series has " + std::to_string(inputs.rows()) +
                                                  " rows, model expects " +
                                                  std::to_string(expected_rows));
  }
  if (inputs.cols() < 2) {
    throw Error(ErrorKind::InvalidArgument, "simulation needs at least one step");
  }
}

struct ParallelPlan {
  std::vector<detail::StepKernel> kernels;
  std::vector<detail::KernelState> states;
};

ParallelPlan prepare(const DiscreteParallelModel& dpm, const Eigen::MatrixXd& inputs,
                     const SimulationOptions& options) {
  if (dpm.channels.empty()) {
    throw Error(ErrorKind::EmptyChannelSet, "parallel model has no channels to simulate");
  }
  require_causal(dpm.rule);
  require_inputs(inputs, dpm.inputs());
  if (!options.channel_initial_states.empty() &&
      options.channel_initial_states.size() != dpm.channels.size()) {
    throw Error(ErrorKind::DimensionMismatch, "one initial state per channel is required");
  }
  ParallelPlan plan;
  const auto r = static_cast<std::size_t>(dpm.inputs());
  for (std::size_t c = 0; c < dpm.channels.size(); ++c) {
    plan.kernels.push_back(detail::kernel_from_equations(dpm.channels[c], dpm.depth, r));
    const Eigen::VectorXd x0 = options.channel_initial_states.empty()
                                   ? Eigen::VectorXd()
                                   : options.channel_initial_states[c];
    plan.states.push_back(detail::initial_state(plan.kernels.back(), x0));
  }
  return plan;
}

Trace empty_trace(const DiscreteParallelModel& dpm, const Eigen::MatrixXd& inputs,
                  const SimulationOptions& options) {
  const std::size_t steps = static_cast<std::size_t>(inputs.cols()) - 1;
  const auto m = static_cast<std::size_t>(dpm.outputs());
  Trace t;
  t.T = dpm.T;
  t.steps = steps;
  t.inputs = input_series(inputs);
  t.outputs.assign(m, std::vector<double>(steps + 1, 0.0));
  for (const auto& c : dpm.channels) t.channel_labels.push_back(c.label);
  if (options.record_channels) {
    t.per_channel.assign(dpm.channels.size(),
                         std::vector<std::vector<double>>(m, std::vector<double>(steps + 1, 0.0)));
  }
  return t;
}

// Fixed order: channels by index, then feedthrough terms by input.
inline double sum_step(const std::vector<const double*>& channel_values, std::size_t offset,
                       const Eigen::MatrixXd& feedthrough, std::size_t p, const double* u) {
  double acc = 0.0;
  for (const double* v : channel_values) acc += v[offset];
  for (Eigen::Index q = 0; q < feedthrough.cols(); ++q) {
    acc += feedthrough(static_cast<Eigen::Index>(p), q) * u[q];
  }
  return acc;
}

void fill_initial_outputs(const ParallelPlan& plan, const DiscreteParallelModel& dpm,
                          const Eigen::MatrixXd& inputs, Trace& t) {
  const auto m = static_cast<std::size_t>(dpm.outputs());
  std::vector<std::vector<double>> y0(plan.kernels.size(), std::vector<double>(m));
  std::vector<const double*> ptrs;
  for (std::size_t c = 0; c < plan.kernels.size(); ++c) {
    detail::current_output(plan.kernels[c], plan.states[c], y0[c].data());
    ptrs.push_back(y0[c].data());
    if (!t.per_channel.empty()) {
      for (std::size_t p = 0; p < m; ++p) t.per_channel[c][p][0] = y0[c][p];
    }
  }
  for (std::size_t p = 0; p < m; ++p) {
    std::vector<const double*> shifted;
    for (const double* v : ptrs) shifted.push_back(v + p);
    t.outputs[p][0] = sum_step(shifted, 0, dpm.feedthrough, p, inputs.data());
  }
}

}  // namespace

double InputSignal::at(std::size_t i, double T) const {
  if (kind == Kind::Table) {
    if (samples.empty()) return 0.0;
    return samples[std::min(i, samples.size() - 1)];
  }
  const double t = static_cast<double>(i) * T;
  if (t < start_time) return 0.0;
  const double tau = t - start_time;
  switch (kind) {
    case Kind::Step: return amplitude;
    case Kind::Ramp: return amplitude * tau;
    case Kind::Sine: return amplitude * std::sin(2.0 * std::numbers::pi * frequency * tau + phase);
    case Kind::Table: break;
  }
  return 0.0;
}

InputSignal InputSignal::parse(std::string_view spec) {
  InputSignal s;
  std::string_view body = spec;
  if (const auto at = spec.find('@'); at != std::string_view::npos) {
    s.start_time = parse_number(spec.substr(at + 1), spec);
    body = spec.substr(0, at);
  }
  const auto parts = split(body, ':');
  const auto kind = parts[0];
  if (kind == "step" || kind == "ramp") {
    s.kind = kind == "step" ? Kind::Step : Kind::Ramp;
    if (parts.size() > 2) throw Error(ErrorKind::InvalidArgument, "too many fields in '" + std::string(spec) + "'");
    s.amplitude = parts.size() == 2 ? parse_number(parts[1], spec) : 1.0;
  } else if (kind == "sine") {
    s.kind = Kind::Sine;
    if (parts.size() < 3 || parts.size() > 4) {
      throw Error(ErrorKind::InvalidArgument, "sine input needs sine:<amp>:<hz>[:<phase>]");
    }
    s.amplitude = parse_number(parts[1], spec);
    s.frequency = parse_number(parts[2], spec);
    if (parts.size() == 4) s.phase = parse_number(parts[3], spec);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown input kind in '" + std::string(spec) + "'");
  }
  return s;
}

Eigen::MatrixXd sample_inputs(const std::vector<InputSignal>& signals, Eigen::Index inputs,
                              double T, std::size_t steps) {
  if (signals.size() != 1 && signals.size() != static_cast<std::size_t>(inputs)) {
    throw Error(ErrorKind::DimensionMismatch, "expected 1 or " + std::to_string(inputs) +
                                                  " input signals, got " +
                                                  std::to_string(signals.size()));
  }
  for (const auto& s : signals) {
    if (s.kind == InputSignal::Kind::Table && s.samples.size() < steps) {
      throw Error(ErrorKind::InvalidArgument, "table input has " + std::to_string(s.samples.size()) +
                                                  " samples, run needs " + std::to_string(steps));
    }
  }
  Eigen::MatrixXd u(inputs, static_cast<Eigen::Index>(steps + 1));
  for (Eigen::Index q = 0; q < inputs; ++q) {
    const auto& s = signals.size() == 1 ? signals[0] : signals[static_cast<std::size_t>(q)];
    for (std::size_t i = 0; i <= steps; ++i) u(q, static_cast<Eigen::Index>(i)) = s.at(i, T);
  }
  return u;
}

int effective_workers(int requested) {
  int workers = std::max(requested, 1);
  if (const char* cap = std::getenv("LTIPAR_MAX_WORKERS")) {
    const int limit = std::atoi(cap);
    if (limit > 0) workers = std::min(workers, limit);
  }
  return workers;
}

Trace simulate_serial(const StateSpaceModel& model, const DerivativeRule& rule, double T,
                      const Eigen::MatrixXd& inputs, const SimulationOptions& options) {
  require_inputs(inputs, model.inputs());
  const detail::StepKernel kernel = detail::kernel_from_model(model, rule, T);
  detail::KernelState state = detail::initial_state(kernel, options.initial_state);

  const std::size_t steps = static_cast<std::size_t>(inputs.cols()) - 1;
  const std::size_t m = kernel.outputs;
  std::vector<double> raw((steps + 1) * m);
  detail::current_output(kernel, state, raw.data());
  detail::advance(kernel, inputs.data(), 1, steps + 1, state, raw.data() + m);

  Trace t;
  t.T = T;
  t.steps = steps;
  t.inputs = input_series(inputs);
  t.outputs.assign(m, std::vector<double>(steps + 1));
  const auto& D = model.D();
  for (std::size_t i = 0; i <= steps; ++i) {
    for (std::size_t p = 0; p < m; ++p) {
      double y = raw[i * m + p];
      for (Eigen::Index q = 0; q < D.cols(); ++q) {
        y += D(static_cast<Eigen::Index>(p), q) * inputs(q, static_cast<Eigen::Index>(i));
      }
      t.outputs[p][i] = y;
    }
  }
  return t;
}

Trace simulate_parallel_reference(const DiscreteParallelModel& dpm, const Eigen::MatrixXd& inputs,
                                  const SimulationOptions& options) {
  ParallelPlan plan = prepare(dpm, inputs, options);
  Trace t = empty_trace(dpm, inputs, options);
  fill_initial_outputs(plan, dpm, inputs, t);

  const std::size_t steps = t.steps;
  const auto m = static_cast<std::size_t>(dpm.outputs());
  const auto r = static_cast<std::size_t>(dpm.inputs());
  const std::size_t channels = plan.kernels.size();

  std::vector<std::vector<double>> out(channels, std::vector<double>(steps * m));
  std::vector<std::vector<double>> states(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    double* states_out = nullptr;
    if (options.record_states) {
      states[c].resize(steps * plan.kernels[c].states);
      states_out = states[c].data();
    }
    detail::advance(plan.kernels[c], inputs.data(), 1, steps + 1, plan.states[c], out[c].data(),
                    states_out);
  }

  for (std::size_t i = 1; i <= steps; ++i) {
    for (std::size_t p = 0; p < m; ++p) {
      std::vector<const double*> ptrs;
      ptrs.reserve(channels);
      for (std::size_t c = 0; c < channels; ++c) ptrs.push_back(out[c].data() + p);
      t.outputs[p][i] = sum_step(ptrs, (i - 1) * m, dpm.feedthrough, p, inputs.data() + i * r);
    }
  }
  if (options.record_channels) {
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t i = 1; i <= steps; ++i) {
        for (std::size_t p = 0; p < m; ++p) t.per_channel[c][p][i] = out[c][(i - 1) * m + p];
      }
    }
  }
  if (options.record_states) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t q = plan.kernels[c].states;
      const Eigen::VectorXd x0 = options.channel_initial_states.empty()
                                     ? Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q))
                                     : options.channel_initial_states[c];
      for (std::size_t v = 0; v < q; ++v) {
        t.state_labels.push_back(dpm.channels[c].equations[v].label);
        auto& series = t.states.emplace_back(steps + 1);
        series[0] = x0(static_cast<Eigen::Index>(v));
        for (std::size_t i = 1; i <= steps; ++i) series[i] = states[c][(i - 1) * q + v];
      }
    }
  }
  return t;
}

Trace simulate_parallel(const DiscreteParallelModel& dpm, const Eigen::MatrixXd& inputs,
                        int workers, const SimulationOptions& options) {
  ParallelPlan plan = prepare(dpm, inputs, options);
  Trace t = empty_trace(dpm, inputs, options);
  fill_initial_outputs(plan, dpm, inputs, t);

  const std::size_t steps = t.steps;
  const auto m = static_cast<std::size_t>(dpm.outputs());
  const auto r = static_cast<std::size_t>(dpm.inputs());
  const auto channels = static_cast<std::ptrdiff_t>(plan.kernels.size());
  const std::size_t block = std::max<std::size_t>(options.block_steps, 1);
  const double* u = inputs.data();

  std::vector<std::vector<double>> buffers(plan.kernels.size(), std::vector<double>(block * m));
  std::vector<std::vector<const double*>> row_ptrs(m);
  for (std::size_t p = 0; p < m; ++p) {
    for (const auto& b : buffers) row_ptrs[p].push_back(b.data() + p);
  }

#pragma omp parallel num_threads(effective_workers(workers))
  {
    for (std::size_t b0 = 1; b0 <= steps; b0 += block) {
      const std::size_t b1 = std::min(steps + 1, b0 + block);

#pragma omp for schedule(static)
      for (std::ptrdiff_t c = 0; c < channels; ++c) {
        const auto cu = static_cast<std::size_t>(c);
        detail::advance(plan.kernels[cu], u, b0, b1, plan.states[cu], buffers[cu].data());
        if (options.record_channels) {
          for (std::size_t i = b0; i < b1; ++i) {
            for (std::size_t p = 0; p < m; ++p) {
              t.per_channel[cu][p][i] = buffers[cu][(i - b0) * m + p];
            }
          }
        }
      }

#pragma omp for schedule(static)
      for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(b0); i < static_cast<std::ptrdiff_t>(b1);
           ++i) {
        const auto iu = static_cast<std::size_t>(i);
        for (std::size_t p = 0; p < m; ++p) {
          t.outputs[p][iu] = sum_step(row_ptrs[p], (iu - b0) * m, dpm.feedthrough, p, u + iu * r);
        }
      }
    }
  }
  return t;
}

TraceComparison compare(const Trace& a, const Trace& b) {
  if (a.T != b.T || a.steps != b.steps || a.outputs.size() != b.outputs.size()) {
    throw Error(ErrorKind::ShapeMismatch, "traces differ in sample time, step count or outputs");
  }
  TraceComparison cmp;
  double sq = 0.0;
  std::size_t count = 0;
  for (std::size_t p = 0; p < a.outputs.size(); ++p) {
    if (a.outputs[p].size() != b.outputs[p].size()) {
      throw Error(ErrorKind::ShapeMismatch, "output series lengths differ");
    }
    for (std::size_t i = 0; i < a.outputs[p].size(); ++i) {
      const double d = std::abs(a.outputs[p][i] - b.outputs[p][i]);
      sq += d * d;
      ++count;
      if (d > cmp.max_abs) {
        cmp.max_abs = d;
        cmp.argmax_step = i;
        cmp.argmax_output = p;
      }
    }
  }
  cmp.rms = count > 0 ? std::sqrt(sq / static_cast<double>(count)) : 0.0;
  return cmp;
}

}  // namespace ltipar
