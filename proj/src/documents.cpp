#include "ltipar/documents.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "ltipar/error.hpp"

namespace ltipar {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_fail(const std::string& message) { throw Error(ErrorKind::Parse, message); }

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t k = 0; k < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') ++line;
    }
    parse_fail(std::string(what) + ": syntax error at line " + std::to_string(line) + ": " +
               e.what());
  }
}

const json& require(const json& obj, const std::string& key, const std::string& ctx) {
  if (!obj.is_object() || !obj.contains(key)) parse_fail(ctx + ": missing field '" + key + "'");
  return obj.at(key);
}

double as_number(const json& v, const std::string& ctx) {
  if (!v.is_number()) parse_fail(ctx + ": expected a number");
  return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& ctx) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    parse_fail(ctx + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string as_string(const json& v, const std::string& ctx) {
  if (!v.is_string()) parse_fail(ctx + ": expected a string");
  return v.get<std::string>();
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Nested rows, or a flat row-major array when the shape is known.
Eigen::MatrixXd matrix_from_json(const json& v, const std::string& ctx,
                                 std::optional<std::pair<std::size_t, std::size_t>> shape = {}) {
  if (!v.is_array()) parse_fail(ctx + ": expected an array");
  const bool nested = !v.empty() && v.front().is_array();
  if (!nested) {
    if (!shape) {
      if (v.empty()) return Eigen::MatrixXd(0, 0);
      parse_fail(ctx + ": flat array needs the n, m, r dimensions");
    }
    const auto [rows, cols] = *shape;
    if (v.size() != rows * cols) {
      parse_fail(ctx + ": expected " + std::to_string(rows * cols) + " entries (" +
                 std::to_string(rows) + "x" + std::to_string(cols) + "), got " +
                 std::to_string(v.size()));
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t k = 0; k < v.size(); ++k) {
      m(static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)) =
          as_number(v[k], ctx + "[" + std::to_string(k) + "]");
    }
    return m;
  }
  const std::size_t cols = v.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string row_ctx = ctx + "[" + std::to_string(i) + "]";
    if (!v[i].is_array()) parse_fail(row_ctx + ": expected a row array");
    if (v[i].size() != cols) parse_fail(row_ctx + ": ragged row");
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          as_number(v[i][j], row_ctx + "[" + std::to_string(j) + "]");
    }
  }
  if (shape && (static_cast<std::size_t>(m.rows()) != shape->first ||
                static_cast<std::size_t>(m.cols()) != shape->second)) {
    parse_fail(ctx + ": expected " + std::to_string(shape->first) + "x" +
               std::to_string(shape->second) + ", got " + std::to_string(m.rows()) + "x" +
               std::to_string(m.cols()));
  }
  return m;
}

json poly_to_json(const Polynomial& p) { return json(p.coeffs()); }

Polynomial poly_from_json(const json& v, const std::string& ctx) {
  if (!v.is_array() || v.empty()) parse_fail(ctx + ": expected a coefficient array");
  std::vector<double> c;
  for (std::size_t k = 0; k < v.size(); ++k) {
    c.push_back(as_number(v[k], ctx + "[" + std::to_string(k) + "]"));
  }
  return Polynomial(std::move(c));
}

json model_to_json(const StateSpaceModel& m) {
  return json{{"n", m.states()},         {"m", m.outputs()},        {"r", m.inputs()},
              {"A", matrix_to_json(m.A())}, {"B", matrix_to_json(m.B())},
              {"C", matrix_to_json(m.C())}, {"D", matrix_to_json(m.D())}};
}

StateSpaceModel model_from_json(const json& doc, const std::string& ctx) {
  std::optional<std::size_t> n, m, r;
  if (doc.contains("n")) n = as_count(doc["n"], ctx + ".n");
  if (doc.contains("m")) m = as_count(doc["m"], ctx + ".m");
  if (doc.contains("r")) r = as_count(doc["r"], ctx + ".r");
  const bool dims = n && m && r;
  using Shape = std::optional<std::pair<std::size_t, std::size_t>>;
  auto shape = [&](std::size_t rows, std::size_t cols) -> Shape {
    return dims ? Shape{{rows, cols}} : Shape{};
  };
  const std::size_t N = n.value_or(0), M = m.value_or(0), R = r.value_or(0);
  Eigen::MatrixXd A = matrix_from_json(require(doc, "A", ctx), ctx + ".A", shape(N, N));
  Eigen::MatrixXd B = matrix_from_json(require(doc, "B", ctx), ctx + ".B", shape(N, R));
  Eigen::MatrixXd C = matrix_from_json(require(doc, "C", ctx), ctx + ".C", shape(M, N));
  Eigen::MatrixXd D = doc.contains("D") ? matrix_from_json(doc["D"], ctx + ".D", shape(M, R))
                                        : Eigen::MatrixXd::Zero(C.rows(), B.cols());
  try {
    return validate_model(std::move(A), std::move(B), std::move(C), std::move(D));
  } catch (const Error& e) {
    throw Error(e.kind(), ctx + ": " + e.what());
  }
}

const char* group_kind_name(GroupKind k) {
  switch (k) {
    case GroupKind::Integrator: return "integrator";
    case GroupKind::Real: return "real";
    case GroupKind::Complex: return "complex";
  }
  return "?";
}

GroupKind group_kind_from(const std::string& s, const std::string& ctx) {
  if (s == "integrator") return GroupKind::Integrator;
  if (s == "real") return GroupKind::Real;
  if (s == "complex") return GroupKind::Complex;
  parse_fail(ctx + ": unknown group kind '" + s + "'");
}

ChannelKind channel_kind_from(const std::string& s, const std::string& ctx) {
  for (auto k : {ChannelKind::IntegratorChain, ChannelKind::FirstOrder,
                 ChannelKind::SecondOrderSection}) {
    if (to_string(k) == s) return k;
  }
  parse_fail(ctx + ": unknown channel kind '" + s + "'");
}

std::vector<std::string> strings_from(const json& v, const std::string& ctx) {
  if (!v.is_array()) parse_fail(ctx + ": expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(as_string(v[k], ctx + "[" + std::to_string(k) + "]"));
  }
  return out;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModelDocument parse_model_document(std::string_view text) {
  const json doc = parse_json(text, "model document");
  const std::string ctx = "model document";
  if (!doc.is_object()) parse_fail(ctx + ": expected a JSON object");
  std::string name = doc.contains("name") ? as_string(doc["name"], ctx + ".name") : "model";

  const bool has_params = doc.contains("dcDriveParams");
  const bool has_matrices =
      doc.contains("A") || doc.contains("B") || doc.contains("C") || doc.contains("D");
  if (has_params && has_matrices) {
    parse_fail(ctx + ": give either explicit matrices or dcDriveParams, not both");
  }
  if (!has_params) return ModelDocument{name, model_from_json(doc, ctx), std::nullopt};

  const json& p = doc["dcDriveParams"];
  const std::string pctx = ctx + ".dcDriveParams";
  if (!p.is_object()) parse_fail(pctx + ": expected an object");
  DcDriveParams params;
  params.J = as_number(require(p, "J", pctx), pctx + ".J");
  params.R = as_number(require(p, "R", pctx), pctx + ".R");
  params.c = as_number(require(p, "c", pctx), pctx + ".c");
  params.L = as_number(require(p, "L", pctx), pctx + ".L");
  params.Tc = as_number(require(p, "Tc", pctx), pctx + ".Tc");
  try {
    return ModelDocument{name, dc_drive_model(params), params};
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

std::string serialize_model_document(const std::string& name, const StateSpaceModel& model) {
  json doc = model_to_json(model);
  doc["name"] = name;
  return doc.dump(2) + "\n";
}

std::string serialize_plan(const PlanDocument& plan) {
  json doc;
  doc["format"] = "ltipar-plan";
  doc["version"] = 1;
  doc["name"] = plan.name;
  if (plan.model) doc["model"] = model_to_json(*plan.model);

  json numer = json::array();
  for (std::size_t i = 0; i < plan.transfer.numerator.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < plan.transfer.numerator.cols(); ++j) {
      row.push_back(poly_to_json(plan.transfer.numerator(i, j)));
    }
    numer.push_back(std::move(row));
  }
  doc["transfer"] = {{"numerator", numer}, {"denominator", poly_to_json(plan.transfer.denominator)}};

  json reals = json::array();
  for (const auto& g : plan.spectrum.real_groups) {
    reals.push_back({{"value", g.value}, {"multiplicity", g.multiplicity}});
  }
  json complexes = json::array();
  for (const auto& g : plan.spectrum.complex_groups) {
    complexes.push_back({{"re", g.re}, {"im", g.im}, {"multiplicity", g.multiplicity}});
  }
  doc["spectrum"] = {{"zero_multiplicity", plan.spectrum.zero_multiplicity},
                     {"real", reals},
                     {"complex", complexes}};

  json res;
  res["feedthrough"] = matrix_to_json(plan.residues.feedthrough);
  res["integrator"] = json::array();
  for (const auto& m : plan.residues.integrator) res["integrator"].push_back(matrix_to_json(m));
  res["real"] = json::array();
  for (const auto& group : plan.residues.real) {
    json g = json::array();
    for (const auto& m : group) g.push_back(matrix_to_json(m));
    res["real"].push_back(std::move(g));
  }
  res["complex"] = json::array();
  for (const auto& group : plan.residues.complex) {
    json g = json::array();
    for (const auto& q : group) {
      g.push_back({{"c1", matrix_to_json(q.c1)}, {"c0", matrix_to_json(q.c0)}});
    }
    res["complex"].push_back(std::move(g));
  }
  doc["residues"] = std::move(res);

  json channels = json::array();
  for (const auto& c : plan.parallel.channels) {
    json ch = model_to_json(c.local_model);
    ch["index"] = c.index;
    ch["label"] = c.label;
    ch["kind"] = std::string(to_string(c.kind));
    ch["source"] = {{"group_kind", group_kind_name(c.source.group_kind)},
                    {"group", c.source.group},
                    {"multiplicity", c.source.multiplicity}};
    ch["sections"] = c.sections;
    ch["lanes"] = c.lanes;
    ch["state_labels"] = c.state_labels;
    channels.push_back(std::move(ch));
  }
  doc["channels"] = std::move(channels);
  doc["feedthrough"] = matrix_to_json(plan.parallel.feedthrough);
  doc["total_order"] = plan.parallel.total_order;
  doc["pruned_order"] = plan.parallel.pruned_order;
  doc["spectrum_order"] = plan.parallel.spectrum_order;

  if (plan.rule) {
    json disc = {{"rule", plan.rule->name}, {"T", plan.T}};
    if (plan.mesh) {
      disc["mesh"] = {{"Ad", matrix_to_json(plan.mesh->Ad)},
                      {"Md", matrix_to_json(plan.mesh->Md)},
                      {"y_layout", plan.mesh->y_layout},
                      {"u_layout", plan.mesh->u_layout},
                      {"depth", plan.mesh->depth}};
    }
    doc["discretization"] = std::move(disc);
  }
  return doc.dump(2) + "\n";
}

PlanDocument parse_plan(std::string_view text) {
  const json doc = parse_json(text, "plan");
  const std::string ctx = "plan";
  if (!doc.is_object() || doc.value("format", "") != "ltipar-plan") {
    parse_fail(ctx + ": missing or wrong 'format' (expected \"ltipar-plan\")");
  }
  PlanDocument plan;
  plan.name = doc.contains("name") ? as_string(doc["name"], ctx + ".name") : "plan";
  if (doc.contains("model")) plan.model = model_from_json(doc["model"], ctx + ".model");

  const json& tf = require(doc, "transfer", ctx);
  plan.transfer.denominator =
      poly_from_json(require(tf, "denominator", ctx + ".transfer"), ctx + ".transfer.denominator");
  const json& numer = require(tf, "numerator", ctx + ".transfer");
  if (!numer.is_array() || numer.empty() || !numer.front().is_array()) {
    parse_fail(ctx + ".transfer.numerator: expected rows of coefficient arrays");
  }
  plan.transfer.numerator = PolyMatrix(numer.size(), numer.front().size());
  for (std::size_t i = 0; i < numer.size(); ++i) {
    if (!numer[i].is_array() || numer[i].size() != plan.transfer.numerator.cols()) {
      parse_fail(ctx + ".transfer.numerator[" + std::to_string(i) + "]: ragged row");
    }
    for (std::size_t j = 0; j < numer[i].size(); ++j) {
      plan.transfer.numerator(i, j) = poly_from_json(
          numer[i][j],
          ctx + ".transfer.numerator[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }

  const json& sp = require(doc, "spectrum", ctx);
  const std::string sctx = ctx + ".spectrum";
  plan.spectrum.zero_multiplicity =
      as_count(require(sp, "zero_multiplicity", sctx), sctx + ".zero_multiplicity");
  for (const auto& g : require(sp, "real", sctx)) {
    plan.spectrum.real_groups.push_back(
        {as_number(require(g, "value", sctx + ".real"), sctx + ".real.value"),
         as_count(require(g, "multiplicity", sctx + ".real"), sctx + ".real.multiplicity")});
  }
  for (const auto& g : require(sp, "complex", sctx)) {
    plan.spectrum.complex_groups.push_back(
        {as_number(require(g, "re", sctx + ".complex"), sctx + ".complex.re"),
         as_number(require(g, "im", sctx + ".complex"), sctx + ".complex.im"),
         as_count(require(g, "multiplicity", sctx + ".complex"), sctx + ".complex.multiplicity")});
  }

  const json& res = require(doc, "residues", ctx);
  const std::string rctx = ctx + ".residues";
  plan.residues.feedthrough =
      matrix_from_json(require(res, "feedthrough", rctx), rctx + ".feedthrough");
  const auto cell = std::make_optional(
      std::pair{static_cast<std::size_t>(plan.residues.feedthrough.rows()),
                static_cast<std::size_t>(plan.residues.feedthrough.cols())});
  for (const auto& m : require(res, "integrator", rctx)) {
    plan.residues.integrator.push_back(matrix_from_json(m, rctx + ".integrator", cell));
  }
  for (const auto& g : require(res, "real", rctx)) {
    auto& dst = plan.residues.real.emplace_back();
    for (const auto& m : g) dst.push_back(matrix_from_json(m, rctx + ".real", cell));
  }
  for (const auto& g : require(res, "complex", rctx)) {
    auto& dst = plan.residues.complex.emplace_back();
    for (const auto& q : g) {
      dst.push_back({matrix_from_json(require(q, "c1", rctx + ".complex"), rctx + ".complex.c1", cell),
                     matrix_from_json(require(q, "c0", rctx + ".complex"), rctx + ".complex.c0", cell)});
    }
  }

  const json& chans = require(doc, "channels", ctx);
  if (!chans.is_array()) parse_fail(ctx + ".channels: expected an array");
  for (std::size_t k = 0; k < chans.size(); ++k) {
    const json& ch = chans[k];
    const std::string cctx = ctx + ".channels[" + std::to_string(k) + "]";
    const json& src = require(ch, "source", cctx);
    Channel c{channel_kind_from(as_string(require(ch, "kind", cctx), cctx + ".kind"), cctx),
              model_from_json(ch, cctx),
              TermRef{group_kind_from(as_string(require(src, "group_kind", cctx + ".source"),
                                                cctx + ".source.group_kind"),
                                      cctx),
                      as_count(require(src, "group", cctx + ".source"), cctx + ".source.group"),
                      as_count(require(src, "multiplicity", cctx + ".source"),
                               cctx + ".source.multiplicity")},
              as_count(require(ch, "index", cctx), cctx + ".index"),
              as_count(require(ch, "sections", cctx), cctx + ".sections"),
              as_count(require(ch, "lanes", cctx), cctx + ".lanes"),
              as_string(require(ch, "label", cctx), cctx + ".label"),
              strings_from(require(ch, "state_labels", cctx), cctx + ".state_labels")};
    plan.parallel.channels.push_back(std::move(c));
  }
  plan.parallel.feedthrough = matrix_from_json(require(doc, "feedthrough", ctx), ctx + ".feedthrough");
  plan.parallel.total_order = as_count(require(doc, "total_order", ctx), ctx + ".total_order");
  plan.parallel.pruned_order = as_count(require(doc, "pruned_order", ctx), ctx + ".pruned_order");
  plan.parallel.spectrum_order =
      as_count(require(doc, "spectrum_order", ctx), ctx + ".spectrum_order");

  if (doc.contains("discretization")) {
    const json& disc = doc["discretization"];
    const std::string dctx = ctx + ".discretization";
    try {
      plan.rule = DerivativeRule::from_name(as_string(require(disc, "rule", dctx), dctx + ".rule"));
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, dctx + ": " + e.what());
    }
    plan.T = as_number(require(disc, "T", dctx), dctx + ".T");
    if (disc.contains("mesh")) {
      const json& mesh = disc["mesh"];
      MeshSystem ms;
      ms.Ad = matrix_from_json(require(mesh, "Ad", dctx + ".mesh"), dctx + ".mesh.Ad");
      ms.Md = matrix_from_json(require(mesh, "Md", dctx + ".mesh"), dctx + ".mesh.Md");
      ms.y_layout = strings_from(require(mesh, "y_layout", dctx + ".mesh"), dctx + ".mesh.y_layout");
      ms.u_layout = strings_from(require(mesh, "u_layout", dctx + ".mesh"), dctx + ".mesh.u_layout");
      ms.depth = as_count(require(mesh, "depth", dctx + ".mesh"), dctx + ".mesh.depth");
      plan.mesh = std::move(ms);
    }
  }
  return plan;
}

bool looks_like_plan(std::string_view text) {
  const json doc = json::parse(text.begin(), text.end(), nullptr, false);
  return doc.is_object() && doc.value("format", "") == "ltipar-plan";
}

void write_trace_csv(std::ostream& out, const Trace& trace, bool per_channel) {
  const std::size_t m = trace.outputs.size();
  out << "t";
  for (std::size_t q = 0; q < trace.inputs.size(); ++q) out << ",u" << q + 1;
  for (std::size_t p = 0; p < m; ++p) out << ",Y" << p + 1;
  const bool channels = per_channel && !trace.per_channel.empty();
  if (channels) {
    for (const auto& label : trace.channel_labels) {
      for (std::size_t p = 0; p < m; ++p) {
        out << ',' << label;
        if (m > 1) out << '.' << p + 1;
      }
    }
  }
  out << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
    out << buf;
  };
  for (std::size_t i = 0; i <= trace.steps; ++i) {
    put(static_cast<double>(i) * trace.T);
    for (const auto& u : trace.inputs) out << ',', put(u[i]);
    for (const auto& y : trace.outputs) out << ',', put(y[i]);
    if (channels) {
      for (const auto& ch : trace.per_channel) {
        for (const auto& y : ch) out << ',', put(y[i]);
      }
    }
    out << '\n';
  }
}

std::string bench_report_json(const BenchReport& report, const std::string& model_name) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json doc;
  doc["model"] = model_name;
  doc["steps"] = report.steps;
  doc["T"] = report.T;
  doc["hardware_threads"] = report.hardware_threads;
  doc["serial_seconds"] = report.serial_seconds ? json(*report.serial_seconds) : json(nullptr);
  json par = json::array();
  for (const auto& t : report.parallel) {
    par.push_back({{"workers", t.workers},
                   {"seconds", t.seconds},
                   {"speedup_percent", num(t.speedup_percent)}});
  }
  doc["parallel"] = std::move(par);
  json per = json::array();
  double channel_total = 0.0;
  for (std::size_t c = 0; c < report.per_channel_seconds.size(); ++c) {
    per.push_back({{"channel", report.channel_labels[c]}, {"seconds", report.per_channel_seconds[c]}});
    channel_total += report.per_channel_seconds[c];
  }
  doc["per_channel"] = std::move(per);
  doc["summation_seconds"] = report.summation_seconds;
  doc["breakdown_total_seconds"] = channel_total + report.summation_seconds;
  return doc.dump(2) + "\n";
}

std::string gnuplot_script(const std::string& csv_path, const Trace& trace) {
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set key autotitle columnhead\n"
    << "set xlabel 't, s'\n"
    << "plot ";
  const std::size_t first = 2 + trace.inputs.size();
  for (std::size_t p = 0; p < trace.outputs.size(); ++p) {
    if (p > 0) s << ", ";
    s << "'" << csv_path << "' using 1:" << first + p << " with lines";
  }
  s << "\npause -1\n";
  return s.str();
}

}  // namespace ltipar
