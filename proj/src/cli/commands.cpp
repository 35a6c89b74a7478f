#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rpc/cli.hpp"

namespace rpc::cli {

using nlohmann::ordered_json;

namespace {

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double round_significant(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::stod(buf);
}

ordered_json histogram_json(const RunHistogram& h) {
  ordered_json counts = ordered_json::array();
  for (const auto& [len, n] : h.counts) counts.push_back({len, n});
  return {{"runs", h.runs}, {"longest", h.longest}, {"counts", counts}};
}

ordered_json chi2_json(const std::optional<RunChiSquare>& c) {
  if (!c) return nullptr;
  return {{"statistic", c->statistic},
          {"bins", c->bins},
          {"dof", c->dof},
          {"critical_999", c->critical},
          {"exceeds", c->exceeds()}};
}

}  // namespace

std::pair<std::string, double> parse_binding(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw DomainError("binding '" + text + "' is not of the form name=value");
  }
  std::string name = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) throw DomainError("binding '" + text + "' has a non-numeric value");
  return {std::move(name), Probability(v).value()};
}

ordered_json cmd_eval(const EvalRequest& req, const RunManifest& manifest) {
  const Expr ast = parse(req.expression);
  Ranges ranges;
  for (const auto& name : variables(ast)) {
    auto it = req.bindings.find(name);
    if (it == req.bindings.end()) throw ConfigError("unbound variable '" + name + "'");
    ranges[name] = {it->second, it->second};
  }
  const Netlist net = compile(ast, req.options, ranges);
  const EvalResult res = evaluate(net, req.bindings, req.config);

  ordered_json nodes = ordered_json::array();
  for (std::size_t i = 0; i < res.per_node.size(); ++i) {
    const auto& n = res.per_node[i];
    nodes.push_back({{"node", i}, {"label", n.label}, {"rate", n.rate}, {"scale_exponent", n.scale}});
  }
  ordered_json bindings = ordered_json::object();
  for (const auto& [k, v] : req.bindings) bindings[k] = v;

  ordered_json out;
  out["expression"] = req.expression;
  out["bindings"] = bindings;
  out["options"] = {{"adder", variant_name(req.options.adder)},
                    {"divider", variant_name(req.options.divider)},
                    {"subtractor", variant_name(req.options.subtractor)},
                    {"divider_bits", req.options.divider_width},
                    {"subtractor_bits", req.options.subtractor_width}};
  out["estimate"] = res.estimate;
  out["scale_exponent"] = res.scale;
  out["scaled_value"] = res.scaled_value;
  out["ideal_value"] = ideal_value(net, req.bindings);
  out["per_node_rates"] = nodes;
  out["warnings"] = net.warnings();
  out["seed"] = req.config.seed;
  out["cycles"] = req.config.cycles;
  out["manifest"] = manifest.to_json();
  return out;
}

SweepResult cmd_sweep(const SweepRequest& req, const RunManifest& manifest, std::ostream& out) {
  const auto grid = grid_values(req.steps);
  SweepResult res = sweep(req.spec, grid, req.config, req.threads);
  out << manifest.comment_block();
  out << "p0,p1,estimate,ideal,abs_error\n";
  for (const auto& c : res.cells) {
    out << fixed6(c.p0) << ',' << fixed6(c.p1) << ',' << fixed6(c.estimate) << ','
        << fixed6(c.ideal) << ',' << fixed6(c.abs_error) << '\n';
  }
  return res;
}

ordered_json cmd_randomness(const RandomnessRequest& req, const RunManifest& manifest) {
  const Probability in[2] = {Probability(req.p0), Probability(req.p1)};
  const Bitstream stream = run_circuit(req.spec, in, req.config);
  const RandomnessReport rep = randomness_report(stream, req.max_lag);

  ordered_json out;
  out["kind"] = kind_name(req.spec.kind);
  out["bits"] = is_feedback(req.spec.kind) ? req.spec.counter_width() : 0;
  out["p0"] = req.p0;
  out["p1"] = req.p1;
  out["length"] = rep.length;
  out["rate"] = rep.rate;
  out["autocorrelation"] = rep.autocorrelation;
  out["iid_bound"] = rep.iid_bound();
  out["longest_run"] = rep.longest_run;
  out["one_runs"] = histogram_json(rep.one_runs);
  out["zero_runs"] = histogram_json(rep.zero_runs);
  out["zero_run_chi_square"] = chi2_json(rep.zero_run_chi2);
  out["one_run_chi_square"] = chi2_json(rep.one_run_chi2);
  out["degenerate"] = rep.degenerate;
  if (rep.degenerate) out["warning"] = "degenerate stream: output rate is 0 or 1";
  out["seed"] = req.config.seed;
  out["cycles"] = req.config.cycles;
  out["manifest"] = manifest.to_json();
  return out;
}

ordered_json cmd_oracle(CircuitKind kind, unsigned width, double p0, double p1,
                        const RunManifest& manifest) {
  const ChainSpec chain = build_chain(kind, width, Probability(p0), Probability(p1));
  ordered_json out;
  out["kind"] = kind_name(kind);
  out["bits"] = width;
  out["p0"] = p0;
  out["p1"] = p1;
  out["stationary_rate"] = round_significant(stationary_output(chain), 12);
  out["manifest"] = manifest.to_json();
  return out;
}

namespace {

struct CommonFlags {
  std::uint64_t seed = 1;
  std::uint64_t cycles = std::uint64_t{1} << 20;
  std::string warmup = "auto";
  unsigned threads = 0;

  SimulationConfig config() const {
    SimulationConfig c;
    c.seed = seed;
    c.cycles = cycles;
    if (warmup != "auto") {
      std::size_t used = 0;
      unsigned long long w = 0;
      try {
        w = std::stoull(warmup, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != warmup.size()) throw DomainError("--warmup must be 'auto' or a bin count");
      c.warmup = w;
    }
    c.validate();
    return c;
  }

  void describe(RunManifest& m) const {
    m.add("cycles", std::to_string(cycles));
    m.add("warmup", warmup);
  }
};

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << text;
  if (!file.flush()) throw IoError("failed writing '" + path + "'");
}

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random pulse computing simulator"};
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config", "", "key=value file of option defaults (flags take precedence)");
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags common;
  app.add_option("--seed", common.seed, "master seed")->capture_default_str();
  app.add_option("--cycles", common.cycles, "measured clock bins")->capture_default_str();
  app.add_option("--warmup", common.warmup, "discarded bins before measuring, or 'auto'")
      ->capture_default_str();
  app.add_option("--threads", common.threads, "sweep worker threads (0 = all cores)");

  // eval
  auto* eval = app.add_subcommand("eval", "compile and simulate an expression");
  std::string expr;
  std::vector<std::string> binding_args;
  std::string adder = "mux", divider = "counter", subtractor = "counter";
  unsigned div_bits = 0, sub_bits = 0;
  std::string eval_out;
  eval->add_option("expression", expr, "arithmetic expression")->required();
  eval->add_option("bindings", binding_args, "variable bindings name=value");
  eval->add_option("--adder", adder, "mux|or")->capture_default_str();
  eval->add_option("--divider", divider, "counter|lfsr|trff")->capture_default_str();
  eval->add_option("--subtractor", subtractor, "counter|lfsr|trff")->capture_default_str();
  eval->add_option("--div-bits", div_bits, "divider counter width (default per circuit)");
  eval->add_option("--sub-bits", sub_bits, "subtractor counter width (default per circuit)");
  eval->add_option("--out", eval_out, "output file (default stdout)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "transfer function and error map as CSV");
  std::string sweep_kind, sweep_out;
  unsigned sweep_bits = 0, steps = 19;
  sweep_cmd->add_option("kind", sweep_kind, "circuit kind")->required();
  sweep_cmd->add_option("--bits", sweep_bits, "counter width (default per circuit)");
  sweep_cmd->add_option("--steps", steps, "grid points per axis")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "CSV file (default stdout)");

  // randomness
  auto* rnd = app.add_subcommand("randomness", "randomness statistics of a circuit output");
  std::string rnd_kind, rnd_out;
  double rnd_p0 = 0.0, rnd_p1 = 0.0;
  unsigned rnd_bits = 0, max_lag = 8;
  rnd->add_option("kind", rnd_kind, "circuit kind")->required();
  rnd->add_option("p0", rnd_p0, "first input probability")->required();
  rnd->add_option("p1", rnd_p1, "second input probability")->required();
  rnd->add_option("--bits", rnd_bits, "counter width (default per circuit)");
  rnd->add_option("--max-lag", max_lag, "largest autocorrelation lag")->capture_default_str();
  rnd->add_option("--out", rnd_out, "output file (default stdout)");

  // oracle
  auto* orc = app.add_subcommand("oracle", "exact stationary output rate of a counter circuit");
  std::string orc_kind, orc_out;
  unsigned orc_bits = 0;
  double orc_p0 = 0.0, orc_p1 = 0.0;
  orc->add_option("kind", orc_kind, "circuit kind")->required();
  orc->add_option("bits", orc_bits, "counter width")->required();
  orc->add_option("p0", orc_p0, "first input probability")->required();
  orc->add_option("p1", orc_p1, "second input probability")->required();
  orc->add_option("--out", orc_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (eval->parsed()) {
      EvalRequest req;
      req.expression = expr;
      for (const auto& b : binding_args) req.bindings.insert(parse_binding(b));
      req.options.adder = parse_adder(adder);
      req.options.divider = parse_divider(divider);
      req.options.subtractor = parse_subtractor(subtractor);
      req.options.divider_width = div_bits;
      req.options.subtractor_width = sub_bits;
      req.config = common.config();
      auto m = RunManifest::now("eval", common.seed);
      m.add("expression", expr);
      for (const auto& b : binding_args) m.add("bind", b);
      m.add("adder", adder);
      m.add("divider", divider);
      m.add("subtractor", subtractor);
      m.add("div_bits", std::to_string(div_bits));
      m.add("sub_bits", std::to_string(sub_bits));
      common.describe(m);
      emit(json_text(cmd_eval(req, m)), eval_out, out);
    } else if (sweep_cmd->parsed()) {
      SweepRequest req;
      req.spec.kind = parse_kind(sweep_kind);
      req.spec.width = sweep_bits;
      req.steps = steps;
      req.config = common.config();
      req.threads = common.threads;
      req.spec.validate();
      auto m = RunManifest::now("sweep", common.seed);
      m.add("kind", sweep_kind);
      m.add("bits", std::to_string(is_feedback(req.spec.kind) ? req.spec.counter_width() : 0));
      m.add("steps", std::to_string(steps));
      common.describe(m);
      if (sweep_out.empty() || sweep_out == "-") {
        cmd_sweep(req, m, out);
      } else {
        std::ofstream file(sweep_out, std::ios::binary);
        if (!file) throw IoError("cannot open '" + sweep_out + "' for writing");
        cmd_sweep(req, m, file);
        if (!file.flush()) throw IoError("failed writing '" + sweep_out + "'");
      }
    } else if (rnd->parsed()) {
      RandomnessRequest req;
      req.spec.kind = parse_kind(rnd_kind);
      req.spec.width = rnd_bits;
      req.p0 = rnd_p0;
      req.p1 = rnd_p1;
      req.max_lag = max_lag;
      req.config = common.config();
      auto m = RunManifest::now("randomness", common.seed);
      m.add("kind", rnd_kind);
      m.add("bits", std::to_string(is_feedback(req.spec.kind) ? req.spec.counter_width() : 0));
      m.add("p0", std::to_string(rnd_p0));
      m.add("p1", std::to_string(rnd_p1));
      m.add("max_lag", std::to_string(max_lag));
      common.describe(m);
      const auto report = cmd_randomness(req, m);
      if (report.contains("warning")) err << "warning: " << report["warning"].get<std::string>() << '\n';
      emit(json_text(report), rnd_out, out);
    } else if (orc->parsed()) {
      const CircuitKind kind = parse_kind(orc_kind);
      auto m = RunManifest::now("oracle", common.seed);
      m.add("kind", orc_kind);
      m.add("bits", std::to_string(orc_bits));
      m.add("p0", std::to_string(orc_p0));
      m.add("p1", std::to_string(orc_p1));
      emit(json_text(cmd_oracle(kind, orc_bits, orc_p0, orc_p1, m)), orc_out, out);
    }
  } catch (const CompileError& e) {
    err << "error: " << e.what() << '\n';
    return kCompile;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

}  // namespace rpc::cli
