#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "rpc/netlist.hpp"

namespace rpc {

namespace {

constexpr std::uint64_t kNetCircuitStreamBase = std::uint64_t{1} << 32;

Interval stream_bounds(CircuitKind kind, const std::vector<Interval>& in) {
  switch (kind) {
    case CircuitKind::Mul: {
      Interval out{1.0, 1.0};
      for (const auto& i : in) {
        out.lo *= i.lo;
        out.hi *= i.hi;
      }
      return out;
    }
    case CircuitKind::OrAdd: {
      double none_lo = 1.0, none_hi = 1.0;
      for (const auto& i : in) {
        none_lo *= 1.0 - i.lo;
        none_hi *= 1.0 - i.hi;
      }
      return {1.0 - none_lo, 1.0 - none_hi};
    }
    case CircuitKind::MuxAdd:
      return {0.5 * (in[0].lo + in[1].lo), 0.5 * (in[0].hi + in[1].hi)};
    case CircuitKind::DivLfsr:
    case CircuitKind::DivTrff:
    case CircuitKind::DivCounter: {
      const double lo = in[1].hi > 0.0 ? in[0].lo / in[1].hi : 0.0;
      const double hi = in[1].lo > 0.0 ? in[0].hi / in[1].lo : (in[0].hi > 0.0 ? 1.0 : 0.0);
      return {std::min(lo, 1.0), std::min(hi, 1.0)};
    }
    case CircuitKind::SubDivLfsr:
    case CircuitKind::SubDivTrff:
    case CircuitKind::SubCounter:
      // inputs are (subtrahend, minuend)
      return {std::max(0.0, in[1].lo - in[0].hi), std::max(0.0, in[1].hi - in[0].lo)};
    case CircuitKind::Comparator:
      return {0.0, 1.0};
  }
  return {0.0, 1.0};
}

CircuitKind divider_kind(DividerVariant v) {
  switch (v) {
    case DividerVariant::Lfsr:
      return CircuitKind::DivLfsr;
    case DividerVariant::Trff:
      return CircuitKind::DivTrff;
    case DividerVariant::Counter:
      break;
  }
  return CircuitKind::DivCounter;
}

CircuitKind subtractor_kind(SubtractorVariant v) {
  switch (v) {
    case SubtractorVariant::DivLfsr:
      return CircuitKind::SubDivLfsr;
    case SubtractorVariant::DivTrff:
      return CircuitKind::SubDivTrff;
    case SubtractorVariant::Counter:
      break;
  }
  return CircuitKind::SubCounter;
}

class Compiler {
 public:
  Compiler(const CompileOptions& options, const Ranges& ranges) : options_(options), ranges_(ranges) {}

  Netlist run(const Expr& ast) {
    const std::size_t out = build(ast);
    net_.set_output(out);
    return std::move(net_);
  }

 private:
  std::size_t build(const Expr& e) {
    switch (e.op) {
      case Expr::Op::Const:
        return net_.add_constant(e.value);
      case Expr::Op::Var: {
        auto it = ranges_.find(e.name);
        return net_.add_variable(e.name, it == ranges_.end() ? Interval{} : it->second);
      }
      case Expr::Op::Mul:
        return build_mul(e);
      case Expr::Op::Add:
        return build_add(e);
      case Expr::Op::Sub:
        return build_sub(e);
      case Expr::Op::Div:
        return build_div(e);
    }
    throw CompileError("unknown expression node", to_string(e));
  }

  std::size_t build_mul(const Expr& e) {
    std::vector<std::size_t> in;
    unsigned scale = 0;
    for (const auto& c : e.children) {
      in.push_back(build(c));
      scale += net_.node(in.back()).scale;
    }
    CircuitSpec spec{CircuitKind::Mul, static_cast<unsigned>(in.size()), 0, std::nullopt};
    return net_.add_circuit(spec, std::move(in), scale, to_string(e));
  }

  std::size_t build_add(const Expr& e) {
    std::size_t l = build(e.children[0]);
    std::size_t r = build(e.children[1]);
    const std::string label = to_string(e);
    if (options_.adder == AdderVariant::Or) {
      if (net_.node(l).scale != net_.node(r).scale) {
        throw CompileError("OR adder operands have different scales", label);
      }
      net_.warn("OR adder computes p0 + p1 - p0 p1, an approximate sum: " + label);
      CircuitSpec spec{CircuitKind::OrAdd, 2, 0, std::nullopt};
      return net_.add_circuit(spec, {l, r}, net_.node(l).scale, label);
    }
    if (e.children[0].op == Expr::Op::Add || e.children[1].op == Expr::Op::Add) {
      net_.warn("MUX addition is not associative; the grouping of " + label +
                " sets how often each operand is halved");
    }
    equalize(l, r);
    CircuitSpec spec{CircuitKind::MuxAdd, 2, 0, std::nullopt};
    return net_.add_circuit(spec, {l, r}, net_.node(l).scale + 1, label);
  }

  std::size_t build_sub(const Expr& e) {
    std::size_t l = build(e.children[0]);
    std::size_t r = build(e.children[1]);
    const std::string label = to_string(e);
    equalize(l, r);
    if (net_.node(l).stream.lo < net_.node(r).stream.hi) {
      net_.warn("difference may be negative and clip at 0: " + label);
    }
    CircuitSpec spec{subtractor_kind(options_.subtractor), 2, options_.subtractor_width, std::nullopt};
    // The circuit computes p1 - p0: minuend on p1, subtrahend on p0.
    return net_.add_circuit(spec, {r, l}, net_.node(l).scale, label);
  }

  std::size_t build_div(const Expr& e) {
    const std::size_t num = build(e.children[0]);
    const std::size_t den = build(e.children[1]);
    const std::string label = to_string(e);
    const auto& n = net_.node(num);
    const auto& d = net_.node(den);
    if (n.scale < d.scale) {
      throw CompileError("negative divide scale (" + std::to_string(n.scale) + " - " +
                             std::to_string(d.scale) + ")",
                         label);
    }
    if (n.stream.hi > d.stream.lo) {
      throw CompileError("divider quotient may exceed 1 over the declared ranges", label);
    }
    CircuitSpec spec{divider_kind(options_.divider), 2, options_.divider_width, std::nullopt};
    return net_.add_circuit(spec, {num, den}, n.scale - d.scale, label);
  }

  // Halve the lower-scale operand until both scales agree.
  void equalize(std::size_t& l, std::size_t& r) {
    while (net_.node(l).scale != net_.node(r).scale) {
      std::size_t& low = net_.node(l).scale < net_.node(r).scale ? l : r;
      low = halve(low);
    }
  }

  std::size_t halve(std::size_t id) {
    const std::size_t zero = net_.add_constant(0.0);
    CircuitSpec spec{CircuitKind::MuxAdd, 2, 0, std::nullopt};
    const std::string label = "half(" + net_.node(id).label + ")";
    return net_.add_circuit(spec, {id, zero}, net_.node(id).scale + 1, label);
  }

  const CompileOptions& options_;
  const Ranges& ranges_;
  Netlist net_;
};

}  // namespace

std::string_view variant_name(AdderVariant v) { return v == AdderVariant::Mux ? "mux" : "or"; }

std::string_view variant_name(DividerVariant v) {
  switch (v) {
    case DividerVariant::Lfsr:
      return "lfsr";
    case DividerVariant::Trff:
      return "trff";
    case DividerVariant::Counter:
      break;
  }
  return "counter";
}

std::string_view variant_name(SubtractorVariant v) {
  switch (v) {
    case SubtractorVariant::DivLfsr:
      return "lfsr";
    case SubtractorVariant::DivTrff:
      return "trff";
    case SubtractorVariant::Counter:
      break;
  }
  return "counter";
}

AdderVariant parse_adder(std::string_view s) {
  if (s == "mux") return AdderVariant::Mux;
  if (s == "or") return AdderVariant::Or;
  throw DomainError("unknown adder '" + std::string(s) + "' (expected mux|or)");
}

DividerVariant parse_divider(std::string_view s) {
  if (s == "counter") return DividerVariant::Counter;
  if (s == "lfsr") return DividerVariant::Lfsr;
  if (s == "trff") return DividerVariant::Trff;
  throw DomainError("unknown divider '" + std::string(s) + "' (expected counter|lfsr|trff)");
}

SubtractorVariant parse_subtractor(std::string_view s) {
  if (s == "counter") return SubtractorVariant::Counter;
  if (s == "lfsr") return SubtractorVariant::DivLfsr;
  if (s == "trff") return SubtractorVariant::DivTrff;
  throw DomainError("unknown subtractor '" + std::string(s) + "' (expected counter|lfsr|trff)");
}

std::size_t Netlist::add_variable(const std::string& name, Interval range) {
  if (!(range.lo >= 0.0 && range.lo <= range.hi && range.hi <= 1.0)) {
    throw DomainError("declared range of '" + name + "' must satisfy 0 <= lo <= hi <= 1");
  }
  ranges_[name] = range;
  NetNode n;
  n.type = NetNode::Type::Variable;
  n.label = name;
  n.variable = name;
  n.stream = range;
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

std::size_t Netlist::add_constant(double p) {
  NetNode n;
  n.type = NetNode::Type::Constant;
  n.constant = Probability(p);
  n.label = to_string(Expr::constant(p));
  n.stream = {p, p};
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

std::size_t Netlist::add_circuit(const CircuitSpec& spec, std::vector<std::size_t> inputs,
                                 unsigned scale, std::string label) {
  spec.validate();
  if (inputs.size() != spec.arity()) throw ConfigError("circuit input count mismatch: " + label);
  std::vector<Interval> bounds;
  for (std::size_t id : inputs) {
    if (id >= nodes_.size()) throw ConfigError("circuit input refers to a later node: " + label);
    bounds.push_back(nodes_[id].stream);
  }
  NetNode n;
  n.type = NetNode::Type::Circuit;
  n.label = std::string(kind_name(spec.kind)) + " " + label;
  n.spec = spec;
  n.inputs = std::move(inputs);
  n.scale = scale;
  n.stream = stream_bounds(spec.kind, bounds);
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

void Netlist::set_output(std::size_t node) {
  if (node >= nodes_.size()) throw ConfigError("output node does not exist");
  output_ = node;
}

std::uint64_t Netlist::warmup() const {
  std::uint64_t total = 0;
  for (const auto& n : nodes_) {
    if (n.type == NetNode::Type::Circuit) total += n.spec.warmup();
  }
  return total;
}

Netlist compile(const Expr& ast, const CompileOptions& options, const Ranges& ranges) {
  return Compiler(options, ranges).run(ast);
}

namespace {

double bound_value(const NetNode& n, const Bindings& bindings) {
  auto it = bindings.find(n.variable);
  if (it == bindings.end()) throw ConfigError("unbound variable '" + n.variable + "'");
  const double v = Probability(it->second);
  constexpr double eps = 1e-12;
  if (v < n.stream.lo - eps || v > n.stream.hi + eps) {
    throw DomainError("binding " + n.variable + "=" + std::to_string(v) +
                      " outside its declared range");
  }
  return v;
}

}  // namespace

EvalResult evaluate(const Netlist& netlist, const Bindings& bindings, const SimulationConfig& config) {
  config.validate();
  const auto& nodes = netlist.nodes();
  if (nodes.empty()) throw ConfigError("empty netlist");

  struct SourceSlot {
    std::size_t id;
    BernoulliSource source;
  };
  struct CircuitSlot {
    std::size_t id;
    Circuit circuit;
  };
  std::vector<SourceSlot> sources;
  std::vector<CircuitSlot> circuits;
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const auto& n = nodes[id];
    switch (n.type) {
      case NetNode::Type::Variable:
        sources.push_back({id, BernoulliSource(Probability(bound_value(n, bindings)),
                                               Rng::derive(config.seed, id))});
        break;
      case NetNode::Type::Constant:
        sources.push_back({id, BernoulliSource(Probability(n.constant), Rng::derive(config.seed, id))});
        break;
      case NetNode::Type::Circuit:
        circuits.push_back({id, Circuit(n.spec, Rng::derive(config.seed, kNetCircuitStreamBase + id))});
        break;
    }
  }

  const std::uint64_t warmup = config.warmup.value_or(netlist.warmup());
  const std::uint64_t total = warmup + config.cycles;
  std::vector<std::uint8_t> bits(nodes.size(), 0);
  std::vector<std::uint64_t> ones(nodes.size(), 0);
  std::array<Bit, CircuitSpec::kMaxInputs> in{};

  for (std::uint64_t t = 0; t < total; ++t) {
    for (auto& s : sources) bits[s.id] = s.source.step();
    for (auto& c : circuits) {
      const auto& inputs = nodes[c.id].inputs;
      for (std::size_t i = 0; i < inputs.size(); ++i) in[i] = bits[inputs[i]] != 0;
      bits[c.id] = c.circuit.step(std::span<const Bit>(in.data(), inputs.size()));
    }
    if (t >= warmup) {
      for (std::size_t id = 0; id < nodes.size(); ++id) ones[id] += bits[id];
    }
  }

  EvalResult result;
  const double m = static_cast<double>(config.cycles);
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    result.per_node.push_back({nodes[id].label, static_cast<double>(ones[id]) / m, nodes[id].scale});
  }
  result.estimate = result.per_node[netlist.output()].rate;
  result.scale = netlist.output_scale();
  result.scaled_value = std::ldexp(result.estimate, static_cast<int>(result.scale));
  return result;
}

double ideal_value(const Netlist& netlist, const Bindings& bindings) {
  const auto& nodes = netlist.nodes();
  std::vector<double> p(nodes.size(), 0.0);
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const auto& n = nodes[id];
    switch (n.type) {
      case NetNode::Type::Variable:
        p[id] = bound_value(n, bindings);
        break;
      case NetNode::Type::Constant:
        p[id] = n.constant;
        break;
      case NetNode::Type::Circuit: {
        std::vector<double> in;
        for (std::size_t src : n.inputs) in.push_back(p[src]);
        p[id] = ideal_output(n.spec.kind, in);
        break;
      }
    }
  }
  return std::ldexp(p[netlist.output()], static_cast<int>(netlist.output_scale()));
}

}  // namespace rpc
