#pragma once

// Arithmetic expressions over [0,1]-valued variables, compiled to a graph of
// pulse-train circuits and evaluated by clocking every node once per bin.
//
// Each wire carries a stream of probability p and a scale exponent k; the
// value it represents is p * 2^k. Exact MUX addition halves its result, so
// it raises k by one. Operands of unequal scale are equalised by routing the
// lower-scale one through a MUX with a constant-0 stream (which halves it).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpc/circuits.hpp"
#include "rpc/core.hpp"

namespace rpc {

struct Expr {
  enum class Op { Const, Var, Add, Sub, Mul, Div };

  Op op = Op::Const;
  double value = 0.0;         // Const
  std::string name;           // Var
  std::vector<Expr> children; // Add/Sub/Div: 2, Mul: >= 2
  std::size_t position = 0;   // column of the node's first character

  static Expr constant(double v, std::size_t pos = 0);
  static Expr variable(std::string name, std::size_t pos = 0);
  static Expr binary(Op op, Expr lhs, Expr rhs, std::size_t pos = 0);
  static Expr product(std::vector<Expr> factors, std::size_t pos = 0);
};

/// Fully parenthesised rendering, e.g. "(a - (b / c))".
std::string to_string(const Expr& e);

/// expr   := term (('+' | '-') term)*
/// term   := factor (('*' | '/') factor)*
/// factor := decimal-literal | identifier | '(' expr ')'
///
/// Left-associative. A run of '*' becomes one n-ary product. Literals must
/// lie in [0,1]. Throws ParseError carrying the 0-based column.
Expr parse(std::string_view text);

/// Names of all variables, sorted and unique.
std::vector<std::string> variables(const Expr& e);

using Bindings = std::map<std::string, double>;

/// Real-number value of the expression (no clipping, no scaling).
double exact_value(const Expr& e, const Bindings& bindings);

enum class AdderVariant { Mux, Or };
enum class DividerVariant { Counter, Lfsr, Trff };
enum class SubtractorVariant { Counter, DivLfsr, DivTrff };

struct CompileOptions {
  AdderVariant adder = AdderVariant::Mux;
  DividerVariant divider = DividerVariant::Counter;
  SubtractorVariant subtractor = SubtractorVariant::Counter;
  unsigned divider_width = 0;     // 0 = default for the chosen circuit
  unsigned subtractor_width = 0;  // 0 = default for the chosen circuit
};

std::string_view variant_name(AdderVariant v);
std::string_view variant_name(DividerVariant v);
std::string_view variant_name(SubtractorVariant v);
AdderVariant parse_adder(std::string_view s);
DividerVariant parse_divider(std::string_view s);
SubtractorVariant parse_subtractor(std::string_view s);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Declared value range per variable; missing names default to [0,1].
using Ranges = std::map<std::string, Interval>;

struct NetNode {
  enum class Type { Variable, Constant, Circuit };

  Type type = Type::Constant;
  std::string label;
  std::string variable;      // Variable
  double constant = 0.0;     // Constant
  CircuitSpec spec;          // Circuit
  std::vector<std::size_t> inputs;
  unsigned scale = 0;        // represented value = stream probability * 2^scale
  Interval stream{0.0, 1.0}; // static bounds on the stream probability
};

/// Circuit graph in topological order; node ids are indices.
class Netlist {
 public:
  std::size_t add_variable(const std::string& name, Interval range = {});
  std::size_t add_constant(double p);
  /// Appends a circuit; inputs must already exist. Stream bounds come from
  /// the inputs and the circuit's transfer function.
  std::size_t add_circuit(const CircuitSpec& spec, std::vector<std::size_t> inputs,
                          unsigned scale, std::string label);
  void set_output(std::size_t node);

  const std::vector<NetNode>& nodes() const noexcept { return nodes_; }
  const NetNode& node(std::size_t id) const { return nodes_.at(id); }
  std::size_t output() const noexcept { return output_; }
  unsigned output_scale() const { return nodes_.at(output_).scale; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  void warn(std::string message) { warnings_.push_back(std::move(message)); }
  /// Declared range of each variable referenced by the graph.
  const Ranges& ranges() const noexcept { return ranges_; }
  /// Sum of the automatic warmups of all feedback circuits.
  std::uint64_t warmup() const;

 private:
  std::vector<NetNode> nodes_;
  std::size_t output_ = 0;
  std::vector<std::string> warnings_;
  Ranges ranges_;
};

/// Maps every operator onto one circuit and tracks scales. Throws
/// CompileError when scales cannot be reconciled or when bounds show a
/// divider's stream quotient may exceed 1.
Netlist compile(const Expr& ast, const CompileOptions& options = {}, const Ranges& ranges = {});

struct NodeRate {
  std::string label;
  double rate = 0.0;
  unsigned scale = 0;
};

struct EvalResult {
  double estimate = 0.0;      // output stream rate
  unsigned scale = 0;
  double scaled_value = 0.0;  // estimate * 2^scale
  std::vector<NodeRate> per_node;
};

/// Clocks all nodes together. Variable occurrences draw from independent
/// sources. Throws ConfigError for an unbound variable and DomainError for a
/// binding outside [0,1] or its declared range.
EvalResult evaluate(const Netlist& netlist, const Bindings& bindings,
                    const SimulationConfig& config);

/// Value the circuits would produce with ideal transfer functions
/// (clipped divide/subtract), already multiplied by 2^scale.
double ideal_value(const Netlist& netlist, const Bindings& bindings);

}  // namespace rpc
