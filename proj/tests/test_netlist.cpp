#include <cmath>

#include "doctest.h"
#include "expr_gen.hpp"
#include "rpc/errors.hpp"
#include "rpc/netlist.hpp"

using namespace rpc;

namespace {

std::size_t error_position(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.position();
  }
  FAIL("expected a parse error for " << text);
  return 0;
}

bool has_warning(const Netlist& net, const std::string& fragment) {
  for (const auto& w : net.warnings()) {
    if (w.find(fragment) != std::string::npos) return true;
  }
  return false;
}

std::size_t count_kind(const Netlist& net, CircuitKind kind) {
  std::size_t n = 0;
  for (const auto& node : net.nodes()) n += node.type == NetNode::Type::Circuit && node.spec.kind == kind;
  return n;
}

SimulationConfig cycles(std::uint64_t m) {
  SimulationConfig c;
  c.cycles = m;
  return c;
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(to_string(parse("a+b*c")) == "(a + (b * c))");
  CHECK(to_string(parse("a-b-c")) == "((a - b) - c)");
  CHECK(to_string(parse("a/b/c")) == "((a / b) / c)");
  CHECK(to_string(parse("(a+b)*c")) == "((a + b) * c)");
  CHECK(to_string(parse("  x  ")) == "x");
  CHECK(to_string(parse("0.25*x_1")) == "(0.25 * x_1)");
}

TEST_CASE("a run of products is one n-ary node") {
  const Expr e = parse("a*b*c*d");
  CHECK(e.op == Expr::Op::Mul);
  CHECK(e.children.size() == 4);
  const Expr f = parse("a*b/c*d");
  CHECK(f.op == Expr::Op::Mul);
  CHECK(f.children.size() == 2);
  CHECK(f.children[0].op == Expr::Op::Div);
}

TEST_CASE("syntax errors carry the column") {
  CHECK(error_position("x+") == 2);
  CHECK(error_position("") == 0);
  CHECK(error_position("a b") == 2);
  CHECK(error_position("(a+b") == 4);
  CHECK(error_position("x + @") == 4);
  CHECK(error_position("x + 1.5") == 4);
  CHECK(error_position("2*x") == 0);
  CHECK(error_position(".") == 0);
  CHECK_THROWS_WITH(parse("x+"), doctest::Contains("position 2"));
}

TEST_CASE("literals at the interval ends are accepted") {
  CHECK(parse("1").value == 1.0);
  CHECK(parse("0.").value == 0.0);
  CHECK(parse(".5").value == 0.5);
}

TEST_CASE("variables and exact values") {
  const Expr e = parse("b*a + a/c - 0.5");
  CHECK(variables(e) == std::vector<std::string>{"a", "b", "c"});
  const Bindings b{{"a", 0.5}, {"b", 0.4}, {"c", 0.25}};
  CHECK(exact_value(e, b) == doctest::Approx(0.2 + 2.0 - 0.5));
  CHECK_THROWS_AS(exact_value(e, Bindings{{"a", 0.5}}), ConfigError);
}

TEST_CASE("variant names round-trip") {
  for (auto v : {AdderVariant::Mux, AdderVariant::Or}) CHECK(parse_adder(variant_name(v)) == v);
  for (auto v : {DividerVariant::Counter, DividerVariant::Lfsr, DividerVariant::Trff}) {
    CHECK(parse_divider(variant_name(v)) == v);
  }
  for (auto v : {SubtractorVariant::Counter, SubtractorVariant::DivLfsr, SubtractorVariant::DivTrff}) {
    CHECK(parse_subtractor(variant_name(v)) == v);
  }
  CHECK_THROWS_AS(parse_adder("xor"), DomainError);
}

TEST_CASE("scale bookkeeping") {
  CHECK(compile(parse("x*y")).output_scale() == 0);
  CHECK(compile(parse("x+y")).output_scale() == 1);
  CHECK(compile(parse("(x+y)*(z+w)")).output_scale() == 2);
  CHECK(compile(parse("x*(y+z)")).output_scale() == 1);

  // unequal scales: z is halved once before the outer adder
  const Netlist net = compile(parse("(x+y)+z"));
  CHECK(net.output_scale() == 2);
  CHECK(count_kind(net, CircuitKind::MuxAdd) == 3);
  CHECK(has_warning(net, "not associative"));
}

TEST_CASE("or adder keeps scale and is flagged approximate") {
  CompileOptions opts;
  opts.adder = AdderVariant::Or;
  const Netlist net = compile(parse("x+y+z"), opts);
  CHECK(net.output_scale() == 0);
  CHECK(count_kind(net, CircuitKind::OrAdd) == 2);
  CHECK(has_warning(net, "approximate"));
}

TEST_CASE("divide scale and range errors name the node") {
  try {
    compile(parse("x/(y+z)"));
    FAIL("expected a compile error");
  } catch (const CompileError& e) {
    CHECK(e.node() == "(x / (y + z))");
    CHECK(std::string(e.what()).find("negative divide scale") != std::string::npos);
  }
  CHECK_THROWS_AS(compile(parse("x/y")), CompileError);
  const Ranges ok{{"x", {0.0, 0.3}}, {"y", {0.5, 1.0}}};
  CHECK(compile(parse("x/y"), {}, ok).output_scale() == 0);
  // (x+y)/z has scale 1 and stream (x+y)/2, which may exceed z
  const Ranges tight{{"x", {0.5, 0.6}}, {"y", {0.5, 0.6}}, {"z", {0.5, 0.55}}};
  CHECK_THROWS_AS(compile(parse("(x+y)/z"), {}, tight), CompileError);
  const Ranges loose{{"x", {0.1, 0.2}}, {"y", {0.1, 0.2}}, {"z", {0.5, 0.55}}};
  CHECK(compile(parse("(x+y)/z"), {}, loose).output_scale() == 1);
}

TEST_CASE("subtraction warns only when it may clip") {
  CHECK(has_warning(compile(parse("x-y")), "clip"));
  const Ranges r{{"x", {0.6, 1.0}}, {"y", {0.0, 0.5}}};
  CHECK_FALSE(has_warning(compile(parse("x-y"), {}, r), "clip"));
}

TEST_CASE("compile options choose the circuits") {
  CompileOptions opts;
  opts.divider = DividerVariant::Lfsr;
  opts.divider_width = 6;
  opts.subtractor = SubtractorVariant::DivTrff;
  const Ranges r{{"x", {0.0, 0.2}}, {"y", {0.5, 1.0}}};
  const Netlist net = compile(parse("y - x/y"), opts, r);
  bool seen_div = false, seen_sub = false;
  for (const auto& n : net.nodes()) {
    if (n.type != NetNode::Type::Circuit) continue;
    if (n.spec.kind == CircuitKind::DivLfsr) {
      seen_div = true;
      CHECK(n.spec.counter_width() == 6);
    }
    seen_sub |= n.spec.kind == CircuitKind::SubDivTrff;
  }
  CHECK(seen_div);
  CHECK(seen_sub);
  CHECK(net.warmup() == feedback_warmup(6) + feedback_warmup(8));
}

TEST_CASE("evaluate simple expressions") {
  const auto mul = evaluate(compile(parse("x*y")), {{"x", 0.5}, {"y", 0.5}}, cycles(1 << 20));
  CHECK(std::abs(mul.scaled_value - 0.25) < 4 * std::sqrt(0.1875 / (1 << 20)));

  const auto add = evaluate(compile(parse("x+y")), {{"x", 0.4}, {"y", 0.8}}, cycles(1 << 20));
  CHECK(add.scale == 1);
  CHECK(std::abs(add.scaled_value - 1.2) < 2 * 4 * std::sqrt(0.24 / (1 << 20)));
  CHECK(add.per_node.size() == 3);
}

TEST_CASE("evaluation is reproducible and honours bindings") {
  const Netlist net = compile(parse("x*y + x"));
  const Bindings b{{"x", 0.3}, {"y", 0.9}};
  const auto a = evaluate(net, b, cycles(20000));
  const auto c = evaluate(net, b, cycles(20000));
  CHECK(a.estimate == c.estimate);
  CHECK_THROWS_AS(evaluate(net, {{"x", 0.3}}, cycles(100)), ConfigError);
  CHECK_THROWS_AS(evaluate(net, {{"x", 1.3}, {"y", 0.2}}, cycles(100)), DomainError);

  const Netlist ranged = compile(parse("x"), {}, {{"x", {0.0, 0.5}}});
  CHECK_THROWS_AS(evaluate(ranged, {{"x", 0.7}}, cycles(100)), DomainError);
}

TEST_CASE("repeated variables use independent sources") {
  // with a shared source x*x would be x; independent copies give x^2
  const auto r = evaluate(compile(parse("x*x")), {{"x", 0.5}}, cycles(1 << 20));
  CHECK(std::abs(r.estimate - 0.25) < 0.003);
}

TEST_CASE("hand-built mux chains are not associative") {
  auto chain = [](bool left_first) {
    Netlist net;
    const auto a = net.add_constant(0.8), b = net.add_constant(0.4), c = net.add_constant(0.2);
    const CircuitSpec mux{CircuitKind::MuxAdd};
    std::size_t out;
    if (left_first) {
      out = net.add_circuit(mux, {net.add_circuit(mux, {a, b}, 1, "ab"), c}, 2, "ab_c");
    } else {
      out = net.add_circuit(mux, {a, net.add_circuit(mux, {b, c}, 1, "bc")}, 2, "a_bc");
    }
    net.set_output(out);
    return evaluate(net, {}, cycles(1 << 20)).estimate;
  };
  CHECK(std::abs(chain(true) - 0.4) < 0.01);
  CHECK(std::abs(chain(false) - 0.55) < 0.01);
}

TEST_CASE("netlist builder validates wiring") {
  Netlist net;
  const auto x = net.add_variable("x");
  CHECK_THROWS_AS(net.add_circuit(CircuitSpec{CircuitKind::Mul}, {x}, 0, "bad"), ConfigError);
  CHECK_THROWS_AS(net.add_circuit(CircuitSpec{CircuitKind::Mul}, {x, 5}, 0, "bad"), ConfigError);
  CHECK_THROWS_AS(net.set_output(9), ConfigError);
  CHECK_THROWS_AS(net.add_variable("y", {0.6, 0.2}), DomainError);
}

TEST_CASE("random expressions: scale soundness per wire") {
  testing::ExprGenerator gen(2024);
  const std::uint64_t m = 1 << 18;
  for (int i = 0; i < 15; ++i) {
    const auto inst = gen.next(3, 0.1);
    CAPTURE(inst.text);
    const auto res = evaluate(inst.net, inst.bindings, cycles(m));
    const auto ideal = testing::ideal_streams(inst.net, inst.bindings);
    for (std::size_t id = 0; id < ideal.size(); ++id) {
      const double rate = res.per_node[id].rate;
      REQUIRE(rate >= 0.0);
      REQUIRE(rate <= 1.0);
      const double k = std::ldexp(1.0, static_cast<int>(res.per_node[id].scale));
      CHECK(std::abs(rate - ideal[id]) * k < std::max(0.03, 6 * k * std::sqrt(0.25 / m)));
    }
    CHECK(ideal_value(inst.net, inst.bindings) == doctest::Approx(exact_value(inst.ast, inst.bindings)));
  }
}
