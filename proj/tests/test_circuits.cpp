#include <array>
#include <cmath>

#include "doctest.h"
#include "rpc/circuits.hpp"
#include "rpc/errors.hpp"

using namespace rpc;

namespace {

double rate(CircuitKind kind, double p0, double p1, std::uint64_t cycles = 1 << 20,
            unsigned width = 0) {
  CircuitSpec spec{kind};
  spec.width = width;
  const std::array<Probability, 2> in{Probability(p0), Probability(p1)};
  SimulationConfig cfg;
  cfg.cycles = cycles;
  return measure_rate(spec, in, cfg);
}

}  // namespace

TEST_CASE("kind names round-trip") {
  for (CircuitKind k : all_kinds()) CHECK(parse_kind(kind_name(k)) == k);
  CHECK(all_kinds().size() == 10);
  CHECK(kind_name(CircuitKind::SubCounter) == "sub-counter");
  CHECK_THROWS_AS(parse_kind("divide"), DomainError);
}

TEST_CASE("default widths and start counts") {
  CHECK(CircuitSpec{CircuitKind::DivLfsr}.counter_width() == 8);
  CHECK(CircuitSpec{CircuitKind::SubCounter}.counter_width() == 4);
  CHECK(CircuitSpec{CircuitKind::DivTrff}.start_count() == 128);
  CHECK(CircuitSpec{CircuitKind::Comparator}.start_count() == 128);
  CHECK(CircuitSpec{CircuitKind::DivCounter}.start_count() == 0);
  CHECK(CircuitSpec{CircuitKind::SubCounter}.start_count() == 0);
  CHECK(CircuitSpec{CircuitKind::Mul}.warmup() == 0);
  CHECK(CircuitSpec{CircuitKind::DivCounter}.warmup() == 16 * 256);
}

TEST_CASE("spec validation") {
  CircuitSpec s{CircuitKind::DivLfsr};
  s.width = 17;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = CircuitSpec{CircuitKind::Comparator};
  s.width = 4;
  s.initial_count = 16;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = CircuitSpec{CircuitKind::Mul};
  s.inputs = 1;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.inputs = 5;
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("ideal transfer functions") {
  const std::array<double, 2> a{0.3, 0.6};
  CHECK(ideal_output(CircuitKind::Mul, a) == doctest::Approx(0.18));
  CHECK(ideal_output(CircuitKind::OrAdd, a) == doctest::Approx(0.72));
  CHECK(ideal_output(CircuitKind::MuxAdd, a) == doctest::Approx(0.45));
  CHECK(ideal_output(CircuitKind::DivCounter, a) == doctest::Approx(0.5));
  CHECK(ideal_output(CircuitKind::SubCounter, a) == doctest::Approx(0.3));
  CHECK(ideal_output(CircuitKind::Comparator, a) == 0.0);
  const std::array<double, 2> b{0.6, 0.3};
  CHECK(ideal_output(CircuitKind::DivTrff, b) == 1.0);
  CHECK(ideal_output(CircuitKind::SubDivLfsr, b) == 0.0);
  CHECK(ideal_output(CircuitKind::Comparator, b) == 1.0);
  const std::array<double, 3> c{0.5, 0.5, 0.5};
  CHECK(ideal_output(CircuitKind::Mul, c) == doctest::Approx(0.125));
  CHECK(ideal_output(CircuitKind::OrAdd, c) == doctest::Approx(0.875));
}

TEST_CASE("step output ignores the same bin's inputs") {
  // feedback circuits decide from the state at the start of the bin
  for (CircuitKind k : {CircuitKind::DivCounter, CircuitKind::Comparator}) {
    Circuit a(CircuitSpec{k}, Rng(1));
    Circuit b(CircuitSpec{k}, Rng(1));
    const std::array<Bit, 2> x{true, false}, y{false, true};
    CHECK(a.step(x) == b.step(y));
  }
}

TEST_CASE("counter divider hand trace") {
  Circuit c(CircuitSpec{CircuitKind::DivCounter, 2, 2}, Rng(1));
  CHECK_FALSE(div_counter_step(c, true, true));  // C=0: no output, C -> 1
  CHECK(c.counter()->value() == 1);
  CHECK(div_counter_step(c, false, true));  // C=1: output, z&b -> C=0
  CHECK(c.counter()->value() == 0);
  CHECK_FALSE(div_counter_step(c, false, true));  // saturates at 0
}

TEST_CASE("counter subtractor hand trace") {
  Circuit c(CircuitSpec{CircuitKind::SubCounter}, Rng(1));
  CHECK_FALSE(sub_counter_step(c, true, true));  // coincident pair cancels
  CHECK(c.counter()->value() == 0);
  CHECK(sub_counter_step(c, false, true));  // nothing to inhibit
  CHECK_FALSE(sub_counter_step(c, true, false));
  CHECK(c.counter()->value() == 1);
  CHECK_FALSE(sub_counter_step(c, false, true));  // inhibited
  CHECK(c.counter()->value() == 0);
}

TEST_CASE("comparator state output follows the MSB") {
  CircuitSpec s{CircuitKind::Comparator};
  s.width = 2;
  Circuit c(s, Rng(1));
  CHECK(comparator_state_output(c));  // starts at 2
  comparator_step(c, false, true);
  CHECK_FALSE(comparator_state_output(c));
  comparator_step(c, true, false);
  comparator_step(c, true, false);
  CHECK(comparator_state_output(c));
}

TEST_CASE("named step functions reject mismatched kinds") {
  Circuit c(CircuitSpec{CircuitKind::Mul}, Rng(1));
  CHECK_THROWS_AS(div_counter_step(c, true, true), ConfigError);
  CHECK_THROWS_AS(comparator_state_output(c), ConfigError);
  const std::array<Bit, 3> three{true, true, true};
  CHECK_THROWS_AS(c.step(three), ConfigError);
}

TEST_CASE("exact circuits agree with their ideal rates") {
  const double tol = 4 * std::sqrt(0.25 / (1 << 20));
  CHECK(std::abs(rate(CircuitKind::Mul, 0.5, 0.5) - 0.25) < tol);
  CHECK(std::abs(rate(CircuitKind::OrAdd, 0.4, 0.3) - 0.58) < tol);
  CHECK(std::abs(rate(CircuitKind::MuxAdd, 0.8, 0.2) - 0.5) < tol);
}

TEST_CASE("n-input multiplier and or-adder") {
  CircuitSpec s{CircuitKind::Mul};
  s.inputs = 3;
  const std::array<Probability, 3> in{Probability(0.5), Probability(0.6), Probability(0.7)};
  SimulationConfig cfg;
  const double tol = 4 * std::sqrt(0.25 / cfg.cycles);
  CHECK(std::abs(measure_rate(s, in, cfg) - 0.21) < tol);
  s.kind = CircuitKind::OrAdd;
  CHECK(std::abs(measure_rate(s, in, cfg) - (1 - 0.5 * 0.4 * 0.3)) < tol);
}

TEST_CASE("dividers approximate the quotient") {
  for (CircuitKind k : {CircuitKind::DivLfsr, CircuitKind::DivTrff, CircuitKind::DivCounter}) {
    CAPTURE(kind_name(k));
    CHECK(rate(k, 0.2, 0.5) == doctest::Approx(0.4).epsilon(0.03));
    CHECK(rate(k, 0.6, 0.3) > 0.95);  // quotient above 1 saturates
  }
}

TEST_CASE("subtractors approximate the clipped difference") {
  for (CircuitKind k : {CircuitKind::SubDivLfsr, CircuitKind::SubDivTrff, CircuitKind::SubCounter}) {
    CAPTURE(kind_name(k));
    CHECK(std::abs(rate(k, 0.2, 0.7) - 0.5) < 0.02);
    CHECK(rate(k, 0.7, 0.2) < 0.02);
  }
}

TEST_CASE("comparator step function") {
  CHECK(rate(CircuitKind::Comparator, 0.7, 0.3) > 0.999);
  CHECK(rate(CircuitKind::Comparator, 0.3, 0.7) < 0.001);
}

TEST_CASE("run_circuit is reproducible and seed dependent") {
  CircuitSpec s{CircuitKind::DivTrff};
  const std::array<Probability, 2> in{Probability(0.3), Probability(0.6)};
  SimulationConfig cfg;
  cfg.cycles = 50000;
  const Bitstream a = run_circuit(s, in, cfg);
  const Bitstream b = run_circuit(s, in, cfg);
  CHECK(a == b);
  CHECK(a.size() == 50000);
  cfg.seed = 2;
  CHECK_FALSE(a == run_circuit(s, in, cfg));
  CHECK(double(a.ones()) / a.size() == doctest::Approx(measure_rate(s, in, SimulationConfig{50000, {}, 1})));
}

TEST_CASE("run_circuit rejects a wrong input count") {
  const std::array<Probability, 1> in{Probability(0.3)};
  CHECK_THROWS_AS(run_circuit(CircuitSpec{CircuitKind::Mul}, in, SimulationConfig{}), ConfigError);
}

TEST_CASE("explicit zero warmup starts from the power-up count") {
  CircuitSpec s{CircuitKind::DivCounter};
  const std::array<Probability, 2> in{Probability(1.0), Probability(0.0)};
  SimulationConfig cfg{8, 0, 1};
  const Bitstream out = run_circuit(s, in, cfg);
  CHECK_FALSE(out[0]);
  CHECK(out[1]);
}
